//! Bootstrap confidence bands for the distribution function and for the density.
//!
//! The CDF band radius is the smallest `z` with
//! `(1/N) #{j : psi_j <= z} >= 1 - alpha`, where `psi_j` is the sup-norm of the
//! `j`-th bootstrapped empirical process; that is the `ceil(N(1 - alpha))`-th
//! order statistic of the `psi_j`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::empirical::{ecdf, Sample, StepFunction};
use crate::error::{Error, Result};
use crate::kde::{BandwidthRule, KdeDesign, KernelSpec};
use crate::ks::ks_distance_to_cdf;
use crate::law::{checked_cdf, Cdf, ContinuousLaw};
use crate::parallel::Workers;
use crate::rng::SeedPath;
use crate::weights::{draw_weight_vector, WeightScheme};

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::param("alpha", format!("must lie in (0, 1), got {alpha}")))
    }
}

/// 0-based index of the `ceil(N(1 - alpha))`-th smallest of `N` values.
pub fn order_statistic_index(n_boot: usize, alpha: f64) -> Result<usize> {
    check_alpha(alpha)?;
    if n_boot == 0 {
        return Err(Error::param("N", "need at least one bootstrap replicate"));
    }
    // guard against 1 - alpha landing a hair above an integer multiple of 1/N
    let rank = (n_boot as f64 * (1.0 - alpha) - 1e-9).ceil() as usize;
    if rank == 0 || rank > n_boot {
        return Err(Error::param(
            "N",
            format!("{n_boot} replicates are too few for alpha = {alpha}"),
        ));
    }
    Ok(rank - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandEstimate {
    pub radius: f64,
    pub alpha: f64,
    pub n_boot: usize,
    /// The `psi_j`, sorted ascending.
    pub psi: Vec<f64>,
}

impl BandEstimate {
    fn from_psi(mut psi: Vec<f64>, alpha: f64) -> Result<Self> {
        let k = order_statistic_index(psi.len(), alpha)?;
        psi.sort_by(f64::total_cmp);
        Ok(Self {
            radius: psi[k],
            alpha,
            n_boot: psi.len(),
            psi,
        })
    }

    /// Radius at another level from the same draws.
    pub fn radius_at(&self, alpha: f64) -> Result<f64> {
        Ok(self.psi[order_statistic_index(self.n_boot, alpha)?])
    }
}

/// Draws `psi_j = sup_t |alpha*_{n,j}(t)|` for `j = 1..=N`, replicate `j` on
/// substream `seeds / j`.
pub fn bootstrap_sup_draws(
    sample: &Sample,
    scheme: &WeightScheme,
    n_boot: usize,
    seeds: &SeedPath,
    workers: &Workers,
) -> Result<Vec<f64>> {
    let root_n = (sample.len() as f64).sqrt();
    workers.try_map(n_boot, |j| {
        let mut rng = seeds.child(j as u64 + 1).stream();
        let w = draw_weight_vector(scheme, sample.len(), &mut rng)?;
        Ok(root_n * sample.sup_difference_unchecked(w.as_slice()))
    })
}

pub fn estimate_band_radius(
    sample: &Sample,
    scheme: &WeightScheme,
    n_boot: usize,
    alpha: f64,
    seeds: &SeedPath,
    workers: &Workers,
) -> Result<BandEstimate> {
    order_statistic_index(n_boot, alpha)?;
    let psi = bootstrap_sup_draws(sample, scheme, n_boot, seeds, workers)?;
    BandEstimate::from_psi(psi, alpha)
}

/// `F_n +- radius / sqrt(n)`, clipped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfBand {
    pub lower: StepFunction,
    pub center: StepFunction,
    pub upper: StepFunction,
    pub radius: f64,
    pub n: usize,
}

impl CdfBand {
    /// CSV with columns `t,lower,fn,upper`, one row per jump point.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,lower,fn,upper")?;
        let rows = self
            .center
            .jump_points()
            .iter()
            .zip(self.lower.values())
            .zip(self.center.values())
            .zip(self.upper.values());
        for (((t, lo), f), hi) in rows {
            writeln!(out, "{t},{lo},{f},{hi}")?;
        }
        Ok(())
    }
}

pub fn cdf_confidence_band(sample: &Sample, radius: f64) -> Result<CdfBand> {
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::param("radius", format!("must be nonnegative, got {radius}")));
    }
    let center = ecdf(sample);
    let half = radius / (sample.len() as f64).sqrt();
    let jumps = center.jump_points().to_vec();
    let lower = center.values().iter().map(|v| (v - half).max(0.0)).collect();
    let upper = center.values().iter().map(|v| (v + half).min(1.0)).collect();
    Ok(CdfBand {
        lower: StepFunction::new(0.0, jumps.clone(), lower)?,
        upper: StepFunction::new(half.min(1.0), jumps, upper)?,
        center,
        radius,
        n: sample.len(),
    })
}

/// `sup_t sqrt(n) |F_n(t) - F(t)|` for continuous `F`, exact.
pub fn kolmogorov_statistic(sample: &Sample, true_cdf: &dyn Cdf) -> Result<f64> {
    let d = ks_distance_to_cdf(sample.sorted(), |x| checked_cdf(true_cdf, x))?;
    Ok((sample.len() as f64).sqrt() * d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub n: usize,
    pub n_boot: usize,
    pub alpha: f64,
    pub nominal: f64,
    pub reps: usize,
    pub covered: usize,
    pub coverage: f64,
    pub standard_error: f64,
    pub mean_radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_override: Option<f64>,
}

/// Fraction of `reps` fresh samples whose band `F_n +- radius/sqrt(n)` contains `F`.
///
/// Replicate `r` draws its sample from `seeds / r / 0` and its bootstrap
/// weights from `seeds / r / 1 / j`. `radius_override` replaces the bootstrap
/// radius (diagnostics).
#[allow(clippy::too_many_arguments)]
pub fn coverage_experiment(
    law: &ContinuousLaw,
    n: usize,
    scheme: &WeightScheme,
    n_boot: usize,
    alpha: f64,
    reps: usize,
    seeds: &SeedPath,
    radius_override: Option<f64>,
    workers: &Workers,
) -> Result<CoverageReport> {
    law.validate()?;
    order_statistic_index(n_boot, alpha)?;
    if reps < 100 {
        return Err(Error::param(
            "reps",
            "coverage experiments need at least 100 repetitions",
        ));
    }
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let single = Workers::single();
    let outcomes = workers.try_map(reps, |r| -> Result<(bool, f64)> {
        let rep = seeds.child(r as u64);
        let sample = Sample::new(law.sample_n(n, &mut rep.child(0).stream()))?;
        let radius = match radius_override {
            Some(radius) => radius,
            None => estimate_band_radius(&sample, scheme, n_boot, alpha, &rep.child(1), &single)?.radius,
        };
        Ok((kolmogorov_statistic(&sample, law)? <= radius, radius))
    })?;
    let covered = outcomes.iter().filter(|(c, _)| *c).count();
    let coverage = covered as f64 / reps as f64;
    Ok(CoverageReport {
        n,
        n_boot,
        alpha,
        nominal: 1.0 - alpha,
        reps,
        covered,
        coverage,
        standard_error: (coverage * (1.0 - coverage) / reps as f64).sqrt(),
        mean_radius: outcomes.iter().map(|(_, r)| r).sum::<f64>() / reps as f64,
        radius_override,
    })
}

/// Pointwise band `f_{n,h} +- radius / sqrt(n h^2)` floored at zero, with the
/// radius read off the sup-norms of `gamma*_n` over `N` weight draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeBand {
    pub x: Vec<f64>,
    pub lower: Vec<f64>,
    pub estimate: Vec<f64>,
    pub upper: Vec<f64>,
    pub radius: f64,
    pub bandwidth: f64,
    pub alpha: f64,
    pub n_boot: usize,
    pub psi: Vec<f64>,
}

impl KdeBand {
    /// CSV with columns `x,lower,f,upper`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,lower,f,upper")?;
        for i in 0..self.x.len() {
            writeln!(
                out,
                "{},{},{},{}",
                self.x[i], self.lower[i], self.estimate[i], self.upper[i]
            )?;
        }
        Ok(())
    }
}

/// `sup_x |gamma*_n(x)|` over the design grid for `j = 1..=N`.
pub fn bootstrap_gamma_sup_draws(
    design: &KdeDesign,
    n: usize,
    scheme: &WeightScheme,
    n_boot: usize,
    seeds: &SeedPath,
    workers: &Workers,
) -> Result<Vec<f64>> {
    workers.try_map(n_boot, |j| {
        let mut rng = seeds.child(j as u64 + 1).stream();
        let w = draw_weight_vector(scheme, n, &mut rng)?;
        design.gamma_sup(&w)
    })
}

#[allow(clippy::too_many_arguments)]
pub fn kde_confidence_band(
    sample: &Sample,
    kernel: &KernelSpec,
    bandwidth: &BandwidthRule,
    scheme: &WeightScheme,
    n_boot: usize,
    alpha: f64,
    x_grid: &[f64],
    seeds: &SeedPath,
    workers: &Workers,
) -> Result<KdeBand> {
    order_statistic_index(n_boot, alpha)?;
    let n = sample.len();
    let h = bandwidth.bandwidth(n)?;
    let design = KdeDesign::new(sample, kernel, h, x_grid)?;
    let psi = bootstrap_gamma_sup_draws(&design, n, scheme, n_boot, seeds, workers)?;
    let est = BandEstimate::from_psi(psi, alpha)?;
    let half = est.radius / (n as f64 * h * h).sqrt();
    let estimate = design.estimate().to_vec();
    Ok(KdeBand {
        x: x_grid.to_vec(),
        lower: estimate.iter().map(|f| (f - half).max(0.0)).collect(),
        upper: estimate.iter().map(|f| f + half).collect(),
        estimate,
        radius: est.radius,
        bandwidth: h,
        alpha,
        n_boot,
        psi: est.psi,
    })
}
