//! Kernel density estimation and its weighted-bootstrap version.
//!
//! With `f_{n,h}(x) = (nh)^{-1} sum_i K((x - X_i)/h)` and
//! `f*_{n,h}(x) = h^{-1} sum_i W_i K((x - X_i)/h)`, the bootstrapped process is
//! `gamma*_n(x) = sqrt(n h^2) (f*_{n,h}(x) - f_{n,h}(x))`.
//!
//! Note the normalization: `gamma*_n(x) = int K((x - s)/h) d alpha*_n(s)`, a
//! kernel-weighted increment of the bootstrapped empirical process over a
//! window of width `2ah`. Summation by parts turns it into
//! `int alpha*_n(x - t h) dK(t)`, which is how the Stieltjes cross-check and
//! [`smoothed_bridge`] are computed.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::empirical::Sample;
use crate::error::{Error, Result};
use crate::gaussian::{compose_with_cdf, BridgePath};
use crate::law::{checked_cdf, Cdf};
use crate::quadrature::{rule_256, rule_8};
use crate::weights::WeightVector;

const KERNEL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelName {
    #[default]
    Epanechnikov,
    Triangular,
    Uniform,
    Biweight,
    Custom,
}

impl KernelName {
    pub fn as_str(self) -> &'static str {
        match self {
            KernelName::Epanechnikov => "epanechnikov",
            KernelName::Triangular => "triangular",
            KernelName::Uniform => "uniform",
            KernelName::Biweight => "biweight",
            KernelName::Custom => "custom",
        }
    }
}

impl fmt::Display for KernelName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for KernelName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "epanechnikov" => Ok(KernelName::Epanechnikov),
            "triangular" => Ok(KernelName::Triangular),
            "uniform" => Ok(KernelName::Uniform),
            "biweight" => Ok(KernelName::Biweight),
            other => Err(Error::Config(format!("unknown kernel `{other}`"))),
        }
    }
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// An interval of `[-a, a]` on which `K` is smooth, with its derivative.
#[derive(Clone)]
pub struct SmoothPiece {
    pub lo: f64,
    pub hi: f64,
    pub derivative: RealFn,
}

impl SmoothPiece {
    pub fn new(lo: f64, hi: f64, derivative: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            lo,
            hi,
            derivative: Arc::new(derivative),
        }
    }
}

impl fmt::Debug for SmoothPiece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SmoothPiece[{}, {}]", self.lo, self.hi)
    }
}

/// A jump of `K` at `at` (the measure `dK` has an atom of mass `jump` there).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub at: f64,
    pub jump: f64,
}

/// A compactly supported, bounded-variation, nonnegative kernel integrating to one.
#[derive(Clone)]
pub struct KernelSpec {
    name: KernelName,
    half_width: f64,
    eval: RealFn,
    pieces: Vec<SmoothPiece>,
    atoms: Vec<Atom>,
    total_variation: f64,
    integral: f64,
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec")
            .field("name", &self.name)
            .field("half_width", &self.half_width)
            .field("pieces", &self.pieces)
            .field("atoms", &self.atoms)
            .field("total_variation", &self.total_variation)
            .field("integral", &self.integral)
            .finish()
    }
}

impl KernelSpec {
    /// `0.75 (1 - u^2)` on `[-1, 1]`.
    pub fn epanechnikov() -> Self {
        Self::builtin(
            KernelName::Epanechnikov,
            1.0,
            vec![
                SmoothPiece::new(-1.0, 0.0, |u| -1.5 * u),
                SmoothPiece::new(0.0, 1.0, |u| -1.5 * u),
            ],
            vec![],
            1.5,
        )
    }

    /// `1 - |u|` on `[-1, 1]`.
    pub fn triangular() -> Self {
        Self::builtin(
            KernelName::Triangular,
            1.0,
            vec![
                SmoothPiece::new(-1.0, 0.0, |_| 1.0),
                SmoothPiece::new(0.0, 1.0, |_| -1.0),
            ],
            vec![],
            2.0,
        )
    }

    /// `1` on `[-1/2, 1/2]`; `dK` is two unit atoms.
    pub fn uniform() -> Self {
        Self::builtin(
            KernelName::Uniform,
            0.5,
            vec![],
            vec![Atom { at: -0.5, jump: 1.0 }, Atom { at: 0.5, jump: -1.0 }],
            2.0,
        )
    }

    /// `(15/16) (1 - u^2)^2` on `[-1, 1]`.
    pub fn biweight() -> Self {
        let d = |u: f64| -3.75 * u * (1.0 - u * u);
        Self::builtin(
            KernelName::Biweight,
            1.0,
            vec![SmoothPiece::new(-1.0, 0.0, d), SmoothPiece::new(0.0, 1.0, d)],
            vec![],
            1.875,
        )
    }

    pub fn by_name(name: KernelName) -> Result<Self> {
        match name {
            KernelName::Epanechnikov => Ok(Self::epanechnikov()),
            KernelName::Triangular => Ok(Self::triangular()),
            KernelName::Uniform => Ok(Self::uniform()),
            KernelName::Biweight => Ok(Self::biweight()),
            KernelName::Custom => Err(Error::InvalidKernel(
                "custom kernels are built with KernelSpec::custom".into(),
            )),
        }
    }

    fn builtin(name: KernelName, a: f64, pieces: Vec<SmoothPiece>, atoms: Vec<Atom>, tv: f64) -> Self {
        let eval: RealFn = match name {
            KernelName::Epanechnikov => Arc::new(epanechnikov),
            KernelName::Triangular => Arc::new(triangular),
            KernelName::Uniform => Arc::new(uniform),
            KernelName::Biweight => Arc::new(biweight),
            KernelName::Custom => unreachable!(),
        };
        let spec = Self {
            name,
            half_width: a,
            eval,
            pieces,
            atoms,
            total_variation: tv,
            integral: 1.0,
        };
        debug_assert!(spec.validate().is_ok());
        spec
    }

    /// A user kernel supported on `[-half_width, half_width]`. `pieces` must
    /// tile the regions where `K` is smooth (splitting where `K'` changes sign
    /// keeps `int |K'|` exact), `atoms` carry its jumps, and
    /// `total_variation` must equal `int |K'| + sum |jump|`.
    pub fn custom(
        half_width: f64,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        pieces: Vec<SmoothPiece>,
        atoms: Vec<Atom>,
        total_variation: f64,
    ) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidKernel(format!(
                "half width {half_width} must be positive"
            )));
        }
        let mut spec = Self {
            name: KernelName::Custom,
            half_width,
            eval: Arc::new(eval),
            pieces,
            atoms,
            total_variation,
            integral: f64::NAN,
        };
        spec.integral = spec.validate()?;
        Ok(spec)
    }

    /// Checks support, sign, normalization and the variation bookkeeping;
    /// returns the quadrature value of `int K`.
    fn validate(&self) -> Result<f64> {
        let a = self.half_width;
        for u in [-2.0 * a, -1.000001 * a, 1.000001 * a, 2.0 * a, 10.0 * a] {
            if self.k(u) != 0.0 {
                return Err(Error::InvalidKernel(format!("K({u}) != 0 outside the support")));
            }
        }
        let mut breaks: Vec<f64> = vec![-a, a];
        for p in &self.pieces {
            if !(p.lo < p.hi && p.lo >= -a && p.hi <= a) {
                return Err(Error::InvalidKernel(format!(
                    "piece [{}, {}] outside support",
                    p.lo, p.hi
                )));
            }
            breaks.extend([p.lo, p.hi]);
        }
        for atom in &self.atoms {
            if !(atom.at >= -a && atom.at <= a) {
                return Err(Error::InvalidKernel(format!("atom at {} outside support", atom.at)));
            }
            breaks.push(atom.at);
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();

        let rule = rule_256();
        let mut integral = 0.0;
        let mut negative = false;
        for w in breaks.windows(2) {
            integral += rule.integrate(w[0], w[1], |u| {
                let v = self.k(u);
                negative |= v < 0.0;
                v
            });
        }
        if negative {
            return Err(Error::InvalidKernel("K takes negative values".into()));
        }
        if (integral - 1.0).abs() > KERNEL_TOLERANCE {
            return Err(Error::InvalidKernel(format!("int K = {integral}, expected 1")));
        }
        let tv = self.variation_from_pieces();
        if (tv - self.total_variation).abs() > KERNEL_TOLERANCE {
            return Err(Error::InvalidKernel(format!(
                "declared total variation {} but pieces and atoms give {tv}",
                self.total_variation
            )));
        }
        Ok(integral)
    }

    fn variation_from_pieces(&self) -> f64 {
        let rule = rule_256();
        let smooth: f64 = self
            .pieces
            .iter()
            .map(|p| rule.integrate(p.lo, p.hi, |u| (p.derivative)(u).abs()))
            .sum();
        smooth + self.atoms.iter().map(|a| a.jump.abs()).sum::<f64>()
    }

    pub fn name(&self) -> KernelName {
        self.name
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn total_variation(&self) -> f64 {
        self.total_variation
    }

    pub fn integral(&self) -> f64 {
        self.integral
    }

    pub fn pieces(&self) -> &[SmoothPiece] {
        &self.pieces
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// `K(u)`.
    #[inline]
    pub fn k(&self, u: f64) -> f64 {
        match self.name {
            KernelName::Epanechnikov => epanechnikov(u),
            KernelName::Triangular => triangular(u),
            KernelName::Uniform => uniform(u),
            KernelName::Biweight => biweight(u),
            KernelName::Custom => (self.eval)(u),
        }
    }

    /// `int g(t) dK(t)`. `breaks` lists points where `g` may be discontinuous;
    /// pieces are split there and integrated with an 8-node rule per
    /// sub-interval (exact when `g` is constant in between and `K'` is a
    /// polynomial of degree <= 15). Without breaks each piece gets the 256-node rule.
    pub fn integrate_against_dk<G: Fn(f64) -> f64>(&self, g: G, breaks: &[f64]) -> f64 {
        let mut total = 0.0;
        for piece in &self.pieces {
            let d = &piece.derivative;
            if breaks.is_empty() {
                total += rule_256().integrate(piece.lo, piece.hi, |t| g(t) * d(t));
                continue;
            }
            let mut cuts: Vec<f64> = breaks
                .iter()
                .copied()
                .filter(|&b| b > piece.lo && b < piece.hi)
                .collect();
            cuts.sort_by(f64::total_cmp);
            let mut lo = piece.lo;
            for hi in cuts.into_iter().chain(std::iter::once(piece.hi)) {
                if hi > lo {
                    total += rule_8().integrate(lo, hi, |t| g(t) * d(t));
                }
                lo = hi;
            }
        }
        total + self.atoms.iter().map(|a| g(a.at) * a.jump).sum::<f64>()
    }
}

#[inline]
fn epanechnikov(u: f64) -> f64 {
    if u.abs() <= 1.0 {
        0.75 * (1.0 - u * u)
    } else {
        0.0
    }
}

#[inline]
fn triangular(u: f64) -> f64 {
    let a = u.abs();
    if a <= 1.0 {
        1.0 - a
    } else {
        0.0
    }
}

#[inline]
fn uniform(u: f64) -> f64 {
    if u.abs() <= 0.5 {
        1.0
    } else {
        0.0
    }
}

#[inline]
fn biweight(u: f64) -> f64 {
    if u.abs() <= 1.0 {
        let v = 1.0 - u * u;
        0.9375 * v * v
    } else {
        0.0
    }
}

/// Total variation recomputed from the derivative pieces and atoms; errors if
/// it disagrees with the stored value.
pub fn kernel_total_variation(kernel: &KernelSpec) -> Result<f64> {
    let tv = kernel.variation_from_pieces();
    if (tv - kernel.total_variation).abs() > KERNEL_TOLERANCE {
        return Err(Error::InvalidKernel(format!(
            "stored total variation {} disagrees with pieces ({tv})",
            kernel.total_variation
        )));
    }
    Ok(tv)
}

/// Either a fixed bandwidth or `h(n) = c n^{-gamma}` with `0 < gamma < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BandwidthRule {
    Fixed { h: f64 },
    Power { c: f64, gamma: f64 },
}

impl Default for BandwidthRule {
    /// `h(n) = n^{-1/5}`.
    fn default() -> Self {
        BandwidthRule::Power { c: 1.0, gamma: 0.2 }
    }
}

impl BandwidthRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BandwidthRule::Fixed { h } if h.is_finite() && h > 0.0 => Ok(()),
            BandwidthRule::Power { c, gamma } if c.is_finite() && c > 0.0 && gamma > 0.0 && gamma < 1.0 => Ok(()),
            other => Err(Error::Config(format!("invalid bandwidth rule {other:?}"))),
        }
    }

    pub fn bandwidth(&self, n: usize) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            BandwidthRule::Fixed { h } => h,
            BandwidthRule::Power { c, gamma } => c * (n.max(1) as f64).powf(-gamma),
        })
    }
}

fn check_bandwidth(h: f64) -> Result<()> {
    if h.is_finite() && h > 0.0 {
        Ok(())
    } else {
        Err(Error::param("h", format!("bandwidth must be positive, got {h}")))
    }
}

fn check_sorted(grid: &[f64]) -> Result<()> {
    match grid
        .windows(2)
        .position(|w| w[0].partial_cmp(&w[1]).is_none_or(|o| o == std::cmp::Ordering::Greater))
    {
        Some(i) => Err(Error::UnsortedGrid { index: i + 1 }),
        None => Ok(()),
    }
}

/// Kernel values `K((x - X_j)/h)` for every grid point and every sorted
/// observation within reach, computed once and reused across bootstrap draws.
#[derive(Debug, Clone)]
pub struct KdeDesign {
    n: usize,
    h: f64,
    /// Per grid point: first sorted index within reach and the kernel values.
    rows: Vec<(usize, Vec<f64>)>,
    order: Vec<usize>,
    base: Vec<f64>,
}

impl KdeDesign {
    pub fn new(sample: &Sample, kernel: &KernelSpec, h: f64, x_grid: &[f64]) -> Result<Self> {
        check_bandwidth(h)?;
        check_sorted(x_grid)?;
        let xs = sample.sorted();
        let reach = kernel.half_width() * h;
        let rows: Vec<(usize, Vec<f64>)> = x_grid
            .iter()
            .map(|&x| {
                let lo = xs.partition_point(|&v| v < x - reach);
                let hi = xs.partition_point(|&v| v <= x + reach);
                (lo, xs[lo..hi].iter().map(|&v| kernel.k((x - v) / h)).collect())
            })
            .collect();
        let n = sample.len();
        let inv_n = 1.0 / n as f64;
        let base = rows
            .iter()
            .map(|(_, ks)| ks.iter().map(|k| inv_n * k).sum::<f64>() / h)
            .collect();
        Ok(Self {
            n,
            h,
            rows,
            order: sample.order().to_vec(),
            base,
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    /// `f_{n,h}` on the grid.
    pub fn estimate(&self) -> &[f64] {
        &self.base
    }

    fn sorted_weights(&self, weights: &WeightVector) -> Result<Vec<f64>> {
        if weights.len() != self.n {
            return Err(Error::LengthMismatch {
                weights: weights.len(),
                sample: self.n,
            });
        }
        let w = weights.as_slice();
        Ok(self.order.iter().map(|&i| w[i]).collect())
    }

    fn bootstrap_sorted<'a>(&'a self, ws: &'a [f64]) -> impl Iterator<Item = f64> + 'a {
        let h = self.h;
        self.rows
            .iter()
            .map(move |(lo, ks)| ks.iter().zip(&ws[*lo..]).map(|(k, w)| w * k).sum::<f64>() / h)
    }

    /// `f*_{n,h}` on the grid.
    pub fn bootstrap(&self, weights: &WeightVector) -> Result<Vec<f64>> {
        let ws = self.sorted_weights(weights)?;
        Ok(self.bootstrap_sorted(&ws).collect())
    }

    /// `gamma*_n` on the grid.
    pub fn gamma_star(&self, weights: &WeightVector) -> Result<Vec<f64>> {
        let ws = self.sorted_weights(weights)?;
        let scale = (self.n as f64 * self.h * self.h).sqrt();
        Ok(self
            .bootstrap_sorted(&ws)
            .zip(&self.base)
            .map(|(fs, f)| scale * (fs - f))
            .collect())
    }

    /// `max_grid |gamma*_n|`.
    pub fn gamma_sup(&self, weights: &WeightVector) -> Result<f64> {
        let ws = self.sorted_weights(weights)?;
        let scale = (self.n as f64 * self.h * self.h).sqrt();
        Ok(self
            .bootstrap_sorted(&ws)
            .zip(&self.base)
            .fold(0.0, |m, (fs, f)| m.max((scale * (fs - f)).abs())))
    }
}

/// `f_{n,h}` on a sorted grid.
pub fn kde_estimate(sample: &Sample, kernel: &KernelSpec, h: f64, x_grid: &[f64]) -> Result<Vec<f64>> {
    Ok(KdeDesign::new(sample, kernel, h, x_grid)?.base)
}

/// `f*_{n,h}` on a sorted grid.
pub fn bootstrap_kde(
    sample: &Sample,
    weights: &WeightVector,
    kernel: &KernelSpec,
    h: f64,
    x_grid: &[f64],
) -> Result<Vec<f64>> {
    KdeDesign::new(sample, kernel, h, x_grid)?.bootstrap(weights)
}

/// `gamma*_n = sqrt(n h^2) (f*_{n,h} - f_{n,h})` on a sorted grid.
pub fn gamma_star(
    sample: &Sample,
    weights: &WeightVector,
    kernel: &KernelSpec,
    h: f64,
    x_grid: &[f64],
) -> Result<Vec<f64>> {
    KdeDesign::new(sample, kernel, h, x_grid)?.gamma_star(weights)
}

/// `gamma*_n` through the Stieltjes form `int alpha*_n(x - t h) dK(t)`.
pub fn gamma_star_stieltjes(
    sample: &Sample,
    weights: &WeightVector,
    kernel: &KernelSpec,
    h: f64,
    x_grid: &[f64],
) -> Result<Vec<f64>> {
    check_bandwidth(h)?;
    check_sorted(x_grid)?;
    if weights.len() != sample.len() {
        return Err(Error::LengthMismatch {
            weights: weights.len(),
            sample: sample.len(),
        });
    }
    let n = sample.len() as f64;
    let inv_n = 1.0 / n;
    let jumps = sample.distinct_values();
    let ws = sample.weights_in_sorted_order(weights.as_slice());
    // signed cumulative difference F*_n - F_n at each distinct value
    let mut diff = Vec::with_capacity(jumps.len());
    let mut running = 0.0;
    let mut j = 0;
    let xs = sample.sorted();
    for &v in &jumps {
        while j < xs.len() && xs[j] == v {
            running += ws[j] - inv_n;
            j += 1;
        }
        diff.push(running);
    }
    let alpha = |s: f64| -> f64 {
        match jumps.partition_point(|&x| x <= s) {
            0 => 0.0,
            k => n.sqrt() * diff[k - 1],
        }
    };
    let a = kernel.half_width();
    Ok(x_grid
        .iter()
        .map(|&x| {
            let lo = jumps.partition_point(|&v| v < x - a * h);
            let hi = jumps.partition_point(|&v| v <= x + a * h);
            let breaks: Vec<f64> = jumps[lo..hi].iter().map(|&v| (x - v) / h).collect();
            kernel.integrate_against_dk(|t| alpha(x - t * h), &breaks)
        })
        .collect())
}

/// `int K((x - s)/h) dB(F(s))`, evaluated as `int B(F(x - t h)) dK(t)` with
/// the 256-node rule per smooth piece plus the atoms of `dK`. Needs a path
/// grid with gaps at most `h / 64`.
pub fn smoothed_bridge(
    path: &BridgePath,
    true_cdf: &dyn Cdf,
    kernel: &KernelSpec,
    h: f64,
    x_grid: &[f64],
) -> Result<Vec<f64>> {
    check_bandwidth(h)?;
    check_sorted(x_grid)?;
    let required = h / 64.0;
    let gap = path.max_gap();
    if gap > required {
        return Err(Error::CoarseGrid { spacing: gap, required });
    }
    x_grid
        .iter()
        .map(|&x| {
            // surface cdf errors before integrating
            checked_cdf(true_cdf, x)?;
            let err = std::cell::RefCell::new(None);
            let v = kernel.integrate_against_dk(
                |t| match checked_cdf(true_cdf, x - t * h) {
                    Ok(u) => path.at(u),
                    Err(e) => {
                        err.borrow_mut().get_or_insert(e);
                        0.0
                    }
                },
                &[],
            );
            match err.into_inner() {
                Some(e) => Err(e),
                None => Ok(v),
            }
        })
        .collect()
}

/// `B(F(x)) int K`.
pub fn gamma_limit(path: &BridgePath, true_cdf: &dyn Cdf, kernel: &KernelSpec, x_grid: &[f64]) -> Result<Vec<f64>> {
    let composed = compose_with_cdf(path, true_cdf, x_grid)?;
    let scale = kernel.integral();
    Ok(composed.into_iter().map(|v| v * scale).collect())
}

/// Evaluation grid covering `[min - a h, max + a h]` with `points` nodes.
pub fn padded_grid(sample: &Sample, kernel: &KernelSpec, h: f64, points: usize) -> Vec<f64> {
    let pad = kernel.half_width() * h;
    let (lo, hi) = (sample.min() - pad, sample.max() + pad);
    let m = points.max(2) - 1;
    (0..=m).map(|k| lo + (hi - lo) * k as f64 / m as f64).collect()
}
