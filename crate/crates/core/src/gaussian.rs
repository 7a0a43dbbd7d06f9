//! Gaussian reference processes: Brownian bridges, Kiefer fields, the bridge
//! composed with a distribution function, its modulus of continuity, and the
//! Kolmogorov law of `sup |B|`.

use std::collections::VecDeque;
use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::law::{checked_cdf, Cdf};

/// Default grid size (intervals) for bridge sup statistics.
pub const DEFAULT_BRIDGE_INTERVALS: usize = 1 << 12;
/// Default grid size (intervals) for modulus experiments.
pub const DEFAULT_MODULUS_INTERVALS: usize = 1 << 16;

const KOLMOGOROV_DEGENERATE_BELOW: f64 = 0.02;
const KOLMOGOROV_MAX_TERMS: usize = 100;
const QUANTILE_BRACKET: (f64, f64) = (0.02, 5.0);
const QUANTILE_TOLERANCE: f64 = 1e-10;

/// `m + 1` equispaced points `0, 1/m, ..., 1`.
pub fn uniform_grid(intervals: usize) -> Vec<f64> {
    let m = intervals.max(1);
    (0..=m).map(|k| k as f64 / m as f64).collect()
}

fn check_unit_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::MalformedGrid("need at least the two endpoints".into()));
    }
    if grid[0] != 0.0 || grid[grid.len() - 1] != 1.0 {
        return Err(Error::MalformedGrid("grid must start at 0 and end at 1".into()));
    }
    if let Some(i) = grid
        .windows(2)
        .position(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::MalformedGrid(format!(
            "grid not strictly increasing at position {}",
            i + 1
        )));
    }
    Ok(())
}

/// Fills `out` with a bridge on `grid` as `W(t) - t W(1)` from exact Gaussian increments.
fn fill_bridge<R: Rng + ?Sized>(grid: &[f64], rng: &mut R, out: &mut [f64]) {
    let mut w = 0.0;
    out[0] = 0.0;
    for k in 1..grid.len() {
        let z: f64 = StandardNormal.sample(rng);
        w += (grid[k] - grid[k - 1]).sqrt() * z;
        out[k] = w;
    }
    let w1 = out[grid.len() - 1];
    for (v, t) in out.iter_mut().zip(grid) {
        *v -= t * w1;
    }
}

/// A Brownian bridge sampled on a grid of `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgePath {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl BridgePath {
    /// Wraps given values (e.g. a synthetic path); endpoints must be pinned at 0.
    pub fn from_values(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_unit_grid(&grid)?;
        if values.len() != grid.len() {
            return Err(Error::MalformedGrid("one value per grid point required".into()));
        }
        if values[0] != 0.0 || values[values.len() - 1] != 0.0 {
            return Err(Error::MalformedGrid("bridge values must vanish at 0 and 1".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Linear interpolation at `u`; exactly 0 for `u <= 0` or `u >= 1`.
    pub fn at(&self, u: f64) -> f64 {
        if u <= 0.0 || u >= 1.0 {
            return 0.0;
        }
        let k = self.grid.partition_point(|&g| g <= u);
        let (g0, g1) = (self.grid[k - 1], self.grid[k]);
        let (v0, v1) = (self.values[k - 1], self.values[k]);
        v0 + (v1 - v0) * (u - g0) / (g1 - g0)
    }

    /// `max_k |B(t_k)|` over the grid.
    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_gap(&self) -> f64 {
        self.grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Two-column CSV `grid,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "grid,value")?;
        for (t, v) in self.grid.iter().zip(&self.values) {
            writeln!(out, "{t},{v}")?;
        }
        Ok(())
    }
}

pub fn sample_bridge<R: Rng + ?Sized>(grid: &[f64], rng: &mut R) -> Result<BridgePath> {
    check_unit_grid(grid)?;
    let mut values = vec![0.0; grid.len()];
    fill_bridge(grid, rng, &mut values);
    Ok(BridgePath {
        grid: grid.to_vec(),
        values,
    })
}

/// Kiefer field on `grid x {1, ..., k_max}`: row `k` is the sum of `k`
/// independent bridges, so `Cov(K(s, j), K(t, k)) = (min(s,t) - st) min(j, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KieferField {
    grid: Vec<f64>,
    k_max: usize,
    values: Vec<f64>,
}

impl KieferField {
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// `K(., k)` for `k` in `1..=k_max`.
    pub fn row(&self, k: usize) -> &[f64] {
        assert!(
            (1..=self.k_max).contains(&k),
            "row index {k} outside 1..={}",
            self.k_max
        );
        let m = self.grid.len();
        &self.values[(k - 1) * m..k * m]
    }

    /// `max_k max_t |K(t, k)|`.
    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn sample_kiefer<R: Rng + ?Sized>(grid: &[f64], k_max: usize, rng: &mut R) -> Result<KieferField> {
    check_unit_grid(grid)?;
    if k_max == 0 {
        return Err(Error::param("k_max", "need k_max >= 1"));
    }
    let m = grid.len();
    let mut values = vec![0.0; k_max * m];
    let mut bridge = vec![0.0; m];
    for k in 0..k_max {
        fill_bridge(grid, rng, &mut bridge);
        let (done, rest) = values.split_at_mut(k * m);
        let row = &mut rest[..m];
        if k == 0 {
            row.copy_from_slice(&bridge);
        } else {
            let prev = &done[(k - 1) * m..];
            for ((r, p), b) in row.iter_mut().zip(prev).zip(&bridge) {
                *r = p + b;
            }
        }
    }
    Ok(KieferField {
        grid: grid.to_vec(),
        k_max,
        values,
    })
}

/// `max_{k <= k_max} max_t |K(t, k)|` without materializing the field. Uses
/// the same draws, in the same order, as [`sample_kiefer`].
pub fn kiefer_sup_max<R: Rng + ?Sized>(grid: &[f64], k_max: usize, rng: &mut R) -> Result<f64> {
    check_unit_grid(grid)?;
    if k_max == 0 {
        return Err(Error::param("k_max", "need k_max >= 1"));
    }
    let m = grid.len();
    let mut row = vec![0.0; m];
    let mut bridge = vec![0.0; m];
    let mut best = 0.0f64;
    for _ in 0..k_max {
        fill_bridge(grid, rng, &mut bridge);
        for (r, b) in row.iter_mut().zip(&bridge) {
            *r += b;
            best = best.max(r.abs());
        }
    }
    Ok(best)
}

/// `P(sup_{0<=t<=1} |B(t)| <= x)`.
///
/// Uses the theta-function form `sqrt(2 pi)/x sum_k exp(-(2k-1)^2 pi^2 / (8 x^2))`
/// below `x = 1`, where the alternating series converges slowly, and
/// `1 - 2 sum_k (-1)^{k+1} exp(-2 k^2 x^2)` above.
pub fn kolmogorov_cdf(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::param("x", format!("must be nonnegative, got {x}")));
    }
    if x <= KOLMOGOROV_DEGENERATE_BELOW {
        return Ok(0.0);
    }
    let value = if x < 1.0 {
        let scale = std::f64::consts::PI * std::f64::consts::PI / (8.0 * x * x);
        let mut sum = 0.0;
        for k in 1..=KOLMOGOROV_MAX_TERMS {
            let odd = (2 * k - 1) as f64;
            let term = (-odd * odd * scale).exp();
            sum += term;
            if term < 1e-16 * sum.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        (2.0 * std::f64::consts::PI).sqrt() / x * sum
    } else {
        let mut sum = 0.0;
        for k in 1..=KOLMOGOROV_MAX_TERMS {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * x * x).exp();
            sum += if k % 2 == 1 { term } else { -term };
            if term < 1e-16 {
                break;
            }
        }
        1.0 - 2.0 * sum
    };
    Ok(value.clamp(0.0, 1.0))
}

/// Inverse of [`kolmogorov_cdf`] by bisection on `[0.02, 5]`.
pub fn kolmogorov_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param("p", format!("must lie in (0, 1), got {p}")));
    }
    let (mut lo, mut hi) = QUANTILE_BRACKET;
    while hi - lo > QUANTILE_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if kolmogorov_cdf(mid)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `B(F(t))` on a sorted grid of `t`, by linear interpolation of the path.
pub fn compose_with_cdf(path: &BridgePath, true_cdf: &dyn Cdf, t_grid: &[f64]) -> Result<Vec<f64>> {
    if let Some(i) = t_grid
        .windows(2)
        .position(|w| w[0].partial_cmp(&w[1]).is_none_or(|o| o == std::cmp::Ordering::Greater))
    {
        return Err(Error::UnsortedGrid { index: i + 1 });
    }
    t_grid.iter().map(|&t| Ok(path.at(checked_cdf(true_cdf, t)?))).collect()
}

/// `sup_{|u - v| <= delta} |B(u) - B(v)| / sqrt(2 delta log(1/delta))`.
///
/// Needs a uniform grid with spacing at most `delta / 16`. The sup over pairs
/// within `delta` equals the largest range (max - min) over sliding windows of
/// `floor(delta / spacing) + 1` consecutive points; monotone deques give it in
/// linear time.
pub fn modulus_statistic(path: &BridgePath, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::param("delta", format!("must lie in (0, 1/2], got {delta}")));
    }
    let m = path.grid.len() - 1;
    let spacing = 1.0 / m as f64;
    let uniform = path
        .grid
        .iter()
        .enumerate()
        .all(|(k, &g)| (g - k as f64 * spacing).abs() <= 1e-9 * spacing.max(1e-300) + 1e-15);
    if !uniform {
        return Err(Error::MalformedGrid("modulus statistic needs a uniform grid".into()));
    }
    let required = delta / 16.0;
    if spacing > required * (1.0 + 1e-12) {
        return Err(Error::CoarseGrid { spacing, required });
    }
    let width = ((delta / spacing) * (1.0 + 1e-12)).floor() as usize;

    let v = &path.values;
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best = 0.0f64;
    for j in 0..v.len() {
        while maxq.back().is_some_and(|&i| v[i] <= v[j]) {
            maxq.pop_back();
        }
        maxq.push_back(j);
        while minq.back().is_some_and(|&i| v[i] >= v[j]) {
            minq.pop_back();
        }
        minq.push_back(j);
        // window [j - width, j]
        while maxq.front().is_some_and(|&i| i + width < j) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&i| i + width < j) {
            minq.pop_front();
        }
        best = best.max(v[*maxq.front().unwrap()] - v[*minq.front().unwrap()]);
    }
    Ok(best / (2.0 * delta * (1.0 / delta).ln()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_substream;

    /// Alternating series with a fixed number of terms, written out separately
    /// from the library routine.
    fn kolmogorov_series(x: f64, terms: usize) -> f64 {
        let mut s = 0.0;
        for k in 1..=terms {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            s += sign * (-2.0 * (k * k) as f64 * x * x).exp();
        }
        1.0 - 2.0 * s
    }

    #[test]
    fn bridge_endpoints_and_determinism() {
        let grid = uniform_grid(64);
        let a = sample_bridge(&grid, &mut derive_substream(1, &[2])).unwrap();
        let b = sample_bridge(&grid, &mut derive_substream(1, &[2])).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.values()[0], 0.0);
        assert_eq!(*a.values().last().unwrap(), 0.0);
    }

    #[test]
    fn malformed_grids_rejected() {
        let mut rng = derive_substream(0, &[]);
        assert!(sample_bridge(&[0.0, 0.5], &mut rng).is_err());
        assert!(sample_bridge(&[0.0, 0.5, 0.5, 1.0], &mut rng).is_err());
        assert!(sample_kiefer(&[0.1, 1.0], 2, &mut rng).is_err());
        assert!(sample_kiefer(&[0.0, 1.0], 0, &mut rng).is_err());
    }

    #[test]
    fn bridge_variance_and_covariance() {
        let grid = [0.0, 0.25, 0.5, 0.75, 1.0];
        let paths = 10_000;
        let (mut v_half, mut c) = (0.0, 0.0);
        for r in 0..paths {
            let p = sample_bridge(&grid, &mut derive_substream(10, &[r])).unwrap();
            v_half += p.values()[2] * p.values()[2];
            c += p.values()[1] * p.values()[3];
        }
        v_half /= paths as f64;
        c /= paths as f64;
        assert!(
            (v_half - 0.25).abs() < 3.0 * 0.25 * 2f64.sqrt() / (paths as f64).sqrt(),
            "{v_half}"
        );
        assert!((c - 0.0625).abs() < 0.01, "{c}");
    }

    #[test]
    fn kiefer_covariance_structure() {
        let grid = [0.0, 0.5, 1.0];
        let fields = 10_000;
        let (mut var4, mut cross, mut v1, mut v21) = (0.0, 0.0, 0.0, 0.0);
        for r in 0..fields {
            let f = sample_kiefer(&grid, 4, &mut derive_substream(11, &[r])).unwrap();
            let k1 = f.row(1)[1];
            let k2 = f.row(2)[1];
            let k4 = f.row(4)[1];
            var4 += k4 * k4;
            cross += k1 * (k2 - k1);
            v1 += k1 * k1;
            v21 += (k2 - k1) * (k2 - k1);
        }
        let nf = fields as f64;
        assert!((var4 / nf - 1.0).abs() < 0.06, "{}", var4 / nf);
        let rho = cross / (v1 * v21).sqrt();
        assert!(rho.abs() < 0.03, "{rho}");
    }

    #[test]
    fn kiefer_single_row_is_a_bridge() {
        let grid = uniform_grid(16);
        let f = sample_kiefer(&grid, 1, &mut derive_substream(4, &[])).unwrap();
        let b = sample_bridge(&grid, &mut derive_substream(4, &[])).unwrap();
        assert_eq!(f.row(1), b.values());
    }

    #[test]
    fn streaming_kiefer_matches_field() {
        let grid = uniform_grid(32);
        let f = sample_kiefer(&grid, 9, &mut derive_substream(5, &[1])).unwrap();
        let s = kiefer_sup_max(&grid, 9, &mut derive_substream(5, &[1])).unwrap();
        assert_eq!(f.sup_abs(), s);
        for k in 1..=9 {
            assert_eq!(f.row(k)[0], 0.0);
            assert_eq!(*f.row(k).last().unwrap(), 0.0);
        }
    }

    #[test]
    fn kolmogorov_reference_values() {
        assert_eq!(kolmogorov_cdf(0.0).unwrap(), 0.0);
        let oracle = kolmogorov_series(0.5, 4);
        assert!((oracle - 0.036055).abs() < 1e-5);
        assert!((kolmogorov_cdf(0.5).unwrap() - kolmogorov_series(0.5, 60)).abs() < 1e-14);
        assert!((kolmogorov_cdf(0.5).unwrap() - 0.036055).abs() < 1e-5);
        assert!((kolmogorov_cdf(5.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(kolmogorov_cdf(-0.1).is_err());
        // both branches agree where they meet
        for x in [0.8, 0.95, 1.0, 1.2] {
            assert!((kolmogorov_cdf(x).unwrap() - kolmogorov_series(x, 60)).abs() < 1e-14);
        }
    }

    #[test]
    fn kolmogorov_cdf_monotone() {
        let mut prev = 0.0;
        for k in 0..1000 {
            let v = kolmogorov_cdf(k as f64 * 0.004).unwrap();
            assert!((0.0..=1.0).contains(&v));
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn kolmogorov_quantiles() {
        // bisection against the fixed-term series written in this test
        let (mut lo, mut hi) = (0.02, 5.0);
        while hi - lo > 1e-12 {
            let mid = 0.5 * (lo + hi);
            if kolmogorov_series(mid, 60) < 0.95 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let q95 = kolmogorov_quantile(0.95).unwrap();
        assert!((q95 - lo).abs() < 1e-9);
        assert!((q95 - 1.35810).abs() < 1e-4);
        for p in [0.1, 0.5, 0.9] {
            let q = kolmogorov_quantile(p).unwrap();
            assert!((kolmogorov_cdf(q).unwrap() - p).abs() < 1e-9);
        }
        let qs: Vec<f64> = [0.9, 0.95, 0.99]
            .iter()
            .map(|&p| kolmogorov_quantile(p).unwrap())
            .collect();
        assert!(qs[0] < qs[1] && qs[1] < qs[2]);
        assert!(kolmogorov_quantile(1.0).is_err());
        assert!(kolmogorov_quantile(0.0).is_err());
    }

    #[test]
    fn composition() {
        let grid = uniform_grid(8);
        let path = sample_bridge(&grid, &mut derive_substream(3, &[])).unwrap();
        let id = |t: f64| t.clamp(0.0, 1.0);
        assert_eq!(compose_with_cdf(&path, &id, &grid).unwrap(), path.values());
        assert_eq!(compose_with_cdf(&path, &id, &[-3.0]).unwrap(), vec![0.0]);
        assert!(compose_with_cdf(&path, &id, &[0.5, 0.2]).is_err());
    }

    #[test]
    fn modulus_examples() {
        let grid = uniform_grid(64);
        let zero = BridgePath::from_values(grid.clone(), vec![0.0; 65]).unwrap();
        assert_eq!(modulus_statistic(&zero, 0.5).unwrap(), 0.0);

        // peak 0.8 at u = 0.25, trough -0.3 at u = 0.75 (distance exactly 1/2)
        let values: Vec<f64> = grid
            .iter()
            .map(|&u| match u {
                0.25 => 0.8,
                0.75 => -0.3,
                _ => 0.0,
            })
            .collect();
        let path = BridgePath::from_values(grid.clone(), values).unwrap();
        let expected = 1.1 / (2.0 * 0.5 * 2f64.ln()).sqrt();
        assert!((modulus_statistic(&path, 0.5).unwrap() - expected).abs() < 1e-14);

        // at delta = 1/4 the extremes are out of reach of each other
        let smaller = modulus_statistic(&path, 0.25).unwrap();
        assert!((smaller - 0.8 / (2.0 * 0.25 * 4f64.ln()).sqrt()).abs() < 1e-14);

        assert!(matches!(modulus_statistic(&path, 0.1), Err(Error::CoarseGrid { .. })));
    }

    #[test]
    fn bridge_sup_matches_kolmogorov_law() {
        let grid = uniform_grid(DEFAULT_BRIDGE_INTERVALS);
        let mut sups: Vec<f64> = (0..10_000u64)
            .map(|r| sample_bridge(&grid, &mut derive_substream(99, &[r])).unwrap().sup_abs())
            .collect();
        sups.sort_by(f64::total_cmp);
        let n = sups.len() as f64;
        let d = sups
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = kolmogorov_cdf(x).unwrap();
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 0.03, "KS distance {d}");
    }
}
