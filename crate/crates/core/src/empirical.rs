//! Empirical and weighted empirical distribution functions and the exact
//! sup-norm statistics of the bootstrapped empirical process
//! `alpha*_n(t) = sqrt(n) (F*_n(t) - F_n(t))`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::law::{checked_cdf, Cdf};
use crate::weights::WeightVector;

/// Observations `X_1, ..., X_n`, kept sorted together with the permutation
/// back to draw order so that weights follow their observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    sorted: Vec<f64>,
    /// `order[j]` is the draw index of `sorted[j]`.
    order: Vec<usize>,
    /// Exclusive end (in sorted positions) of each run of tied values.
    group_end: Vec<usize>,
    /// Tie group of each observation, by draw index.
    group_of: Vec<usize>,
}

impl Sample {
    /// Builds a sample from values in draw order.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index, value });
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
        let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();

        let mut group_end = Vec::new();
        let mut group_of = vec![0; values.len()];
        for j in 0..sorted.len() {
            group_of[order[j]] = group_end.len();
            if j + 1 == sorted.len() || sorted[j + 1] != sorted[j] {
                group_end.push(j + 1);
            }
        }
        Ok(Self {
            sorted,
            order,
            group_end,
            group_of,
        })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Values sorted ascending.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// Values in draw order.
    pub fn draw_order(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (j, &i) in self.order.iter().enumerate() {
            out[i] = self.sorted[j];
        }
        out
    }

    /// Permutation from sorted position to draw index.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn distinct_count(&self) -> usize {
        self.group_end.len()
    }

    pub fn distinct_values(&self) -> Vec<f64> {
        self.group_end.iter().map(|&e| self.sorted[e - 1]).collect()
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max(&self) -> f64 {
        self.sorted[self.len() - 1]
    }

    /// Weights permuted into sorted order.
    pub fn weights_in_sorted_order(&self, weights: &[f64]) -> Vec<f64> {
        self.order.iter().map(|&i| weights[i]).collect()
    }

    fn check_weights(&self, weights: &WeightVector) -> Result<()> {
        if weights.len() != self.len() {
            return Err(Error::LengthMismatch {
                weights: weights.len(),
                sample: self.len(),
            });
        }
        Ok(())
    }

    /// `sup_t |F*_n(t) - F_n(t)|` for raw weights in draw order, without
    /// the `sqrt(n)` factor and without length checks.
    ///
    /// Both step functions jump only at the sample values, so the signed
    /// difference is constant between consecutive distinct values; its value at
    /// a jump point is the running sum below and its left limit is the previous
    /// running sum (zero left of the minimum).
    pub(crate) fn sup_difference_unchecked(&self, weights: &[f64]) -> f64 {
        let inv_n = 1.0 / self.len() as f64;
        let mut running = 0.0f64;
        let mut best = 0.0f64;
        let mut start = 0;
        for &end in &self.group_end {
            for &i in &self.order[start..end] {
                running += weights[i] - inv_n;
            }
            best = best.max(running.abs());
            start = end;
        }
        best
    }

    /// Signed difference `F*_n - F_n` as a step function.
    fn difference_step(&self, weights: &[f64]) -> StepFunction {
        let inv_n = 1.0 / self.len() as f64;
        let mut running = 0.0;
        let mut values = Vec::with_capacity(self.distinct_count());
        let mut start = 0;
        for &end in &self.group_end {
            for &i in &self.order[start..end] {
                running += weights[i] - inv_n;
            }
            values.push(running);
            start = end;
        }
        StepFunction {
            base: 0.0,
            jumps: self.distinct_values(),
            values,
        }
    }
}

/// Right-continuous piecewise-constant function: `base` left of the first
/// jump point, `values[k]` on `[jumps[k], jumps[k+1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    base: f64,
    jumps: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    pub fn new(base: f64, jumps: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if jumps.len() != values.len() {
            return Err(Error::param("values", "need one value per jump point"));
        }
        if let Some(index) = jumps
            .windows(2)
            .position(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::UnsortedGrid { index: index + 1 });
        }
        Ok(Self { base, jumps, values })
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn jump_points(&self) -> &[f64] {
        &self.jumps
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at `t` (right-continuous: jump points count as reached).
    pub fn eval(&self, t: f64) -> f64 {
        match self.jumps.partition_point(|&x| x <= t) {
            0 => self.base,
            k => self.values[k - 1],
        }
    }

    /// Left limit at `t`.
    pub fn left_limit(&self, t: f64) -> f64 {
        match self.jumps.partition_point(|&x| x < t) {
            0 => self.base,
            k => self.values[k - 1],
        }
    }

    /// Whether this is a distribution function: nondecreasing in `[0, 1]`,
    /// starting at 0 and ending at 1 within `1e-12`.
    pub fn is_cdf(&self) -> bool {
        let nondecreasing = std::iter::once(&self.base)
            .chain(&self.values)
            .collect::<Vec<_>>()
            .windows(2)
            .all(|w| w[0] <= w[1]);
        let last = self.values.last().copied().unwrap_or(self.base);
        self.base == 0.0
            && nondecreasing
            && self.values.iter().all(|v| (0.0..=1.0 + 1e-12).contains(v))
            && (last - 1.0).abs() <= 1e-12
    }

    /// Two-column CSV `jump_point,cum_value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "jump_point,cum_value")?;
        for (x, v) in self.jumps.iter().zip(&self.values) {
            writeln!(out, "{x},{v}")?;
        }
        Ok(())
    }
}

impl Cdf for StepFunction {
    fn cdf(&self, t: f64) -> f64 {
        self.eval(t)
    }
}

fn check_sorted(grid: &[f64]) -> Result<()> {
    match grid
        .windows(2)
        .position(|w| w[0].partial_cmp(&w[1]).is_none_or(|o| o == std::cmp::Ordering::Greater))
    {
        Some(index) => Err(Error::UnsortedGrid { index: index + 1 }),
        None => Ok(()),
    }
}

/// `F_n`: jump `1/n` per observation, aggregated at ties.
pub fn ecdf(sample: &Sample) -> StepFunction {
    let n = sample.len() as f64;
    StepFunction {
        base: 0.0,
        jumps: sample.distinct_values(),
        values: sample.group_end.iter().map(|&e| e as f64 / n).collect(),
    }
}

/// `F*_n(t) = sum_i W_i 1{X_i <= t}`.
pub fn weighted_ecdf(sample: &Sample, weights: &WeightVector) -> Result<StepFunction> {
    sample.check_weights(weights)?;
    let w = weights.as_slice();
    let mut running = 0.0;
    let mut values = Vec::with_capacity(sample.distinct_count());
    let mut start = 0;
    for &end in &sample.group_end {
        for &i in &sample.order[start..end] {
            running += w[i];
        }
        values.push(running);
        start = end;
    }
    Ok(StepFunction {
        base: 0.0,
        jumps: sample.distinct_values(),
        values,
    })
}

/// Exact `sup_t |alpha*_n(t)|` over the real line.
pub fn sup_process_distance(sample: &Sample, weights: &WeightVector) -> Result<f64> {
    sample.check_weights(weights)?;
    Ok((sample.len() as f64).sqrt() * sample.sup_difference_unchecked(weights.as_slice()))
}

/// `alpha*_n` evaluated on a sorted grid.
pub fn process_on_grid(sample: &Sample, weights: &WeightVector, grid: &[f64]) -> Result<Vec<f64>> {
    sample.check_weights(weights)?;
    check_sorted(grid)?;
    let diff = sample.difference_step(weights.as_slice());
    let root_n = (sample.len() as f64).sqrt();
    Ok(grid.iter().map(|&t| root_n * diff.eval(t)).collect())
}

/// `alpha_n(t) = sqrt(n) (F_n(t) - F(t))` on a sorted grid, for known `F`.
pub fn classical_process_on_grid(sample: &Sample, true_cdf: &dyn Cdf, grid: &[f64]) -> Result<Vec<f64>> {
    check_sorted(grid)?;
    let fn_ = ecdf(sample);
    let root_n = (sample.len() as f64).sqrt();
    grid.iter()
        .map(|&t| Ok(root_n * (fn_.eval(t) - checked_cdf(true_cdf, t)?)))
        .collect()
}

/// Largest gap over the grid between the two sides of
///
/// `sqrt(n)(F*_n - F_n) = (n/T_n) n^{-1/2} (sum_i Z_i 1{X_i <= t} - F T_n + (F - F_n) T_n)`,
///
/// with `Z_i = W_i T_n`. The right-hand side is accumulated from the raw
/// draws in draw order, independently of the step-function route on the left.
pub fn decomposition_residual(
    sample: &Sample,
    weights: &WeightVector,
    true_cdf: &dyn Cdf,
    grid: &[f64],
) -> Result<f64> {
    sample.check_weights(weights)?;
    check_sorted(grid)?;
    let t_n = weights.raw_sum().ok_or_else(|| Error::UnsupportedScheme {
        scheme: weights.kind().to_string(),
        reason: "the decomposition needs the raw sum T_n of the Z draws".into(),
    })?;
    let n = sample.len() as f64;
    let root_n = n.sqrt();
    let z: Vec<f64> = weights.as_slice().iter().map(|w| w * t_n).collect();
    let xs = sample.draw_order();

    let f_star = weighted_ecdf(sample, weights)?;
    let f_n = ecdf(sample);

    let mut residual = 0.0f64;
    for &t in grid {
        let f = checked_cdf(true_cdf, t)?;
        let lhs = root_n * (f_star.eval(t) - f_n.eval(t));

        let (mut z_below, mut count_below) = (0.0, 0usize);
        for (x, zi) in xs.iter().zip(&z) {
            if *x <= t {
                z_below += zi;
                count_below += 1;
            }
        }
        let fn_t = count_below as f64 / n;
        let rhs = (n / t_n) * ((z_below - f * t_n + (f - fn_t) * t_n) / root_n);
        residual = residual.max((lhs - rhs).abs());
    }
    Ok(residual)
}

/// Segment tree over tie groups holding, per node, the mass sum and the
/// extreme nonempty prefix sums.
struct PrefixExtrema {
    size: usize,
    sum: Vec<f64>,
    max_prefix: Vec<f64>,
    min_prefix: Vec<f64>,
}

impl PrefixExtrema {
    fn new(leaves: usize) -> Self {
        let size = leaves.next_power_of_two();
        Self {
            size,
            sum: vec![0.0; 2 * size],
            max_prefix: vec![0.0; 2 * size],
            min_prefix: vec![0.0; 2 * size],
        }
    }

    fn add(&mut self, leaf: usize, mass: f64) {
        let mut node = self.size + leaf;
        self.sum[node] += mass;
        self.max_prefix[node] = self.sum[node];
        self.min_prefix[node] = self.sum[node];
        while node > 1 {
            node /= 2;
            let (l, r) = (2 * node, 2 * node + 1);
            self.sum[node] = self.sum[l] + self.sum[r];
            self.max_prefix[node] = self.max_prefix[l].max(self.sum[l] + self.max_prefix[r]);
            self.min_prefix[node] = self.min_prefix[l].min(self.sum[l] + self.min_prefix[r]);
        }
    }

    /// `sup_t` of the absolute step function (its values are the prefix sums).
    fn sup_abs(&self) -> f64 {
        self.max_prefix[1].abs().max(self.min_prefix[1].abs())
    }
}

/// For each `k = 1..n`, `sup_t |sum_{i<=k} (W_i - 1/n) 1{X_i <= t}|`, with `i`
/// the draw index.
pub fn partial_sum_profile(sample: &Sample, weights: &WeightVector) -> Result<Vec<f64>> {
    sample.check_weights(weights)?;
    let inv_n = 1.0 / sample.len() as f64;
    let mut tree = PrefixExtrema::new(sample.distinct_count());
    Ok(weights
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, w)| {
            tree.add(sample.group_of[i], w - inv_n);
            tree.sup_abs()
        })
        .collect())
}

/// `max_{1<=k<=n} sup_t |sum_{i<=k} (W_i - 1/n) 1{X_i <= t}|` (no `sqrt(n)` factor).
pub fn partial_sum_process_max(sample: &Sample, weights: &WeightVector) -> Result<f64> {
    Ok(partial_sum_profile(sample, weights)?.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::law::ContinuousLaw;
    use crate::rng::derive_substream;
    use crate::weights::{draw_weight_vector, WeightScheme};
    use proptest::prelude::*;

    fn sample(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    fn weights(v: &[f64]) -> WeightVector {
        WeightVector::from_weights(v.to_vec()).unwrap()
    }

    #[test]
    fn sample_rejects_bad_input() {
        assert_eq!(Sample::new(vec![]), Err(Error::EmptySample));
        assert!(matches!(
            Sample::new(vec![1.0, f64::NAN]),
            Err(Error::NonFiniteValue { index: 1, .. })
        ));
    }

    #[test]
    fn sample_keeps_permutation() {
        let s = sample(&[3.0, 1.0, 2.0, 1.0]);
        assert_eq!(s.sorted(), &[1.0, 1.0, 2.0, 3.0]);
        assert_eq!(s.order(), &[1, 3, 2, 0]);
        assert_eq!(s.distinct_values(), vec![1.0, 2.0, 3.0]);
        assert_eq!(s.group_of, vec![2, 0, 1, 0]);
        assert_eq!(s.draw_order(), vec![3.0, 1.0, 2.0, 1.0]);
    }

    #[test]
    fn ecdf_examples() {
        let f = ecdf(&sample(&[1.0, 2.0, 3.0]));
        assert_eq!(f.eval(2.0), 2.0 / 3.0);
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.eval(3.0), 1.0);
        assert_eq!(f.left_limit(2.0), 1.0 / 3.0);
        assert!(f.is_cdf());

        let f = ecdf(&sample(&[5.0, 5.0, 5.0]));
        assert_eq!(f.jump_points(), &[5.0]);
        assert_eq!(f.values(), &[1.0]);

        assert_eq!(ecdf(&sample(&[0.1, 0.9])).eval(0.5), 0.5);
    }

    #[test]
    fn weighted_ecdf_examples() {
        let s = sample(&[1.0, 2.0]);
        let f = weighted_ecdf(&s, &weights(&[0.7, 0.3])).unwrap();
        assert_eq!(f.eval(1.0), 0.7);
        assert_eq!(f.eval(2.0), 1.0);

        let f = weighted_ecdf(&sample(&[3.0, 3.0]), &weights(&[0.4, 0.6])).unwrap();
        assert_eq!(f.jump_points(), &[3.0]);
        assert_eq!(f.values(), &[1.0]);

        // weights follow observations through the sort
        let f = weighted_ecdf(&sample(&[2.0, 1.0]), &weights(&[0.7, 0.3])).unwrap();
        assert_eq!(f.eval(1.0), 0.3);

        assert!(matches!(
            weighted_ecdf(&s, &weights(&[1.0])),
            Err(Error::LengthMismatch { weights: 1, sample: 2 })
        ));
    }

    #[test]
    fn uniform_weights_reproduce_ecdf() {
        let s = sample(&[0.3, -1.0, 2.5, 0.3, 7.0, 1.1]);
        let a = ecdf(&s);
        let b = weighted_ecdf(&s, &WeightVector::uniform(s.len())).unwrap();
        assert_eq!(a.jump_points(), b.jump_points());
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() <= 1e-15);
        }
    }

    #[test]
    fn sup_distance_examples() {
        let s = sample(&[1.0, 2.0]);
        let d = sup_process_distance(&s, &weights(&[0.7, 0.3])).unwrap();
        assert!((d - 2f64.sqrt() * 0.2).abs() < 1e-15);
        assert!((d - 0.282843).abs() < 1e-6);

        let s = sample(&[4.0, 1.0, 9.0]);
        assert_eq!(sup_process_distance(&s, &WeightVector::uniform(3)).unwrap(), 0.0);

        let mut rng = derive_substream(1, &[]);
        let w = draw_weight_vector(&WeightScheme::ExpBayesian, 1, &mut rng).unwrap();
        assert_eq!(sup_process_distance(&sample(&[3.0]), &w).unwrap(), 0.0);
    }

    #[test]
    fn grid_process_examples() {
        let s = sample(&[1.0, 2.0]);
        let w = weights(&[0.7, 0.3]);
        let vals = process_on_grid(&s, &w, &[0.0, 1.5, 2.5]).unwrap();
        assert_eq!(vals[0], 0.0);
        assert!((vals[1] - 2f64.sqrt() * 0.2).abs() < 1e-15);
        assert!(vals[2].abs() < 1e-15);
        assert!(matches!(
            process_on_grid(&s, &w, &[1.0, 0.0]),
            Err(Error::UnsortedGrid { index: 1 })
        ));
    }

    #[test]
    fn classical_process_examples() {
        let law = ContinuousLaw::standard_uniform();
        let n = 20;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let s = Sample::new(xs).unwrap();
        let v = classical_process_on_grid(&s, &law, &[-1.0, 0.5]).unwrap();
        assert_eq!(v[0], 0.0);
        assert!(v[1].abs() <= (n as f64).sqrt() * 0.5 / n as f64 + 1e-15);

        let s = sample(&[0.5]);
        assert_eq!(classical_process_on_grid(&s, &law, &[0.5]).unwrap(), vec![0.5]);

        let bad = |_t: f64| 1.5;
        assert!(matches!(
            classical_process_on_grid(&s, &bad, &[0.0]),
            Err(Error::CdfOutOfRange { .. })
        ));
    }

    #[test]
    fn decomposition_examples() {
        // Z = (2, 1), T = 3, F uniform on [0, 3], t = 1.5: both sides sqrt(2)(2/3 - 1/2).
        let s = sample(&[1.0, 2.0]);
        let w = WeightVector::from_raw(vec![2.0, 1.0], crate::weights::SchemeKind::ExpBayesian).unwrap();
        let law = ContinuousLaw::Uniform { lo: 0.0, hi: 3.0 };
        let lhs = process_on_grid(&s, &w, &[1.5]).unwrap()[0];
        assert!((lhs - 2f64.sqrt() * (2.0 / 3.0 - 0.5)).abs() < 1e-15);
        assert!(decomposition_residual(&s, &w, &law, &[1.5]).unwrap() < 1e-15);

        let mut rng = derive_substream(3, &[]);
        let w1 = draw_weight_vector(&WeightScheme::ExpBayesian, 1, &mut rng).unwrap();
        let r = decomposition_residual(&sample(&[0.4]), &w1, &law, &[0.0, 0.4, 1.0]).unwrap();
        assert!(r < 1e-15, "{r}");

        let efron = crate::weights::draw_efron_weights(2, 2, &mut rng).unwrap();
        assert!(matches!(
            decomposition_residual(&s, &efron, &law, &[1.0]),
            Err(Error::UnsupportedScheme { .. })
        ));
    }

    #[test]
    fn partial_sum_examples() {
        let mut rng = derive_substream(1, &[]);
        let w = draw_weight_vector(&WeightScheme::ExpBayesian, 1, &mut rng).unwrap();
        assert_eq!(partial_sum_process_max(&sample(&[2.0]), &w).unwrap(), 0.0);

        let s = sample(&[5.0, 1.0, 3.0]);
        assert_eq!(partial_sum_process_max(&s, &WeightVector::uniform(3)).unwrap(), 0.0);

        // draw order X1 = 2, X2 = 1 with weights (0.7, 0.3)
        let s = sample(&[2.0, 1.0]);
        let profile = partial_sum_profile(&s, &weights(&[0.7, 0.3])).unwrap();
        assert!((profile[0] - 0.2).abs() < 1e-15);
        assert!((profile[1] - 0.2).abs() < 1e-15);
    }

    /// O(n^2) rescan: rebuild the k-term step function and scan its values.
    fn partial_sum_rescan(xs: &[f64], w: &[f64]) -> f64 {
        let n = xs.len();
        let mut best = 0.0f64;
        for k in 1..=n {
            let mut pts: Vec<(f64, f64)> = (0..k).map(|i| (xs[i], w[i] - 1.0 / n as f64)).collect();
            pts.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut run = 0.0;
            let mut j = 0;
            while j < pts.len() {
                let x = pts[j].0;
                while j < pts.len() && pts[j].0 == x {
                    run += pts[j].1;
                    j += 1;
                }
                best = best.max(run.abs());
            }
        }
        best
    }

    /// Dense evaluation of |alpha*_n| on a grid plus every jump point and midpoint.
    fn sup_by_dense_grid(xs: &[f64], w: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let eval = |t: f64| -> f64 {
            let mut d = 0.0;
            for (x, wi) in xs.iter().zip(w) {
                if *x <= t {
                    d += wi - 1.0 / n;
                }
            }
            n.sqrt() * d.abs()
        };
        let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
        let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0;
        let mut pts: Vec<f64> = (0..2000).map(|k| lo + (hi - lo) * k as f64 / 1999.0).collect();
        let mut sorted = xs.to_vec();
        sorted.sort_by(f64::total_cmp);
        pts.extend(&sorted);
        pts.extend(sorted.windows(2).map(|p| 0.5 * (p[0] + p[1])));
        pts.into_iter().map(eval).fold(0.0, f64::max)
    }

    fn sample_and_weights() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..40).prop_flat_map(|n| {
            (
                prop::collection::vec(
                    prop_oneof![(-20i32..20).prop_map(|v| v as f64 * 0.5), -10.0f64..10.0],
                    n,
                ),
                prop::collection::vec(0.01f64..5.0, n),
            )
        })
    }

    proptest! {
        #[test]
        fn segment_tree_matches_rescan((xs, z) in sample_and_weights()) {
            let s = Sample::new(xs.clone()).unwrap();
            let w = WeightVector::from_raw(z, crate::weights::SchemeKind::Custom).unwrap();
            let fast = partial_sum_process_max(&s, &w).unwrap();
            let slow = partial_sum_rescan(&xs, w.as_slice());
            prop_assert!((fast - slow).abs() < 1e-12, "{} vs {}", fast, slow);
        }

        #[test]
        fn final_partial_sum_is_scaled_sup((xs, z) in sample_and_weights()) {
            let s = Sample::new(xs).unwrap();
            let w = WeightVector::from_raw(z, crate::weights::SchemeKind::Custom).unwrap();
            let profile = partial_sum_profile(&s, &w).unwrap();
            let sup = sup_process_distance(&s, &w).unwrap();
            prop_assert!((profile.last().unwrap() - sup / (s.len() as f64).sqrt()).abs() < 1e-12);
        }

        #[test]
        fn sup_matches_dense_grid((xs, z) in sample_and_weights()) {
            let s = Sample::new(xs.clone()).unwrap();
            let w = WeightVector::from_raw(z, crate::weights::SchemeKind::Custom).unwrap();
            let exact = sup_process_distance(&s, &w).unwrap();
            let dense = sup_by_dense_grid(&xs, w.as_slice());
            prop_assert!((exact - dense).abs() < 1e-12);
        }

        #[test]
        fn statistics_depend_only_on_ranks((xs, z) in sample_and_weights(), a in 0.1f64..10.0, b in -50.0f64..50.0) {
            let s = Sample::new(xs.clone()).unwrap();
            let moved = Sample::new(xs.iter().map(|x| a * x + b).collect()).unwrap();
            let w = WeightVector::from_raw(z, crate::weights::SchemeKind::Custom).unwrap();
            // an affine map can merge nearly-equal values in floating point; only
            // compare when the tie structure survived
            prop_assume!(s.distinct_count() == moved.distinct_count());
            prop_assert_eq!(sup_process_distance(&s, &w).unwrap(), sup_process_distance(&moved, &w).unwrap());
            prop_assert_eq!(partial_sum_process_max(&s, &w).unwrap(), partial_sum_process_max(&moved, &w).unwrap());
        }

        #[test]
        fn decomposition_identity_holds((xs, _z) in sample_and_weights(), seed: u64) {
            let s = Sample::new(xs).unwrap();
            let mut rng = derive_substream(seed, &[]);
            let w = draw_weight_vector(&WeightScheme::ExpBayesian, s.len(), &mut rng).unwrap();
            let law = ContinuousLaw::Uniform { lo: -10.0, hi: 10.0 };
            let grid: Vec<f64> = (0..101).map(|k| -12.0 + 24.0 * k as f64 / 100.0).collect();
            prop_assert!(decomposition_residual(&s, &w, &law, &grid).unwrap() <= 1e-9);
        }
    }
}
