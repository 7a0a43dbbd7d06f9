//! Kolmogorov–Smirnov distances.

use crate::error::Result;

/// Exact `sup_x |G_m(x) - F(x)|` between the empirical CDF of `values` and a
/// continuous `F`, via the sorted-sample formula (compare `F` at every order
/// statistic with the empirical CDF just before and at it).
pub fn ks_distance_to_cdf<F>(values: &[f64], cdf: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let mut best = 0.0f64;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        let f = cdf(x)?;
        best = best.max((f - i as f64 / m).abs()).max((j as f64 / m - f).abs());
        i = j;
    }
    Ok(best)
}

/// Two-sample statistic `sup_x |G_a(x) - G_b(x)|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_sample_against_uniform() {
        let u = |x: f64| Ok(x.clamp(0.0, 1.0));
        assert!((ks_distance_to_cdf(&[0.5], u).unwrap() - 0.5).abs() < 1e-15);
        // values at (i - 1/2)/m give the minimal distance 1/(2m)
        let m = 10;
        let v: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) / m as f64).collect();
        assert!((ks_distance_to_cdf(&v, u).unwrap() - 0.05).abs() < 1e-15);
        // ties count as one jump
        assert!((ks_distance_to_cdf(&[0.2, 0.2], u).unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn two_sample() {
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[1.0, 2.0]), 0.0);
        assert_eq!(ks_two_sample(&[1.0, 2.0], &[3.0, 4.0]), 1.0);
        assert!((ks_two_sample(&[1.0, 3.0], &[2.0, 4.0]) - 0.5).abs() < 1e-15);
    }
}
