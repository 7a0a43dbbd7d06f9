//! Distribution functions used in simulation mode (where `F` is known).

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A distribution function `t -> F(t)`.
pub trait Cdf: Sync {
    fn cdf(&self, t: f64) -> f64;
}

impl<F: Fn(f64) -> f64 + Sync> Cdf for F {
    fn cdf(&self, t: f64) -> f64 {
        self(t)
    }
}

/// Evaluates `F(t)` and rejects values outside `[0, 1]`.
pub(crate) fn checked_cdf(cdf: &dyn Cdf, t: f64) -> Result<f64> {
    let u = cdf.cdf(t);
    if (0.0..=1.0).contains(&u) {
        Ok(u)
    } else {
        Err(Error::CdfOutOfRange { at: t, value: u })
    }
}

/// Continuous laws with both a distribution function and a sampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ContinuousLaw {
    Uniform { lo: f64, hi: f64 },
    Normal { mean: f64, sd: f64 },
    Exponential { rate: f64 },
}

impl Default for ContinuousLaw {
    fn default() -> Self {
        ContinuousLaw::Uniform { lo: 0.0, hi: 1.0 }
    }
}

impl ContinuousLaw {
    pub fn standard_uniform() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ContinuousLaw::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            ContinuousLaw::Normal { mean, sd } => mean.is_finite() && sd.is_finite() && sd > 0.0,
            ContinuousLaw::Exponential { rate } => rate.is_finite() && rate > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid law parameters: {self:?}")))
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            ContinuousLaw::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            ContinuousLaw::Normal { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
            ContinuousLaw::Exponential { rate } => {
                let e: f64 = Exp1.sample(rng);
                e / rate
            }
        }
    }

    pub fn sample_n<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.sample(rng)).collect()
    }

    /// Upper bound on the density, when one exists.
    pub fn density_bound(&self) -> f64 {
        match *self {
            ContinuousLaw::Uniform { lo, hi } => 1.0 / (hi - lo),
            ContinuousLaw::Normal { sd, .. } => 1.0 / (sd * (2.0 * std::f64::consts::PI).sqrt()),
            ContinuousLaw::Exponential { rate } => rate,
        }
    }
}

impl Cdf for ContinuousLaw {
    fn cdf(&self, t: f64) -> f64 {
        match *self {
            ContinuousLaw::Uniform { lo, hi } => ((t - lo) / (hi - lo)).clamp(0.0, 1.0),
            ContinuousLaw::Normal { mean, sd } => 0.5 * libm::erfc(-(t - mean) / (sd * std::f64::consts::SQRT_2)),
            ContinuousLaw::Exponential { rate } => {
                if t <= 0.0 {
                    0.0
                } else {
                    -(-rate * t).exp_m1()
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cdf_values() {
        let u = ContinuousLaw::Uniform { lo: 0.0, hi: 3.0 };
        assert_eq!(u.cdf(1.5), 0.5);
        assert_eq!(u.cdf(-1.0), 0.0);
        assert_eq!(u.cdf(4.0), 1.0);
        let n = ContinuousLaw::Normal { mean: 1.0, sd: 2.0 };
        assert!((n.cdf(1.0) - 0.5).abs() < 1e-15);
        assert!((n.cdf(1.0 + 2.0 * 1.959963984540054) - 0.975).abs() < 1e-12);
        let e = ContinuousLaw::Exponential { rate: 2.0 };
        assert!((e.cdf(0.5) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(ContinuousLaw::Uniform { lo: 1.0, hi: 1.0 }.validate().is_err());
        assert!(ContinuousLaw::Normal { mean: 0.0, sd: 0.0 }.validate().is_err());
        assert!(ContinuousLaw::default().validate().is_ok());
    }

    #[test]
    fn law_json() {
        let law: ContinuousLaw = serde_json::from_str(r#"{"family":"normal","mean":0,"sd":1}"#).unwrap();
        assert_eq!(law, ContinuousLaw::Normal { mean: 0.0, sd: 1.0 });
    }
}
