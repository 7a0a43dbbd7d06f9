//! Random weights for the generalized bootstrap.
//!
//! The weighted scheme draws i.i.d. strictly positive `Z_1, ..., Z_n` with
//! `E Z = 1` and `E Z^2 = 2` and normalizes them, `W_i = Z_i / T_n` with
//! `T_n = Z_1 + ... + Z_n`. Exp(1) variables give the Bayesian bootstrap
//! (Dirichlet(1, ..., 1) weights). Efron's multinomial weights `m_i / m` are
//! available for comparison but are not of the `Z_i / T_n` form.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance for the moment equations of the two-point scheme and for `sum W_i = 1`.
pub const MOMENT_TOLERANCE: f64 = 1e-12;

/// Sample size used when a custom generator is validated at construction.
pub const CUSTOM_VALIDATION_SAMPLE: usize = 100_000;

/// Number of standard errors beyond which a sampled moment is flagged.
pub const MOMENT_FLAG_SE: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    ExpBayesian,
    TwoPoint,
    Efron,
    Custom,
    /// `Z = 1` identically: every weight is `1/n`. Diagnostic only.
    Uniform,
}

impl SchemeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::ExpBayesian => "exp-bayesian",
            SchemeKind::TwoPoint => "two-point",
            SchemeKind::Efron => "efron",
            SchemeKind::Custom => "custom",
            SchemeKind::Uniform => "uniform",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Two-point law on `{a, b}`, `0 < a < 1 < b`, with `P(Z = b) = p` fixed by `E Z = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPoint {
    a: f64,
    b: f64,
    p: f64,
}

impl TwoPoint {
    /// Solves `p` from the mean equation and rejects supports with `E Z^2 != 2`.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && 0.0 < a && a < 1.0 && 1.0 < b) {
            return Err(Error::param(
                "two-point support",
                format!("need 0 < a < 1 < b, got a = {a}, b = {b}"),
            ));
        }
        let p = (1.0 - a) / (b - a);
        let second_moment = p * b * b + (1.0 - p) * a * a;
        if (second_moment - 2.0).abs() > MOMENT_TOLERANCE {
            return Err(Error::MomentViolation { a, b, p, second_moment });
        }
        Ok(Self { a, b, p })
    }

    /// The unique valid partner of a lower support point: `b = 1 + 1/(1 - a)`.
    pub fn with_lower(a: f64) -> Result<Self> {
        Self::new(a, 1.0 + 1.0 / (1.0 - a))
    }

    pub fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Probability of the upper support point.
    pub fn p_upper(&self) -> f64 {
        self.p
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if rng.random::<f64>() < self.p {
            self.b
        } else {
            self.a
        }
    }
}

type Sampler = dyn Fn(&mut dyn RngCore) -> f64 + Send + Sync;

/// A user-supplied sampler for `Z`. The exponential-moment condition on `Z`
/// cannot be checked by sampling and is taken as declared by the user.
#[derive(Clone)]
pub struct CustomGenerator {
    name: String,
    sampler: Arc<Sampler>,
}

impl CustomGenerator {
    pub fn new<F>(name: impl Into<String>, sampler: F) -> Self
    where
        F: Fn(&mut dyn RngCore) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            sampler: Arc::new(sampler),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        (self.sampler)(rng)
    }
}

impl fmt::Debug for CustomGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomGenerator")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Default)]
pub enum WeightScheme {
    /// `Z ~ Exp(1)`, the Bayesian bootstrap.
    #[default]
    ExpBayesian,
    TwoPoint(TwoPoint),
    /// Multinomial resampling with `m` draws (`None` means `m = n`).
    Efron {
        m: Option<usize>,
    },
    Custom(CustomGenerator),
    Uniform,
}

impl WeightScheme {
    pub fn kind(&self) -> SchemeKind {
        match self {
            WeightScheme::ExpBayesian => SchemeKind::ExpBayesian,
            WeightScheme::TwoPoint(_) => SchemeKind::TwoPoint,
            WeightScheme::Efron { .. } => SchemeKind::Efron,
            WeightScheme::Custom(_) => SchemeKind::Custom,
            WeightScheme::Uniform => SchemeKind::Uniform,
        }
    }

    pub fn two_point(a: f64, b: f64) -> Result<Self> {
        TwoPoint::new(a, b).map(WeightScheme::TwoPoint)
    }

    /// Wraps a custom generator after checking its first two moments by sampling.
    pub fn checked_custom<R: Rng + ?Sized>(generator: CustomGenerator, rng: &mut R) -> Result<Self> {
        let scheme = WeightScheme::Custom(generator);
        let report = validate_scheme_moments(&scheme, CUSTOM_VALIDATION_SAMPLE, rng)?;
        if report.verdict == MomentVerdict::Flag {
            let name = match &scheme {
                WeightScheme::Custom(g) => g.name.clone(),
                _ => unreachable!(),
            };
            return Err(Error::CustomMomentsRejected {
                name,
                mean: report.mean,
                se_mean: report.se_mean,
                second_moment: report.second_moment,
                se_second: report.se_second_moment,
            });
        }
        Ok(scheme)
    }

    /// One draw of `Z`. Efron has no such variable.
    fn draw_z<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        let z = match self {
            WeightScheme::ExpBayesian => Exp1.sample(rng),
            WeightScheme::TwoPoint(tp) => tp.sample(rng),
            WeightScheme::Uniform => 1.0,
            WeightScheme::Custom(g) => {
                let mut dynrng = DynRng(rng);
                let z = g.sample(&mut dynrng);
                if !(z > 0.0 && z.is_finite()) {
                    return Err(Error::NonPositiveDraw { value: z });
                }
                z
            }
            WeightScheme::Efron { .. } => {
                return Err(Error::UnsupportedScheme {
                    scheme: "efron".into(),
                    reason: "multinomial weights have no underlying Z variable".into(),
                })
            }
        };
        Ok(z)
    }
}

/// Adapter so generic `Rng`s can be handed to `dyn RngCore` samplers.
struct DynRng<'a, R: ?Sized>(&'a mut R);

impl<R: Rng + ?Sized> RngCore for DynRng<'_, R> {
    fn next_u32(&mut self) -> u32 {
        self.0.next_u32()
    }
    fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }
    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.0.fill_bytes(dst)
    }
}

/// Normalized bootstrap weights, indexed in the original draw order of the sample.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
    kind: SchemeKind,
    raw_sum: Option<f64>,
}

impl WeightVector {
    /// Normalizes raw draws `Z_i` into `Z_i / T_n`.
    pub fn from_raw(z: Vec<f64>, kind: SchemeKind) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::param("n", "weight vector needs n >= 1"));
        }
        if let Some(&bad) = z.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::NonPositiveDraw { value: bad });
        }
        let total: f64 = z.iter().sum();
        let mut weights = z;
        for w in weights.iter_mut() {
            *w /= total;
        }
        Ok(Self {
            weights,
            kind,
            raw_sum: Some(total),
        })
    }

    /// Wraps explicit weights (tagged `custom`, no `T_n`). They must be
    /// nonnegative and sum to one.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::param("n", "weight vector needs n >= 1"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::param("weights", "entries must be finite and nonnegative"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MOMENT_TOLERANCE {
            return Err(Error::param("weights", format!("sum is {total}, expected 1")));
        }
        Ok(Self {
            weights,
            kind: SchemeKind::Custom,
            raw_sum: None,
        })
    }

    /// Every weight exactly `1/n` (the `Z = 1` diagnostic).
    pub fn uniform(n: usize) -> Self {
        Self::from_raw(vec![1.0; n.max(1)], SchemeKind::Uniform).expect("positive draws")
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    /// `T_n`, absent for Efron and explicit weights.
    pub fn raw_sum(&self) -> Option<f64> {
        self.raw_sum
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.weights
    }
}

/// Draws `W_i = Z_i / T_n`, i = 1..n. Efron schemes are delegated to
/// [`draw_efron_weights`] with `m` defaulting to `n`.
pub fn draw_weight_vector<R: Rng + ?Sized>(scheme: &WeightScheme, n: usize, rng: &mut R) -> Result<WeightVector> {
    if n == 0 {
        return Err(Error::param("n", "weight vector needs n >= 1"));
    }
    if let WeightScheme::Efron { m } = scheme {
        return draw_efron_weights(n, m.unwrap_or(n), rng);
    }
    let mut z = Vec::with_capacity(n);
    for _ in 0..n {
        z.push(scheme.draw_z(rng)?);
    }
    WeightVector::from_raw(z, scheme.kind())
}

/// Multinomial counts with `m` trials over `n` equiprobable cells, returned as `m_i / m`.
pub fn draw_efron_weights<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<WeightVector> {
    if n == 0 || m == 0 {
        return Err(Error::param("n, m", "Efron weights need n >= 1 and m >= 1"));
    }
    let mut counts = vec![0u64; n];
    for _ in 0..m {
        counts[rng.random_range(0..n)] += 1;
    }
    let scale = 1.0 / m as f64;
    let weights = counts.into_iter().map(|c| c as f64 * scale).collect();
    Ok(WeightVector {
        weights,
        kind: SchemeKind::Efron,
        raw_sum: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentVerdict {
    Pass,
    Flag,
}

/// How the exponential-moment condition on `Z` is established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MgfStatus {
    /// Holds analytically for the built-in law.
    Analytic,
    /// Cannot be tested by sampling; taken on the user's word.
    DeclaredByUser,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub sample_size: usize,
    pub mean: f64,
    pub second_moment: f64,
    pub se_mean: f64,
    pub se_second_moment: f64,
    pub verdict: MomentVerdict,
    pub mgf_condition: MgfStatus,
}

/// Samples `Z` and checks `E Z = 1`, `E Z^2 = 2` with a 4-standard-error rule.
pub fn validate_scheme_moments<R: Rng + ?Sized>(
    scheme: &WeightScheme,
    sample_size: usize,
    rng: &mut R,
) -> Result<MomentReport> {
    if sample_size < 100 {
        return Err(Error::param("sample_size", "need at least 100 draws"));
    }
    let n = sample_size as f64;
    let (mut s1, mut s2, mut s4) = (0.0, 0.0, 0.0);
    for _ in 0..sample_size {
        let z = scheme.draw_z(rng)?;
        let z2 = z * z;
        s1 += z;
        s2 += z2;
        s4 += z2 * z2;
    }
    let mean = s1 / n;
    let second_moment = s2 / n;
    let var_z = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
    let var_z2 = ((s4 - n * second_moment * second_moment) / (n - 1.0)).max(0.0);
    let se_mean = (var_z / n).sqrt();
    let se_second_moment = (var_z2 / n).sqrt();

    let off_mean = (mean - 1.0).abs() > MOMENT_FLAG_SE * se_mean + MOMENT_TOLERANCE;
    let off_second = (second_moment - 2.0).abs() > MOMENT_FLAG_SE * se_second_moment + MOMENT_TOLERANCE;
    let verdict = if off_mean || off_second {
        MomentVerdict::Flag
    } else {
        MomentVerdict::Pass
    };
    let mgf_condition = match scheme {
        WeightScheme::Custom(_) => MgfStatus::DeclaredByUser,
        _ => MgfStatus::Analytic,
    };
    Ok(MomentReport {
        sample_size,
        mean,
        second_moment,
        se_mean,
        se_second_moment,
        verdict,
        mgf_condition,
    })
}

/// Scheme description as it appears in experiment configs:
/// `{"kind": "exp-bayesian" | "two-point" | "efron" | "uniform", "a": .., "b": .., "m": ..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            kind: SchemeKind::ExpBayesian,
            a: None,
            b: None,
            m: None,
        }
    }
}

impl SchemeConfig {
    pub fn build(&self) -> Result<WeightScheme> {
        match self.kind {
            SchemeKind::ExpBayesian => Ok(WeightScheme::ExpBayesian),
            SchemeKind::Uniform => Ok(WeightScheme::Uniform),
            SchemeKind::Efron => {
                if self.m == Some(0) {
                    return Err(Error::Config("efron scheme needs m >= 1".into()));
                }
                Ok(WeightScheme::Efron { m: self.m })
            }
            SchemeKind::TwoPoint => match (self.a, self.b) {
                (Some(a), Some(b)) => WeightScheme::two_point(a, b),
                (Some(a), None) => TwoPoint::with_lower(a).map(WeightScheme::TwoPoint),
                _ => Err(Error::Config("two-point scheme needs `a` (and optionally `b`)".into())),
            },
            SchemeKind::Custom => Err(Error::Config(
                "custom generators cannot be described in a config file".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_substream;
    use proptest::prelude::*;

    #[test]
    fn single_weight_is_one() {
        let mut rng = derive_substream(1, &[0]);
        let w = draw_weight_vector(&WeightScheme::ExpBayesian, 1, &mut rng).unwrap();
        assert_eq!(w.as_slice(), &[1.0]);
        let w = draw_efron_weights(1, 5, &mut rng).unwrap();
        assert_eq!(w.as_slice(), &[1.0]);
    }

    #[test]
    fn exp_moments_large_sample() {
        let mut rng = derive_substream(11, &[1]);
        let n = 100_000;
        let w = draw_weight_vector(&WeightScheme::ExpBayesian, n, &mut rng).unwrap();
        let t = w.raw_sum().unwrap();
        let z: Vec<f64> = w.as_slice().iter().map(|x| x * t).collect();
        let mean = z.iter().sum::<f64>() / n as f64;
        let m2 = z.iter().map(|v| v * v).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 3.0 * (1.0 / n as f64).sqrt(), "{mean}");
        assert!((m2 - 2.0).abs() < 3.0 * (20.0 / n as f64).sqrt(), "{m2}");
    }

    #[test]
    fn two_point_rejects_bad_second_moment() {
        // p = 1/3 from the mean equation, then E Z^2 = 4/3 + 1/6 = 1.5.
        match TwoPoint::new(0.5, 2.0) {
            Err(Error::MomentViolation { p, second_moment, .. }) => {
                assert!((p - 1.0 / 3.0).abs() < 1e-15);
                assert!((second_moment - 1.5).abs() < 1e-15);
            }
            other => panic!("expected a moment violation, got {other:?}"),
        }
    }

    #[test]
    fn two_point_accepts_valid_support() {
        let tp = TwoPoint::new(0.5, 3.0).unwrap();
        assert!((tp.p_upper() - 0.2).abs() < 1e-15);
        let tp = TwoPoint::with_lower(0.25).unwrap();
        let (a, b) = tp.support();
        let p = tp.p_upper();
        assert!((p * b + (1.0 - p) * a - 1.0).abs() < 1e-12);
        assert!(TwoPoint::new(1.5, 3.0).is_err());
    }

    #[test]
    fn efron_two_cells_frequencies() {
        // Exact law: [1,0] and [0,1] with prob 1/4 each, [.5,.5] with prob 1/2.
        let draws = 10_000;
        let mut counts = [0usize; 3];
        for j in 0..draws {
            let mut rng = derive_substream(5, &[j as u64]);
            let w = draw_efron_weights(2, 2, &mut rng).unwrap();
            match w.as_slice() {
                [a, _] if *a == 1.0 => counts[0] += 1,
                [a, _] if *a == 0.5 => counts[1] += 1,
                [a, _] if *a == 0.0 => counts[2] += 1,
                other => panic!("unexpected weights {other:?}"),
            }
        }
        for (count, p) in counts.iter().zip([0.25, 0.5, 0.25]) {
            let freq = *count as f64 / draws as f64;
            let se = (p * (1.0 - p) / draws as f64).sqrt();
            assert!((freq - p).abs() < 3.0 * se, "freq {freq} vs {p}");
        }
    }

    #[test]
    fn efron_exchangeable_means() {
        let draws = 20_000;
        let mut sums = [0.0; 3];
        let mut rng = derive_substream(6, &[0]);
        for _ in 0..draws {
            let w = draw_efron_weights(3, 3, &mut rng).unwrap();
            for (s, v) in sums.iter_mut().zip(w.as_slice()) {
                *s += v;
            }
        }
        // Var(m_i/3) = 3 * (1/3)(2/3) / 9 = 2/27
        let se = (2.0 / 27.0 / draws as f64).sqrt();
        for s in sums {
            assert!((s / draws as f64 - 1.0 / 3.0).abs() < 4.0 * se);
        }
    }

    #[test]
    fn custom_non_positive_draw_rejected() {
        let gen = CustomGenerator::new("bad", |_| -0.5);
        let mut rng = derive_substream(1, &[]);
        let err = draw_weight_vector(&WeightScheme::Custom(gen), 4, &mut rng).unwrap_err();
        assert_eq!(err, Error::NonPositiveDraw { value: -0.5 });
    }

    #[test]
    fn moment_validation_exp_passes() {
        let mut rng = derive_substream(77, &[]);
        let rep = validate_scheme_moments(&WeightScheme::ExpBayesian, 100_000, &mut rng).unwrap();
        assert_eq!(rep.verdict, MomentVerdict::Pass);
        assert_eq!(rep.mgf_condition, MgfStatus::Analytic);
    }

    #[test]
    fn moment_validation_constant_generator_flags() {
        let gen = CustomGenerator::new("one", |_| 1.0);
        let mut rng = derive_substream(1, &[]);
        let rep = validate_scheme_moments(&WeightScheme::Custom(gen.clone()), 1000, &mut rng).unwrap();
        assert_eq!(rep.mean, 1.0);
        assert_eq!(rep.second_moment, 1.0);
        assert_eq!(rep.verdict, MomentVerdict::Flag);
        assert!(WeightScheme::checked_custom(gen, &mut rng).is_err());
    }

    #[test]
    fn moment_validation_lognormal_passes_but_mgf_declared() {
        // sigma^2 = ln 2, mu = -sigma^2 / 2 gives E Z = 1 and E Z^2 = e^{sigma^2} = 2.
        let sigma = std::f64::consts::LN_2.sqrt();
        let mu = -0.5 * std::f64::consts::LN_2;
        let gen = CustomGenerator::new("lognormal", move |rng| {
            let normal = rand_distr::Normal::new(mu, sigma).unwrap();
            normal.sample(rng).exp()
        });
        let mut rng = derive_substream(3, &[]);
        let rep = validate_scheme_moments(&WeightScheme::Custom(gen.clone()), 100_000, &mut rng).unwrap();
        assert_eq!(rep.verdict, MomentVerdict::Pass, "{rep:?}");
        assert_eq!(rep.mgf_condition, MgfStatus::DeclaredByUser);
        assert!(WeightScheme::checked_custom(gen, &mut rng).is_ok());
    }

    #[test]
    fn moment_validation_needs_100_draws() {
        let mut rng = derive_substream(1, &[]);
        assert!(validate_scheme_moments(&WeightScheme::ExpBayesian, 99, &mut rng).is_err());
        assert!(validate_scheme_moments(&WeightScheme::Efron { m: None }, 1000, &mut rng).is_err());
    }

    #[test]
    fn raw_sum_tracks_n() {
        // |T_n / n - 1| < 5 / sqrt(n) in at least 99% of 1000 replicates, n = 10^4.
        let n = 10_000;
        let ok = (0..1000u64)
            .filter(|&r| {
                let mut rng = derive_substream(8, &[r]);
                let w = draw_weight_vector(&WeightScheme::ExpBayesian, n, &mut rng).unwrap();
                (w.raw_sum().unwrap() / n as f64 - 1.0).abs() < 5.0 / (n as f64).sqrt()
            })
            .count();
        assert!(ok >= 990, "{ok}");
    }

    #[test]
    fn scheme_config_json() {
        let cfg: SchemeConfig = serde_json::from_str(r#"{"kind":"two-point","a":0.5,"b":2.0}"#).unwrap();
        assert!(matches!(cfg.build(), Err(Error::MomentViolation { .. })));
        let cfg: SchemeConfig = serde_json::from_str(r#"{"kind":"efron","m":10}"#).unwrap();
        assert!(matches!(cfg.build().unwrap(), WeightScheme::Efron { m: Some(10) }));
        let cfg: SchemeConfig = serde_json::from_str(r#"{"kind":"exp-bayesian"}"#).unwrap();
        assert_eq!(cfg.build().unwrap().kind(), SchemeKind::ExpBayesian);
    }

    fn any_scheme() -> impl Strategy<Value = WeightScheme> {
        prop_oneof![
            Just(WeightScheme::ExpBayesian),
            Just(WeightScheme::TwoPoint(TwoPoint::new(0.5, 3.0).unwrap())),
            (1usize..40).prop_map(|m| WeightScheme::Efron { m: Some(m) }),
        ]
    }

    proptest! {
        #[test]
        fn drawn_weights_are_normalized(scheme in any_scheme(), n in 1usize..200, seed: u64) {
            let mut rng = derive_substream(seed, &[n as u64]);
            let w = draw_weight_vector(&scheme, n, &mut rng).unwrap();
            prop_assert_eq!(w.len(), n);
            prop_assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(w.as_slice().iter().all(|v| *v >= 0.0));
            if w.kind() != SchemeKind::Efron {
                prop_assert!(w.as_slice().iter().all(|v| *v > 0.0));
            }
            let mut again = derive_substream(seed, &[n as u64]);
            prop_assert_eq!(w, draw_weight_vector(&scheme, n, &mut again).unwrap());
        }
    }
}
