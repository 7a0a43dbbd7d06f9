//! Experiment configuration, data I/O and the Monte Carlo rate harness.
//!
//! Every replicate owns a substream keyed by `(n-index, replicate)`; inside a
//! replicate, label `0` draws the sample, `1` the weights and `2` the Gaussian
//! reference. Results are collected in replicate order, so reports do not
//! depend on the number of worker threads.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bands::{
    cdf_confidence_band, coverage_experiment, estimate_band_radius, kde_confidence_band, order_statistic_index,
    CdfBand, CoverageReport, KdeBand,
};
use crate::empirical::{partial_sum_process_max, Sample};
use crate::error::{Error, Result};
use crate::gaussian::{kiefer_sup_max, kolmogorov_cdf, uniform_grid};
use crate::kde::{padded_grid, BandwidthRule, KdeDesign, KernelName, KernelSpec};
use crate::ks::{ks_distance_to_cdf, ks_two_sample};
use crate::law::ContinuousLaw;
use crate::parallel::Workers;
use crate::rng::SeedPath;
use crate::weights::{draw_weight_vector, SchemeConfig, SchemeKind, WeightScheme};

/// Quantile levels reported for every statistic.
pub const QUANTILE_LEVELS: [f64; 5] = [0.5, 0.75, 0.9, 0.95, 0.99];

/// Smallest number of repetitions accepted by rate and coverage experiments.
pub const MIN_RATE_REPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Rates,
    KieferRates,
    KdeRates,
    Coverage,
    Band,
    KdeBand,
    Simulate,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Rates => "rates",
            ExperimentKind::KieferRates => "kiefer-rates",
            ExperimentKind::KdeRates => "kde-rates",
            ExperimentKind::Coverage => "coverage",
            ExperimentKind::Band => "band",
            ExperimentKind::KdeBand => "kde-band",
            ExperimentKind::Simulate => "simulate",
        }
    }

    fn uses_n_grid(self) -> bool {
        !matches!(self, ExperimentKind::Band | ExperimentKind::KdeBand)
    }

    fn is_rate(self) -> bool {
        matches!(
            self,
            ExperimentKind::Rates | ExperimentKind::KieferRates | ExperimentKind::KdeRates
        )
    }
}

impl std::fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Per-replicate statistic exported by `simulate`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Statistic {
    /// `sup_t |alpha*_n(t)|`.
    #[default]
    Sup,
    /// `max_k sup_t |sum_{i<=k} (W_i - 1/n) 1{X_i <= t}|`, unscaled.
    PartialSumMax,
    /// `sup_x |gamma*_n(x)|` on the padded grid.
    GammaSup,
    /// `max_{k<=n} sup_t |K(t, k)| / sqrt(n)` on a grid with `n` intervals.
    KieferMax,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// JSON report or summary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    /// CSV table (band, kde-band, simulate).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
}

fn default_n_grid() -> Vec<usize> {
    vec![100, 400, 1600, 6400]
}

fn default_reps() -> usize {
    1000
}

fn default_alpha() -> f64 {
    0.05
}

fn default_n_boot() -> usize {
    999
}

fn default_grid_points() -> usize {
    512
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default = "default_n_grid")]
    pub n_grid: Vec<usize>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub law: ContinuousLaw,
    #[serde(default)]
    pub scheme: SchemeConfig,
    #[serde(default)]
    pub kernel: KernelName,
    #[serde(default)]
    pub bandwidth: BandwidthRule,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_n_boot")]
    pub n_boot: usize,
    /// Evaluation points for KDE statistics and bands.
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default)]
    pub statistic: Statistic,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_override: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    #[serde(default)]
    pub outputs: Outputs,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            n_grid: default_n_grid(),
            reps: default_reps(),
            law: ContinuousLaw::default(),
            scheme: SchemeConfig::default(),
            kernel: KernelName::default(),
            bandwidth: BandwidthRule::default(),
            alpha: default_alpha(),
            n_boot: default_n_boot(),
            grid_points: default_grid_points(),
            statistic: Statistic::default(),
            radius_override: None,
            seed: 0,
            data: None,
            outputs: Outputs::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&read_text(path)?)
    }

    /// Overlays the keys of a JSON object onto this config; keys present in
    /// `overrides` win.
    pub fn overlay(&self, overrides: serde_json::Value) -> Result<Self> {
        let serde_json::Value::Object(extra) = overrides else {
            return Err(Error::Config("config file must hold a JSON object".into()));
        };
        let mut base = serde_json::to_value(self).map_err(|e| Error::Config(e.to_string()))?;
        let map = base.as_object_mut().expect("config serializes to an object");
        for (key, value) in extra {
            map.insert(key, value);
        }
        let merged: Self = serde_json::from_value(base).map_err(|e| Error::Config(e.to_string()))?;
        if merged.kind != self.kind {
            return Err(Error::Config(format!(
                "config file is for `{}` but `{}` was requested",
                merged.kind, self.kind
            )));
        }
        merged.validate()?;
        Ok(merged)
    }

    pub fn weight_scheme(&self) -> Result<WeightScheme> {
        self.scheme.build()
    }

    pub fn kernel_spec(&self) -> Result<KernelSpec> {
        KernelSpec::by_name(self.kernel)
    }

    pub fn validate(&self) -> Result<()> {
        let kind = self.kind;
        if kind.uses_n_grid() {
            if self.n_grid.is_empty() {
                return Err(Error::Config("n_grid is empty".into()));
            }
            if self.n_grid.contains(&0) {
                return Err(Error::Config("n_grid entries must be positive".into()));
            }
            if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config("n_grid must be strictly increasing".into()));
            }
            if kind.is_rate() && self.n_grid[0] < 2 {
                return Err(Error::Config(
                    "rate experiments need n >= 2 (the envelope vanishes at n = 1)".into(),
                ));
            }
        }
        if (kind.is_rate() || kind == ExperimentKind::Coverage) && self.reps < MIN_RATE_REPS {
            return Err(Error::Config(format!(
                "{kind} needs reps >= {MIN_RATE_REPS}, got {}",
                self.reps
            )));
        }
        if self.reps == 0 {
            return Err(Error::Config("reps must be positive".into()));
        }
        order_statistic_index(self.n_boot, self.alpha).map_err(|e| Error::Config(e.to_string()))?;
        if matches!(kind, ExperimentKind::Band | ExperimentKind::KdeBand) && self.data.is_none() {
            return Err(Error::Config(format!("{kind} needs a data file")));
        }
        if self.grid_points < 2 {
            return Err(Error::Config("grid_points must be at least 2".into()));
        }
        if let Some(r) = self.radius_override {
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::Config(format!("radius_override must be nonnegative, got {r}")));
            }
        }
        self.law.validate()?;
        self.bandwidth.validate()?;
        self.kernel_spec()?;
        self.weight_scheme()?;
        Ok(())
    }
}

fn read_text(path: &Path) -> Result<String> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(text)
}

/// Reads a single-column CSV of observations. A first line that does not parse
/// as a number is taken as a header; blank lines are skipped.
pub fn parse_sample_csv<R: Read>(reader: R) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut values = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::MalformedData {
            line: i + 1,
            reason: e.to_string(),
        })?;
        let line = record.position().map_or(i + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 1 {
            return Err(Error::MalformedData {
                line,
                reason: format!("expected one column, found {}", record.len()),
            });
        }
        match record[0].parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            Ok(v) => {
                return Err(Error::MalformedData {
                    line,
                    reason: format!("value {v} is not finite"),
                })
            }
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(Error::MalformedData {
                    line,
                    reason: format!("`{}` is not a number", &record[0]),
                })
            }
        }
    }
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    Ok(values)
}

pub fn read_sample_csv(path: &Path) -> Result<Sample> {
    let file = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Sample::new(parse_sample_csv(std::io::BufReader::new(file))?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantilePoint {
    pub level: f64,
    pub value: f64,
}

/// Order-statistic quantiles `x_(ceil(p r))` of a sorted sample.
fn quantiles(sorted: &[f64]) -> Vec<QuantilePoint> {
    QUANTILE_LEVELS
        .iter()
        .map(|&level| {
            let k = ((level * sorted.len() as f64) - 1e-9).ceil().max(1.0) as usize;
            QuantilePoint {
                level,
                value: sorted[k - 1],
            }
        })
        .collect()
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn sorted(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    values
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeTerms {
    /// `log n / sqrt(n)`.
    pub sampling: f64,
    /// `h sqrt(log(1/h))`.
    pub smoothing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: usize,
    pub reps: usize,
    pub quantiles: Vec<QuantilePoint>,
    pub mean: f64,
    /// KS distance between the Monte Carlo law of the statistic and the reference law.
    pub ks_distance: f64,
    /// Binomial bound on the Monte Carlo error of `ks_distance`.
    pub standard_error: f64,
    pub envelope: f64,
    pub ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope_terms: Option<EnvelopeTerms>,
    /// Quantiles of the simulated reference statistic, when the reference is simulated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_quantiles: Option<Vec<QuantilePoint>>,
    /// Quantiles of the unnormalized statistic, when the report compares a rescaled one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_quantiles: Option<Vec<QuantilePoint>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendSummary {
    /// `d_{i+1} <= d_i + 2 sqrt(se_i^2 + se_{i+1}^2)` for every consecutive pair.
    pub non_increasing_within_2se: bool,
    /// Number of consecutive pairs with `d_{i+1} > d_i`.
    pub inversions: usize,
    /// `max ratio / min ratio`; absent when some ratio is zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_spread: Option<f64>,
}

impl TrendSummary {
    pub fn from_rows(rows: &[RateRow]) -> Self {
        let mut inversions = 0;
        let mut within = true;
        for pair in rows.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if b.ks_distance > a.ks_distance {
                inversions += 1;
            }
            let allowance = 2.0 * (a.standard_error.powi(2) + b.standard_error.powi(2)).sqrt();
            if b.ks_distance > a.ks_distance + allowance {
                within = false;
            }
        }
        let lo = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        let hi = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        Self {
            non_increasing_within_2se: within,
            inversions,
            ratio_spread: (lo > 0.0 && lo.is_finite()).then(|| hi / lo),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub kind: ExperimentKind,
    pub statistic: String,
    pub reference: String,
    pub seed: u64,
    pub rows: Vec<RateRow>,
    pub trend: TrendSummary,
    pub config: ExperimentConfig,
}

/// Binomial bound `sqrt(1/4 / reps)` on the Monte Carlo error of a KS distance.
fn ks_standard_error(reps: usize) -> f64 {
    0.5 / (reps as f64).sqrt()
}

fn log_rate(n: usize) -> f64 {
    (n as f64).ln() / (n as f64).sqrt()
}

struct Replicate<'a> {
    config: &'a ExperimentConfig,
    scheme: &'a WeightScheme,
    n: usize,
    seeds: SeedPath,
}

impl Replicate<'_> {
    fn sample(&self) -> Result<Sample> {
        Sample::new(self.config.law.sample_n(self.n, &mut self.seeds.child(0).stream()))
    }

    fn sup(&self) -> Result<f64> {
        let sample = self.sample()?;
        let w = draw_weight_vector(self.scheme, self.n, &mut self.seeds.child(1).stream())?;
        Ok((self.n as f64).sqrt() * sample.sup_difference_unchecked(w.as_slice()))
    }

    fn partial_sum_max(&self) -> Result<f64> {
        let sample = self.sample()?;
        let w = draw_weight_vector(self.scheme, self.n, &mut self.seeds.child(1).stream())?;
        partial_sum_process_max(&sample, &w)
    }

    fn kiefer_max(&self) -> Result<f64> {
        let grid = uniform_grid(self.n);
        Ok(kiefer_sup_max(&grid, self.n, &mut self.seeds.child(2).stream())? / (self.n as f64).sqrt())
    }

    fn gamma_sup(&self, kernel: &KernelSpec, h: f64) -> Result<f64> {
        let sample = self.sample()?;
        let grid = padded_grid(&sample, kernel, h, self.config.grid_points);
        let design = KdeDesign::new(&sample, kernel, h, &grid)?;
        let w = draw_weight_vector(self.scheme, self.n, &mut self.seeds.child(1).stream())?;
        design.gamma_sup(&w)
    }
}

/// `reps` draws of `stat` for the `i`-th sample size, in replicate order.
fn draw<F>(config: &ExperimentConfig, i: usize, n: usize, workers: &Workers, stat: F) -> Result<Vec<f64>>
where
    F: Fn(&Replicate) -> Result<f64> + Sync + Send,
{
    let scheme = config.weight_scheme()?;
    let root = SeedPath::new(config.seed).child(i as u64);
    workers.try_map(config.reps, |r| {
        stat(&Replicate {
            config,
            scheme: &scheme,
            n,
            seeds: root.child(r as u64),
        })
    })
}

fn expect_kind(config: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if config.kind != kind {
        return Err(Error::Config(format!(
            "expected a `{kind}` config, got `{}`",
            config.kind
        )));
    }
    config.validate()
}

fn kolmogorov_row(n: usize, values: Vec<f64>, envelope: f64) -> Result<RateRow> {
    let values = sorted(values);
    let d = ks_distance_to_cdf(&values, kolmogorov_cdf)?;
    Ok(RateRow {
        n,
        reps: values.len(),
        quantiles: quantiles(&values),
        mean: mean(&values),
        ks_distance: d,
        standard_error: ks_standard_error(values.len()),
        envelope,
        ratio: d / envelope,
        bandwidth: None,
        envelope_terms: None,
        reference_quantiles: None,
        raw_quantiles: None,
    })
}

/// Law of `sup_t |alpha*_n(t)|` against the Kolmogorov law, with envelope `log n / sqrt(n)`.
pub fn run_rate_experiment(config: &ExperimentConfig, workers: &Workers) -> Result<RateReport> {
    expect_kind(config, ExperimentKind::Rates)?;
    let rows = config
        .n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| kolmogorov_row(n, draw(config, i, n, workers, |rep| rep.sup())?, log_rate(n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(RateReport {
        kind: config.kind,
        statistic: "sup-process-distance".into(),
        reference: "kolmogorov".into(),
        seed: config.seed,
        trend: TrendSummary::from_rows(&rows),
        rows,
        config: config.clone(),
    })
}

/// Law of `sqrt(n)` times the partial-sum maximum against the simulated law of
/// `max_{k<=n} sup_t |K(t, k)| / sqrt(n)` on a grid with `n` intervals. The
/// envelope is `n^{1/4} (log n)^{1/2} / sqrt(n)`.
pub fn run_kiefer_rate_experiment(config: &ExperimentConfig, workers: &Workers) -> Result<RateReport> {
    expect_kind(config, ExperimentKind::KieferRates)?;
    let mut rows = Vec::with_capacity(config.n_grid.len());
    for (i, &n) in config.n_grid.iter().enumerate() {
        let raw = sorted(draw(config, i, n, workers, |rep| rep.partial_sum_max())?);
        let scaled: Vec<f64> = raw.iter().map(|s| (n as f64).sqrt() * s).collect();
        let reference = sorted(draw(config, i, n, workers, |rep| rep.kiefer_max())?);
        let d = ks_two_sample(&scaled, &reference);
        let nf = n as f64;
        let envelope = nf.powf(0.25) * nf.ln().sqrt() / nf.sqrt();
        rows.push(RateRow {
            n,
            reps: scaled.len(),
            quantiles: quantiles(&scaled),
            mean: mean(&scaled),
            ks_distance: d,
            standard_error: 0.5 * (1.0 / scaled.len() as f64 + 1.0 / reference.len() as f64).sqrt(),
            envelope,
            ratio: d / envelope,
            bandwidth: None,
            envelope_terms: None,
            reference_quantiles: Some(quantiles(&reference)),
            raw_quantiles: Some(quantiles(&raw)),
        });
    }
    Ok(RateReport {
        kind: config.kind,
        statistic: "sqrt-n-partial-sum-max".into(),
        reference: "kiefer-max-over-sqrt-n".into(),
        seed: config.seed,
        trend: TrendSummary::from_rows(&rows),
        rows,
        config: config.clone(),
    })
}

/// Law of `sup_x |gamma*_n(x)|` against the Kolmogorov law, with envelope
/// `log n / sqrt(n) + h sqrt(log(1/h))`.
pub fn run_kde_rate_experiment(config: &ExperimentConfig, workers: &Workers) -> Result<RateReport> {
    expect_kind(config, ExperimentKind::KdeRates)?;
    let kernel = config.kernel_spec()?;
    let mut rows = Vec::with_capacity(config.n_grid.len());
    for (i, &n) in config.n_grid.iter().enumerate() {
        let h = config.bandwidth.bandwidth(n)?;
        let terms = kde_envelope(n, h);
        let values = draw(config, i, n, workers, |rep| rep.gamma_sup(&kernel, h))?;
        let mut row = kolmogorov_row(n, values, terms.sampling + terms.smoothing)?;
        row.bandwidth = Some(h);
        row.envelope_terms = Some(terms);
        rows.push(row);
    }
    Ok(RateReport {
        kind: config.kind,
        statistic: "sup-gamma-star".into(),
        reference: "kolmogorov".into(),
        seed: config.seed,
        trend: TrendSummary::from_rows(&rows),
        rows,
        config: config.clone(),
    })
}

pub fn kde_envelope(n: usize, h: f64) -> EnvelopeTerms {
    EnvelopeTerms {
        sampling: log_rate(n),
        smoothing: h * (1.0 / h).ln().max(0.0).sqrt(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulatedValue {
    pub n: usize,
    pub rep: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTable {
    pub statistic: Statistic,
    pub seed: u64,
    pub values: Vec<SimulatedValue>,
}

impl SimulationTable {
    /// CSV with columns `n,rep,value`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "n,rep,value")?;
        for v in &self.values {
            writeln!(out, "{},{},{}", v.n, v.rep, v.value)?;
        }
        Ok(())
    }
}

/// Raw per-replicate statistics on the same substreams as the rate experiments.
pub fn simulate(config: &ExperimentConfig, workers: &Workers) -> Result<SimulationTable> {
    expect_kind(config, ExperimentKind::Simulate)?;
    let kernel = config.kernel_spec()?;
    let mut values = Vec::with_capacity(config.n_grid.len() * config.reps);
    for (i, &n) in config.n_grid.iter().enumerate() {
        let draws = match config.statistic {
            Statistic::Sup => draw(config, i, n, workers, |rep| rep.sup())?,
            Statistic::PartialSumMax => draw(config, i, n, workers, |rep| rep.partial_sum_max())?,
            Statistic::KieferMax => draw(config, i, n, workers, |rep| rep.kiefer_max())?,
            Statistic::GammaSup => {
                let h = config.bandwidth.bandwidth(n)?;
                draw(config, i, n, workers, |rep| rep.gamma_sup(&kernel, h))?
            }
        };
        values.extend(
            draws
                .into_iter()
                .enumerate()
                .map(|(rep, value)| SimulatedValue { n, rep, value }),
        );
    }
    Ok(SimulationTable {
        statistic: config.statistic,
        seed: config.seed,
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageSummary {
    pub kind: ExperimentKind,
    pub seed: u64,
    pub rows: Vec<CoverageReport>,
    pub config: ExperimentConfig,
}

pub fn run_coverage(config: &ExperimentConfig, workers: &Workers) -> Result<CoverageSummary> {
    expect_kind(config, ExperimentKind::Coverage)?;
    let scheme = config.weight_scheme()?;
    let root = SeedPath::new(config.seed);
    let rows = config
        .n_grid
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            coverage_experiment(
                &config.law,
                n,
                &scheme,
                config.n_boot,
                config.alpha,
                config.reps,
                &root.child(i as u64),
                config.radius_override,
                workers,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CoverageSummary {
        kind: config.kind,
        seed: config.seed,
        rows,
        config: config.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSummary {
    pub radius: f64,
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n_boot: usize,
    pub n: usize,
    pub seed: u64,
    pub scheme: SchemeKind,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdeBandSummary {
    pub radius: f64,
    pub alpha: f64,
    #[serde(rename = "N")]
    pub n_boot: usize,
    pub n: usize,
    pub seed: u64,
    pub scheme: SchemeKind,
    pub kernel: KernelName,
    pub bandwidth: f64,
    pub half_width: f64,
    pub config: ExperimentConfig,
}

fn data_sample(config: &ExperimentConfig) -> Result<Sample> {
    let path = config
        .data
        .as_deref()
        .ok_or_else(|| Error::Config(format!("{} needs a data file", config.kind)))?;
    read_sample_csv(path)
}

pub fn run_band(config: &ExperimentConfig, workers: &Workers) -> Result<(BandSummary, CdfBand)> {
    expect_kind(config, ExperimentKind::Band)?;
    let sample = data_sample(config)?;
    let scheme = config.weight_scheme()?;
    let est = estimate_band_radius(
        &sample,
        &scheme,
        config.n_boot,
        config.alpha,
        &SeedPath::new(config.seed),
        workers,
    )?;
    let band = cdf_confidence_band(&sample, est.radius)?;
    let summary = BandSummary {
        radius: est.radius,
        alpha: config.alpha,
        n_boot: config.n_boot,
        n: sample.len(),
        seed: config.seed,
        scheme: scheme.kind(),
        config: config.clone(),
    };
    Ok((summary, band))
}

pub fn run_kde_band(config: &ExperimentConfig, workers: &Workers) -> Result<(KdeBandSummary, KdeBand)> {
    expect_kind(config, ExperimentKind::KdeBand)?;
    let sample = data_sample(config)?;
    let scheme = config.weight_scheme()?;
    let kernel = config.kernel_spec()?;
    let h = config.bandwidth.bandwidth(sample.len())?;
    let grid = padded_grid(&sample, &kernel, h, config.grid_points);
    let band = kde_confidence_band(
        &sample,
        &kernel,
        &config.bandwidth,
        &scheme,
        config.n_boot,
        config.alpha,
        &grid,
        &SeedPath::new(config.seed),
        workers,
    )?;
    let summary = KdeBandSummary {
        radius: band.radius,
        alpha: config.alpha,
        n_boot: config.n_boot,
        n: sample.len(),
        seed: config.seed,
        scheme: scheme.kind(),
        kernel: config.kernel,
        bandwidth: h,
        half_width: band.radius / (sample.len() as f64 * h * h).sqrt(),
        config: config.clone(),
    };
    Ok((summary, band))
}

/// Result of [`run`].
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Rates(RateReport),
    Coverage(CoverageSummary),
    Band(BandSummary, CdfBand),
    KdeBand(KdeBandSummary, KdeBand),
    Simulate(SimulationTable),
}

pub fn run(config: &ExperimentConfig, workers: &Workers) -> Result<Outcome> {
    Ok(match config.kind {
        ExperimentKind::Rates => Outcome::Rates(run_rate_experiment(config, workers)?),
        ExperimentKind::KieferRates => Outcome::Rates(run_kiefer_rate_experiment(config, workers)?),
        ExperimentKind::KdeRates => Outcome::Rates(run_kde_rate_experiment(config, workers)?),
        ExperimentKind::Coverage => Outcome::Coverage(run_coverage(config, workers)?),
        ExperimentKind::Band => {
            let (summary, band) = run_band(config, workers)?;
            Outcome::Band(summary, band)
        }
        ExperimentKind::KdeBand => {
            let (summary, band) = run_kde_band(config, workers)?;
            Outcome::KdeBand(summary, band)
        }
        ExperimentKind::Simulate => Outcome::Simulate(simulate(config, workers)?),
    })
}

/// Pretty JSON with a trailing newline; field order is fixed by the types.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

impl Outcome {
    /// The JSON report (for `simulate`, a summary of the table).
    pub fn report_json(&self) -> Result<String> {
        match self {
            Outcome::Rates(r) => to_json(r),
            Outcome::Coverage(c) => to_json(c),
            Outcome::Band(s, _) => to_json(s),
            Outcome::KdeBand(s, _) => to_json(s),
            Outcome::Simulate(t) => to_json(t),
        }
    }

    pub fn has_table(&self) -> bool {
        matches!(self, Outcome::Band(..) | Outcome::KdeBand(..) | Outcome::Simulate(_))
    }

    pub fn write_table<W: Write>(&self, out: W) -> Result<()> {
        match self {
            Outcome::Band(_, band) => band.write_csv(out),
            Outcome::KdeBand(_, band) => band.write_csv(out),
            Outcome::Simulate(t) => t.write_csv(out),
            Outcome::Rates(_) | Outcome::Coverage(_) => Ok(()),
        }
    }

    /// Writes whichever of the report and the table have a path in `outputs`.
    pub fn write_outputs(&self, outputs: &Outputs) -> Result<()> {
        if let Some(path) = &outputs.report {
            let mut out = create(path)?;
            out.write_all(self.report_json()?.as_bytes())?;
            out.flush()?;
        }
        if let (Some(path), true) = (&outputs.table, self.has_table()) {
            let mut out = create(path)?;
            self.write_table(&mut out)?;
            out.flush()?;
        }
        Ok(())
    }
}
