use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wboot::experiments::{run, ExperimentConfig, ExperimentKind, Outcome, Statistic};
use wboot::kde::{BandwidthRule, KernelName};
use wboot::law::ContinuousLaw;
use wboot::parallel::Workers;
use wboot::weights::SchemeKind;
use wboot::Error;

/// Weighted-bootstrap confidence bands and Monte Carlo rate experiments.
///
/// Worker threads default to the available cores; set WBOOT_THREADS to cap
/// them. The thread count never changes results.
#[derive(Parser, Debug)]
#[command(name = "wboot", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Confidence band for the distribution function of a data sample.
    Band {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        boot: Boot,
    },
    /// Confidence band for the density of a data sample.
    KdeBand {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        boot: Boot,
        #[command(flatten)]
        kde: Kde,
    },
    /// Coverage of the bootstrap band on simulated samples.
    Coverage {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        boot: Boot,
        #[command(flatten)]
        sizes: Sizes,
        /// Force the band radius (diagnostic).
        #[arg(long)]
        radius_override: Option<f64>,
    },
    /// Law of the bootstrapped sup statistic against the Kolmogorov law.
    Rates {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sizes: Sizes,
    },
    /// Partial-sum maximum against simulated Kiefer fields.
    KieferRates {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sizes: Sizes,
    },
    /// Sup of the bootstrapped KDE process against the Kolmogorov law.
    KdeRates {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sizes: Sizes,
        #[command(flatten)]
        kde: Kde,
    },
    /// Raw per-replicate statistics as CSV (n,rep,value).
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sizes: Sizes,
        #[command(flatten)]
        kde: Kde,
        #[arg(long, value_parser = parse_statistic)]
        statistic: Option<Statistic>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// JSON config; its keys take precedence over flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Single-column CSV sample.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// exp-bayesian, two-point, efron or uniform.
    #[arg(long, value_parser = parse_scheme)]
    scheme: Option<SchemeKind>,
    /// Lower support point of the two-point scheme.
    #[arg(long)]
    a: Option<f64>,
    /// Upper support point of the two-point scheme.
    #[arg(long)]
    b: Option<f64>,
    /// Resample size of the efron scheme.
    #[arg(long)]
    m: Option<usize>,
    /// True law for simulated samples: uniform, normal or exponential.
    #[arg(long, value_parser = parse_law)]
    law: Option<ContinuousLaw>,
    /// Main output: the CSV table for band, kde-band and simulate, the JSON report otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON report path when --out holds a table.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Boot {
    #[arg(long)]
    alpha: Option<f64>,
    /// Number of bootstrap replicates N.
    #[arg(long)]
    boot: Option<usize>,
}

#[derive(Args, Debug)]
struct Sizes {
    /// Comma-separated, strictly increasing sample sizes.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long)]
    reps: Option<usize>,
}

#[derive(Args, Debug)]
struct Kde {
    #[arg(long, value_parser = parse_kernel)]
    kernel: Option<KernelName>,
    /// Fixed bandwidth; otherwise h = c n^-gamma.
    #[arg(long, conflicts_with_all = ["bandwidth_c", "bandwidth_gamma"])]
    h: Option<f64>,
    #[arg(long)]
    bandwidth_c: Option<f64>,
    #[arg(long)]
    bandwidth_gamma: Option<f64>,
    /// Evaluation grid size.
    #[arg(long)]
    grid_points: Option<usize>,
}

fn parse_scheme(s: &str) -> Result<SchemeKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|_| format!("unknown scheme `{s}`"))
}

fn parse_kernel(s: &str) -> Result<KernelName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_statistic(s: &str) -> Result<Statistic, String> {
    serde_json::from_value(serde_json::Value::String(s.to_owned())).map_err(|_| format!("unknown statistic `{s}`"))
}

fn parse_law(s: &str) -> Result<ContinuousLaw, String> {
    match s {
        "uniform" => Ok(ContinuousLaw::standard_uniform()),
        "normal" => Ok(ContinuousLaw::Normal { mean: 0.0, sd: 1.0 }),
        "exponential" => Ok(ContinuousLaw::Exponential { rate: 1.0 }),
        other => Err(format!("unknown law `{other}`")),
    }
}

impl Common {
    fn apply(&self, c: &mut ExperimentConfig, out_is_table: bool) {
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        if let Some(kind) = self.scheme {
            c.scheme.kind = kind;
        }
        c.scheme.a = self.a.or(c.scheme.a);
        c.scheme.b = self.b.or(c.scheme.b);
        c.scheme.m = self.m.or(c.scheme.m);
        if let Some(law) = &self.law {
            c.law = *law;
        }
        if self.data.is_some() {
            c.data = self.data.clone();
        }
        if out_is_table {
            c.outputs.table = self.out.clone();
            c.outputs.report = self.report.clone();
        } else {
            c.outputs.report = self.out.clone().or_else(|| self.report.clone());
        }
    }
}

impl Boot {
    fn apply(&self, c: &mut ExperimentConfig) {
        c.alpha = self.alpha.unwrap_or(c.alpha);
        c.n_boot = self.boot.unwrap_or(c.n_boot);
    }
}

impl Sizes {
    fn apply(&self, c: &mut ExperimentConfig) {
        if let Some(n) = &self.n {
            c.n_grid = n.clone();
        }
        c.reps = self.reps.unwrap_or(c.reps);
    }
}

impl Kde {
    fn apply(&self, c: &mut ExperimentConfig) {
        c.kernel = self.kernel.unwrap_or(c.kernel);
        if let Some(h) = self.h {
            c.bandwidth = BandwidthRule::Fixed { h };
        } else if self.bandwidth_c.is_some() || self.bandwidth_gamma.is_some() {
            c.bandwidth = BandwidthRule::Power {
                c: self.bandwidth_c.unwrap_or(1.0),
                gamma: self.bandwidth_gamma.unwrap_or(0.2),
            };
        }
        c.grid_points = self.grid_points.unwrap_or(c.grid_points);
    }
}

fn build_config(command: &Command) -> Result<ExperimentConfig, Error> {
    let (kind, common) = match command {
        Command::Band { common, .. } => (ExperimentKind::Band, common),
        Command::KdeBand { common, .. } => (ExperimentKind::KdeBand, common),
        Command::Coverage { common, .. } => (ExperimentKind::Coverage, common),
        Command::Rates { common, .. } => (ExperimentKind::Rates, common),
        Command::KieferRates { common, .. } => (ExperimentKind::KieferRates, common),
        Command::KdeRates { common, .. } => (ExperimentKind::KdeRates, common),
        Command::Simulate { common, .. } => (ExperimentKind::Simulate, common),
    };
    let mut c = ExperimentConfig::new(kind);
    let out_is_table = matches!(
        kind,
        ExperimentKind::Band | ExperimentKind::KdeBand | ExperimentKind::Simulate
    );
    common.apply(&mut c, out_is_table);
    match command {
        Command::Band { boot, .. } => boot.apply(&mut c),
        Command::KdeBand { boot, kde, .. } => {
            boot.apply(&mut c);
            kde.apply(&mut c);
        }
        Command::Coverage {
            boot,
            sizes,
            radius_override,
            ..
        } => {
            boot.apply(&mut c);
            sizes.apply(&mut c);
            c.radius_override = radius_override.or(c.radius_override);
        }
        Command::Rates { sizes, .. } | Command::KieferRates { sizes, .. } => sizes.apply(&mut c),
        Command::KdeRates { sizes, kde, .. } => {
            sizes.apply(&mut c);
            kde.apply(&mut c);
        }
        Command::Simulate {
            sizes, kde, statistic, ..
        } => {
            sizes.apply(&mut c);
            kde.apply(&mut c);
            c.statistic = statistic.unwrap_or(c.statistic);
        }
    }
    match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            let value = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            c.overlay(value)
        }
        None => {
            c.validate()?;
            Ok(c)
        }
    }
}

/// Errors caused by the request itself rather than by the data or the system.
fn is_config_error(err: &Error) -> bool {
    matches!(
        err,
        Error::Config(_)
            | Error::InvalidParameter { .. }
            | Error::UnsupportedScheme { .. }
            | Error::MomentViolation { .. }
            | Error::CustomMomentsRejected { .. }
            | Error::InvalidKernel(_)
            | Error::MalformedGrid(_)
            | Error::CoarseGrid { .. }
    )
}

fn emit(outcome: &Outcome, config: &ExperimentConfig) -> Result<(), Error> {
    outcome.write_outputs(&config.outputs)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match outcome {
        Outcome::Simulate(_) if config.outputs.table.is_none() => outcome.write_table(&mut out)?,
        Outcome::Simulate(_) => {}
        _ if config.outputs.report.is_none() => out.write_all(outcome.report_json()?.as_bytes())?,
        _ => {}
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build_config(&cli.command)
        .and_then(|config| Ok((config, Workers::from_env()?)))
        .and_then(|(config, workers)| {
            let outcome = run(&config, &workers)?;
            emit(&outcome, &config)
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) if is_config_error(&err) => {
            eprintln!("wboot: {err}");
            eprintln!("run `wboot --help` for usage");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("wboot: {err}");
            ExitCode::from(1)
        }
    }
}
