//! Argument parsing and the three subcommands.

use std::collections::hash_map::RandomState;
use std::fs;
use std::hash::BuildHasher;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use clickstat::criteria::DEFAULT_THRESHOLD;
use clickstat::uncertainty::{BootstrapConfig, DEFAULT_REPLICATES};
use clickstat::{DetectorConfig, StateSpec};

use crate::counts_csv;
use crate::error::{CliError, Result};
use crate::pipeline::{self, Sampler, Simulation};
use crate::report_json::{plot_csv, ReportFile};
use crate::table;

#[derive(Debug, Parser)]
#[command(
    name = "clickstat",
    version,
    about = "Simulate and analyze two-mode click-counting statistics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a joint click-count matrix and write the exact distribution.
    Simulate(SimulateArgs),
    /// Evaluate every criterion on a counts file with bootstrap errors.
    Analyze(AnalyzeArgs),
    /// Render a comparison table over several report files.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Coherent,
    Tmsv,
    SplitPhoton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerArg {
    Multinomial,
    Physical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub state: StateKind,
    /// Split-photon transmissivity squared.
    #[arg(long)]
    pub t2: Option<f64>,
    /// TMSV squeezing parameter squared.
    #[arg(long)]
    pub lambda2: Option<f64>,
    /// Coherent mean photon number in arm A.
    #[arg(long)]
    pub mean_a: Option<f64>,
    /// Coherent mean photon number in arm B; defaults to `--mean-a`.
    #[arg(long)]
    pub mean_b: Option<f64>,
    /// Bins per detector (arm B defaults to the same).
    #[arg(long, default_value_t = 8)]
    pub bins: usize,
    /// Detection efficiency.
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    /// Dark-click probability per bin.
    #[arg(long, default_value_t = 0.0)]
    pub nu: f64,
    /// Arm-B overrides.
    #[arg(long)]
    pub bins_b: Option<usize>,
    #[arg(long)]
    pub eta_b: Option<f64>,
    #[arg(long)]
    pub nu_b: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub shots: u64,
    /// Drawn from system entropy and recorded when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = SamplerArg::Multinomial)]
    pub sampler: SamplerArg,
    /// Counts CSV.
    #[arg(long, default_value = "counts.csv")]
    pub out: PathBuf,
    /// Exact distribution CSV; defaults to `<out stem>.exact.csv`.
    #[arg(long)]
    pub exact_out: Option<PathBuf>,
    /// Metadata sidecar; defaults to `<out stem>.meta.json`.
    #[arg(long)]
    pub meta_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_REPLICATES)]
    pub replicates: usize,
    /// Bootstrap seed; drawn from system entropy and recorded when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Significance multiplier applied to the bootstrap standard error.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Report JSON; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// `criterion,value,bound,stderr` rows for plotting.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
    /// Row label; defaults to the input file stem.
    #[arg(long)]
    pub label: Option<String>,
    /// Simulation sidecar to copy into the report parameters.
    #[arg(long)]
    pub meta: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Report JSON files, one table row each.
    #[arg(required = true)]
    pub reports: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = TableFormat::Text)]
    pub format: TableFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => simulate(&a),
        Command::Analyze(a) => analyze(&a),
        Command::Report(a) => report(&a),
    }
}

pub fn entropy_seed() -> u64 {
    RandomState::new().hash_one(std::time::SystemTime::now())
}

fn required(v: Option<f64>, flag: &str, state: &str) -> Result<f64> {
    v.ok_or_else(|| CliError::Usage(format!("--state {state} requires {flag}")))
}

impl SimulateArgs {
    pub fn state_spec(&self) -> Result<StateSpec> {
        let spec = match self.state {
            StateKind::Coherent => {
                let a = required(self.mean_a, "--mean-a", "coherent")?;
                StateSpec::Coherent {
                    mean_a: a,
                    mean_b: self.mean_b.unwrap_or(a),
                }
            }
            StateKind::Tmsv => {
                StateSpec::tmsv_from_lambda2(required(self.lambda2, "--lambda2", "tmsv")?)
            }
            StateKind::SplitPhoton => {
                StateSpec::split_photon_from_t2(required(self.t2, "--t2", "split-photon")?)
            }
        };
        spec.validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(spec)
    }

    pub fn detectors(&self) -> Result<(DetectorConfig, DetectorConfig)> {
        let usage = |e: clickstat::Error| CliError::Usage(e.to_string());
        let a = DetectorConfig::new(self.bins, self.eta, self.nu).map_err(usage)?;
        let b = DetectorConfig::new(
            self.bins_b.unwrap_or(self.bins),
            self.eta_b.unwrap_or(self.eta),
            self.nu_b.unwrap_or(self.nu),
        )
        .map_err(usage)?;
        Ok((a, b))
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("counts");
    path.with_file_name(format!("{stem}{suffix}"))
}

fn state_json(spec: &StateSpec) -> Value {
    match spec {
        StateSpec::Coherent { mean_a, mean_b } => {
            json!({"kind": "coherent", "mean_a": mean_a, "mean_b": mean_b})
        }
        StateSpec::Tmsv { lambda } => {
            json!({"kind": "tmsv", "lambda": lambda, "lambda2": lambda * lambda})
        }
        StateSpec::SplitPhoton { t } => json!({"kind": "split-photon", "t": t, "t2": t * t}),
        StateSpec::Custom(jpd) => json!({"kind": "custom", "label": jpd.label()}),
    }
}

fn detector_json(d: &DetectorConfig) -> Value {
    json!({"bins": d.bins(), "efficiency": d.efficiency(), "dark_click": d.dark_click()})
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    if args.shots == 0 {
        return Err(CliError::Usage("--shots must be at least 1".into()));
    }
    let spec = args.state_spec()?;
    let (detector_a, detector_b) = args.detectors()?;
    let seed = args.seed.unwrap_or_else(entropy_seed);
    let sim = Simulation {
        spec,
        detector_a,
        detector_b,
        shots: args.shots,
        seed,
        sampler: match args.sampler {
            SamplerArg::Multinomial => Sampler::Multinomial,
            SamplerArg::Physical => Sampler::Physical,
        },
    };
    let out = pipeline::simulate(&sim)?;

    let exact_path = args
        .exact_out
        .clone()
        .unwrap_or_else(|| sibling(&args.out, ".exact.csv"));
    let meta_path = args
        .meta_out
        .clone()
        .unwrap_or_else(|| sibling(&args.out, ".meta.json"));
    counts_csv::save_counts(&args.out, &out.counts)?;
    counts_csv::save_distribution(&exact_path, &out.exact)?;

    let meta = json!({
        "command": "simulate",
        "seed": seed,
        "shots": args.shots,
        "sampler": format!("{:?}", sim.sampler).to_lowercase(),
        "state": state_json(&sim.spec),
        "detector_a": detector_json(&sim.detector_a),
        "detector_b": detector_json(&sim.detector_b),
        "counts": args.out,
        "exact": exact_path,
        "summed_click_mean_exact": clickstat::stats::summed_click_mean(&out.exact),
    });
    let text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    fs::write(&meta_path, text + "\n").map_err(|e| CliError::io(&meta_path, e))
}

fn analyze(args: &AnalyzeArgs) -> Result<()> {
    if args.replicates < 2 {
        return Err(CliError::Usage("--replicates must be at least 2".into()));
    }
    if !(args.threshold.is_finite() && args.threshold >= 0.0) {
        return Err(CliError::Usage(
            "--threshold must be a non-negative number".into(),
        ));
    }
    let counts = counts_csv::load_counts(&args.input)?;
    let seed = args.seed.unwrap_or_else(entropy_seed);
    let cfg = BootstrapConfig::new(args.replicates, seed);
    let criteria = pipeline::analyze(&counts, &cfg, args.threshold)?;

    let simulation = match &args.meta {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            serde_json::from_str::<Value>(&text)
                .map_err(|e| CliError::Data(format!("{}: invalid JSON: {e}", path.display())))?
        }
        None => Value::Null,
    };
    let parameters = json!({
        "input": args.input,
        "bootstrap_seed": seed,
        "replicates": args.replicates,
        "threshold": args.threshold,
        "simulation": simulation,
    });
    let label = args.label.clone().unwrap_or_else(|| {
        args.input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let report = ReportFile::new(label, &criteria, parameters);

    if let Some(path) = &args.plot_data {
        fs::write(path, plot_csv(&report.plot_rows())).map_err(|e| CliError::io(path, e))?;
    }
    match &args.output {
        Some(path) => report.save(path),
        None => write_stdout(&(report.to_json() + "\n")),
    }
}

fn report(args: &ReportArgs) -> Result<()> {
    let reports = args
        .reports
        .iter()
        .map(|p| ReportFile::load(p))
        .collect::<Result<Vec<_>>>()?;
    let text = match args.format {
        TableFormat::Text => table::render_text(&reports)?,
        TableFormat::Csv => table::render_csv(&reports)?,
    };
    match &args.output {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => write_stdout(&text),
    }
}

fn write_stdout(text: &str) -> Result<()> {
    io::stdout()
        .lock()
        .write_all(text.as_bytes())
        .map_err(|e| CliError::io("<stdout>", e))
}
