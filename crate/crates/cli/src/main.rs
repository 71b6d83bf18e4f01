//! Command-line front end: `predict`, `simulate`, `spectrum`,
//! `discriminate`, and `verify`.
//!
//! Every command prints its report as JSON on stdout and writes a manifest
//! (plus any bulk CSV files) under `--out`. Exit codes: 0 success, 1 failed
//! verification or statistics, 2 usage/config/IO errors.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use retrolab::config::{default_config, load_config, DEFAULT_DISCRIMINATE_EVENTS, DEFAULT_SEED};
use retrolab::error::CliError;
use retrolab::formats::{read_events_csv, write_events_csv, write_spectrum_csv};
use retrolab::manifest::RunManifest;
use retrolab::parallel::generate_events;
use retrolab_core::causal::{
    causal_correlation, causal_joint, causal_joint_bbb, causal_singles, causal_singles_bbb,
    CausalRule,
};
use retrolab_core::kinematics::select_model_case;
use retrolab_core::qm::{
    qm_correlation, qm_joint, qm_joint_closed_long, qm_singles, DetectorSide, ProbabilityTable,
    SinglesPair,
};
use retrolab_core::sim::{
    coincidence_select, delay_spectrum, discriminate, discrimination_phases,
    estimate_correlation, ExperimentConfig, Model, NonLPolicy, DEFAULT_BIN_WIDTH,
};
use retrolab_core::verify::{
    format_summary, run_verification, DEFAULT_PHASE_GRID_SEED, DEFAULT_RANDOM_GRID_POINTS,
};
use retrolab_core::{Outcome, PhaseSettings, Subensemble};

#[derive(Parser)]
#[command(
    name = "retrolab",
    version,
    about = "Two-photon impact-series interferometer: model predictions, time-tagged \
             Monte Carlo simulation, and model discrimination"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic joint table, singles, and correlation for one model
    Predict(PredictArgs),
    /// Simulate a time-tagged coincidence experiment and write its files
    Simulate(SimulateArgs),
    /// Bin an event log into a time-delay spectrum
    Spectrum(SpectrumArgs),
    /// Run both models at the discrimination preset and compare estimates
    Discriminate(DiscriminateArgs),
    /// Check analytic identities and module invariants over a phase grid
    Verify(VerifyArgs),
}

#[derive(Args)]
struct PhaseArgs {
    /// Phase on photon 1's long arm (radians unless --degrees)
    #[arg(long, allow_negative_numbers = true)]
    alpha: Option<f64>,
    /// Phase ahead of BS21 (radians unless --degrees)
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Phase ahead of BS22 (radians unless --degrees)
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Interpret provided phase values as degrees
    #[arg(long)]
    degrees: bool,
}

impl PhaseArgs {
    /// Explicit flags override the defaults; --degrees converts only the
    /// values actually provided.
    fn resolve(&self, defaults: PhaseSettings) -> PhaseSettings {
        let pick = |flag: Option<f64>, fallback: f64| match flag {
            Some(v) if self.degrees => v.to_radians(),
            Some(v) => v,
            None => fallback,
        };
        PhaseSettings::new(
            pick(self.alpha, defaults.alpha),
            pick(self.beta, defaults.beta),
            pick(self.gamma, defaults.gamma),
        )
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PredictModel {
    /// Superposition rule over each interfering subensemble
    Qm,
    /// Indistinguishability-condition rule (at-rest configurations)
    Causal,
    /// All-before rule (fast-moving splitters)
    Bbb,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliModel {
    Qm,
    Causal,
}

impl From<CliModel> for Model {
    fn from(value: CliModel) -> Self {
        match value {
            CliModel::Qm => Model::Qm,
            CliModel::Causal => Model::Causal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CliPolicy {
    Qm,
    Uniform,
}

impl From<CliPolicy> for NonLPolicy {
    fn from(value: CliPolicy) -> Self {
        match value {
            CliPolicy::Qm => NonLPolicy::Qm,
            CliPolicy::Uniform => NonLPolicy::Uniform,
        }
    }
}

fn parse_subensemble(text: &str) -> Result<Subensemble, String> {
    match text {
        "L" => Ok(Subensemble::Long),
        "l" => Ok(Subensemble::Short),
        "2L-l" => Ok(Subensemble::TwoLongMinusShort),
        "2l-L" => Ok(Subensemble::TwoShortMinusLong),
        other => Err(format!(
            "unknown subensemble `{other}` (expected L, l, 2L-l, or 2l-L)"
        )),
    }
}

#[derive(Args)]
struct PredictArgs {
    /// Prediction model
    #[arg(long, value_enum)]
    model: PredictModel,
    #[command(flatten)]
    phases: PhaseArgs,
    /// Subensemble to condition on (causal models cover L only)
    #[arg(long, default_value = "L", value_parser = parse_subensemble)]
    subensemble: Subensemble,
    /// Output directory for the report and manifest
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Experiment config JSON (or a previous run manifest); flags override
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sampling model
    #[arg(long, value_enum)]
    model: Option<CliModel>,
    #[command(flatten)]
    phases: PhaseArgs,
    /// RNG seed
    #[arg(long, env = "RETROLAB_SEED")]
    seed: Option<u64>,
    /// Number of events
    #[arg(long)]
    events: Option<u64>,
    /// Per-detector Gaussian timestamp jitter (seconds)
    #[arg(long)]
    jitter: Option<f64>,
    /// Coincidence window center, relative delay (seconds)
    #[arg(long, allow_negative_numbers = true)]
    window_center: Option<f64>,
    /// Coincidence window half-width (seconds)
    #[arg(long)]
    window_width: Option<f64>,
    /// Outcome rule for non-L subensembles under the causal model
    #[arg(long, value_enum)]
    non_l_policy: Option<CliPolicy>,
    /// Spectrum bin width (seconds)
    #[arg(long)]
    bin_width: Option<f64>,
    /// Worker threads for event generation (output is identical at any count)
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Event CSV produced by `simulate`
    #[arg(long)]
    input: PathBuf,
    /// Config (or manifest) supplying the geometry for the delay reference
    #[arg(long)]
    config: Option<PathBuf>,
    /// Spectrum bin width (seconds)
    #[arg(long)]
    bin_width: Option<f64>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct DiscriminateArgs {
    /// Events per model
    #[arg(long, default_value_t = DEFAULT_DISCRIMINATE_EVENTS)]
    events: u64,
    /// RNG seed for the QM run; the causal run uses seed + 1
    #[arg(long, env = "RETROLAB_SEED")]
    seed: Option<u64>,
    #[command(flatten)]
    phases: PhaseArgs,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Phase-grid seed
    #[arg(long, env = "RETROLAB_SEED")]
    seed: Option<u64>,
    /// Number of random grid points on top of the {0, π/2}³ corners
    #[arg(long, default_value_t = DEFAULT_RANDOM_GRID_POINTS)]
    grid_points: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = match cli.command {
        Command::Predict(args) => cmd_predict(args, started),
        Command::Simulate(args) => cmd_simulate(args, started),
        Command::Spectrum(args) => cmd_spectrum(args, started),
        Command::Discriminate(args) => cmd_discriminate(args, started),
        Command::Verify(args) => cmd_verify(args, started),
    };
    match result {
        Ok(()) => {}
        Err(error) => {
            eprintln!("error: {error}");
            std::process::exit(error.exit_code());
        }
    }
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn emit(value: &serde_json::Value) -> Result<(), CliError> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn json_phases(phases: &PhaseSettings) -> serde_json::Value {
    json!({"alpha": phases.alpha, "beta": phases.beta, "gamma": phases.gamma})
}

fn json_table(table: &ProbabilityTable) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for outcome in Outcome::ALL {
        map.insert(outcome.key().to_owned(), json!(table.get(outcome)));
    }
    serde_json::Value::Object(map)
}

fn json_singles(singles: &SinglesPair) -> serde_json::Value {
    json!({"plus": singles.plus, "minus": singles.minus})
}

fn cmd_predict(args: PredictArgs, started: Instant) -> Result<(), CliError> {
    let phases = args.phases.resolve(discrimination_phases());
    phases
        .validate()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let (model_label, joint, side1, side2, correlation) = match args.model {
        PredictModel::Qm => {
            let (joint, side1, side2) = match args.subensemble {
                Subensemble::Long => (
                    qm_joint_closed_long(&phases),
                    qm_singles(DetectorSide::D1, Subensemble::Long, &phases)?,
                    qm_singles(DetectorSide::D2, Subensemble::Long, &phases)?,
                ),
                Subensemble::Short => (
                    qm_joint(Subensemble::Short, &phases)?,
                    qm_singles(DetectorSide::D1, Subensemble::Short, &phases)?,
                    qm_singles(DetectorSide::D2, Subensemble::Short, &phases)?,
                ),
                singleton => {
                    let table = ProbabilityTable::uniform();
                    let _ = singleton;
                    (table, table.side1_marginals(), table.side2_marginals())
                }
            };
            let correlation = joint.correlation().value();
            ("qm", joint, side1, side2, correlation)
        }
        PredictModel::Causal => {
            require_long(args.subensemble)?;
            let joint = causal_joint(&phases);
            (
                "causal",
                joint,
                causal_singles(DetectorSide::D1, &phases),
                causal_singles(DetectorSide::D2, &phases),
                causal_correlation(&phases).value(),
            )
        }
        PredictModel::Bbb => {
            require_long(args.subensemble)?;
            let joint = causal_joint_bbb(&phases);
            (
                "bbb",
                joint,
                causal_singles_bbb(DetectorSide::D1, &phases),
                causal_singles_bbb(DetectorSide::D2, &phases),
                joint.correlation().value(),
            )
        }
    };

    let report = json!({
        "command": "predict",
        "model": model_label,
        "subensemble": args.subensemble.label(),
        "phases": json_phases(&phases),
        "joint": json_table(&joint),
        "singles_side1": json_singles(&side1),
        "singles_side2": json_singles(&side2),
        "correlation": correlation,
    });

    fs::create_dir_all(&args.out)?;
    let report_path = args.out.join("predict_report.json");
    write_json(&report_path, &report)?;

    let config_value = json!({
        "model": model_label,
        "subensemble": args.subensemble.label(),
        "phases": json_phases(&phases),
    });
    let mut manifest = RunManifest::new("predict", config_value, None);
    manifest.record_output(&report_path);
    manifest.duration_s = started.elapsed().as_secs_f64();
    manifest.write(&args.out)?;

    emit(&report)
}

fn require_long(subensemble: Subensemble) -> Result<(), CliError> {
    if subensemble != Subensemble::Long {
        return Err(CliError::Config(format!(
            "not specified by paper: causal-model probabilities for subensemble {}",
            subensemble.label()
        )));
    }
    Ok(())
}

/// Analytic correlation of the subensemble-L table the simulation samples.
fn analytic_long_correlation(config: &ExperimentConfig) -> Result<f64, CliError> {
    Ok(match config.model {
        Model::Qm => qm_correlation(&config.phases).value(),
        Model::Causal => match select_model_case(&config.geometry)?.rule {
            CausalRule::AllBefore => causal_joint_bbb(&config.phases).correlation().value(),
            CausalRule::CausalIndistinguishability => causal_correlation(&config.phases).value(),
        },
    })
}

fn resolve_simulate_config(args: &SimulateArgs) -> Result<ExperimentConfig, CliError> {
    let mut config = match &args.config {
        Some(path) => load_config(path)?,
        None => default_config(),
    };
    if let Some(model) = args.model {
        config.model = model.into();
        if config.model == Model::Causal && config.non_l_policy.is_none() {
            config.non_l_policy = Some(NonLPolicy::Qm);
        }
    }
    config.phases = args.phases.resolve(config.phases);
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(events) = args.events {
        config.n_events = events;
    }
    if let Some(jitter) = args.jitter {
        config.jitter_sigma = jitter;
    }
    if let Some(center) = args.window_center {
        config.window.center = center;
    }
    if let Some(half_width) = args.window_width {
        config.window.half_width = half_width;
    }
    if let Some(policy) = args.non_l_policy {
        config.non_l_policy = Some(policy.into());
    }
    Ok(config)
}

fn cmd_simulate(args: SimulateArgs, started: Instant) -> Result<(), CliError> {
    let config = resolve_simulate_config(&args)?;
    let warnings = config.validate()?;
    for warning in &warnings {
        eprintln!("warning: {warning}");
    }
    let bin_width = args.bin_width.unwrap_or(DEFAULT_BIN_WIDTH);

    let records = generate_events(&config, args.workers)?;
    let reference = config.geometry.reference_delay()?;
    let spectrum = delay_spectrum(&records, bin_width, reference)?;
    let counts = coincidence_select(&records, config.window, reference);
    let estimate = estimate_correlation(&counts)?;
    let analytic = analytic_long_correlation(&config)?;

    fs::create_dir_all(&args.out)?;
    let events_path = args.out.join("events.csv");
    {
        let mut writer = BufWriter::new(File::create(&events_path)?);
        write_events_csv(&mut writer, &records)?;
        writer.flush()?;
    }
    let spectrum_path = args.out.join("spectrum.csv");
    {
        let mut writer = BufWriter::new(File::create(&spectrum_path)?);
        write_spectrum_csv(&mut writer, &spectrum)?;
        writer.flush()?;
    }

    let mut counts_map = serde_json::Map::new();
    for outcome in Outcome::ALL {
        counts_map.insert(outcome.key().to_owned(), json!(counts.get(outcome)));
    }
    let coincidences_value = json!({
        "window": {"center": config.window.center, "half_width": config.window.half_width},
        "reference_delay_s": reference,
        "counts": serde_json::Value::Object(counts_map),
        "total": counts.total(),
    });
    let coincidences_path = args.out.join("coincidences.json");
    write_json(&coincidences_path, &coincidences_value)?;

    let estimate_value = json!({
        "e_hat": estimate.e_hat,
        "std_error": estimate.std_error,
        "n": estimate.n,
        "analytic_correlation": analytic,
        "model": config.model.label(),
    });
    let estimate_path = args.out.join("estimate.json");
    write_json(&estimate_path, &estimate_value)?;

    let config_value = serde_json::to_value(&config)?;
    let mut manifest = RunManifest::new("simulate", config_value.clone(), Some(config.seed));
    for path in [&events_path, &spectrum_path, &coincidences_path, &estimate_path] {
        manifest.record_output(path);
    }
    manifest.duration_s = started.elapsed().as_secs_f64();
    manifest.write(&args.out)?;

    emit(&json!({
        "command": "simulate",
        "config": config_value,
        "warnings": warnings,
        "reference_delay_s": reference,
        "coincidences": coincidences_value,
        "estimate": estimate_value,
        "files": {
            "events": events_path.display().to_string(),
            "spectrum": spectrum_path.display().to_string(),
            "coincidences": coincidences_path.display().to_string(),
            "estimate": estimate_path.display().to_string(),
        },
    }))
}

fn cmd_spectrum(args: SpectrumArgs, started: Instant) -> Result<(), CliError> {
    let config = match &args.config {
        Some(path) => load_config(path)?,
        None => default_config(),
    };
    let bin_width = args.bin_width.unwrap_or(DEFAULT_BIN_WIDTH);
    let records = read_events_csv(File::open(&args.input).map_err(|e| {
        CliError::Config(format!("cannot open {}: {e}", args.input.display()))
    })?)?;
    let reference = config.geometry.reference_delay()?;
    let spectrum = delay_spectrum(&records, bin_width, reference)?;

    fs::create_dir_all(&args.out)?;
    let spectrum_path = args.out.join("spectrum.csv");
    {
        let mut writer = BufWriter::new(File::create(&spectrum_path)?);
        write_spectrum_csv(&mut writer, &spectrum)?;
        writer.flush()?;
    }

    let config_value = json!({
        "input": args.input.display().to_string(),
        "bin_width_s": bin_width,
        "geometry_config": serde_json::to_value(&config)?,
    });
    let mut manifest = RunManifest::new("spectrum", config_value, None);
    manifest.record_output(&spectrum_path);
    manifest.duration_s = started.elapsed().as_secs_f64();
    manifest.write(&args.out)?;

    emit(&json!({
        "command": "spectrum",
        "input": args.input.display().to_string(),
        "total": spectrum.total(),
        "occupied_bins": spectrum.occupied_bins(),
        "bin_width_s": bin_width,
        "reference_delay_s": reference,
        "files": {"spectrum": spectrum_path.display().to_string()},
    }))
}

fn cmd_discriminate(args: DiscriminateArgs, started: Instant) -> Result<(), CliError> {
    let seed = args.seed.unwrap_or(DEFAULT_SEED);
    let phases = args.phases.resolve(discrimination_phases());
    let mut config_qm = ExperimentConfig::preset(Model::Qm, args.events, seed);
    config_qm.phases = phases;
    let mut config_causal = ExperimentConfig::preset(Model::Causal, args.events, seed + 1);
    config_causal.phases = phases;

    let report = discriminate(&config_qm, &config_causal)?;
    if let Some(warning) = &report.phase_warning {
        eprintln!("warning: {warning}");
    }

    let report_value = json!({
        "command": "discriminate",
        "events_per_model": args.events,
        "seed_qm": seed,
        "seed_causal": seed + 1,
        "phases": json_phases(&phases),
        "analytic": {"qm": report.analytic_qm, "causal": report.analytic_causal},
        "empirical": {
            "qm": {"e_hat": report.estimate_qm.e_hat, "std_error": report.estimate_qm.std_error,
                    "n": report.estimate_qm.n},
            "causal": {"e_hat": report.estimate_causal.e_hat,
                        "std_error": report.estimate_causal.std_error,
                        "n": report.estimate_causal.n},
        },
        "separation_sigma": report.separation_sigma,
        "sufficient_separation": report.sufficient_separation,
        "warning": report.phase_warning,
    });

    fs::create_dir_all(&args.out)?;
    let report_path = args.out.join("discrimination.json");
    write_json(&report_path, &report_value)?;

    let config_value = json!({
        "qm": serde_json::to_value(&config_qm)?,
        "causal": serde_json::to_value(&config_causal)?,
    });
    let mut manifest = RunManifest::new("discriminate", config_value, Some(seed));
    manifest.record_output(&report_path);
    manifest.duration_s = started.elapsed().as_secs_f64();
    manifest.write(&args.out)?;

    emit(&report_value)
}

fn cmd_verify(args: VerifyArgs, started: Instant) -> Result<(), CliError> {
    let seed = args.seed.unwrap_or(DEFAULT_PHASE_GRID_SEED);
    let report = run_verification(seed, args.grid_points);
    for line in format_summary(&report) {
        eprintln!("{line}");
    }

    let properties: Vec<serde_json::Value> = report
        .properties
        .iter()
        .map(|p| {
            json!({
                "name": p.name,
                "max_deviation": p.max_deviation,
                "tolerance": p.tolerance,
                "passed": p.passed,
            })
        })
        .collect();
    let report_value = json!({
        "command": "verify",
        "grid_seed": report.grid_seed,
        "grid_points": report.grid_points,
        "passed": report.all_passed(),
        "properties": properties,
    });

    fs::create_dir_all(&args.out)?;
    let report_path = args.out.join("verify_report.json");
    write_json(&report_path, &report_value)?;

    let config_value = json!({"grid_seed": seed, "grid_points": args.grid_points});
    let mut manifest = RunManifest::new("verify", config_value, Some(seed));
    manifest.record_output(&report_path);
    manifest.duration_s = started.elapsed().as_secs_f64();
    manifest.write(&args.out)?;

    emit(&report_value)?;
    if report.all_passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|p| p.name).collect();
        Err(CliError::Failure(format!(
            "verification failed: {}",
            names.join(", ")
        )))
    }
}
