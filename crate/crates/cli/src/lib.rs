//! Command-line front end: probability sweeps, single protocol runs and the
//! validation suite. Exit codes: 0 success, 1 usage or configuration error,
//! 2 validation failure.

pub mod config;
pub mod sweep;
pub mod validate;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crossdecay::protocol::{run_single_cavity, run_two_cavity, RunRecord, SingleCavityVariant};
use crossdecay::Frame;

use crate::config::{Config, Engine, Experiment, PHI_RANGE, WINDOW_RANGE};
use crate::sweep::{SweepKind, SweepSpec, ENGINE_TOL};
use crate::validate::{Fault, Profile};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;

/// Default cross-decay magnitudes of the φ sweep, s⁻¹.
pub const PHI_R_LIST: [f64; 3] = [500.0, 750.0, 1000.0];
/// Default cross-decay magnitudes of the window sweep, s⁻¹.
pub const TIME_R_LIST: [f64; 3] = [500.0, 900.0, 1000.0];
pub const PHI_POINTS: usize = 201;
pub const TIME_POINTS: usize = 101;

#[derive(Debug, Parser)]
#[command(name = "crossdecay", version, about = "Cross-decay protected states of two cavity modes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Atomic excitation probability against the preparation phase φ.
    SweepPhi(SweepArgs),
    /// Discriminator D = P_e,r − P_e,nr against the window T.
    SweepTime(SweepArgs),
    /// One protocol run, printed as JSON.
    Simulate(SimulateArgs),
    /// Oracle suite, printed as a JSON report.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// JSON configuration with sections decay, protocol and sweep.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub engine: Option<Engine>,
    #[arg(long, value_enum)]
    pub frame: Option<FrameArg>,
    /// Write output to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Grid points, both ends included.
    #[arg(long)]
    pub points: Option<usize>,
    /// Cross-decay magnitudes r in s⁻¹.
    #[arg(long, value_delimiter = ',')]
    pub r_list: Option<Vec<f64>>,
    /// Add a `# timestamp:` metadata line; omitted by default so output is reproducible.
    #[arg(long)]
    pub timestamp: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum, default_value = "default")]
    pub profile: Profile,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<Fault>,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum FrameArg {
    Lab,
    Rotating,
}

impl From<FrameArg> for Frame {
    fn from(f: FrameArg) -> Self {
        match f {
            FrameArg::Lab => Frame::Lab,
            FrameArg::Rotating => Frame::Rotating,
        }
    }
}

/// Parses `args`, runs the command and returns the exit code. Diagnostics go
/// to standard error.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command) -> Result<u8> {
    match command {
        Command::SweepPhi(args) => sweep(SweepKind::Phi, args),
        Command::SweepTime(args) => sweep(SweepKind::Time, args),
        Command::Simulate(args) => simulate(args),
        Command::Validate(args) => validate(args),
    }
}

fn load_config(common: &CommonArgs) -> Result<Config> {
    let mut cfg = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(frame) = common.frame {
        cfg.protocol.frame = frame.into();
    }
    if let Some(engine) = common.engine {
        cfg.sweep.engine = Some(engine);
    }
    Ok(cfg)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn sweep(kind: SweepKind, args: SweepArgs) -> Result<u8> {
    let cfg = load_config(&args.common)?;
    sweep::check_experiment(&cfg, kind)?;
    let (range, count, defaults) = match kind {
        SweepKind::Phi => (PHI_RANGE, PHI_POINTS, &PHI_R_LIST),
        SweepKind::Time => (WINDOW_RANGE, TIME_POINTS, &TIME_R_LIST),
    };
    let expected = match kind {
        SweepKind::Phi => config::SweepVariable::Phi,
        SweepKind::Time => config::SweepVariable::Window,
    };
    if let Some(v) = cfg.sweep.variable {
        if v != expected {
            bail!("sweep.variable {v:?} does not match this subcommand");
        }
    }
    let grid = cfg.grid(range.0, range.1, count, args.points)?;
    let r_list = cfg.r_list(defaults, args.r_list.as_deref())?;
    let engine = cfg.sweep.engine.unwrap_or_default();
    // embedded config regenerates the output on its own
    let mut cfg = cfg;
    cfg.protocol.omega_a = Some(cfg.omega_a());
    cfg.sweep = config::SweepSection {
        variable: Some(expected),
        start: Some(grid[0]),
        stop: Some(grid[grid.len() - 1]),
        count: Some(grid.len()),
        r_list: Some(r_list.clone()),
        engine: Some(engine),
    };
    let spec = SweepSpec { kind, grid, r_list, engine, config: cfg };
    let result = sweep::run(&spec)?;
    let stamp = args.timestamp.then(unix_timestamp);
    emit(args.common.out.as_deref(), &result.to_csv(stamp.as_deref()))?;
    if let Some(gap) = result.engine_gap {
        if gap >= ENGINE_TOL {
            eprintln!("engine disagreement {gap:.3e} exceeds {ENGINE_TOL:e}");
            return Ok(EXIT_VALIDATION);
        }
    }
    Ok(EXIT_OK)
}

fn unix_timestamp() -> String {
    let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    format!("{secs} s since the Unix epoch")
}

/// Protocol run of the configured experiment at `cfg.decay.r`.
pub fn simulate_config(cfg: &Config) -> Result<RunRecord> {
    let proto = cfg.protocol_config(cfg.decay.r)?;
    Ok(match cfg.protocol.experiment {
        Experiment::TwoCavity => run_two_cavity(&proto, cfg.protocol.readout)?,
        Experiment::SingleCavityResonant => run_single_cavity(&proto, SingleCavityVariant::Resonant)?,
        Experiment::SingleCavityDetuned => run_single_cavity(&proto, SingleCavityVariant::Detuned)?,
    })
}

fn simulate(args: SimulateArgs) -> Result<u8> {
    let cfg = load_config(&args.common)?;
    let engine = cfg.sweep.engine.unwrap_or(Engine::Both);
    let record = simulate_config(&cfg)?;
    let p_e = match engine {
        Engine::Analytic => record.p_e_analytic,
        Engine::Simulated | Engine::Both => record.p_e,
    };
    let gap = (record.p_e - record.p_e_analytic).abs();
    let doc = json!({
        "engine": engine,
        "p_e": p_e,
        "p_e_simulated": record.p_e,
        "p_e_analytic": record.p_e_analytic,
        "config": cfg,
        "record": record,
    });
    emit(args.common.out.as_deref(), &format!("{}\n", serde_json::to_string_pretty(&doc)?))?;
    if engine == Engine::Both && gap >= ENGINE_TOL {
        eprintln!("engine disagreement {gap:.3e} exceeds {ENGINE_TOL:e}");
        return Ok(EXIT_VALIDATION);
    }
    Ok(EXIT_OK)
}

fn validate(args: ValidateArgs) -> Result<u8> {
    let report = validate::run(args.profile, args.inject_fault);
    emit(args.out.as_deref(), &format!("{}\n", serde_json::to_string_pretty(&report)?))?;
    for c in report.checks.iter().filter(|c| !c.passed) {
        eprintln!("check {} failed: deviation {:.3e}, tolerance {:.1e}; {}", c.name, c.max_deviation, c.tolerance, c.detail);
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_VALIDATION })
}
