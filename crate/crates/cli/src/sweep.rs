//! Parameter sweeps: `P_e(φ)` and `D(T) = P_e,r − P_e,nr`, one curve per
//! cross-decay magnitude `r`.

use std::fmt::Write as _;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;

use crossdecay::analytic::{discriminator, prob_e_single_cavity_detuned, prob_e_single_cavity_resonant, prob_e_two_cavity};
use crossdecay::protocol::{run_single_cavity, run_two_cavity, SingleCavityVariant};

use crate::config::{Config, Engine, Experiment};

/// Largest allowed gap between the analytic and simulated engines.
pub const ENGINE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Phi,
    Time,
}

impl SweepKind {
    pub fn header(self) -> &'static str {
        match self {
            SweepKind::Phi => "phi_rad,r_per_s,p_e,engine",
            SweepKind::Time => "T_s,r_per_s,p_e_r,p_e_nr,D,engine",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub x: f64,
    pub r: f64,
    pub values: Vec<f64>,
    pub engine: &'static str,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub kind: SweepKind,
    pub rows: Vec<Row>,
    /// `# key: value` lines, without the prefix.
    pub metadata: Vec<(String, String)>,
    /// Largest analytic/simulated gap, when both engines ran.
    pub engine_gap: Option<f64>,
}

/// Everything needed to regenerate a sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepSpec {
    pub kind: SweepKind,
    pub grid: Vec<f64>,
    pub r_list: Vec<f64>,
    pub engine: Engine,
    pub config: Config,
}

impl SweepSpec {
    fn start_stop_count(&self) -> (f64, f64, usize) {
        (self.grid[0], self.grid[self.grid.len() - 1], self.grid.len())
    }
}

pub fn run(spec: &SweepSpec) -> Result<SweepResult> {
    // validates every r once, before the parallel section
    for &r in &spec.r_list {
        spec.config.protocol_config(r)?;
    }
    let points: Vec<(f64, f64)> = spec.r_list.iter().flat_map(|&r| spec.grid.iter().map(move |&x| (r, x))).collect();
    let evaluated: Vec<Vec<Row>> = points
        .par_iter()
        .map(|&(r, x)| evaluate(spec, r, x))
        .collect::<Result<_>>()?;
    let mut gap: Option<f64> = None;
    if spec.engine == Engine::Both {
        let worst = evaluated
            .iter()
            .map(|pair| pair[0].values.iter().zip(&pair[1].values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        gap = Some(worst);
    }
    let rows = evaluated.into_iter().flatten().collect();
    let (start, stop, count) = spec.start_stop_count();
    let metadata = vec![
        ("tool".into(), format!("crossdecay {}", env!("CARGO_PKG_VERSION"))),
        ("sweep".into(), format!("{} over [{start:.14e}, {stop:.14e}], {count} points", variable_name(spec.kind))),
        ("r_list".into(), spec.r_list.iter().map(|r| format!("{r:.14e}")).collect::<Vec<_>>().join(",")),
        ("engine".into(), serde_json::to_value(spec.engine)?.as_str().unwrap_or_default().to_string()),
        ("config".into(), serde_json::to_string(&spec.config).context("serializing config")?),
    ];
    Ok(SweepResult { kind: spec.kind, rows, metadata, engine_gap: gap })
}

fn variable_name(kind: SweepKind) -> &'static str {
    match kind {
        SweepKind::Phi => "phi",
        SweepKind::Time => "T",
    }
}

fn evaluate(spec: &SweepSpec, r: f64, x: f64) -> Result<Vec<Row>> {
    spec.engine
        .tags()
        .iter()
        .map(|&engine| {
            let values = match spec.kind {
                SweepKind::Phi => vec![phi_point(&spec.config, r, x, engine)?],
                SweepKind::Time => time_point(&spec.config, r, x, engine)?,
            };
            Ok(Row { x, r, values, engine })
        })
        .collect()
}

fn phi_point(cfg: &Config, r: f64, phi: f64, engine: &str) -> Result<f64> {
    let mut proto = cfg.protocol_config(r)?;
    proto.phi = phi;
    if engine == "analytic" {
        let d = &cfg.decay;
        return Ok(prob_e_two_cavity(&proto.prepared_params()?, d.k, r, d.gamma, proto.window)?);
    }
    Ok(run_two_cavity(&proto, cfg.protocol.readout)?.p_e)
}

fn time_point(cfg: &Config, r: f64, t: f64, engine: &str) -> Result<Vec<f64>> {
    let d = &cfg.decay;
    let (p_r, p_nr) = if engine == "analytic" {
        (prob_e_single_cavity_resonant(d.k, r, d.gamma, t)?, prob_e_single_cavity_detuned(d.k, t)?)
    } else {
        let mut proto = cfg.protocol_config(r)?;
        proto.window = t;
        (
            run_single_cavity(&proto, SingleCavityVariant::Resonant)?.p_e,
            run_single_cavity(&proto, SingleCavityVariant::Detuned)?.p_e,
        )
    };
    let difference = if engine == "analytic" { discriminator(d.k, r, d.gamma, t)? } else { p_r - p_nr };
    Ok(vec![p_r, p_nr, difference])
}

impl SweepResult {
    /// Metadata, header and rows; numbers in 15-digit scientific notation.
    pub fn to_csv(&self, timestamp: Option<&str>) -> String {
        let mut out = String::new();
        for (key, value) in &self.metadata {
            let _ = writeln!(out, "# {key}: {value}");
        }
        if let Some(ts) = timestamp {
            let _ = writeln!(out, "# timestamp: {ts}");
        }
        out.push_str(self.kind.header());
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{:.14e},{:.14e}", row.x, row.r);
            for v in &row.values {
                let _ = write!(out, ",{v:.14e}");
            }
            let _ = writeln!(out, ",{}", row.engine);
        }
        out
    }
}

/// Sweep of `kind` with the experiment field checked.
pub fn check_experiment(cfg: &Config, kind: SweepKind) -> Result<()> {
    if kind == SweepKind::Phi && cfg.protocol.experiment != Experiment::TwoCavity {
        anyhow::bail!("sweep-phi runs the two-cavity experiment; protocol.experiment must be \"two_cavity\"");
    }
    Ok(())
}
