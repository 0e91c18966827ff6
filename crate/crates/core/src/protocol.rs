//! Explicit replay of the two experiments: a preparation atom, a dissipative
//! window, and a readout atom whose excitation probability is recorded.
//!
//! Pulses are unitary unless `dissipate_during_pulses` is set. Between the
//! atoms the atom factor is traced out, since the preparation atom leaves in
//! `|g⟩` and a fresh readout atom enters in `|g⟩`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2, TAU};

use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::analytic::{
    prepared_state, prob_e_single_cavity_detuned, prob_e_single_cavity_resonant,
    prob_e_two_cavity, PreparedStateParams,
};
use crate::error::{Error, Result};
use crate::integrator::{
    evolve_master, evolve_unitary_density, jc_hamiltonian, unitary_propagator, Coupling,
    EvolutionSpec,
};
use crate::liouvillian::{build_symmetric_liouvillian, Frame, SymmetricDecayParameters};
use crate::superop::{SuperOperator, MAX_DENSE_DIM};
use crate::tensor::{DensityMatrix, Ket, Operator, SpaceSignature, EXCITED, GROUND};

/// Fidelity required of prepared states, and of the atom being left in `|g⟩`.
pub const PREPARATION_TOL: f64 = 1e-9;
const BOUNDARY_TOL: f64 = 1e-9;

/// Vacuum Rabi coupling and the two frequencies of the atom–field Hamiltonians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomFieldParams {
    pub g: f64,
    pub omega: f64,
    pub omega_a: f64,
}

impl AtomFieldParams {
    /// The Hamiltonian in the requested frame. The rotating frame removes
    /// `Ω(N + σz/2)`, which commutes with every coupling used here.
    pub fn hamiltonian(&self, space: &SpaceSignature, coupling: Coupling, frame: Frame) -> Result<Operator> {
        let (omega, omega_a) = match frame {
            Frame::Lab => (self.omega, self.omega_a),
            Frame::Rotating => (0.0, self.omega_a - self.omega),
        };
        jc_hamiltonian(space, coupling, self.g, omega, omega_a)
    }

    /// Parameters whose Hamiltonian is the negative of this one.
    pub fn reversed(&self) -> Self {
        Self { g: -self.g, omega: -self.omega, omega_a: -self.omega_a }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SegmentKind {
    /// Atom–field interaction, optionally with the cavity reservoir acting.
    Pulse {
        coupling: Coupling,
        field: AtomFieldParams,
        dissipation: Option<SymmetricDecayParameters>,
    },
    /// Reservoir only.
    Dissipative { decay: SymmetricDecayParameters },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub label: String,
    pub kind: SegmentKind,
    pub duration: f64,
    pub frame: Frame,
}

impl Segment {
    pub fn pulse(label: &str, coupling: Coupling, field: AtomFieldParams, duration: f64, frame: Frame) -> Self {
        Self {
            label: label.to_owned(),
            kind: SegmentKind::Pulse { coupling, field, dissipation: None },
            duration,
            frame,
        }
    }

    pub fn dissipative(label: &str, decay: SymmetricDecayParameters, duration: f64, frame: Frame) -> Self {
        Self { label: label.to_owned(), kind: SegmentKind::Dissipative { decay }, duration, frame }
    }

    /// Let the reservoir act during a pulse.
    pub fn with_dissipation(mut self, decay: SymmetricDecayParameters) -> Self {
        if let SegmentKind::Pulse { dissipation, .. } = &mut self.kind {
            *dissipation = Some(decay);
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SegmentRecord {
    pub label: String,
    pub start: f64,
    pub duration: f64,
}

fn master_spec(l: &SuperOperator, duration: f64) -> EvolutionSpec {
    let d = l.space().total_dim();
    if d * d <= MAX_DENSE_DIM {
        EvolutionSpec::exponential(duration)
    } else {
        EvolutionSpec::rk4(duration)
    }
}

fn run_segment(rho: &DensityMatrix, seg: &Segment) -> Result<DensityMatrix> {
    if !(seg.duration >= 0.0 && seg.duration.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "segment '{}' has invalid duration {}",
            seg.label, seg.duration
        )));
    }
    let space = rho.space();
    let out = match &seg.kind {
        SegmentKind::Pulse { coupling, field, dissipation: None } => {
            let h = field.hamiltonian(space, *coupling, seg.frame)?;
            evolve_unitary_density(rho, &unitary_propagator(&h, seg.duration)?)?
        }
        SegmentKind::Pulse { coupling, field, dissipation: Some(decay) } => {
            let h = field.hamiltonian(space, *coupling, seg.frame)?;
            // the Hamiltonian already carries the free field rotation
            let reservoir = build_symmetric_liouvillian(decay, space, Frame::Rotating)?;
            let l = reservoir.add(&SuperOperator::from_hamiltonian(&h)?)?;
            evolve_master(rho, &l, &master_spec(&l, seg.duration))?
        }
        SegmentKind::Dissipative { decay } => {
            let l = build_symmetric_liouvillian(decay, space, seg.frame)?;
            evolve_master(rho, &l, &master_spec(&l, seg.duration))?
        }
    };
    let diag = out.diagnostics()?;
    if !diag.within(BOUNDARY_TOL, BOUNDARY_TOL, BOUNDARY_TOL * 10.0) {
        return Err(Error::InvalidState(format!(
            "after segment '{}': trace deviation {:e}, hermiticity deviation {:e}, min eigenvalue {:e}",
            seg.label, diag.trace_deviation, diag.hermiticity_deviation, diag.min_eigenvalue
        )));
    }
    Ok(out)
}

/// Fold the segments over `initial`.
pub fn compose_segments(initial: &DensityMatrix, segments: &[Segment]) -> Result<DensityMatrix> {
    Ok(compose_segments_recorded(initial, segments, 0.0)?.0)
}

/// As [`compose_segments`], also returning start times and durations.
pub fn compose_segments_recorded(
    initial: &DensityMatrix,
    segments: &[Segment],
    start: f64,
) -> Result<(DensityMatrix, Vec<SegmentRecord>)> {
    let mut rho = initial.clone();
    let mut t = start;
    let mut records = Vec::with_capacity(segments.len());
    for seg in segments {
        rho = run_segment(&rho, seg)?;
        records.push(SegmentRecord { label: seg.label.clone(), start: t, duration: seg.duration });
        t += seg.duration;
    }
    Ok((rho, records))
}

/// How the two-cavity experiment is read out.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Readout {
    /// `⟨ψ_prep|ρ(T)|ψ_prep⟩`, the probability of a readout atom that undoes
    /// the preparation.
    #[default]
    Overlap,
    /// A second atom driven through M₁ for `3π/(2G)`, a dispersive wait and
    /// M₂ for `(2θ − π)/(2G)`. Only defined for `θ ∈ [π/2, π)`.
    Explicit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SingleCavityVariant {
    /// Degenerate orthogonal polarizations, both resonant with the atom.
    Resonant,
    /// Polarization modes split; the atom couples to one mode only and cross
    /// decay between the detuned modes averages out.
    Detuned,
}

/// Default vacuum Rabi coupling, 2π·25 kHz.
pub const DEFAULT_G: f64 = TAU * 25e3;
/// Default mode frequency, 2π·51.1 GHz.
pub const DEFAULT_OMEGA: f64 = TAU * 51.1e9;
/// Default atom–mode detuning outside the Stark-tuned pulses, 2π·1 MHz.
pub const DEFAULT_DETUNING: f64 = TAU * 1e6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub g: f64,
    pub omega: f64,
    pub omega_a: f64,
    pub decay: SymmetricDecayParameters,
    pub theta: f64,
    pub phi: f64,
    /// Dissipation window `T` in seconds.
    pub window: f64,
    pub n_max: usize,
    pub frame: Frame,
    pub dissipate_during_pulses: bool,
}

/// Segment durations derived from a [`ProtocolConfig`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProtocolTimes {
    pub t1s: f64,
    pub t0s: f64,
    pub t2s: f64,
    pub t1p: f64,
    pub t0p: f64,
    /// Negative for `θ < π/2`.
    pub t2p: f64,
    pub t12a: f64,
}

impl ProtocolConfig {
    pub fn new(decay: SymmetricDecayParameters, theta: f64, phi: f64, window: f64) -> Self {
        Self {
            g: DEFAULT_G,
            omega: DEFAULT_OMEGA,
            omega_a: DEFAULT_OMEGA + DEFAULT_DETUNING,
            decay,
            theta,
            phi,
            window,
            n_max: 1,
            frame: Frame::Rotating,
            dissipate_during_pulses: false,
        }
    }

    pub fn detuning(&self) -> f64 {
        self.omega_a - self.omega
    }

    pub fn field(&self) -> AtomFieldParams {
        AtomFieldParams { g: self.g, omega: self.omega, omega_a: self.omega_a }
    }

    /// Reservoir parameters with the mode frequency taken from this config.
    pub fn reservoir(&self) -> SymmetricDecayParameters {
        self.decay.with_omega(self.omega)
    }

    pub fn prepared_params(&self) -> Result<PreparedStateParams> {
        PreparedStateParams::new(self.theta, self.phi)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.g, self.omega, self.omega_a, self.theta, self.phi, self.window];
        if !finite.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("protocol parameters must be finite".into()));
        }
        if self.g <= 0.0 {
            return Err(Error::InvalidArgument(format!("coupling G = {} must be > 0", self.g)));
        }
        if self.window < 0.0 {
            return Err(Error::InvalidArgument(format!("window T = {} must be >= 0", self.window)));
        }
        if self.n_max == 0 {
            return Err(Error::InvalidArgument("n_max must be >= 1".into()));
        }
        Ok(())
    }

    /// Pulse durations. `t0s` is the shortest non-negative wait giving the
    /// phase `φ` mod 2π at the configured detuning; `θ` is taken mod 2π.
    pub fn times(&self) -> Result<ProtocolTimes> {
        self.validate()?;
        let delta = self.detuning();
        let t0s = if self.phi.rem_euclid(TAU) == 0.0 {
            0.0
        } else if delta == 0.0 {
            return Err(Error::InvalidArgument(
                "a nonzero phase needs a nonzero atom-mode detuning omega_a - omega".into(),
            ));
        } else {
            (self.phi * delta.signum()).rem_euclid(TAU) / delta.abs()
        };
        Ok(ProtocolTimes {
            t1s: self.theta.rem_euclid(TAU) / self.g,
            t0s,
            t2s: PI / (2.0 * self.g),
            t1p: 3.0 * PI / (2.0 * self.g),
            t0p: t0s,
            t2p: (2.0 * self.theta - PI) / (2.0 * self.g),
            t12a: PI / (2.0 * SQRT_2 * self.g),
        })
    }

    fn pulse(&self, label: &str, coupling: Coupling, duration: f64) -> Segment {
        let seg = Segment::pulse(label, coupling, self.field(), duration, self.frame);
        if self.dissipate_during_pulses {
            seg.with_dissipation(self.reservoir())
        } else {
            seg
        }
    }
}

/// Outcome of one simulated experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub experiment: String,
    pub readout: String,
    /// Simulated excitation probability of the readout atom.
    pub p_e: f64,
    /// Closed-form value for the same configuration.
    pub p_e_analytic: f64,
    /// Fidelity of the field after preparation with the target state.
    pub preparation_fidelity: f64,
    /// Ground-state population of the preparation atom.
    pub atom_ground_population: f64,
    pub times: ProtocolTimes,
    pub after_preparation: DensityMatrix,
    pub after_window: DensityMatrix,
    pub segments: Vec<SegmentRecord>,
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let re: Vec<Vec<f64>> = self.matrix().rows().into_iter().map(|r| r.iter().map(|z| z.re).collect()).collect();
        let im: Vec<Vec<f64>> = self.matrix().rows().into_iter().map(|r| r.iter().map(|z| z.im).collect()).collect();
        let mut s = serializer.serialize_struct("DensityMatrix", 3)?;
        s.serialize_field("dims", self.space().dims())?;
        s.serialize_field("re", &re)?;
        s.serialize_field("im", &im)?;
        s.end()
    }
}

fn ground_atom() -> DensityMatrix {
    let atom = SpaceSignature::new(&[2]).expect("valid");
    DensityMatrix::from_ket(&Ket::basis(&atom, &[GROUND]).expect("valid")).expect("normalized")
}

struct Prepared {
    field: DensityMatrix,
    fidelity: f64,
    ground: f64,
    records: Vec<SegmentRecord>,
}

fn prepare(cfg: &ProtocolConfig, segments: &[Segment], target: &Ket) -> Result<Prepared> {
    let space = SpaceSignature::two_modes_and_atom(cfg.n_max);
    let start = DensityMatrix::from_ket(&Ket::basis(&space, &[0, 0, EXCITED])?)?;
    let (joint, records) = compose_segments_recorded(&start, segments, 0.0)?;
    let ground = joint.subsystem_population(2, GROUND)?;
    let field = joint.partial_trace(2)?;
    let fidelity = field.fidelity_with(target)?;
    if !cfg.dissipate_during_pulses && (fidelity < 1.0 - PREPARATION_TOL || ground < 1.0 - PREPARATION_TOL) {
        return Err(Error::InvalidState(format!(
            "preparation reached fidelity {fidelity} with atom ground population {ground}"
        )));
    }
    Ok(Prepared { field, fidelity, ground, records })
}

fn window_and_readout(
    cfg: &ProtocolConfig,
    prepared: Prepared,
    decay: SymmetricDecayParameters,
    readout: Option<Vec<Segment>>,
    target: &Ket,
) -> Result<(f64, DensityMatrix, Vec<SegmentRecord>)> {
    let Prepared { field, mut records, .. } = prepared;
    let mut t = records.iter().map(|r| r.duration).sum::<f64>();
    let window = [Segment::dissipative("window", decay, cfg.window, cfg.frame)];
    let (after_window, rec) = compose_segments_recorded(&field, &window, t)?;
    records.extend(rec);
    t += cfg.window;
    let p_e = match readout {
        None => after_window.fidelity_with(target)?,
        Some(segments) => {
            let joint = after_window.tensor(&ground_atom());
            let (out, rec) = compose_segments_recorded(&joint, &segments, t)?;
            records.extend(rec);
            out.subsystem_population(2, EXCITED)?
        }
    };
    Ok((p_e, after_window, records))
}

/// Two cavities: prepare `cos θ|0,1⟩ + e^{iφ} sin θ|1,0⟩`, let the reservoir
/// act for `T`, read out.
pub fn run_two_cavity(cfg: &ProtocolConfig, readout: Readout) -> Result<RunRecord> {
    let times = cfg.times()?;
    if readout == Readout::Explicit && !(FRAC_PI_2..PI).contains(&cfg.theta) {
        return Err(Error::UnsupportedRegime(format!(
            "explicit readout needs theta in [pi/2, pi) so that t2p = (2 theta - pi)/(2G) >= 0; \
             got theta = {}; use the overlap readout",
            cfg.theta
        )));
    }
    let params = cfg.prepared_params()?;
    let target = prepared_state(&params, cfg.n_max)?;
    let prep = [
        cfg.pulse("prep: M1 resonant", Coupling::Mode1, times.t1s),
        cfg.pulse("prep: dispersive", Coupling::Dispersive, times.t0s),
        cfg.pulse("prep: M2 resonant", Coupling::Mode2, times.t2s),
    ];
    let prepared = prepare(cfg, &prep, &target)?;
    let (fidelity, ground, after_preparation) = (prepared.fidelity, prepared.ground, prepared.field.clone());
    let readout_segments = match readout {
        Readout::Overlap => None,
        Readout::Explicit => Some(vec![
            cfg.pulse("probe: M1 resonant", Coupling::Mode1, times.t1p),
            cfg.pulse("probe: dispersive", Coupling::Dispersive, times.t0p),
            cfg.pulse("probe: M2 resonant", Coupling::Mode2, times.t2p),
        ]),
    };
    let (p_e, after_window, segments) =
        window_and_readout(cfg, prepared, cfg.reservoir(), readout_segments, &target)?;
    let d = &cfg.decay;
    Ok(RunRecord {
        experiment: "two_cavity".into(),
        readout: match readout {
            Readout::Overlap => "overlap".into(),
            Readout::Explicit => "explicit".into(),
        },
        p_e,
        p_e_analytic: prob_e_two_cavity(&params, d.k(), d.r(), d.gamma(), cfg.window)?,
        preparation_fidelity: fidelity,
        atom_ground_population: ground,
        times,
        after_preparation,
        after_window,
        segments,
    })
}

/// One cavity with two polarization modes. `theta` and `phi` of the config
/// are not used: the resonant variant always prepares `(|0,1⟩ + i|1,0⟩)/√2`
/// and the detuned one `|0,1⟩`.
pub fn run_single_cavity(cfg: &ProtocolConfig, variant: SingleCavityVariant) -> Result<RunRecord> {
    let times = cfg.times()?;
    let d = &cfg.decay;
    let (coupling, duration, target, decay, analytic) = match variant {
        SingleCavityVariant::Resonant => (
            Coupling::BothWithPhase,
            times.t12a,
            prepared_state(&PreparedStateParams::new(FRAC_PI_4, FRAC_PI_2)?, cfg.n_max)?,
            cfg.reservoir(),
            prob_e_single_cavity_resonant(d.k(), d.r(), d.gamma(), cfg.window)?,
        ),
        SingleCavityVariant::Detuned => (
            Coupling::Mode2,
            PI / (2.0 * cfg.g),
            prepared_state(&PreparedStateParams::new(0.0, 0.0)?, cfg.n_max)?,
            cfg.reservoir().without_cross_decay(),
            prob_e_single_cavity_detuned(d.k(), cfg.window)?,
        ),
    };
    let prepared = prepare(cfg, &[cfg.pulse("prep", coupling, duration)], &target)?;
    let (fidelity, ground, after_preparation) = (prepared.fidelity, prepared.ground, prepared.field.clone());
    let readout = vec![cfg.pulse("probe", coupling, duration)];
    let (p_e, after_window, segments) = window_and_readout(cfg, prepared, decay, Some(readout), &target)?;
    Ok(RunRecord {
        experiment: match variant {
            SingleCavityVariant::Resonant => "single_cavity_resonant".into(),
            SingleCavityVariant::Detuned => "single_cavity_detuned".into(),
        },
        readout: "explicit".into(),
        p_e,
        p_e_analytic: analytic,
        preparation_fidelity: fidelity,
        atom_ground_population: ground,
        times,
        after_preparation,
        after_window,
        segments,
    })
}
