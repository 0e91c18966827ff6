//! Closed-form results for the single-excitation dynamics.
//!
//! Inside the span of `|1,0⟩` and `|0,1⟩` the zero-temperature master
//! equation keeps the state of the form
//! `(u1|1,0⟩ + u2|0,1⟩)(h.c.) + (1 − |u1|² − |u2|²)|0,0⟩⟨0,0|` with
//! `u(t) = M(t)·u(0)`,
//! `M(t) = e^{−kt}[[cosh rt, −e^{−iγ} sinh rt], [−e^{iγ} sinh rt, cosh rt]]`.
//! Detection probabilities are the squared overlap of `u(T)` with the
//! prepared amplitudes.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use ndarray::Array1;
use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liouvillian::normal_mode_transform;
use crate::tensor::{Ket, SpaceSignature};

/// Preparation angles `θ = G·t1s` and `φ = (Ω_a − Ω)·t0s`, stored mod 2π.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PreparedStateParams {
    theta: f64,
    phi: f64,
}

impl PreparedStateParams {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && phi.is_finite()) {
            return Err(Error::InvalidArgument("preparation angles must be finite".into()));
        }
        Ok(Self { theta: theta.rem_euclid(TAU), phi: phi.rem_euclid(TAU) })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// `(e^{iφ} sin θ, cos θ)`.
    pub fn amplitudes(&self) -> AmplitudePair {
        AmplitudePair {
            u1: C64::from_polar(self.theta.sin(), self.phi),
            u2: C64::new(self.theta.cos(), 0.0),
        }
    }
}

/// Amplitudes on `|1,0⟩` and `|0,1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AmplitudePair {
    pub u1: C64,
    pub u2: C64,
}

impl AmplitudePair {
    pub fn population(&self) -> f64 {
        self.u1.norm_sqr() + self.u2.norm_sqr()
    }

    /// `conj(self)·other`.
    pub fn overlap(&self, other: &Self) -> C64 {
        self.u1.conj() * other.u1 + self.u2.conj() * other.u2
    }
}

/// 2×2 map `u(0) ↦ u(t)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Propagator2(pub [[C64; 2]; 2]);

impl Propagator2 {
    pub fn apply(&self, u: &AmplitudePair) -> AmplitudePair {
        let m = &self.0;
        AmplitudePair { u1: m[0][0] * u.u1 + m[0][1] * u.u2, u2: m[1][0] * u.u1 + m[1][1] * u.u2 }
    }
}

fn check_rates(k: f64, r: f64, t: f64) -> Result<()> {
    if ![k, r, t].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument("parameters must be finite".into()));
    }
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("time {t} must be >= 0")));
    }
    if k < 0.0 || r < 0.0 {
        return Err(Error::InvalidArgument(format!("rates k = {k}, r = {r} must be >= 0")));
    }
    if r > k * (1.0 + 1e-12) {
        return Err(Error::NotPositive {
            what: format!("damping matrix for k = {k}, r = {r}"),
            min_eigenvalue: k - r,
        });
    }
    Ok(())
}

/// `M(t)` for the symmetric reservoir.
pub fn single_excitation_propagator(k: f64, r: f64, gamma: f64, t: f64) -> Result<Propagator2> {
    check_rates(k, r, t)?;
    Ok(propagator_with_cross_factor(k, r, t, C64::from_polar(1.0, gamma)))
}

/// The propagator with the cross factor taken literally as `r·e^{∓iγ}`
/// instead of the phase `e^{∓iγ}`. Dimensionally inconsistent; kept only to
/// show that it disagrees with the master equation.
pub fn single_excitation_propagator_literal(
    k: f64,
    r: f64,
    gamma: f64,
    t: f64,
) -> Result<Propagator2> {
    check_rates(k, r, t)?;
    Ok(propagator_with_cross_factor(k, r, t, C64::from_polar(r, gamma)))
}

/// `e^{−kt}(cosh rt + w·sinh rt)`, finite whenever the product is, since
/// `r ≤ k` keeps both exponents non-positive.
fn damped_hyperbolic(k: f64, r: f64, t: f64, w: f64) -> f64 {
    0.5 * ((1.0 + w) * ((r - k) * t).exp() + (1.0 - w) * (-(r + k) * t).exp())
}

fn propagator_with_cross_factor(k: f64, r: f64, t: f64, cross: C64) -> Propagator2 {
    let c = damped_hyperbolic(k, r, t, 0.0);
    let s = 0.5 * (((r - k) * t).exp() - (-(r + k) * t).exp());
    Propagator2([
        [C64::new(c, 0.0), -cross.conj() * s],
        [-cross * s, C64::new(c, 0.0)],
    ])
}

/// The field state `cos θ|0,1⟩ + e^{iφ} sin θ|1,0⟩` with modes truncated at `n_max`.
pub fn prepared_state(p: &PreparedStateParams, n_max: usize) -> Result<Ket> {
    single_excitation_ket(&p.amplitudes(), n_max)
}

pub fn single_excitation_ket(u: &AmplitudePair, n_max: usize) -> Result<Ket> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    let space = SpaceSignature::two_modes(n_max);
    let mut amps = Array1::zeros(space.total_dim());
    amps[space.index_of(&[1, 0])?] = u.u1;
    amps[space.index_of(&[0, 1])?] = u.u2;
    Ket::new(amps, &space)
}

/// `|⟨u(0)|u(T)⟩|²` with `u(T) = M(T)·u(0)`.
pub fn overlap_probability(p: &PreparedStateParams, propagator: &Propagator2) -> f64 {
    let u0 = p.amplitudes();
    u0.overlap(&propagator.apply(&u0)).norm_sqr()
}

/// Excitation probability of the readout atom in the two-cavity experiment,
/// `e^{−2kT}·(cosh rT − sin 2θ·cos(γ + φ)·sinh rT)²`.
pub fn prob_e_two_cavity(p: &PreparedStateParams, k: f64, r: f64, gamma: f64, t: f64) -> Result<f64> {
    check_rates(k, r, t)?;
    let visibility = (2.0 * p.theta).sin() * (gamma + p.phi).cos();
    let amp = damped_hyperbolic(k, r, t, -visibility);
    Ok(amp * amp)
}

/// Single cavity, both polarizations resonant with the atom:
/// `e^{−2kT}·(cosh rT + sin γ·sinh rT)²`.
pub fn prob_e_single_cavity_resonant(k: f64, r: f64, gamma: f64, t: f64) -> Result<f64> {
    check_rates(k, r, t)?;
    let amp = damped_hyperbolic(k, r, t, gamma.sin());
    Ok(amp * amp)
}

/// Single cavity with the polarization modes detuned: `e^{−2kT}`.
pub fn prob_e_single_cavity_detuned(k: f64, t: f64) -> Result<f64> {
    if !(k.is_finite() && t.is_finite()) || k < 0.0 || t < 0.0 {
        return Err(Error::InvalidArgument(format!("need k >= 0 and T >= 0, got k = {k}, T = {t}")));
    }
    Ok((-2.0 * k * t).exp())
}

/// `D = P_e,r − P_e,nr`.
pub fn discriminator(k: f64, r: f64, gamma: f64, t: f64) -> Result<f64> {
    Ok(prob_e_single_cavity_resonant(k, r, gamma, t)? - prob_e_single_cavity_detuned(k, t)?)
}

/// `(|1,0⟩ − e^{iγ}|0,1⟩)/√2 = A1†|0,0⟩`.
pub fn robust_entangled_state(gamma: f64, n_max: usize) -> Result<Ket> {
    single_excitation_ket(
        &AmplitudePair {
            u1: C64::new(FRAC_1_SQRT_2, 0.0),
            u2: -C64::from_polar(FRAC_1_SQRT_2, gamma),
        },
        n_max,
    )
}

/// Truncated product of coherent states `|v, −e^{iγ}v⟩`, renormalized.
/// Requires `|v|² ≤ n_max/4`.
pub fn robust_coherent_state(gamma: f64, v: C64, n_max: usize) -> Result<Ket> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    if v.norm_sqr() > n_max as f64 / 4.0 {
        return Err(Error::InvalidArgument(format!(
            "|v|² = {} too large for truncation n_max = {n_max} (limit n_max/4)",
            v.norm_sqr()
        )));
    }
    let w = -C64::from_polar(1.0, gamma) * v;
    let mode = |alpha: C64| -> Array1<C64> {
        let mut amps = Array1::zeros(n_max + 1);
        let mut term = C64::new(1.0, 0.0);
        for n in 0..=n_max {
            if n > 0 {
                term = term * alpha / (n as f64).sqrt();
            }
            amps[n] = term;
        }
        amps
    };
    let single = SpaceSignature::new(&[n_max + 1])?;
    let first = Ket::new(mode(v), &single)?;
    let second = Ket::new(mode(w), &single)?;
    first.tensor(&second).normalized()
}

/// `(A1†)ⁿ|0,0⟩`, normalized.
pub fn robust_fock_state(gamma: f64, n: usize, n_max: usize) -> Result<Ket> {
    if n > n_max {
        return Err(Error::InvalidArgument(format!("n = {n} exceeds n_max = {n_max}")));
    }
    let space = SpaceSignature::two_modes(n_max);
    let (big_a1, _) = normal_mode_transform(gamma).normal_modes(&space)?;
    let raise = big_a1.adjoint();
    let mut ket = Ket::vacuum(&space);
    for _ in 0..n {
        ket = raise.apply(&ket)?;
    }
    ket.normalized()
}
