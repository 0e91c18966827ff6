//! Brute-force evolution: master-equation integration (fixed-step RK4 or
//! eigendecomposition of the vectorized generator) and unitary
//! Jaynes–Cummings segments. `ħ = 1`; Hamiltonians are angular frequencies.

use ndarray::{Array1, Array2, ArrayView2, ShapeBuilder};
use ndarray_linalg::{Eig, Eigh, Inverse, UPLO};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::superop::{devectorize, vectorize, SuperOperator};
use crate::tensor::{
    annihilation_op, atom_ops, dagger, max_abs, DensityMatrix, Ket, Operator, SpaceSignature,
};

/// Largest RK4 local error accepted on the first step.
pub const RK4_LOCAL_TOLERANCE: f64 = 1e-6;
/// Eigenvector condition number above which the exponential method gives way
/// to RK4.
pub const CONDITION_LIMIT: f64 = 1e8;
pub const MAX_STEPS: usize = 20_000_000;

/// Tolerances a master-equation result is held to.
pub const TRAJECTORY_TRACE_TOL: f64 = 1e-9;
pub const TRAJECTORY_HERMITICITY_TOL: f64 = 1e-9;
pub const TRAJECTORY_POSITIVITY_TOL: f64 = 1e-8;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    RungeKutta4,
    /// `expm(L·t)` through the eigendecomposition of the dense generator.
    Exponential,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Step {
    /// `min(duration/100, 1e-3/decay_scale, 1e-2/frequency_scale)`.
    #[default]
    Auto,
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolutionSpec {
    pub duration: f64,
    pub step: Step,
    pub method: Method,
}

impl EvolutionSpec {
    pub fn rk4(duration: f64) -> Self {
        Self { duration, step: Step::Auto, method: Method::RungeKutta4 }
    }

    pub fn exponential(duration: f64) -> Self {
        Self { duration, step: Step::Auto, method: Method::Exponential }
    }

    pub fn with_step(self, step: f64) -> Self {
        Self { step: Step::Fixed(step), ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.duration >= 0.0 && self.duration.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "duration {} must be finite and >= 0",
                self.duration
            )));
        }
        if let Step::Fixed(h) = self.step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidArgument(format!("step {h} must be > 0")));
            }
        }
        Ok(())
    }
}

/// Default step for a generator over `duration`.
pub fn auto_step(l: &SuperOperator, duration: f64) -> f64 {
    let mut h = duration / 100.0;
    if l.decay_scale() > 0.0 {
        h = h.min(1e-3 / l.decay_scale());
    }
    if l.frequency_scale() > 0.0 {
        h = h.min(1e-2 / l.frequency_scale());
    }
    h
}

struct Rk4Workspace {
    k: [Vec<C64>; 4],
    tmp: Vec<C64>,
    scratch: Vec<C64>,
}

impl Rk4Workspace {
    fn new(n: usize) -> Self {
        let z = || vec![ZERO; n];
        Self { k: [z(), z(), z(), z()], tmp: z(), scratch: z() }
    }

    fn step(&mut self, l: &SuperOperator, x: &mut [C64], h: f64) {
        let Self { k, tmp, scratch } = self;
        let [k1, k2, k3, k4] = k;
        l.apply_slice(x, k1, scratch);
        for ((t, xi), ki) in tmp.iter_mut().zip(x.iter()).zip(k1.iter()) {
            *t = xi + ki * (h / 2.0);
        }
        l.apply_slice(tmp, k2, scratch);
        for ((t, xi), ki) in tmp.iter_mut().zip(x.iter()).zip(k2.iter()) {
            *t = xi + ki * (h / 2.0);
        }
        l.apply_slice(tmp, k3, scratch);
        for ((t, xi), ki) in tmp.iter_mut().zip(x.iter()).zip(k3.iter()) {
            *t = xi + ki * h;
        }
        l.apply_slice(tmp, k4, scratch);
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
    }
}

/// Step-doubling estimate of the RK4 local error at step `h`, taken on `x`
/// and on the uniform-superposition projector.
pub fn rk4_local_error(l: &SuperOperator, x: &Array2<C64>, h: f64) -> f64 {
    let d = l.space().total_dim();
    let mut ws = Rk4Workspace::new(d * d);
    let uniform = vec![C64::new(1.0 / d as f64, 0.0); d * d];
    let start = x.as_standard_layout();
    [start.as_slice().expect("standard layout"), &uniform[..]]
        .into_iter()
        .map(|x0| {
            let mut full = x0.to_vec();
            ws.step(l, &mut full, h);
            let mut halves = x0.to_vec();
            ws.step(l, &mut halves, h / 2.0);
            ws.step(l, &mut halves, h / 2.0);
            let diff = full.iter().zip(&halves).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            diff * 16.0 / 15.0
        })
        .fold(0.0, f64::max)
}

fn rk4_evolve<F>(
    x0: &Array2<C64>,
    l: &SuperOperator,
    duration: f64,
    step: Step,
    mut observer: F,
) -> Result<Array2<C64>>
where
    F: FnMut(f64, ArrayView2<C64>),
{
    let d = l.space().total_dim();
    observer(0.0, x0.view());
    if duration == 0.0 {
        return Ok(x0.clone());
    }
    let h_req = match step {
        Step::Auto => auto_step(l, duration),
        Step::Fixed(h) => h.min(duration),
    };
    let steps_f = (duration / h_req * (1.0 - 1e-12)).ceil().max(1.0);
    if steps_f > MAX_STEPS as f64 {
        return Err(Error::TooManySteps { steps: steps_f, limit: MAX_STEPS });
    }
    let steps = steps_f as usize;
    let h = duration / steps as f64;
    let estimate = rk4_local_error(l, x0, h);
    if estimate > RK4_LOCAL_TOLERANCE {
        let suggested = 0.9 * h * (RK4_LOCAL_TOLERANCE / estimate).powf(0.2);
        return Err(Error::StepTooLarge {
            step: h,
            estimate,
            tolerance: RK4_LOCAL_TOLERANCE,
            suggested,
        });
    }
    let mut ws = Rk4Workspace::new(d * d);
    let mut x: Vec<C64> = x0.as_standard_layout().iter().copied().collect();
    for n in 1..=steps {
        ws.step(l, &mut x, h);
        observer(n as f64 * h, ArrayView2::from_shape((d, d), &x).expect("shape"));
    }
    Ok(Array2::from_shape_vec((d, d), x).expect("shape"))
}

/// Eigendecomposition of a dense vectorized generator, reusable across times.
#[derive(Clone, Debug)]
pub struct ExponentialPropagator {
    dim: usize,
    eigenvalues: Array1<C64>,
    vectors: Array2<C64>,
    inverse: Array2<C64>,
    condition: f64,
}

fn norm1(m: &Array2<C64>) -> f64 {
    m.columns().into_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

impl ExponentialPropagator {
    /// Fails with [`Error::IllConditioned`] when the eigenvector matrix is
    /// too close to singular.
    pub fn new(l: &SuperOperator) -> Result<Self> {
        let m = l.matrix()?;
        let (eigenvalues, vectors) = m.eig()?;
        let inverse = vectors
            .inv()
            .map_err(|_| Error::IllConditioned { condition: f64::INFINITY, limit: CONDITION_LIMIT })?;
        let condition = norm1(&vectors) * norm1(&inverse);
        if condition.is_nan() || condition > CONDITION_LIMIT {
            return Err(Error::IllConditioned { condition, limit: CONDITION_LIMIT });
        }
        Ok(Self { dim: l.space().total_dim(), eigenvalues, vectors, inverse, condition })
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn propagate(&self, x: &Array2<C64>, t: f64) -> Array2<C64> {
        let coeffs = self.inverse.dot(&vectorize(x));
        let scaled: Array1<C64> =
            coeffs.iter().zip(&self.eigenvalues).map(|(c, lam)| c * (lam * t).exp()).collect();
        devectorize(&self.vectors.dot(&scaled), self.dim)
    }
}

/// `ρ(duration)` under `dρ/dt = L(ρ)`.
pub fn evolve_master(
    rho0: &DensityMatrix,
    l: &SuperOperator,
    spec: &EvolutionSpec,
) -> Result<DensityMatrix> {
    evolve_master_observed(rho0, l, spec, |_, _| {})
}

/// As [`evolve_master`], reporting `(t, ρ(t))` after every RK4 step (and at
/// `t = 0`). The exponential method reports only the endpoints.
pub fn evolve_master_observed<F>(
    rho0: &DensityMatrix,
    l: &SuperOperator,
    spec: &EvolutionSpec,
    mut observer: F,
) -> Result<DensityMatrix>
where
    F: FnMut(f64, ArrayView2<C64>),
{
    spec.validate()?;
    l.space().ensure_same(rho0.space())?;
    let out = match spec.method {
        Method::RungeKutta4 => rk4_evolve(rho0.matrix(), l, spec.duration, spec.step, observer)?,
        Method::Exponential => match ExponentialPropagator::new(l) {
            Ok(prop) => {
                observer(0.0, rho0.matrix().view());
                let out = prop.propagate(rho0.matrix(), spec.duration);
                observer(spec.duration, out.view());
                out
            }
            Err(Error::IllConditioned { .. }) => {
                rk4_evolve(rho0.matrix(), l, spec.duration, spec.step, observer)?
            }
            Err(e) => return Err(e),
        },
    };
    DensityMatrix::from_matrix_with_tolerance(
        out,
        rho0.space(),
        TRAJECTORY_TRACE_TOL,
        TRAJECTORY_HERMITICITY_TOL,
        TRAJECTORY_POSITIVITY_TOL,
    )
}

fn ensure_hermitian(h: &Operator) -> Result<()> {
    let deviation = h.hermiticity_deviation();
    if deviation > 1e-10 * max_abs(h.matrix()).max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// `exp(−iHt)` through the eigendecomposition of `H`.
pub fn unitary_propagator(h: &Operator, duration: f64) -> Result<Operator> {
    ensure_hermitian(h)?;
    if !duration.is_finite() {
        return Err(Error::InvalidArgument("duration must be finite".into()));
    }
    // column-major input: the row-major path returns conjugated eigenvectors
    let mut hermitian = Array2::zeros(h.matrix().raw_dim().f());
    hermitian.assign(&(h.matrix() + &dagger(h.matrix())).mapv(|z| z * 0.5));
    let (eig, vectors) = hermitian.eigh(UPLO::Lower)?;
    let mut scaled = vectors.clone();
    for (mut col, &lam) in scaled.columns_mut().into_iter().zip(eig.iter()) {
        let phase = C64::from_polar(1.0, -lam * duration);
        col.mapv_inplace(|z| z * phase);
    }
    Operator::from_matrix(scaled.dot(&dagger(&vectors)), h.space())
}

/// `ψ(t) = exp(−iHt)ψ0`.
pub fn evolve_unitary(psi0: &Ket, h: &Operator, duration: f64) -> Result<Ket> {
    h.space().ensure_same(psi0.space())?;
    if duration == 0.0 {
        ensure_hermitian(h)?;
        return Ok(psi0.clone());
    }
    unitary_propagator(h, duration)?.apply(psi0)
}

/// `U ρ U†`.
pub fn evolve_unitary_density(rho: &DensityMatrix, u: &Operator) -> Result<DensityMatrix> {
    rho.space().ensure_same(u.space())?;
    let out = u.matrix().dot(rho.matrix()).dot(&dagger(u.matrix()));
    Ok(DensityMatrix::from_parts_unchecked(out, rho.space().clone()))
}

/// Which atom–field Hamiltonian to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// `Ω(N + σz/2) + G(a1†σ₋ + a1σ₊)`
    Mode1,
    /// `Ω(N + σz/2) + G(a2†σ₋ + a2σ₊)`
    Mode2,
    /// `Ω(N + σz/2) + G(i a1†σ₋ − i a1σ₊ + a2†σ₋ + a2σ₊)`, both polarizations
    /// of one cavity.
    BothWithPhase,
    /// `ΩN + Ω_a σz/2`, atom far detuned from both modes.
    Dispersive,
}

/// Jaynes–Cummings Hamiltonians on `[mode 1, mode 2, atom]`, `N = a1†a1 + a2†a2`.
pub fn jc_hamiltonian(
    space: &SpaceSignature,
    coupling: Coupling,
    g: f64,
    omega: f64,
    omega_a: f64,
) -> Result<Operator> {
    if space.num_subsystems() < 3 {
        return Err(Error::InvalidArgument(format!(
            "space {space} has no atom subsystem at index 2"
        )));
    }
    let atom = atom_ops(space, 2)?;
    let a1 = annihilation_op(space, 0)?;
    let a2 = annihilation_op(space, 1)?;
    let (a1d, a2d) = (a1.adjoint(), a2.adjoint());
    let n = a1d.multiply(&a1)?.add(&a2d.multiply(&a2)?)?;
    let re = |x: f64| C64::new(x, 0.0);
    let i = C64::new(0.0, 1.0);
    let (sm, sp) = (&atom.sigma_minus, &atom.sigma_plus);
    let free = |atom_freq: f64| {
        Operator::linear_combination(&[(re(omega), &n), (re(atom_freq / 2.0), &atom.sigma_z)])
    };
    let h = match coupling {
        Coupling::Dispersive => free(omega_a)?,
        Coupling::Mode1 | Coupling::Mode2 => {
            let (a, ad) = if coupling == Coupling::Mode1 { (&a1, &a1d) } else { (&a2, &a2d) };
            let int = ad.multiply(sm)?.add(&a.multiply(sp)?)?;
            free(omega)?.add(&int.scale(re(g)))?
        }
        Coupling::BothWithPhase => {
            let int = Operator::linear_combination(&[
                (i, &a1d.multiply(sm)?),
                (-i, &a1.multiply(sp)?),
                (re(1.0), &a2d.multiply(sm)?),
                (re(1.0), &a2.multiply(sp)?),
            ])?;
            free(omega)?.add(&int.scale(re(g)))?
        }
    };
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liouvillian::{build_symmetric_liouvillian, Frame, SymmetricDecayParameters};
    use crate::tensor::{EXCITED, GROUND};
    use std::f64::consts::PI;

    #[test]
    fn zero_generator_keeps_state() {
        let s = SpaceSignature::two_modes(1);
        let psi = Ket::basis(&s, &[1, 0]).unwrap();
        let rho = DensityMatrix::from_ket(&psi).unwrap();
        let l = SuperOperator::zero(&s);
        for spec in [EvolutionSpec::rk4(1e-3), EvolutionSpec::exponential(1e-3)] {
            let out = evolve_master(&rho, &l, &spec).unwrap();
            assert!(max_abs(&(out.matrix() - rho.matrix())) == 0.0);
        }
    }

    #[test]
    fn oversized_step_refused_with_suggestion() {
        let s = SpaceSignature::two_modes(1);
        let p = SymmetricDecayParameters::new(1000.0, 0.0, 0.0, 0.0).unwrap();
        let l = build_symmetric_liouvillian(&p, &s, Frame::Rotating).unwrap();
        let rho = DensityMatrix::from_ket(&Ket::basis(&s, &[1, 0]).unwrap()).unwrap();
        let err = evolve_master(&rho, &l, &EvolutionSpec::rk4(1e-2).with_step(1e-3)).unwrap_err();
        match err {
            Error::StepTooLarge { suggested, .. } => {
                assert!(suggested < 1e-3);
                let spec = EvolutionSpec::rk4(1e-2).with_step(suggested);
                assert!(evolve_master(&rho, &l, &spec).is_ok());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_duration_rejected() {
        let s = SpaceSignature::two_modes(1);
        let rho = DensityMatrix::from_ket(&Ket::vacuum(&s)).unwrap();
        let l = SuperOperator::zero(&s);
        assert!(evolve_master(&rho, &l, &EvolutionSpec::rk4(-1.0)).is_err());
        assert!(evolve_master(&rho, &l, &EvolutionSpec::rk4(1.0).with_step(0.0)).is_err());
    }

    #[test]
    fn non_hermitian_hamiltonian_rejected() {
        let s = SpaceSignature::two_modes(1);
        let a = annihilation_op(&s, 0).unwrap();
        let psi = Ket::vacuum(&s);
        assert!(matches!(evolve_unitary(&psi, &a, 1.0), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn zero_duration_unitary() {
        let s = SpaceSignature::two_modes_and_atom(1);
        let h = jc_hamiltonian(&s, Coupling::Mode1, 1.0, 0.0, 0.0).unwrap();
        let psi = Ket::basis(&s, &[0, 0, EXCITED]).unwrap();
        assert_eq!(evolve_unitary(&psi, &h, 0.0).unwrap(), psi);
    }

    #[test]
    fn hamiltonians_are_hermitian() {
        let s = SpaceSignature::two_modes_and_atom(2);
        for c in [Coupling::Mode1, Coupling::Mode2, Coupling::BothWithPhase, Coupling::Dispersive]
        {
            let h = jc_hamiltonian(&s, c, 2.0, 3.0, 3.5).unwrap();
            assert!(h.hermiticity_deviation() <= 1e-15);
        }
        assert!(jc_hamiltonian(&SpaceSignature::two_modes(1), Coupling::Mode1, 1.0, 0.0, 0.0)
            .is_err());
    }

    #[test]
    fn mode1_coupling_leaves_mode2_alone() {
        let s = SpaceSignature::two_modes_and_atom(2);
        let h = jc_hamiltonian(&s, Coupling::Mode1, 2.0, 3.0, 3.0).unwrap();
        let a2 = annihilation_op(&s, 1).unwrap();
        let n2 = a2.adjoint().multiply(&a2).unwrap();
        assert!(max_abs(h.commutator(&n2).unwrap().matrix()) < 1e-15);
    }

    #[test]
    fn vacuum_rabi_oscillation() {
        let s = SpaceSignature::two_modes_and_atom(1);
        let g = 2.0 * PI * 25e3;
        let h = jc_hamiltonian(&s, Coupling::Mode1, g, 0.0, 0.0).unwrap();
        let psi0 = Ket::basis(&s, &[0, 0, EXCITED]).unwrap();
        for t in [1e-6, 3.7e-6, 1.2e-5] {
            let psi = evolve_unitary(&psi0, &h, t).unwrap();
            let e = psi.amplitude(&[0, 0, EXCITED]).unwrap();
            let g1 = psi.amplitude(&[1, 0, GROUND]).unwrap();
            assert!((e - C64::new((g * t).cos(), 0.0)).norm() < 1e-12);
            assert!((g1 - C64::new(0.0, -(g * t).sin())).norm() < 1e-12);
            assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn dispersive_phase() {
        let s = SpaceSignature::two_modes_and_atom(1);
        let delta = 2.0 * PI * 1e6;
        // rotating frame: Ω → 0, Ω_a → Δ
        let h = jc_hamiltonian(&s, Coupling::Dispersive, 0.0, 0.0, delta).unwrap();
        let e = Ket::basis(&s, &[0, 0, EXCITED]).unwrap();
        let g1 = Ket::basis(&s, &[1, 0, GROUND]).unwrap();
        let psi0 = e.add(&g1).unwrap().scale(C64::new(0.5f64.sqrt(), 0.0));
        let t = 0.3e-6;
        let psi = evolve_unitary(&psi0, &h, t).unwrap();
        let ratio = psi.amplitude(&[1, 0, GROUND]).unwrap() / psi.amplitude(&[0, 0, EXCITED]).unwrap();
        assert!((ratio - C64::from_polar(1.0, delta * t)).norm() < 1e-10);
    }

    #[test]
    fn unitary_composition() {
        let s = SpaceSignature::two_modes_and_atom(2);
        let h = jc_hamiltonian(&s, Coupling::BothWithPhase, 1.3, 0.4, 0.9).unwrap();
        let psi0 = Ket::basis(&s, &[1, 0, EXCITED]).unwrap();
        let a = evolve_unitary(&evolve_unitary(&psi0, &h, 0.7).unwrap(), &h, 1.1).unwrap();
        let b = evolve_unitary(&psi0, &h, 1.8).unwrap();
        let diff = a.add(&b.scale(C64::new(-1.0, 0.0))).unwrap().norm();
        assert!(diff < 1e-10);
        assert!((a.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_hamiltonian_matches_taylor_series() {
        let s = SpaceSignature::two_modes_and_atom(1);
        let h = jc_hamiltonian(&s, Coupling::BothWithPhase, 1.0, 0.3, 0.8).unwrap();
        let t = 0.4;
        let u = unitary_propagator(&h, t).unwrap();
        let mut term = Array2::<C64>::eye(s.total_dim());
        let mut series = term.clone();
        for n in 1..40 {
            term = term.dot(h.matrix()).mapv(|z| z * C64::new(0.0, -t / n as f64));
            series += &term;
        }
        assert!(max_abs(&(u.matrix() - &series)) < 1e-13);
    }
}
