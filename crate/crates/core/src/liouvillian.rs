//! Zero-temperature Liouvillian of two cavity modes sharing one reservoir.
//!
//! The general form carries independent decay rates `k11`, `k22`, cross decay
//! rates `k12`, `k21` and frequency shifts `Δij`. Two identical cavities whose
//! reservoir has a broad random spectrum reduce to the symmetric form
//! `k11 = k22 = k`, `Δ11 = Δ22 = 0`, `k12 + iΔ12 = (k21 + iΔ21)* = r·e^{iγ}`,
//! which splits into a slow normal mode decaying at `k − r` and a fast one at
//! `k + r`.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::superop::{SuperOperator, SuperOperatorBuilder};
use crate::tensor::{annihilation_op, Operator, SpaceSignature};

pub use crate::superop::apply_liouvillian;

/// Relative tolerance on the damping-matrix eigenvalues.
const POSITIVITY_TOL: f64 = 1e-12;

/// Reference frame for the free mode evolution.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Keeps the `−iΩ[a†a, ·]` terms.
    Lab,
    /// Interaction picture at the common mode frequency.
    #[default]
    Rotating,
}

/// All constants of the general two-mode Liouvillian.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DecayParameters {
    pub k11: f64,
    pub k22: f64,
    pub k12: f64,
    pub k21: f64,
    pub d11: f64,
    pub d22: f64,
    pub d12: f64,
    pub d21: f64,
    pub omega1: f64,
    pub omega2: f64,
}

impl DecayParameters {
    /// `[[k11, κ], [κ*, k22]]` with `κ = (k12 + k21)/2 + i(Δ12 − Δ21)/2`.
    ///
    /// The Liouvillian is a Lindblad generator with jump terms
    /// `Σ Γij (2 aᵢ ρ aⱼ† − {aⱼ†aᵢ, ρ})` exactly when this matrix is positive
    /// semidefinite.
    pub fn damping_matrix(&self) -> [[C64; 2]; 2] {
        let kappa = C64::new((self.k12 + self.k21) / 2.0, (self.d12 - self.d21) / 2.0);
        [[C64::new(self.k11, 0.0), kappa], [kappa.conj(), C64::new(self.k22, 0.0)]]
    }

    /// Eigenvalues of the damping matrix, ascending.
    pub fn damping_eigenvalues(&self) -> (f64, f64) {
        let [[_, kappa], _] = self.damping_matrix();
        let mean = (self.k11 + self.k22) / 2.0;
        let half_gap = (((self.k11 - self.k22) / 2.0).powi(2) + kappa.norm_sqr()).sqrt();
        (mean - half_gap, mean + half_gap)
    }

    pub fn validate(&self) -> Result<()> {
        let values = [
            self.k11, self.k22, self.k12, self.k21, self.d11, self.d22, self.d12, self.d21,
            self.omega1, self.omega2,
        ];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("decay parameters must be finite".into()));
        }
        let (low, _) = self.damping_eigenvalues();
        let tol = POSITIVITY_TOL * (self.k11.abs() + self.k22.abs()).max(1.0);
        if low < -tol {
            return Err(Error::NotPositive {
                what: "damping matrix [[k11, κ], [κ*, k22]]".into(),
                min_eigenvalue: low,
            });
        }
        Ok(())
    }
}

/// Identical cavities: rate `k`, cross decay `r·e^{iγ}`, common frequency `Ω`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SymmetricDecayParameters {
    k: f64,
    r: f64,
    gamma: f64,
    omega: f64,
}

impl SymmetricDecayParameters {
    /// A negative `r` is folded into the phase as `γ + π`. Fails unless
    /// `0 ≤ |r| ≤ k`.
    pub fn new(k: f64, r: f64, gamma: f64, omega: f64) -> Result<Self> {
        if ![k, r, gamma, omega].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument("decay parameters must be finite".into()));
        }
        if k < 0.0 {
            return Err(Error::InvalidArgument(format!("decay rate k = {k} must be >= 0")));
        }
        let (r, gamma) = if r < 0.0 { (-r, gamma + std::f64::consts::PI) } else { (r, gamma) };
        if r > k * (1.0 + POSITIVITY_TOL) {
            return Err(Error::NotPositive {
                what: format!("damping matrix for k = {k}, r = {r}"),
                min_eigenvalue: k - r,
            });
        }
        Ok(Self { k, r: r.min(k), gamma: gamma.rem_euclid(TAU), omega })
    }

    pub fn none() -> Self {
        Self { k: 0.0, r: 0.0, gamma: 0.0, omega: 0.0 }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn with_omega(self, omega: f64) -> Self {
        Self { omega, ..self }
    }

    /// The same reservoir without cross decay.
    pub fn without_cross_decay(self) -> Self {
        Self { r: 0.0, gamma: 0.0, ..self }
    }

    /// Equivalent general parameters.
    pub fn to_general(&self, frame: Frame) -> DecayParameters {
        let (c, s) = (self.r * self.gamma.cos(), self.r * self.gamma.sin());
        let omega = match frame {
            Frame::Lab => self.omega,
            Frame::Rotating => 0.0,
        };
        DecayParameters {
            k11: self.k,
            k22: self.k,
            k12: c,
            k21: c,
            d11: 0.0,
            d22: 0.0,
            d12: s,
            d21: -s,
            omega1: omega,
            omega2: omega,
        }
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn im(x: f64) -> C64 {
    C64::new(0.0, x)
}

fn mode_operators(space: &SpaceSignature) -> Result<(Operator, Operator)> {
    if space.num_subsystems() < 2 {
        return Err(Error::InvalidArgument(format!(
            "space {space} needs two mode subsystems at indices 0 and 1"
        )));
    }
    Ok((annihilation_op(space, 0)?, annihilation_op(space, 1)?))
}

/// Full two-mode Liouvillian, term by term. Subsystems 0 and 1 are the modes;
/// any further factors are left untouched.
pub fn build_general_liouvillian(
    params: &DecayParameters,
    space: &SpaceSignature,
) -> Result<SuperOperator> {
    params.validate()?;
    let (a1, a2) = mode_operators(space)?;
    let (a1d, a2d) = (a1.adjoint(), a2.adjoint());
    let n1 = a1d.multiply(&a1)?;
    let n2 = a2d.multiply(&a2)?;
    let a2d_a1 = a2d.multiply(&a1)?;
    let a1d_a2 = a1d.multiply(&a2)?;
    let p = params;
    let asym = (p.d12 - p.d21) / 2.0;
    let coherent = (p.d12 + p.d21) / 2.0;

    let b = SuperOperatorBuilder::new(space)
        // k11 (2 a1 • a1† − • a1†a1 − a1†a1 •) + i(Δ11 − Ω1)[a1†a1, •]
        .sandwich(re(2.0 * p.k11), &a1, &a1d)?
        .right(re(-p.k11), &n1)?
        .left(re(-p.k11), &n1)?
        .commutator(im(p.d11 - p.omega1), &n1)?
        .sandwich(re(2.0 * p.k22), &a2, &a2d)?
        .right(re(-p.k22), &n2)?
        .left(re(-p.k22), &n2)?
        .commutator(im(p.d22 - p.omega2), &n2)?
        // k12 (a1 • a2† + a2 • a1† − • a2†a1 − a1†a2 •)
        .sandwich(re(p.k12), &a1, &a2d)?
        .sandwich(re(p.k12), &a2, &a1d)?
        .right(re(-p.k12), &a2d_a1)?
        .left(re(-p.k12), &a1d_a2)?
        // k21 (a2 • a1† + a1 • a2† − • a1†a2 − a2†a1 •)
        .sandwich(re(p.k21), &a2, &a1d)?
        .sandwich(re(p.k21), &a1, &a2d)?
        .right(re(-p.k21), &a1d_a2)?
        .left(re(-p.k21), &a2d_a1)?
        // i(Δ12 − Δ21)/2 (a1 • a2† − a2 • a1† − • a2†a1 + a1†a2 •)
        .sandwich(im(asym), &a1, &a2d)?
        .sandwich(im(-asym), &a2, &a1d)?
        .right(im(-asym), &a2d_a1)?
        .left(im(asym), &a1d_a2)?
        // i(Δ21 − Δ12)/2 (a2 • a1† − a1 • a2† − • a1†a2 + a2†a1 •)
        .sandwich(im(-asym), &a2, &a1d)?
        .sandwich(im(asym), &a1, &a2d)?
        .right(im(asym), &a1d_a2)?
        .left(im(-asym), &a2d_a1)?
        // i(Δ12 + Δ21)/2 [a1†a2 + a2†a1, •]
        .commutator(im(coherent), &a1d_a2.add(&a2d_a1)?)?;

    let (_, fast) = params.damping_eigenvalues();
    let freq = (p.d11 - p.omega1).abs().max((p.d22 - p.omega2).abs()) + coherent.abs() + asym.abs();
    Ok(b.decay_scale(fast).frequency_scale(freq).build())
}

/// Symmetric-cavity Liouvillian assembled from the damping matrix
/// `Γ = [[k, r e^{iγ}], [r e^{−iγ}, k]]`:
/// `−iΩ[N, ρ] + Σ Γij (2 aᵢ ρ aⱼ† − {aⱼ†aᵢ, ρ})`.
pub fn build_symmetric_liouvillian(
    params: &SymmetricDecayParameters,
    space: &SpaceSignature,
    frame: Frame,
) -> Result<SuperOperator> {
    let (a1, a2) = mode_operators(space)?;
    let ops = [&a1, &a2];
    let cross = C64::from_polar(params.r, params.gamma);
    let gamma = [[re(params.k), cross], [cross.conj(), re(params.k)]];
    let mut b = SuperOperatorBuilder::new(space);
    for (i, ai) in ops.iter().enumerate() {
        for (j, aj) in ops.iter().enumerate() {
            let g = gamma[i][j];
            let ajd = aj.adjoint();
            let hop = ajd.multiply(ai)?;
            b = b.sandwich(2.0 * g, ai, &ajd)?.left(-g, &hop)?.right(-g, &hop)?;
        }
    }
    if frame == Frame::Lab && params.omega != 0.0 {
        let n = a1.adjoint().multiply(&a1)?.add(&a2.adjoint().multiply(&a2)?)?;
        b = b.commutator(im(-params.omega), &n)?.frequency_scale(params.omega);
    }
    Ok(b.decay_scale(params.k + params.r).build())
}

/// The unitary `(1/√2)[[1, −e^{−iγ}], [e^{iγ}, 1]]` taking `(a1, a2)` to the
/// normal modes `(A1, A2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeTransform {
    gamma: f64,
    matrix: [[C64; 2]; 2],
}

impl ModeTransform {
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn matrix(&self) -> [[C64; 2]; 2] {
        self.matrix
    }

    /// `(A1, A2)` from the mode lowering operators.
    pub fn apply(&self, a1: &Operator, a2: &Operator) -> Result<(Operator, Operator)> {
        let m = &self.matrix;
        Ok((
            Operator::linear_combination(&[(m[0][0], a1), (m[0][1], a2)])?,
            Operator::linear_combination(&[(m[1][0], a1), (m[1][1], a2)])?,
        ))
    }

    /// `(A1, A2)` built on the first two subsystems of `space`.
    pub fn normal_modes(&self, space: &SpaceSignature) -> Result<(Operator, Operator)> {
        let (a1, a2) = mode_operators(space)?;
        self.apply(&a1, &a2)
    }
}

pub fn normal_mode_transform(gamma: f64) -> ModeTransform {
    let s = FRAC_1_SQRT_2;
    let matrix = [
        [re(s), -C64::from_polar(s, -gamma)],
        [C64::from_polar(s, gamma), re(s)],
    ];
    ModeTransform { gamma, matrix }
}

/// `L = L1 + L2`: `L1` damps the slow mode `A1` at `k − r`, `L2` the fast mode
/// `A2` at `k + r`, each with its share `−iΩ[Aᵢ†Aᵢ, ·]` of the free rotation
/// in the lab frame.
pub fn decompose_symmetric(
    params: &SymmetricDecayParameters,
    space: &SpaceSignature,
    frame: Frame,
) -> Result<(SuperOperator, SuperOperator)> {
    let (big_a1, big_a2) = normal_mode_transform(params.gamma).normal_modes(space)?;
    let channel = |rate: f64, mode: &Operator| -> Result<SuperOperator> {
        let mut b = SuperOperatorBuilder::new(space).dissipator(rate, mode)?.decay_scale(rate);
        if frame == Frame::Lab && params.omega != 0.0 {
            let n = mode.adjoint().multiply(mode)?;
            b = b.commutator(im(-params.omega), &n)?.frequency_scale(params.omega);
        }
        Ok(b.build())
    };
    Ok((channel(params.k - params.r, &big_a1)?, channel(params.k + params.r, &big_a2)?))
}

/// One reservoir oscillator with its couplings to both modes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathMode {
    pub alpha1: C64,
    pub alpha2: C64,
    pub omega: f64,
}

/// Discrete reservoir spectrum, memory time and the two mode frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct EnvironmentSpec {
    entries: Vec<BathMode>,
    tau_c: f64,
    omega1: f64,
    omega2: f64,
}

impl EnvironmentSpec {
    pub fn new(entries: Vec<BathMode>, tau_c: f64, omega1: f64, omega2: f64) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidArgument("environment needs at least one mode".into()));
        }
        if !(tau_c > 0.0 && tau_c.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau_c = {tau_c} must be > 0")));
        }
        Ok(Self { entries, tau_c, omega1, omega2 })
    }

    pub fn entries(&self) -> &[BathMode] {
        &self.entries
    }

    pub fn tau_c(&self) -> f64 {
        self.tau_c
    }
}

/// `∫₀^τ e^{ixt} dt = sin(xτ)/x + i·2sin²(xτ/2)/x`, with the limit `τ` when
/// `|x|·τ < 1e-12`.
pub(crate) fn memory_integral(x: f64, tau: f64) -> C64 {
    if (x * tau).abs() < 1e-12 {
        return re(tau);
    }
    let half = (x * tau / 2.0).sin();
    C64::new((x * tau).sin() / x, 2.0 * half * half / x)
}

/// `kij + iΔij = Σ_k αik αjk* ∫₀^τc e^{i(ωk − Ωj)τ} dτ` for all four pairs.
pub fn cross_rates_from_environment(env: &EnvironmentSpec) -> DecayParameters {
    let omegas = [env.omega1, env.omega2];
    let mut rates = [[C64::new(0.0, 0.0); 2]; 2];
    for mode in &env.entries {
        let alpha = [mode.alpha1, mode.alpha2];
        for i in 0..2 {
            for j in 0..2 {
                rates[i][j] +=
                    alpha[i] * alpha[j].conj() * memory_integral(mode.omega - omegas[j], env.tau_c);
            }
        }
    }
    DecayParameters {
        k11: rates[0][0].re,
        k22: rates[1][1].re,
        k12: rates[0][1].re,
        k21: rates[1][0].re,
        d11: rates[0][0].im,
        d22: rates[1][1].im,
        d12: rates[0][1].im,
        d21: rates[1][0].im,
        omega1: env.omega1,
        omega2: env.omega2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{max_abs, DensityMatrix, Ket};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn two_modes() -> SpaceSignature {
        SpaceSignature::two_modes(1)
    }

    #[test]
    fn independent_channels_decay_populations() {
        let p = DecayParameters { k11: 1000.0, k22: 300.0, ..Default::default() };
        let s = two_modes();
        let l = build_general_liouvillian(&p, &s).unwrap();
        let rho = DensityMatrix::from_ket(&Ket::basis(&s, &[1, 0]).unwrap()).unwrap();
        let drho = apply_liouvillian(&l, &rho).unwrap();
        let n1 = {
            let a = annihilation_op(&s, 0).unwrap();
            a.adjoint().multiply(&a).unwrap()
        };
        let rate = crate::tensor::trace_of_product(n1.matrix(), &drho);
        assert!((rate - re(-2000.0)).norm() < 1e-12);
    }

    #[test]
    fn vacuum_is_stationary() {
        let p = DecayParameters {
            k11: 3.0,
            k22: 2.0,
            k12: 0.4,
            k21: 0.9,
            d11: 0.3,
            d22: -0.2,
            d12: 0.7,
            d21: 0.1,
            omega1: 10.0,
            omega2: 11.0,
        };
        let s = SpaceSignature::two_modes(2);
        let l = build_general_liouvillian(&p, &s).unwrap();
        let vac = DensityMatrix::from_ket(&Ket::vacuum(&s)).unwrap();
        assert_eq!(max_abs(&apply_liouvillian(&l, &vac).unwrap()), 0.0);
    }

    #[test]
    fn positivity_violation_reported() {
        let p = DecayParameters { k11: 1.0, k22: 1.0, k12: 1.5, k21: 1.5, ..Default::default() };
        let err = build_general_liouvillian(&p, &two_modes()).unwrap_err();
        assert!(matches!(&err, Error::NotPositive { what, .. } if what.contains("damping matrix")));
        assert!(SymmetricDecayParameters::new(1.0, 1.5, 0.0, 0.0).is_err());
        assert!(SymmetricDecayParameters::new(1.0, 1.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn negative_r_folds_into_phase() {
        let p = SymmetricDecayParameters::new(2.0, -1.0, 0.5, 0.0).unwrap();
        assert_eq!(p.r(), 1.0);
        assert!((p.gamma() - (0.5 + PI)).abs() < 1e-15);
        let q = SymmetricDecayParameters::new(2.0, 1.0, -0.5, 0.0).unwrap();
        assert!((q.gamma() - (TAU - 0.5)).abs() < 1e-15);
    }

    #[test]
    fn dfs_projector_is_dark() {
        for gamma in [0.0, 0.7, FRAC_PI_2, 2.5] {
            let s = two_modes();
            let p = SymmetricDecayParameters::new(1000.0, 1000.0, gamma, 0.0).unwrap();
            let l = build_symmetric_liouvillian(&p, &s, Frame::Rotating).unwrap();
            let ket = Ket::basis(&s, &[1, 0])
                .unwrap()
                .add(&Ket::basis(&s, &[0, 1]).unwrap().scale(-C64::from_polar(1.0, gamma)))
                .unwrap()
                .scale(re(FRAC_1_SQRT_2));
            let rho = DensityMatrix::from_ket(&ket).unwrap();
            assert!(max_abs(&apply_liouvillian(&l, &rho).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn no_cross_decay_is_two_independent_dissipators() {
        let s = two_modes();
        let p = SymmetricDecayParameters::new(5.0, 0.0, 1.1, 0.0).unwrap();
        let l = build_symmetric_liouvillian(&p, &s, Frame::Rotating).unwrap();
        let (a1, a2) = mode_operators(&s).unwrap();
        let reference = SuperOperatorBuilder::new(&s)
            .dissipator(5.0, &a1)
            .unwrap()
            .dissipator(5.0, &a2)
            .unwrap()
            .build();
        let diff = l.matrix().unwrap() - reference.matrix().unwrap();
        assert_eq!(max_abs(&diff), 0.0);
    }

    #[test]
    fn symmetric_matches_general() {
        let s = two_modes();
        let p = SymmetricDecayParameters::new(1000.0, 500.0, FRAC_PI_3, 0.0).unwrap();
        let sym = build_symmetric_liouvillian(&p, &s, Frame::Rotating).unwrap().matrix().unwrap();
        let general = build_general_liouvillian(&p.to_general(Frame::Rotating), &s)
            .unwrap()
            .matrix()
            .unwrap();
        assert!(max_abs(&(sym - general)) <= 1e-14);
    }

    #[test]
    fn mode_transform_shapes() {
        let t = normal_mode_transform(0.0).matrix();
        let s = FRAC_1_SQRT_2;
        let expect = [[re(s), re(-s)], [re(s), re(s)]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((t[i][j] - expect[i][j]).norm() < 1e-16);
            }
        }
        let m = normal_mode_transform(1.234).matrix();
        for i in 0..2 {
            for j in 0..2 {
                let dot: C64 = (0..2).map(|k| m[i][k] * m[j][k].conj()).sum();
                let id = if i == j { 1.0 } else { 0.0 };
                assert!((dot - re(id)).norm() < 1e-15);
            }
        }
        let space = SpaceSignature::two_modes(2);
        let (big_a1, _) = normal_mode_transform(1.234).normal_modes(&space).unwrap();
        assert_eq!(big_a1.apply(&Ket::vacuum(&space)).unwrap().norm(), 0.0);
    }

    #[test]
    fn decomposition_limits() {
        let s = two_modes();
        let p = SymmetricDecayParameters::new(7.0, 7.0, 0.3, 0.0).unwrap();
        let (l1, _) = decompose_symmetric(&p, &s, Frame::Rotating).unwrap();
        assert_eq!(max_abs(&l1.matrix().unwrap()), 0.0);
        let q = SymmetricDecayParameters::new(7.0, 0.0, 0.3, 0.0).unwrap();
        let (l1, l2) = decompose_symmetric(&q, &s, Frame::Rotating).unwrap();
        assert_eq!(l1.decay_scale(), 7.0);
        assert_eq!(l2.decay_scale(), 7.0);
    }

    #[test]
    fn decomposition_identity() {
        let s = two_modes();
        let p = SymmetricDecayParameters::new(1000.0, 750.0, FRAC_PI_2, 0.0).unwrap();
        let l = build_symmetric_liouvillian(&p, &s, Frame::Rotating).unwrap().matrix().unwrap();
        let (l1, l2) = decompose_symmetric(&p, &s, Frame::Rotating).unwrap();
        let sum = l1.add(&l2).unwrap().matrix().unwrap();
        assert!(max_abs(&(sum - l)) <= 1e-10);
    }

    #[test]
    fn environment_rates() {
        let one = |a1: C64, a2: C64, w: f64| BathMode { alpha1: a1, alpha2: a2, omega: w };
        // uncorrelated second mode
        let env = EnvironmentSpec::new(
            vec![one(re(2.0), re(0.0), 1.0), one(C64::new(0.3, 1.0), re(0.0), 5.0)],
            0.5,
            2.0,
            2.0,
        )
        .unwrap();
        let p = cross_rates_from_environment(&env);
        assert_eq!((p.k12, p.k21, p.d12, p.d21), (0.0, 0.0, 0.0, 0.0));

        // resonant single entry
        let env = EnvironmentSpec::new(vec![one(re(3.0), re(3.0), 7.0)], 0.25, 7.0, 7.0).unwrap();
        let p = cross_rates_from_environment(&env);
        assert!((p.k11 - 9.0 * 0.25).abs() < 1e-12);
        assert!((p.k12 - 9.0 * 0.25).abs() < 1e-12);
        assert_eq!((p.d11, p.d12, p.d21, p.d22), (0.0, 0.0, 0.0, 0.0));

        assert!(EnvironmentSpec::new(vec![], 1.0, 0.0, 0.0).is_err());
        assert!(EnvironmentSpec::new(vec![one(re(1.0), re(1.0), 0.0)], 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn memory_integral_matches_quadrature() {
        for &(x, tau) in &[(3.0, 0.7), (-2.5, 1.3), (1e-9, 0.5), (40.0, 0.1)] {
            let n = 20_000;
            let h = tau / n as f64;
            // composite Simpson
            let f = |t: f64| C64::from_polar(1.0, x * t);
            let mut acc = f(0.0) + f(tau);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += f(i as f64 * h) * w;
            }
            let quad = acc * (h / 3.0);
            assert!((memory_integral(x, tau) - quad).norm() < 1e-10, "x = {x}");
        }
    }
}
