//! Truncated Fock-space and two-level-atom operator algebra over dense
//! complex matrices.
//!
//! Subsystem ordering is fixed: index 0 is mode M₁, index 1 is mode M₂ and
//! index 2, when present, is the atom. Basis states are ordered row-major over
//! that list, so the last subsystem varies fastest. The atom uses `|g⟩ = 0`
//! and `|e⟩ = 1`.

use std::fmt;

use ndarray::{linalg::kron, Array1, Array2, ArrayView2, Axis};
use ndarray_linalg::{EigValsh, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Atom level index of the ground state `|g⟩`.
pub const GROUND: usize = 0;
/// Atom level index of the excited state `|e⟩`.
pub const EXCITED: usize = 1;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Ordered list of subsystem dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SpaceSignature {
    dims: Vec<usize>,
    total: usize,
}

impl SpaceSignature {
    pub fn new(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidArgument("space needs at least one subsystem".into()));
        }
        if let Some(pos) = dims.iter().position(|&d| d == 0) {
            return Err(Error::InvalidArgument(format!("subsystem {pos} has dimension 0")));
        }
        let total = dims.iter().product();
        Ok(Self { dims: dims.to_vec(), total })
    }

    /// Two bosonic modes truncated at `n_max`.
    pub fn two_modes(n_max: usize) -> Self {
        Self::new(&[n_max + 1, n_max + 1]).expect("non-zero dims")
    }

    /// Two bosonic modes truncated at `n_max` plus a two-level atom.
    pub fn two_modes_and_atom(n_max: usize) -> Self {
        Self::new(&[n_max + 1, n_max + 1, 2]).expect("non-zero dims")
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn dim(&self, subsystem: usize) -> Result<usize> {
        self.dims.get(subsystem).copied().ok_or(Error::SubsystemOutOfRange {
            index: subsystem,
            count: self.dims.len(),
        })
    }

    /// Flat basis index of the product state with the given per-subsystem levels.
    pub fn index_of(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.dims.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} levels, got {}",
                self.dims.len(),
                levels.len()
            )));
        }
        let mut index = 0;
        for (i, (&level, &dim)) in levels.iter().zip(&self.dims).enumerate() {
            if level >= dim {
                return Err(Error::InvalidArgument(format!(
                    "level {level} out of range for subsystem {i} of dimension {dim}"
                )));
            }
            index = index * dim + level;
        }
        Ok(index)
    }

    /// Inverse of [`index_of`](Self::index_of).
    pub fn levels_of(&self, mut index: usize) -> Vec<usize> {
        let mut levels = vec![0; self.dims.len()];
        for (slot, &dim) in levels.iter_mut().zip(&self.dims).rev() {
            *slot = index % dim;
            index /= dim;
        }
        levels
    }

    /// The space with one subsystem removed.
    pub fn without(&self, subsystem: usize) -> Result<Self> {
        self.dim(subsystem)?;
        let dims: Vec<usize> = self
            .dims
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != subsystem)
            .map(|(_, &d)| d)
            .collect();
        Self::new(&dims)
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(&dims).expect("both spaces valid")
    }

    pub(crate) fn ensure_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch { left: self.to_string(), right: other.to_string() })
        }
    }
}

impl fmt::Display for SpaceSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.dims)
    }
}

pub fn make_space(dims: &[usize]) -> Result<SpaceSignature> {
    SpaceSignature::new(dims)
}

/// Embed a single-subsystem matrix into the full space by identities on all
/// other factors.
pub fn embed(space: &SpaceSignature, subsystem: usize, local: ArrayView2<C64>) -> Result<Operator> {
    let dim = space.dim(subsystem)?;
    if local.dim() != (dim, dim) {
        return Err(Error::InvalidArgument(format!(
            "local operator shape {:?} does not match subsystem dimension {dim}",
            local.dim()
        )));
    }
    let before: usize = space.dims()[..subsystem].iter().product();
    let after: usize = space.dims()[subsystem + 1..].iter().product();
    let matrix = kron(&kron(&Array2::eye(before), &local), &Array2::eye(after));
    Ok(Operator { matrix, space: space.clone() })
}

/// Lowering operator `a` of one bosonic subsystem, `⟨n−1|a|n⟩ = √n`.
pub fn annihilation_op(space: &SpaceSignature, subsystem: usize) -> Result<Operator> {
    let dim = space.dim(subsystem)?;
    if dim < 2 {
        return Err(Error::SubsystemDimension { index: subsystem, found: dim, expected: ">= 2" });
    }
    let mut local = Array2::zeros((dim, dim));
    for n in 1..dim {
        local[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    embed(space, subsystem, local.view())
}

/// Pauli-type operators of a two-level atom.
#[derive(Clone, Debug)]
pub struct AtomOps {
    pub sigma_z: Operator,
    pub sigma_plus: Operator,
    pub sigma_minus: Operator,
}

pub fn atom_ops(space: &SpaceSignature, subsystem: usize) -> Result<AtomOps> {
    let dim = space.dim(subsystem)?;
    if dim != 2 {
        return Err(Error::SubsystemDimension { index: subsystem, found: dim, expected: "2" });
    }
    let mut minus = Array2::zeros((2, 2));
    minus[[GROUND, EXCITED]] = ONE;
    let mut z = Array2::zeros((2, 2));
    z[[EXCITED, EXCITED]] = ONE;
    z[[GROUND, GROUND]] = -ONE;
    let plus = minus.t().to_owned();
    Ok(AtomOps {
        sigma_z: embed(space, subsystem, z.view())?,
        sigma_plus: embed(space, subsystem, plus.view())?,
        sigma_minus: embed(space, subsystem, minus.view())?,
    })
}

pub(crate) fn dagger(m: &Array2<C64>) -> Array2<C64> {
    m.t().mapv(|z| z.conj())
}

pub(crate) fn max_abs(m: &Array2<C64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub(crate) fn hermiticity_deviation(m: &Array2<C64>) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    dev
}

/// Dense square operator on a [`SpaceSignature`].
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: Array2<C64>,
    space: SpaceSignature,
}

impl Operator {
    pub fn from_matrix(matrix: Array2<C64>, space: &SpaceSignature) -> Result<Self> {
        let d = space.total_dim();
        if matrix.dim() != (d, d) {
            return Err(Error::InvalidArgument(format!(
                "matrix shape {:?} does not match space {space} of dimension {d}",
                matrix.dim()
            )));
        }
        Ok(Self { matrix, space: space.clone() })
    }

    pub fn identity(space: &SpaceSignature) -> Self {
        Self { matrix: Array2::eye(space.total_dim()), space: space.clone() }
    }

    pub fn zero(space: &SpaceSignature) -> Self {
        let d = space.total_dim();
        Self { matrix: Array2::zeros((d, d)), space: space.clone() }
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn space(&self) -> &SpaceSignature {
        &self.space
    }

    pub fn adjoint(&self) -> Self {
        Self { matrix: dagger(&self.matrix), space: self.space.clone() }
    }

    pub fn multiply(&self, rhs: &Self) -> Result<Self> {
        self.space.ensure_same(&rhs.space)?;
        Ok(Self { matrix: self.matrix.dot(&rhs.matrix), space: self.space.clone() })
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.space.ensure_same(&rhs.space)?;
        Ok(Self { matrix: &self.matrix + &rhs.matrix, space: self.space.clone() })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { matrix: self.matrix.mapv(|z| z * factor), space: self.space.clone() }
    }

    /// `[self, rhs] = self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        self.space.ensure_same(&rhs.space)?;
        let matrix = self.matrix.dot(&rhs.matrix) - rhs.matrix.dot(&self.matrix);
        Ok(Self { matrix, space: self.space.clone() })
    }

    /// `Σ cᵢ Oᵢ`; all terms must share one space.
    pub fn linear_combination(terms: &[(C64, &Operator)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty linear combination".into()))?;
        let mut acc = Self::zero(&first.space);
        for (c, op) in terms {
            acc.space.ensure_same(&op.space)?;
            acc.matrix.scaled_add(*c, &op.matrix);
        }
        Ok(acc)
    }

    /// `trace(O ρ)`.
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<C64> {
        self.space.ensure_same(&rho.space)?;
        Ok(trace_of_product(&self.matrix, &rho.matrix))
    }

    pub fn apply(&self, ket: &Ket) -> Result<Ket> {
        self.space.ensure_same(&ket.space)?;
        Ok(Ket { amplitudes: self.matrix.dot(&ket.amplitudes), space: self.space.clone() })
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.matrix)
    }
}

pub(crate) fn trace_of_product(a: &Array2<C64>, b: &Array2<C64>) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[[i, k]] * b[[k, i]];
        }
    }
    acc
}

/// State vector. Kets need not be normalized; [`DensityMatrix::from_ket`]
/// requires it.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    amplitudes: Array1<C64>,
    space: SpaceSignature,
}

impl Ket {
    pub fn new(amplitudes: Array1<C64>, space: &SpaceSignature) -> Result<Self> {
        if amplitudes.len() != space.total_dim() {
            return Err(Error::InvalidArgument(format!(
                "ket length {} does not match space {space}",
                amplitudes.len()
            )));
        }
        Ok(Self { amplitudes, space: space.clone() })
    }

    pub fn basis(space: &SpaceSignature, levels: &[usize]) -> Result<Self> {
        let mut amplitudes = Array1::zeros(space.total_dim());
        amplitudes[space.index_of(levels)?] = ONE;
        Ok(Self { amplitudes, space: space.clone() })
    }

    pub fn vacuum(space: &SpaceSignature) -> Self {
        let mut amplitudes = Array1::zeros(space.total_dim());
        amplitudes[0] = ONE;
        Self { amplitudes, space: space.clone() }
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn space(&self) -> &SpaceSignature {
        &self.space
    }

    pub fn amplitude(&self, levels: &[usize]) -> Result<C64> {
        Ok(self.amplitudes[self.space.index_of(levels)?])
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes: self.amplitudes.mapv(|z| z / norm), space: self.space.clone() })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { amplitudes: self.amplitudes.mapv(|z| z * factor), space: self.space.clone() }
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.space.ensure_same(&rhs.space)?;
        Ok(Self { amplitudes: &self.amplitudes + &rhs.amplitudes, space: self.space.clone() })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        self.space.ensure_same(&other.space)?;
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²`, insensitive to global phase.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let a = self.amplitudes.view().insert_axis(Axis(1));
        let b = other.amplitudes.view().insert_axis(Axis(1));
        let amplitudes = kron(&a, &b).remove_axis(Axis(1));
        Self { amplitudes, space: self.space.concat(&other.space) }
    }
}

/// Tolerances a [`DensityMatrix`] is held to at construction.
pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-9;

/// Deviations of a matrix from being a valid density matrix.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct StateDiagnostics {
    pub trace_deviation: f64,
    pub hermiticity_deviation: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub fn of(matrix: &Array2<C64>) -> Result<Self> {
        let trace: C64 = matrix.diag().sum();
        let hermiticity_deviation = hermiticity_deviation(matrix);
        let hermitian = (matrix + &dagger(matrix)).mapv(|z| z * 0.5);
        let eig = hermitian.eigvalsh(UPLO::Lower)?;
        let min_eigenvalue = eig.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self { trace_deviation: (trace - ONE).norm(), hermiticity_deviation, min_eigenvalue })
    }

    pub fn within(&self, trace_tol: f64, hermiticity_tol: f64, positivity_tol: f64) -> bool {
        self.trace_deviation <= trace_tol
            && self.hermiticity_deviation <= hermiticity_tol
            && self.min_eigenvalue >= -positivity_tol
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: Array2<C64>,
    space: SpaceSignature,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_matrix(matrix: Array2<C64>, space: &SpaceSignature) -> Result<Self> {
        Self::from_matrix_with_tolerance(matrix, space, TRACE_TOL, HERMITICITY_TOL, POSITIVITY_TOL)
    }

    pub(crate) fn from_matrix_with_tolerance(
        matrix: Array2<C64>,
        space: &SpaceSignature,
        trace_tol: f64,
        hermiticity_tol: f64,
        positivity_tol: f64,
    ) -> Result<Self> {
        let d = space.total_dim();
        if matrix.dim() != (d, d) {
            return Err(Error::InvalidArgument(format!(
                "matrix shape {:?} does not match space {space}",
                matrix.dim()
            )));
        }
        let diag = StateDiagnostics::of(&matrix)?;
        if !diag.within(trace_tol, hermiticity_tol, positivity_tol) {
            return Err(Error::InvalidState(format!(
                "trace deviation {:e}, hermiticity deviation {:e}, min eigenvalue {:e}",
                diag.trace_deviation, diag.hermiticity_deviation, diag.min_eigenvalue
            )));
        }
        Ok(Self { matrix, space: space.clone() })
    }

    pub fn from_ket(ket: &Ket) -> Result<Self> {
        let norm = ket.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { norm });
        }
        let col = ket.amplitudes.view().insert_axis(Axis(1));
        let row = ket.amplitudes.mapv(|z| z.conj()).insert_axis(Axis(0));
        Ok(Self { matrix: col.dot(&row), space: ket.space.clone() })
    }

    pub fn matrix(&self) -> &Array2<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Array2<C64> {
        self.matrix
    }

    pub fn space(&self) -> &SpaceSignature {
        &self.space
    }

    pub fn diagnostics(&self) -> Result<StateDiagnostics> {
        StateDiagnostics::of(&self.matrix)
    }

    pub fn trace(&self) -> C64 {
        self.matrix.diag().sum()
    }

    /// `trace(ρ²)`.
    pub fn purity(&self) -> f64 {
        trace_of_product(&self.matrix, &self.matrix).re
    }

    /// `⟨ψ|ρ|ψ⟩` for a normalized `ψ`.
    pub fn fidelity_with(&self, ket: &Ket) -> Result<f64> {
        self.space.ensure_same(&ket.space)?;
        let v = self.matrix.dot(&ket.amplitudes);
        Ok(ket.amplitudes.iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<C64>().re)
    }

    /// Diagonal element for a product basis state.
    pub fn population(&self, levels: &[usize]) -> Result<f64> {
        let i = self.space.index_of(levels)?;
        Ok(self.matrix[[i, i]].re)
    }

    /// Probability that the given subsystem is found at `level`.
    pub fn subsystem_population(&self, subsystem: usize, level: usize) -> Result<f64> {
        let dim = self.space.dim(subsystem)?;
        if level >= dim {
            return Err(Error::InvalidArgument(format!("level {level} >= dimension {dim}")));
        }
        Ok((0..self.space.total_dim())
            .filter(|&i| self.space.levels_of(i)[subsystem] == level)
            .map(|i| self.matrix[[i, i]].re)
            .sum())
    }

    /// Trace out one subsystem.
    pub fn partial_trace(&self, subsystem: usize) -> Result<Self> {
        let reduced_space = self.space.without(subsystem)?;
        let dim = self.space.dim(subsystem)?;
        let before: usize = self.space.dims()[..subsystem].iter().product();
        let after: usize = self.space.dims()[subsystem + 1..].iter().product();
        let rd = reduced_space.total_dim();
        let mut out = Array2::zeros((rd, rd));
        let full = |b: usize, s: usize, a: usize| (b * dim + s) * after + a;
        for b1 in 0..before {
            for a1 in 0..after {
                for b2 in 0..before {
                    for a2 in 0..after {
                        let mut acc = ZERO;
                        for s in 0..dim {
                            acc += self.matrix[[full(b1, s, a1), full(b2, s, a2)]];
                        }
                        out[[b1 * after + a1, b2 * after + a2]] = acc;
                    }
                }
            }
        }
        Ok(Self { matrix: out, space: reduced_space })
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self { matrix: kron(&self.matrix, &other.matrix), space: self.space.concat(&other.space) }
    }

    pub(crate) fn from_parts_unchecked(matrix: Array2<C64>, space: SpaceSignature) -> Self {
        Self { matrix, space }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn space_dimensions() {
        assert_eq!(make_space(&[2]).unwrap().total_dim(), 2);
        assert_eq!(make_space(&[4, 4]).unwrap().total_dim(), 16);
        assert_eq!(make_space(&[4, 4, 2]).unwrap().total_dim(), 32);
        assert!(make_space(&[]).is_err());
        assert!(make_space(&[3, 0]).is_err());
    }

    #[test]
    fn index_round_trip() {
        let s = make_space(&[3, 4, 2]).unwrap();
        for i in 0..s.total_dim() {
            assert_eq!(s.index_of(&s.levels_of(i)).unwrap(), i);
        }
        assert_eq!(s.index_of(&[0, 0, 1]).unwrap(), 1);
        assert_eq!(s.index_of(&[1, 0, 0]).unwrap(), 8);
    }

    #[test]
    fn annihilation_elements() {
        let s = make_space(&[3]).unwrap();
        let a = annihilation_op(&s, 0).unwrap();
        let m = a.matrix();
        assert_eq!(m[[0, 1]], c(1.0));
        assert!((m[[1, 2]] - c(2f64.sqrt())).norm() < 1e-15);
        let nonzero = m.iter().filter(|z| z.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
        let out = a.apply(&Ket::vacuum(&s)).unwrap();
        assert_eq!(out.norm(), 0.0);
    }

    #[test]
    fn annihilation_embedding() {
        let s = make_space(&[2, 2]).unwrap();
        let a1 = annihilation_op(&s, 0).unwrap();
        let out = a1.apply(&Ket::basis(&s, &[1, 0]).unwrap()).unwrap();
        assert_eq!(out, Ket::basis(&s, &[0, 0]).unwrap());
        assert!(matches!(
            annihilation_op(&s, 2),
            Err(Error::SubsystemOutOfRange { index: 2, count: 2 })
        ));
        let s1 = make_space(&[1, 2]).unwrap();
        assert!(annihilation_op(&s1, 0).is_err());
    }

    #[test]
    fn atom_algebra() {
        let s = SpaceSignature::two_modes_and_atom(1);
        let ops = atom_ops(&s, 2).unwrap();
        let e = Ket::basis(&s, &[0, 0, EXCITED]).unwrap();
        let g = Ket::basis(&s, &[0, 0, GROUND]).unwrap();
        assert_eq!(ops.sigma_minus.apply(&e).unwrap(), g);
        let anti = ops
            .sigma_plus
            .multiply(&ops.sigma_minus)
            .unwrap()
            .add(&ops.sigma_minus.multiply(&ops.sigma_plus).unwrap())
            .unwrap();
        assert_eq!(anti, Operator::identity(&s));
        let atom = make_space(&[2]).unwrap();
        let z = atom_ops(&atom, 0).unwrap().sigma_z;
        let mut eig = z.matrix().eigvalsh(UPLO::Lower).unwrap().to_vec();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((eig[0] + 1.0).abs() < 1e-15 && (eig[1] - 1.0).abs() < 1e-15);
        let wide = SpaceSignature::two_modes_and_atom(2);
        assert!(matches!(atom_ops(&wide, 0), Err(Error::SubsystemDimension { .. })));
    }

    #[test]
    fn bosonic_commutator_below_truncation_edge() {
        let n_max = 5;
        let s = make_space(&[n_max + 1]).unwrap();
        let a = annihilation_op(&s, 0).unwrap();
        let comm = a.commutator(&a.adjoint()).unwrap();
        for i in 0..n_max {
            for j in 0..n_max {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((comm.matrix()[[i, j]] - c(expect)).norm() < 1e-12);
            }
        }
        // the top level carries −n_max instead of 1
        assert!((comm.matrix()[[n_max, n_max]] - c(-(n_max as f64))).norm() < 1e-12);
    }

    #[test]
    fn number_expectation() {
        let s = make_space(&[3]).unwrap();
        let a = annihilation_op(&s, 0).unwrap();
        let n = a.adjoint().multiply(&a).unwrap();
        let rho = DensityMatrix::from_ket(&Ket::basis(&s, &[1]).unwrap()).unwrap();
        assert!((n.expectation(&rho).unwrap() - c(1.0)).norm() < 1e-15);
        let other = make_space(&[4]).unwrap();
        assert!(Operator::identity(&other).expectation(&rho).is_err());
    }

    #[test]
    fn density_from_kets() {
        let s = SpaceSignature::two_modes(1);
        let vac = DensityMatrix::from_ket(&Ket::vacuum(&s)).unwrap();
        assert_eq!(vac.matrix().iter().filter(|z| z.norm() > 0.0).count(), 1);
        assert_eq!(vac.matrix()[[0, 0]], c(1.0));

        let bell = Ket::basis(&s, &[1, 0])
            .unwrap()
            .add(&Ket::basis(&s, &[0, 1]).unwrap())
            .unwrap()
            .scale(c(1.0 / 2f64.sqrt()));
        let rho = DensityMatrix::from_ket(&bell).unwrap();
        let big: Vec<f64> =
            rho.matrix().iter().map(|z| z.norm()).filter(|&x| x > 1e-15).collect();
        assert_eq!(big.len(), 4);
        assert!(big.iter().all(|&x| (x - 0.5).abs() < 1e-15));
        assert!((rho.purity() - 1.0).abs() < 1e-15);

        let unnormalized = Ket::vacuum(&s).scale(c(1.1));
        assert!(matches!(DensityMatrix::from_ket(&unnormalized), Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn partial_trace_of_product_state() {
        let field = SpaceSignature::two_modes(1);
        let atom = make_space(&[2]).unwrap();
        let f = DensityMatrix::from_ket(&Ket::basis(&field, &[1, 0]).unwrap()).unwrap();
        let g = DensityMatrix::from_ket(&Ket::basis(&atom, &[GROUND]).unwrap()).unwrap();
        let joint = f.tensor(&g);
        assert_eq!(joint.space(), &SpaceSignature::two_modes_and_atom(1));
        assert_eq!(joint.partial_trace(2).unwrap(), f);
        assert_eq!(joint.partial_trace(0).unwrap().partial_trace(0).unwrap(), g);
        assert!((joint.subsystem_population(2, GROUND).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_density_rejected() {
        let s = make_space(&[2]).unwrap();
        let mut m = Array2::eye(2).mapv(|z: C64| z * 0.5);
        m[[0, 1]] = c(0.7);
        m[[1, 0]] = c(0.7);
        assert!(matches!(DensityMatrix::from_matrix(m, &s), Err(Error::InvalidState(_))));
    }
}
