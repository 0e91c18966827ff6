//! Superoperators stored as sums of left/right matrix products.
//!
//! A [`SuperOperator`] acts as
//! `X ↦ K_L·X + X·K_R + Σ cᵢ·Aᵢ·X·Bᵢ`.
//! The dense `D²×D²` form on column-stacked vectors is assembled on demand,
//! since it is only affordable for small spaces.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::tensor::{dagger, max_abs, DensityMatrix, Operator, SpaceSignature};

/// Largest `D²` for which [`SuperOperator::matrix`] will assemble a dense matrix.
pub const MAX_DENSE_DIM: usize = 4096;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Nonzero entries of a dense matrix, row-major.
#[derive(Clone, Debug, Default)]
struct Sparse {
    entries: Vec<(usize, usize, C64)>,
}

impl Sparse {
    fn of(m: &Array2<C64>) -> Self {
        let entries = m
            .indexed_iter()
            .filter(|(_, z)| **z != ZERO)
            .map(|((i, j), z)| (i, j, *z))
            .collect();
        Self { entries }
    }

    /// `out += c·A·X`
    fn left_mul_into(&self, c: C64, x: &[C64], out: &mut [C64], d: usize) {
        for &(i, k, a) in &self.entries {
            let f = c * a;
            let (dst, src) = (&mut out[i * d..(i + 1) * d], &x[k * d..(k + 1) * d]);
            for (o, s) in dst.iter_mut().zip(src) {
                *o += f * s;
            }
        }
    }

    /// `out += c·X·B`
    fn right_mul_into(&self, c: C64, x: &[C64], out: &mut [C64], d: usize) {
        for &(k, j, b) in &self.entries {
            let f = c * b;
            for i in 0..d {
                out[i * d + j] += x[i * d + k] * f;
            }
        }
    }
}

#[derive(Clone, Debug)]
struct Sandwich {
    coeff: C64,
    left: Array2<C64>,
    right: Array2<C64>,
    left_sparse: Sparse,
    right_sparse: Sparse,
}

/// Linear map on operators of one space.
#[derive(Clone, Debug)]
pub struct SuperOperator {
    space: SpaceSignature,
    left: Array2<C64>,
    right: Array2<C64>,
    left_sparse: Sparse,
    right_sparse: Sparse,
    sandwiches: Vec<Sandwich>,
    decay_scale: f64,
    frequency_scale: f64,
}

/// Accumulates terms of a [`SuperOperator`].
#[derive(Clone, Debug)]
pub struct SuperOperatorBuilder {
    space: SpaceSignature,
    left: Array2<C64>,
    right: Array2<C64>,
    sandwiches: Vec<(C64, Array2<C64>, Array2<C64>)>,
    decay_scale: f64,
    frequency_scale: f64,
}

impl SuperOperatorBuilder {
    pub fn new(space: &SpaceSignature) -> Self {
        let d = space.total_dim();
        Self {
            space: space.clone(),
            left: Array2::zeros((d, d)),
            right: Array2::zeros((d, d)),
            sandwiches: Vec::new(),
            decay_scale: 0.0,
            frequency_scale: 0.0,
        }
    }

    /// `X ↦ c·A·X`
    pub fn left(mut self, c: C64, a: &Operator) -> Result<Self> {
        self.space.ensure_same(a.space())?;
        self.left.scaled_add(c, a.matrix());
        Ok(self)
    }

    /// `X ↦ c·X·B`
    pub fn right(mut self, c: C64, b: &Operator) -> Result<Self> {
        self.space.ensure_same(b.space())?;
        self.right.scaled_add(c, b.matrix());
        Ok(self)
    }

    /// `X ↦ c·A·X·B`; terms with identical `A` and `B` are merged.
    pub fn sandwich(mut self, c: C64, a: &Operator, b: &Operator) -> Result<Self> {
        self.space.ensure_same(a.space())?;
        self.space.ensure_same(b.space())?;
        self.push_sandwich(c, a.matrix(), b.matrix());
        Ok(self)
    }

    fn push_sandwich(&mut self, c: C64, a: &Array2<C64>, b: &Array2<C64>) {
        match self.sandwiches.iter_mut().find(|(_, l, r)| l == a && r == b) {
            Some((coeff, _, _)) => *coeff += c,
            None => self.sandwiches.push((c, a.clone(), b.clone())),
        }
    }

    /// `X ↦ c·[H, X]`
    pub fn commutator(self, c: C64, h: &Operator) -> Result<Self> {
        self.left(c, h)?.right(-c, h)
    }

    /// `X ↦ rate·(2·J·X·J† − J†J·X − X·J†J)`
    pub fn dissipator(self, rate: f64, jump: &Operator) -> Result<Self> {
        let jd = jump.adjoint();
        let n = jd.multiply(jump)?;
        let r = C64::new(rate, 0.0);
        self.sandwich(2.0 * r, jump, &jd)?.left(-r, &n)?.right(-r, &n)
    }

    /// `X ↦ −i[H, X]`
    pub fn hamiltonian(mut self, h: &Operator) -> Result<Self> {
        let deviation = h.hermiticity_deviation();
        if deviation > 1e-10 * max_abs(h.matrix()).max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        self.frequency_scale += inf_norm(h.matrix());
        self.commutator(C64::new(0.0, -1.0), h)
    }

    /// Characteristic decay rate, used to choose integration steps.
    pub fn decay_scale(mut self, rate: f64) -> Self {
        self.decay_scale += rate.abs();
        self
    }

    /// Characteristic coherent frequency, used to choose integration steps.
    pub fn frequency_scale(mut self, freq: f64) -> Self {
        self.frequency_scale += freq.abs();
        self
    }

    pub fn build(self) -> SuperOperator {
        let sandwiches = self
            .sandwiches
            .into_iter()
            .filter(|(c, _, _)| *c != ZERO)
            .map(|(coeff, left, right)| Sandwich {
                coeff,
                left_sparse: Sparse::of(&left),
                right_sparse: Sparse::of(&right),
                left,
                right,
            })
            .collect();
        SuperOperator {
            left_sparse: Sparse::of(&self.left),
            right_sparse: Sparse::of(&self.right),
            space: self.space,
            left: self.left,
            right: self.right,
            sandwiches,
            decay_scale: self.decay_scale,
            frequency_scale: self.frequency_scale,
        }
    }
}

fn inf_norm(m: &Array2<C64>) -> f64 {
    m.rows().into_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

impl SuperOperator {
    pub fn zero(space: &SpaceSignature) -> Self {
        SuperOperatorBuilder::new(space).build()
    }

    /// `X ↦ −i[H, X]`
    pub fn from_hamiltonian(h: &Operator) -> Result<Self> {
        Ok(SuperOperatorBuilder::new(h.space()).hamiltonian(h)?.build())
    }

    pub fn space(&self) -> &SpaceSignature {
        &self.space
    }

    pub fn decay_scale(&self) -> f64 {
        self.decay_scale
    }

    pub fn frequency_scale(&self) -> f64 {
        self.frequency_scale
    }

    /// Re-open for adding further terms.
    pub fn to_builder(&self) -> SuperOperatorBuilder {
        SuperOperatorBuilder {
            space: self.space.clone(),
            left: self.left.clone(),
            right: self.right.clone(),
            sandwiches: self
                .sandwiches
                .iter()
                .map(|s| (s.coeff, s.left.clone(), s.right.clone()))
                .collect(),
            decay_scale: self.decay_scale,
            frequency_scale: self.frequency_scale,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.space.ensure_same(&other.space)?;
        let mut b = self.to_builder();
        b.left += &other.left;
        b.right += &other.right;
        for s in &other.sandwiches {
            b.push_sandwich(s.coeff, &s.left, &s.right);
        }
        b.decay_scale += other.decay_scale;
        b.frequency_scale += other.frequency_scale;
        Ok(b.build())
    }

    /// Action on a raw matrix of the right size, via the sparse term form.
    pub fn apply_matrix(&self, x: &Array2<C64>) -> Result<Array2<C64>> {
        let d = self.space.total_dim();
        if x.dim() != (d, d) {
            return Err(Error::InvalidArgument(format!(
                "matrix shape {:?} does not match space {}",
                x.dim(),
                self.space
            )));
        }
        let x = x.as_standard_layout();
        let xs = x.as_slice().expect("standard layout");
        let mut out = vec![ZERO; d * d];
        self.apply_slice(xs, &mut out, &mut vec![ZERO; d * d]);
        Ok(Array2::from_shape_vec((d, d), out).expect("shape"))
    }

    /// `out = L(x)`, row-major slices of length `D²`; `scratch` is overwritten.
    pub(crate) fn apply_slice(&self, x: &[C64], out: &mut [C64], scratch: &mut [C64]) {
        let d = self.space.total_dim();
        let one = C64::new(1.0, 0.0);
        out.iter_mut().for_each(|z| *z = ZERO);
        self.left_sparse.left_mul_into(one, x, out, d);
        self.right_sparse.right_mul_into(one, x, out, d);
        for s in &self.sandwiches {
            scratch.iter_mut().for_each(|z| *z = ZERO);
            s.left_sparse.left_mul_into(one, x, scratch, d);
            s.right_sparse.right_mul_into(s.coeff, scratch, out, d);
        }
    }

    /// Dense matrix acting on column-stacked vectors, `vec(X)[i + j·D] = X[i, j]`.
    pub fn matrix(&self) -> Result<Array2<C64>> {
        let d = self.space.total_dim();
        let n = d * d;
        if n > MAX_DENSE_DIM {
            return Err(Error::TooLarge { dim: n, limit: MAX_DENSE_DIM });
        }
        let eye: Array2<C64> = Array2::eye(d);
        let mut m = Array2::zeros((n, n));
        // vec(A·X·B) = (Bᵀ ⊗ A)·vec(X)
        let mut add_kron = |c: C64, a: &Array2<C64>, b: &Array2<C64>| {
            for ((l, j), &bv) in b.indexed_iter() {
                if bv == ZERO {
                    continue;
                }
                for ((i, k), &av) in a.indexed_iter() {
                    if av == ZERO {
                        continue;
                    }
                    m[[i + j * d, k + l * d]] += c * av * bv;
                }
            }
        };
        let one = C64::new(1.0, 0.0);
        add_kron(one, &self.left, &eye);
        add_kron(one, &eye, &self.right);
        for s in &self.sandwiches {
            add_kron(s.coeff, &s.left, &s.right);
        }
        Ok(m)
    }

    /// Action through the dense vectorized matrix.
    pub fn apply_vectorized(&self, x: &Array2<C64>) -> Result<Array2<C64>> {
        let d = self.space.total_dim();
        let m = self.matrix()?;
        let v = vectorize(x);
        if v.len() != d * d {
            return Err(Error::InvalidArgument("matrix size mismatch".into()));
        }
        Ok(devectorize(&m.dot(&v), d))
    }

    /// The adjoint-symmetry defect `max |L(X†) − L(X)†|` for one probe `X`.
    pub fn hermiticity_defect(&self, x: &Array2<C64>) -> Result<f64> {
        let a = self.apply_matrix(&dagger(x))?;
        let b = dagger(&self.apply_matrix(x)?);
        Ok(max_abs(&(a - b)))
    }
}

pub fn vectorize(x: &Array2<C64>) -> ndarray::Array1<C64> {
    x.t().iter().copied().collect()
}

pub fn devectorize(v: &ndarray::Array1<C64>, d: usize) -> Array2<C64> {
    Array2::from_shape_vec((d, d), v.to_vec()).expect("length d²").reversed_axes().to_owned()
}

/// `dρ/dt = L(ρ)`.
pub fn apply_liouvillian(l: &SuperOperator, rho: &DensityMatrix) -> Result<Array2<C64>> {
    l.space().ensure_same(rho.space())?;
    l.apply_matrix(rho.matrix())
}
