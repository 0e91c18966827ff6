#![allow(dead_code)]

use crossdecay::{DensityMatrix, Ket, SpaceSignature, C64};
use ndarray::{Array1, Array2};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

pub fn trace(a: &Array2<C64>) -> C64 {
    a.diag().sum()
}

pub fn random_matrix(rng: &mut StdRng, d: usize) -> Array2<C64> {
    Array2::from_shape_fn((d, d), |_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_hermitian(rng: &mut StdRng, d: usize) -> Array2<C64> {
    let x = random_matrix(rng, d);
    (&x + &dagger(&x)).mapv(|z| z * 0.5)
}

pub fn random_ket(rng: &mut StdRng, space: &SpaceSignature) -> Ket {
    let d = space.total_dim();
    let v = Array1::from_shape_fn(d, |_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    Ket::new(v, space).unwrap().normalized().unwrap()
}

pub fn random_density(rng: &mut StdRng, space: &SpaceSignature) -> DensityMatrix {
    let x = random_matrix(rng, space.total_dim());
    let rho = x.dot(&dagger(&x));
    let t = trace(&rho);
    DensityMatrix::from_matrix(rho.mapv(|z| z / t), space).unwrap()
}
