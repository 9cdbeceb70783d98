//! Random two-qubit states and local unitaries for the property tests.

#![allow(dead_code)]

use bangbang_core::{DensityMatrix, Matrix4c, Vector4c};
use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand::rngs::StdRng;
use rand_distr::{Distribution, Exp1, StandardNormal};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn gaussian_c(rng: &mut StdRng) -> Complex64 {
    Complex64::new(
        StandardNormal.sample(rng),
        StandardNormal.sample(rng),
    )
}

/// Haar-distributed pure state.
pub fn pure_state(rng: &mut StdRng) -> Vector4c {
    let v = Vector4c::from_fn(|_, _| gaussian_c(rng));
    let n = v.norm();
    v / Complex64::new(n, 0.0)
}

/// Mixture of four Haar pure states with flat Dirichlet weights.
pub fn mixed_state(rng: &mut StdRng) -> DensityMatrix {
    let w: Vec<f64> = (0..4).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    let mut m = Matrix4c::zeros();
    for wi in w {
        let psi = pure_state(rng);
        m += psi * psi.adjoint() * Complex64::new(wi / total, 0.0);
    }
    m = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let tr = m.trace().re;
    DensityMatrix::new(m / Complex64::new(tr, 0.0)).expect("valid random state")
}

/// Random state drawn from a few families, so rank-deficient and X-shaped inputs show up.
pub fn any_state(rng: &mut StdRng) -> DensityMatrix {
    match rng.random_range(0..4) {
        0 => DensityMatrix::from_pure(&pure_state(rng)).unwrap(),
        1 => DensityMatrix::werner(rng.random_range(0.0..=1.0)).unwrap(),
        _ => mixed_state(rng),
    }
}

/// Haar single-qubit unitary from the QR of a Ginibre matrix, phases fixed.
pub fn unitary2(rng: &mut StdRng) -> Matrix2<Complex64> {
    let g = Matrix2::from_fn(|_, _| gaussian_c(rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..2 {
        let d = r[(j, j)];
        let phase = d / Complex64::new(d.norm(), 0.0);
        for i in 0..2 {
            u[(i, j)] *= phase;
        }
    }
    u
}
