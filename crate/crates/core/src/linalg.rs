//! Small dense helpers shared by the measures and the oracle.

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Matrix4c = Matrix4<Complex64>;
pub type Vector4c = Vector4<Complex64>;

/// Eigenvalues (descending) and matching eigenvector columns of a Hermitian 4x4 matrix.
pub(crate) fn hermitian_eigen4(m: &Matrix4c) -> ([f64; 4], Matrix4c) {
    let eig = SymmetricEigen::new(*m);
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let mut values = [0.0; 4];
    let mut vectors = Matrix4c::zeros();
    for (dst, &src) in order.iter().enumerate() {
        values[dst] = eig.eigenvalues[src];
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Clip a would-be nonnegative eigenvalue. Values in `[-clip, 0)` become zero, anything
/// below `-clip` is an error.
pub(crate) fn clip_nonnegative(value: f64, clip: f64, what: &str) -> Result<f64> {
    if value.is_nan() {
        return Err(Error::NumericalFailure(format!("{what}: NaN eigenvalue")));
    }
    if value >= 0.0 {
        Ok(value)
    } else if value >= -clip {
        Ok(0.0)
    } else {
        Err(Error::NumericalFailure(format!(
            "{what}: eigenvalue {value:e} below -{clip:e}"
        )))
    }
}

/// Principal square root of a Hermitian positive-semidefinite matrix.
/// Square root of a PSD matrix; eigenvalues in `[-clip, floor]` are treated as zero.
pub(crate) fn psd_sqrt4(m: &Matrix4c, clip: f64, floor: f64, what: &str) -> Result<Matrix4c> {
    let (values, vectors) = hermitian_eigen4(m);
    let mut diag = Matrix4c::zeros();
    for (i, &v) in values.iter().enumerate() {
        let v = clip_nonnegative(v, clip, what)?;
        if v > floor {
            diag[(i, i)] = Complex64::new(v.sqrt(), 0.0);
        }
    }
    Ok(vectors * diag * vectors.adjoint())
}

pub(crate) fn hermiticity_residual4(m: &Matrix4c) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Spectral factorisation `H = V diag(E) V^dagger` of a dense Hermitian block, kept around
/// so that `exp(-i H dt)` can be applied for arbitrary `dt`.
#[derive(Clone, Debug)]
pub struct HermitianPropagator {
    energies: DVector<f64>,
    vectors: DMatrix<Complex64>,
}

impl HermitianPropagator {
    pub fn new(h: DMatrix<Complex64>) -> Self {
        let eig = SymmetricEigen::new(h);
        Self {
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    /// `psi <- exp(-i H dt) psi`
    pub fn apply(&self, psi: &mut DVector<Complex64>, dt: f64) {
        let mut coeffs = self.vectors.ad_mul(psi);
        for (c, &e) in coeffs.iter_mut().zip(self.energies.iter()) {
            *c *= Complex64::from_polar(1.0, -e * dt);
        }
        self.vectors.mul_to(&coeffs, psi);
    }
}
