//! Entanglement measures for two-qubit density matrices.
//!
//! Basis order is fixed as `|11>, |10>, |01>, |00>` (indices 0..3), so a dephased Bell
//! pair `(|11> + |00>)/sqrt(2)` lives on the four corners `(0,0), (0,3), (3,0), (3,3)`.
//!
//! Concurrence is available by two independent routes:
//!
//! * [`concurrence_via_r`] builds `R = sqrt(sqrt(rho) rho~ sqrt(rho))` from Hermitian
//!   square roots and returns `max(0, 2 lambda_max(R) - Tr R)`;
//! * [`concurrence`] takes `mu_i`, the square roots of the eigenvalues of `rho rho~`
//!   (obtained as singular values, see its docs), and returns
//!   `max(0, mu1 - mu2 - mu3 - mu4)`.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2};
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    clip_nonnegative, hermitian_eigen4, hermiticity_residual4, psd_sqrt4, Matrix4c, Vector4c,
};

/// Index of `|11>`.
pub const IDX_11: usize = 0;
/// Index of `|10>`.
pub const IDX_10: usize = 1;
/// Index of `|01>`.
pub const IDX_01: usize = 2;
/// Index of `|00>`.
pub const IDX_00: usize = 3;

const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const INTERMEDIATE_PSD_TOL: f64 = 1e-8;
/// Eigenvalues of `rho` below this are rounding noise.
const RANK_FLOOR: f64 = 1e-14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A validated 4x4 two-qubit density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(Matrix4c);

impl DensityMatrix {
    /// Validates Hermiticity (1e-12), unit trace (1e-12) and positivity (min eigenvalue
    /// at least -1e-10).
    pub fn new(elements: Matrix4c) -> Result<Self> {
        if elements.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite element".into()));
        }
        let herm = hermiticity_residual4(&elements);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (residual {herm:e})"
            )));
        }
        let trace = elements.trace();
        if (trace - ONE).norm() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {trace}, expected 1")));
        }
        let (values, _) = hermitian_eigen4(&elements);
        if values[3] < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {:e}",
                values[3]
            )));
        }
        Ok(Self(elements))
    }

    /// Projector onto a normalised pure state.
    pub fn from_pure(psi: &Vector4c) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("state norm is {norm}")));
        }
        Self::new(psi * psi.adjoint())
    }

    /// `|Phi+><Phi+|` with `Phi+ = (|11> + |00>)/sqrt(2)`.
    pub fn phi_plus() -> Self {
        Self::dephased_bell(0.5).expect("coherence 1/2 is valid")
    }

    /// `I/4`.
    pub fn maximally_mixed() -> Self {
        Self(Matrix4c::identity() * Complex64::new(0.25, 0.0))
    }

    /// `|i><i|` for basis index `i` (see the `IDX_*` constants).
    pub fn basis_projector(index: usize) -> Result<Self> {
        if index > 3 {
            return Err(Error::DomainError(format!("basis index {index} > 3")));
        }
        let mut m = Matrix4c::zeros();
        m[(index, index)] = ONE;
        Ok(Self(m))
    }

    /// `p |Phi+><Phi+| + (1 - p) I/4`.
    pub fn werner(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::DomainError(format!("Werner weight {p} outside [0, 1]")));
        }
        let m = Self::phi_plus().0 * Complex64::new(p, 0.0)
            + Self::maximally_mixed().0 * Complex64::new(1.0 - p, 0.0);
        Self::new(m)
    }

    /// `diag(1/2, 0, 0, 1/2)` with real corner coherences `rho_03 = rho_30 = x`.
    pub fn dephased_bell(x: f64) -> Result<Self> {
        Self::x_state(Complex64::new(x, 0.0))
    }

    /// Dephased Bell pair with an arbitrary complex corner coherence `rho_03 = z`.
    pub fn x_state(z: Complex64) -> Result<Self> {
        if z.norm() > 0.5 + 1e-12 {
            return Err(Error::DomainError(format!("|coherence| {} > 1/2", z.norm())));
        }
        let mut m = Matrix4c::zeros();
        m[(IDX_11, IDX_11)] = Complex64::new(0.5, 0.0);
        m[(IDX_00, IDX_00)] = Complex64::new(0.5, 0.0);
        m[(IDX_11, IDX_00)] = z;
        m[(IDX_00, IDX_11)] = z.conj();
        Self::new(m)
    }

    pub fn matrix(&self) -> &Matrix4c {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix4c {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigen4(&self.0).0
    }

    /// `(U1 (x) U2) rho (U1 (x) U2)^dagger` for single-qubit unitaries given in the
    /// `|1>, |0>` ordering.
    pub fn local_unitary(
        &self,
        u1: &nalgebra::Matrix2<Complex64>,
        u2: &nalgebra::Matrix2<Complex64>,
    ) -> Result<Self> {
        let u = u1.kronecker(u2);
        let mut m = u * self.0 * u.adjoint();
        // Restore exact Hermiticity lost to rounding.
        m = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Self::new(m)
    }

    /// Parse 16 complex entries (row-major) written as 32 real numbers, real part then
    /// imaginary part. Numbers may be separated by whitespace or commas; `#` starts a
    /// comment that runs to the end of the line.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut numbers = Vec::with_capacity(32);
        for (lineno, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("");
            for token in content
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
            {
                let value: f64 = token.parse().map_err(|_| {
                    Error::Parse(format!("line {}: bad number {token:?}", lineno + 1))
                })?;
                numbers.push(value);
            }
        }
        if numbers.len() != 32 {
            return Err(Error::Parse(format!(
                "expected 32 numbers (16 re/im pairs), found {}",
                numbers.len()
            )));
        }
        let m = Matrix4c::from_fn(|r, c| {
            let k = 2 * (4 * r + c);
            Complex64::new(numbers[k], numbers[k + 1])
        });
        Self::new(m)
    }

    /// Inverse of [`DensityMatrix::parse_text`]: one row per line, `re im` pairs.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# two-qubit density matrix, basis |11>,|10>,|01>,|00>\n");
        for r in 0..4 {
            let row: Vec<String> = (0..4)
                .map(|c| {
                    let z = self.0[(r, c)];
                    format!("{:e} {:e}", z.re, z.im)
                })
                .collect();
            let _ = writeln!(out, "{}", row.join("  "));
        }
        out
    }
}

fn sigma_y_sigma_y() -> Matrix4c {
    // sigma_y (x) sigma_y in the |1>,|0> ordering is the real anti-diagonal (-1, 1, 1, -1).
    let mut m = Matrix4c::zeros();
    m[(0, 3)] = -ONE;
    m[(1, 2)] = ONE;
    m[(2, 1)] = ONE;
    m[(3, 0)] = -ONE;
    m
}

/// `(sigma_y (x) sigma_y) rho* (sigma_y (x) sigma_y)`.
pub fn spin_flip(rho: &DensityMatrix) -> DensityMatrix {
    let yy = sigma_y_sigma_y();
    DensityMatrix(yy * rho.0.conjugate() * yy)
}

/// Concurrence from `R = sqrt(sqrt(rho) rho~ sqrt(rho))`.
pub fn concurrence_via_r(rho: &DensityMatrix) -> Result<f64> {
    let sqrt_rho = psd_sqrt4(&rho.0, PSD_TOL, RANK_FLOOR, "sqrt(rho)")?;
    let flipped = spin_flip(rho);
    let inner = sqrt_rho * flipped.0 * sqrt_rho;
    let inner = (inner + inner.adjoint()) * Complex64::new(0.5, 0.0);
    let r = psd_sqrt4(&inner, INTERMEDIATE_PSD_TOL, RANK_FLOOR, "sqrt(rho) rho~ sqrt(rho)")?;
    let (values, _) = hermitian_eigen4(&r);
    let trace: f64 = values.iter().sum();
    Ok((2.0 * values[0] - trace).clamp(0.0, 1.0))
}

/// Concurrence from `mu_i`, the square roots of the eigenvalues of `rho rho~`.
///
/// With `rho = W W^dagger` (`W` holding the eigenvectors scaled by `sqrt(lambda_i)`), the
/// nonzero eigenvalues of `rho rho~` are those of `tau^dagger tau` for the symmetric
/// `tau = W^T (sigma_y (x) sigma_y) W`, so the `mu_i` are the singular values of `tau`.
/// Eigenvalues of `rho` at rounding level are dropped, which keeps near-pure states from
/// picking up `sqrt(eps)` noise.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let (values, vectors) = hermitian_eigen4(&rho.0);
    let mut w = Matrix4c::zeros();
    for (i, &lambda) in values.iter().enumerate() {
        let lambda = clip_nonnegative(lambda, PSD_TOL, "rho")?;
        if lambda > RANK_FLOOR {
            w.set_column(i, &(vectors.column(i) * Complex64::new(lambda.sqrt(), 0.0)));
        }
    }
    let tau = w.transpose() * sigma_y_sigma_y() * w;
    let svd = tau.svd(false, false);
    let mut mu: Vec<f64> = svd.singular_values.iter().copied().collect();
    if mu.iter().any(|m| !m.is_finite()) {
        return Err(Error::NumericalFailure("non-finite singular value".into()));
    }
    mu.sort_by(|a, b| b.total_cmp(a));
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).clamp(0.0, 1.0))
}

fn entropy_of(eigenvalues: &[f64]) -> f64 {
    let ln4 = 2.0 * LN_2;
    let s: f64 = eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln() / ln4)
        .sum();
    // An empty sum is -0.0.
    if s > 0.0 {
        s.min(1.0)
    } else {
        0.0
    }
}

/// Von Neumann entropy in base 4, so that `I/4` has entropy 1.
pub fn entropy_log4(rho: &DensityMatrix) -> f64 {
    entropy_of(&rho.eigenvalues())
}

/// Entropy of a dephased Bell pair with concurrence `C`, whose only nonzero eigenvalues
/// are `(1 +- C)/2`.
pub fn entropy_from_concurrence(c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::DomainError(format!("concurrence {c} outside [0, 1]")));
    }
    Ok(entropy_of(&[0.5 * (1.0 + c), 0.5 * (1.0 - c)]))
}

/// `Tr(rho^2)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.0.iter().map(|z| z.norm_sqr()).sum::<f64>().clamp(0.25, 1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureReport {
    pub concurrence: f64,
    pub entropy_log4: f64,
    pub purity: f64,
    /// Descending.
    pub eigenvalues: [f64; 4],
}

pub fn measure(rho: &DensityMatrix) -> Result<MeasureReport> {
    Ok(MeasureReport {
        concurrence: concurrence(rho)?,
        entropy_log4: entropy_log4(rho),
        purity: purity(rho),
        eigenvalues: rho.eigenvalues(),
    })
}

/// `(|11> + |00>)/sqrt(2)`.
pub fn phi_plus_vector() -> Vector4c {
    let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
    Vector4c::new(a, ZERO, ZERO, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    macro_rules! assert_close {
        ($a:expr, $b:expr, $tol:expr) => {{
            let (a, b): (f64, f64) = ($a, $b);
            assert!((a - b).abs() <= $tol, "{a} vs {b} (tol {})", $tol);
        }};
    }

    fn max_elem_diff(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
        (a.matrix() - b.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn spin_flip_fixed_points_and_bit_flip() {
        let phi = DensityMatrix::phi_plus();
        assert!(max_elem_diff(&spin_flip(&phi), &phi) < 1e-15);

        let mixed = DensityMatrix::maximally_mixed();
        assert!(max_elem_diff(&spin_flip(&mixed), &mixed) < 1e-15);

        let p00 = DensityMatrix::basis_projector(IDX_00).unwrap();
        let p11 = DensityMatrix::basis_projector(IDX_11).unwrap();
        assert!(max_elem_diff(&spin_flip(&p00), &p11) < 1e-15);
    }

    #[test]
    fn both_routes_on_named_states() {
        for route in [concurrence, concurrence_via_r] {
            assert_close!(route(&DensityMatrix::phi_plus()).unwrap(), 1.0, 1e-10);
            assert_close!(
                route(&DensityMatrix::basis_projector(IDX_00).unwrap()).unwrap(),
                0.0,
                1e-10
            );
            assert_close!(route(&DensityMatrix::maximally_mixed()).unwrap(), 0.0, 1e-10);
            assert_close!(route(&DensityMatrix::werner(0.5).unwrap()).unwrap(), 0.25, 1e-10);
        }
    }

    #[test]
    fn dephased_bell_concurrence_is_twice_the_coherence() {
        for i in 0..=50 {
            let x = 0.01 * i as f64;
            let rho = DensityMatrix::dephased_bell(x).unwrap();
            assert_close!(concurrence(&rho).unwrap(), 2.0 * x, 1e-10);
        }
    }

    #[test]
    fn entropy_named_values() {
        assert_close!(entropy_log4(&DensityMatrix::phi_plus()), 0.0, 1e-12);
        assert_close!(entropy_log4(&DensityMatrix::dephased_bell(0.0).unwrap()), 0.5, 1e-12);
        assert_close!(entropy_log4(&DensityMatrix::maximally_mixed()), 1.0, 1e-12);

        assert_close!(entropy_from_concurrence(1.0).unwrap(), 0.0, 1e-15);
        assert_close!(entropy_from_concurrence(0.0).unwrap(), 0.5, 1e-15);
        let direct = entropy_log4(&DensityMatrix::dephased_bell(0.3).unwrap());
        assert_close!(entropy_from_concurrence(0.6).unwrap(), direct, 1e-12);
    }

    #[test]
    fn entropy_from_concurrence_rejects_out_of_range() {
        for c in [-1e-9, 1.0 + 1e-9, f64::NAN] {
            assert!(matches!(
                entropy_from_concurrence(c),
                Err(Error::DomainError(_))
            ));
        }
    }

    #[test]
    fn purity_named_values() {
        assert_close!(purity(&DensityMatrix::phi_plus()), 1.0, 1e-15);
        assert_close!(purity(&DensityMatrix::maximally_mixed()), 0.25, 1e-15);
        let rho = DensityMatrix::dephased_bell(0.2).unwrap();
        assert_close!(purity(&rho), (1.0 + 0.4 * 0.4) / 2.0, 1e-12);
    }

    #[test]
    fn constructor_rejects_invalid_matrices() {
        let mut m = *DensityMatrix::phi_plus().matrix();
        m[(0, 3)] += Complex64::new(0.0, 1e-6);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidState(_))));

        let m = Matrix4c::identity() * Complex64::new(0.3, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidState(_))));

        // Hermitian, unit trace, but with eigenvalues 1.5 and -0.5.
        let mut m = Matrix4c::zeros();
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        m[(3, 3)] = Complex64::new(0.5, 0.0);
        m[(0, 3)] = ONE;
        m[(3, 0)] = ONE;
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidState(_))));
    }

    #[test]
    fn text_round_trip() {
        let rho = DensityMatrix::werner(0.7).unwrap();
        let back = DensityMatrix::parse_text(&rho.to_text()).unwrap();
        assert!(max_elem_diff(&rho, &back) < 1e-15);
        assert!(matches!(
            DensityMatrix::parse_text("1 0 0"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            DensityMatrix::parse_text("abc"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn report_eigenvalues_sum_to_one() {
        let report = measure(&DensityMatrix::werner(0.3).unwrap()).unwrap();
        assert_close!(report.eigenvalues.iter().sum::<f64>(), 1.0, 1e-10);
        assert!(report.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        assert_close!(report.concurrence, 0.0, 1e-10);
    }
}
