//! Small dense complex linear algebra used throughout the crate.

use nalgebra::{DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::error::SpectralError;

pub type CMatrix = DMatrix<Complex64>;

/// Largest absolute entry.
pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `max |(U U*)_{ij} - δ_{ij}|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let prod = u * u.adjoint();
    max_norm(&(prod - CMatrix::identity(n, n)))
}

/// Reduces an angle to `[0, 2π)`.
pub fn wrap_phase(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Reduces an angle to `(-π, π]`.
pub fn recenter(theta: f64) -> f64 {
    let r = wrap_phase(theta);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Signed shortest rotation taking `from` to `to`.
pub fn circular_diff(to: f64, from: f64) -> f64 {
    recenter(to - from)
}

pub fn circular_dist(a: f64, b: f64) -> f64 {
    circular_diff(a, b).abs()
}

/// Diagonal matrix `diag(e^{iθ_j})`.
pub fn phase_diagonal(phases: impl IntoIterator<Item = f64>) -> CMatrix {
    let d: Vec<Complex64> = phases.into_iter().map(|t| Complex64::cis(t)).collect();
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(d))
}

/// Eigen-decomposition of a unitary matrix in phase form.
#[derive(Debug, Clone)]
pub struct Eigenphases {
    /// Ascending, in `[0, 2π)`, repeated according to multiplicity.
    pub phases: Vec<f64>,
    /// Orthonormal eigenvectors; column `j` belongs to `phases[j]`.
    pub vectors: CMatrix,
}

const UNITARY_INPUT_TOL: f64 = 1e-8;
const EIGEN_RESIDUAL_TOL: f64 = 1e-9;

/// Eigenphases and an orthonormal eigenbasis of a unitary matrix.
///
/// A unitary matrix is normal, so its complex Schur form is diagonal and the
/// Schur vectors are eigenvectors. When the Schur iteration stalls on a tight
/// cluster, the eigenbasis is taken from the Hermitian Cayley transform
/// instead. The residual `‖U v - e^{iθ} v‖` is checked for every returned pair.
pub fn unitary_eigenphases(u: &CMatrix) -> Result<Eigenphases, SpectralError> {
    let n = u.nrows();
    if n == 0 {
        return Ok(Eigenphases {
            phases: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let defect = unitarity_defect(u);
    if !(defect <= UNITARY_INPUT_TOL) {
        return Err(SpectralError::NotUnitary(defect));
    }
    schur_basis(u)
        .and_then(|q| checked(u, q))
        .or_else(|| cayley_basis(u).and_then(|q| checked(u, q)))
        .ok_or(SpectralError::EigensolverFailure)
}

fn schur_basis(u: &CMatrix) -> Option<CMatrix> {
    Schur::try_new(u.clone(), f64::EPSILON, 10_000).map(|s| s.unpack().0)
}

/// Eigenvectors of `H = i(I - M)(I + M)⁻¹` with `M = e^{iφ}U`, for a rotation
/// `φ` that keeps `-1` out of the spectrum of `M`. `θ ↦ tan((θ + φ)/2)` is
/// injective, so eigenspaces of `H` and `U` coincide.
fn cayley_basis(u: &CMatrix) -> Option<CMatrix> {
    let n = u.nrows();
    let id = CMatrix::identity(n, n);
    for phi in [0.0, 1.9, 3.7, 0.8, 5.1, 2.6, 4.4, 1.3] {
        let m = u * Complex64::cis(phi);
        let Some(inv) = (&id + &m).try_inverse() else {
            continue;
        };
        if inv.norm() > 1e3 {
            continue;
        }
        let h = (&id - &m) * inv * Complex64::i();
        let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
        if let Some(e) = SymmetricEigen::try_new(h, f64::EPSILON, 10_000) {
            return Some(e.eigenvectors);
        }
    }
    None
}

/// Orders the basis by Rayleigh-quotient phase and enforces the residual bound.
fn checked(u: &CMatrix, q: CMatrix) -> Option<Eigenphases> {
    let n = u.nrows();
    let uq = u * &q;
    let mut order: Vec<(f64, usize)> = (0..n)
        .map(|j| (wrap_phase(q.column(j).dotc(&uq.column(j)).arg()), j))
        .collect();
    order.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut vectors = CMatrix::zeros(n, n);
    let mut phases = Vec::with_capacity(n);
    for (dst, &(theta, src)) in order.iter().enumerate() {
        let res = (uq.column(src) - q.column(src) * Complex64::cis(theta)).norm();
        if !(res <= EIGEN_RESIDUAL_TOL) {
            return None;
        }
        vectors.set_column(dst, &q.column(src));
        phases.push(theta);
    }
    Some(Eigenphases { phases, vectors })
}

/// Eigenphases only (ascending, in `[0, 2π)`).
pub fn eigenphases(u: &CMatrix) -> Result<Vec<f64>, SpectralError> {
    unitary_eigenphases(u).map(|e| e.phases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_has_zero_phases() {
        let e = unitary_eigenphases(&CMatrix::identity(2, 2)).unwrap();
        assert_eq!(e.phases, vec![0.0, 0.0]);
    }

    #[test]
    fn diagonal_phases_sorted() {
        let u = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(-1.0, 0.0), c(0.0, 1.0)]));
        let p = eigenphases(&u).unwrap();
        assert_abs_diff_eq!(p[0], PI / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p[1], PI, epsilon = 1e-14);
    }

    #[test]
    fn swap_matrix_has_phases_zero_and_pi() {
        let u = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let e = unitary_eigenphases(&u).unwrap();
        assert!(e.phases[0].abs() < 1e-12 || (TAU - e.phases[0]) < 1e-12);
        assert_abs_diff_eq!(e.phases[1], PI, epsilon = 1e-12);
    }

    #[test]
    fn rejects_non_unitary() {
        let u = CMatrix::identity(2, 2) * c(2.0, 0.0);
        assert!(matches!(unitary_eigenphases(&u), Err(SpectralError::NotUnitary(_))));
    }

    #[test]
    fn circular_helpers() {
        assert_abs_diff_eq!(recenter(3.0 * PI / 2.0), -PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(recenter(PI), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(circular_diff(0.1, TAU - 0.1), 0.2, epsilon = 1e-12);
        assert_eq!(wrap_phase(-1e-300), 0.0);
    }
}
