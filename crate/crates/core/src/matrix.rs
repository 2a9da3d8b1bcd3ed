//! Dense complex matrices with the Hermitian/PSD predicates and
//! factorizations the bound evaluations rely on.
//!
//! This is a thin domain layer over `nalgebra`: channels, covariances, and
//! signal blocks are all [`ComplexMatrix`] values, and the numerically
//! sensitive operations (log-determinants, PSD projections) live here so
//! the jitter and tolerance policy is in one place.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Relative tolerance for the Hermitian predicate.
const HERMITIAN_RTOL: f64 = 1e-10;
/// Relative tolerance for the PSD predicate (on eigenvalues).
const PSD_RTOL: f64 = 1e-10;

/// Dense complex-valued matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    m: DMatrix<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            m: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(rows: usize, cols: usize, f: F) -> Self {
        Self {
            m: DMatrix::from_fn(rows, cols, f),
        }
    }

    /// Column vector from complex entries.
    pub fn column(entries: &[Complex64]) -> Self {
        Self {
            m: DMatrix::from_column_slice(entries.len(), 1, entries),
        }
    }

    /// Diagonal matrix from real entries.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(diag[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn from_inner(m: DMatrix<Complex64>) -> Self {
        Self { m }
    }

    pub fn rows(&self) -> usize {
        self.m.nrows()
    }

    pub fn cols(&self) -> usize {
        self.m.ncols()
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.m[(i, j)] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            m: self.m.adjoint(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            m: self.m.transpose(),
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            m: &self.m * &rhs.m,
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self {
            m: &self.m + &rhs.m,
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self {
            m: &self.m - &rhs.m,
        }
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            m: &self.m * Complex64::new(a, 0.0),
        }
    }

    /// Gram matrix X X† (rows × rows).
    pub fn gram(&self) -> Self {
        Self {
            m: &self.m * self.m.adjoint(),
        }
    }

    /// A + a·I.
    pub fn add_scaled_identity(&self, a: f64) -> Self {
        let mut m = self.m.clone();
        for i in 0..m.nrows().min(m.ncols()) {
            m[(i, i)] += Complex64::new(a, 0.0);
        }
        Self { m }
    }

    pub fn trace_real(&self) -> f64 {
        self.m.trace().re
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.m.norm()
    }

    /// Symmetrized part (A + A†)/2; exact for inputs meant to be Hermitian.
    pub fn hermitian_part(&self) -> Self {
        Self {
            m: (&self.m + self.m.adjoint()) * Complex64::new(0.5, 0.0),
        }
    }

    /// ‖A − A†‖_F ≤ 1e-10 ‖A‖_F (zero matrices count as Hermitian).
    pub fn is_hermitian(&self) -> bool {
        if self.m.nrows() != self.m.ncols() {
            return false;
        }
        let scale = self.frobenius_norm();
        let dev = (&self.m - self.m.adjoint()).norm();
        dev <= HERMITIAN_RTOL * scale.max(f64::MIN_POSITIVE)
    }

    /// Hermitian with min eigenvalue ≥ −1e-10 · max eigenvalue.
    pub fn is_psd(&self) -> bool {
        if !self.is_hermitian() {
            return false;
        }
        let eig = self.hermitian_part().m.symmetric_eigen();
        let max = eig.eigenvalues.iter().cloned().fold(0.0f64, f64::max);
        let min = eig
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        min >= -PSD_RTOL * max.max(f64::MIN_POSITIVE)
    }

    /// v† A v for a column vector v, returning the real part.
    pub fn quad_form(&self, v: &ComplexMatrix) -> f64 {
        (v.m.adjoint() * &self.m * &v.m)[(0, 0)].re
    }

    /// Eigendecomposition of a Hermitian matrix: (eigenvalues, eigenvectors).
    pub fn eigh(&self) -> (Vec<f64>, ComplexMatrix) {
        let eig = self.hermitian_part().m.symmetric_eigen();
        (
            eig.eigenvalues.iter().cloned().collect(),
            Self {
                m: eig.eigenvectors,
            },
        )
    }

    /// Reassemble V diag(vals) V† from an eigenbasis.
    pub fn from_eigh(vals: &[f64], basis: &ComplexMatrix) -> Self {
        let d = DMatrix::from_fn(vals.len(), vals.len(), |i, j| {
            if i == j {
                Complex64::new(vals[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self {
            m: &basis.m * d * basis.m.adjoint(),
        }
    }

    fn cholesky_with_jitter(&self) -> Result<nalgebra::Cholesky<Complex64, nalgebra::Dyn>> {
        // the factorization may silently produce a complex diagonal on an
        // indefinite input; a valid factor has a real positive diagonal
        fn valid(c: &nalgebra::Cholesky<Complex64, nalgebra::Dyn>, n: usize) -> bool {
            (0..n).all(|i| {
                let d = c.l_dirty()[(i, i)];
                d.re.is_finite() && d.re > 0.0 && d.im.abs() <= 1e-12 * d.re.max(1.0)
            })
        }
        let n = self.rows();
        let h = self.hermitian_part();
        if let Some(c) = h.m.clone().cholesky() {
            if valid(&c, n) {
                return Ok(c);
            }
        }
        // Monte Carlo draws occasionally produce a numerically semidefinite
        // Gram matrix; one jitter of 1e-12·(trace/n) is allowed before
        // declaring the matrix singular.
        let jitter = 1e-12 * h.trace_real().abs().max(f64::MIN_POSITIVE) / n as f64;
        let fail = || Error::Singular(format!("{}x{} Cholesky failed", self.rows(), self.cols()));
        let c = h
            .add_scaled_identity(jitter)
            .m
            .cholesky()
            .ok_or_else(fail)?;
        if valid(&c, n) {
            Ok(c)
        } else {
            Err(fail())
        }
    }

    /// ln det(A) for Hermitian positive definite A, via Cholesky.
    pub fn ln_det_psd(&self) -> Result<f64> {
        let chol = self.cholesky_with_jitter()?;
        let mut ld = 0.0;
        for i in 0..self.rows() {
            ld += chol.l_dirty()[(i, i)].re.ln();
        }
        Ok(2.0 * ld)
    }

    /// Inverse of a Hermitian positive definite matrix.
    pub fn inv_psd(&self) -> Result<Self> {
        Ok(Self {
            m: self.cholesky_with_jitter()?.inverse(),
        })
    }

    /// Lower Cholesky factor L with L L† = A, for Hermitian positive
    /// definite A.
    pub fn cholesky_factor(&self) -> Result<Self> {
        Ok(Self {
            m: self.cholesky_with_jitter()?.unpack(),
        })
    }

    /// Solve A X = B for Hermitian positive definite A.
    pub fn solve_psd(&self, rhs: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            m: self.cholesky_with_jitter()?.solve(&rhs.m),
        })
    }

    /// Kronecker product A ⊗ B.
    pub fn kron(&self, rhs: &Self) -> Self {
        Self {
            m: self.m.kronecker(&rhs.m),
        }
    }

    /// Column-stacking vectorization, an (rows·cols) × 1 column.
    pub fn vectorize(&self) -> Self {
        let (r, c) = (self.rows(), self.cols());
        let mut v = DVector::zeros(r * c);
        for j in 0..c {
            for i in 0..r {
                v[j * r + i] = self.m[(i, j)];
            }
        }
        Self {
            m: DMatrix::from_column_slice(r * c, 1, v.as_slice()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hermitian_and_psd_predicates() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c(2.0, 0.0),
            (1, 1) => c(3.0, 0.0),
            (0, 1) => c(0.5, 1.0),
            _ => c(0.5, -1.0),
        });
        assert!(a.is_hermitian());
        assert!(a.is_psd());

        let mut b = a.clone();
        b.set(0, 1, c(0.5, 0.9));
        assert!(!b.is_hermitian());

        // eigenvalues 3 and −1
        let neg = ComplexMatrix::from_real_diagonal(&[3.0, -1.0]);
        assert!(neg.is_hermitian());
        assert!(!neg.is_psd());

        assert!(ComplexMatrix::zeros(3, 3).is_psd());
    }

    #[test]
    fn ln_det_matches_eigenvalues() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c(2.0 + i as f64, 0.0)
            } else {
                c(0.3, if i < j { 0.2 } else { -0.2 })
            }
        });
        let (vals, _) = a.eigh();
        let by_eig: f64 = vals.iter().map(|v| v.ln()).sum();
        assert_relative_eq!(a.ln_det_psd().unwrap(), by_eig, epsilon = 1e-10);
    }

    #[test]
    fn singular_matrix_reports_error() {
        let a = ComplexMatrix::from_real_diagonal(&[1.0, -1.0]);
        assert!(matches!(a.ln_det_psd(), Err(Error::Singular(_))));
    }

    #[test]
    fn inverse_and_solve_agree() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                c(4.0, 0.0)
            } else {
                c(0.5, 0.1 * (j as f64 - i as f64))
            }
        })
        .hermitian_part();
        let inv = a.inv_psd().unwrap();
        let should_be_id = a.mul(&inv);
        assert!(
            should_be_id
                .sub(&ComplexMatrix::identity(3))
                .frobenius_norm()
                < 1e-12
        );
        let rhs = ComplexMatrix::from_fn(3, 1, |i, _| c(i as f64 + 1.0, -0.5));
        let x = a.solve_psd(&rhs).unwrap();
        assert!(a.mul(&x).sub(&rhs).frobenius_norm() < 1e-12);
    }

    #[test]
    fn eigh_reconstructs() {
        let a = ComplexMatrix::from_fn(4, 4, |i, j| {
            c(((i * j) as f64).cos(), (i as f64 - j as f64) * 0.1)
        })
        .hermitian_part()
        .add_scaled_identity(5.0);
        let (vals, basis) = a.eigh();
        let back = ComplexMatrix::from_eigh(&vals, &basis);
        assert!(a.sub(&back).frobenius_norm() < 1e-10 * a.frobenius_norm());
    }

    #[test]
    fn vectorize_is_column_stacking() {
        let x = ComplexMatrix::from_fn(2, 2, |i, j| c((i + 10 * j) as f64, 0.0));
        let v = x.vectorize();
        assert_eq!(v.rows(), 4);
        assert_eq!(v.at(1, 0), c(1.0, 0.0));
        assert_eq!(v.at(2, 0), c(10.0, 0.0));
    }

    #[test]
    fn jitter_handles_semidefinite_gram() {
        // rank-one Gram matrix: positive semidefinite, singular
        let x = ComplexMatrix::from_fn(3, 1, |i, _| c(1.0 + i as f64, -0.5));
        let g = x.gram();
        let ld = g.add_scaled_identity(1.0).ln_det_psd().unwrap();
        // det(I + xx†) = 1 + ‖x‖²
        let n2: f64 = (0..3).map(|i| g.at(i, i).re).sum();
        assert_relative_eq!(ld, (1.0 + n2).ln(), epsilon = 1e-12);
    }
}
