//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Result, VibError};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest elementwise deviation of `m` from its conjugate transpose.
pub fn hermitian_residue(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..m.nrows() {
        for c in r..m.ncols() {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues ascending and
/// eigenvectors in the matching columns.
pub fn hermitian_eigen(m: &CMatrix, tol: f64) -> Result<(Vec<f64>, CMatrix)> {
    let residue = hermitian_residue(m);
    if residue > tol {
        return Err(VibError::NotHermitian(residue));
    }
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMatrix::zeros(m.nrows(), m.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

pub fn hermitian_eigenvalues(m: &CMatrix, tol: f64) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(m, tol)?.0)
}

pub fn expm(m: &CMatrix) -> CMatrix {
    m.exp()
}

/// Real logarithm of a proper orthogonal matrix via its complex Schur form.
///
/// Orthogonal matrices are normal, so the Schur factor is diagonal up to
/// rounding and `log U = Q diag(ln lambda) Q^dagger`.
pub fn orthogonal_log(u: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_orthogonal(u, 1e-10)?;
    let n = u.nrows();
    let uc = u.map(|v| Complex64::new(v, 0.0));
    let (q, t) = uc.schur().unpack();
    let mut log_diag = CMatrix::zeros(n, n);
    for k in 0..n {
        let lambda = t[(k, k)];
        if (lambda + 1.0).norm() < 1e-12 {
            return Err(VibError::Numerical("rotation has eigenvalue -1; logarithm is not unique".into()));
        }
        log_diag[(k, k)] = lambda.ln();
    }
    let log = &q * log_diag * q.adjoint();
    Ok(log.map(|v| v.re))
}

pub fn check_orthogonal(u: &DMatrix<f64>, tol: f64) -> Result<()> {
    if u.nrows() != u.ncols() {
        return Err(VibError::DimensionMismatch { expected: u.nrows(), got: u.ncols() });
    }
    let dev = (u.transpose() * u - DMatrix::<f64>::identity(u.nrows(), u.ncols())).amax();
    if dev > tol || !dev.is_finite() {
        return Err(VibError::NotOrthogonal(dev));
    }
    Ok(())
}

/// Kronecker product `a (x) b`; `b` is the fast index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|v| Complex64::new(v, 0.0))
}

/// Largest elementwise deviation of `u^dagger u` from the identity.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    (u.adjoint() * u - CMatrix::identity(u.ncols(), u.ncols())).iter().fold(0.0, |w, v| w.max(v.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eigen_sorted() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ]));
        let (vals, vecs) = hermitian_eigen(&m, 1e-12).unwrap();
        assert_eq!(vals, vec![-1.0, 2.0, 3.0]);
        assert_abs_diff_eq!(vecs[(1, 0)].norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(hermitian_eigen(&m, 1e-12), Err(VibError::NotHermitian(_))));
    }

    #[test]
    fn rotation_log() {
        let th = 0.7f64;
        let u = DMatrix::from_row_slice(2, 2, &[th.cos(), -th.sin(), th.sin(), th.cos()]);
        let l = orthogonal_log(&u).unwrap();
        assert_abs_diff_eq!(l[(0, 1)], -th, epsilon = 1e-12);
        assert_abs_diff_eq!(l[(1, 0)], th, epsilon = 1e-12);
        assert_abs_diff_eq!(l[(0, 0)], 0.0, epsilon = 1e-12);
        let back = expm(&to_complex(&l));
        for r in 0..2 {
            for c in 0..2 {
                assert_abs_diff_eq!(back[(r, c)].re, u[(r, c)], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn non_orthogonal_rejected() {
        let u = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(orthogonal_log(&u), Err(VibError::NotOrthogonal(_))));
    }
}
