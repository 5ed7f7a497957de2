//! Dense symmetric and Hermitian eigensolvers backed by `faer`.

use faer::complex_native::c64;
use faer::{Mat, Side};
use nalgebra::DMatrix;

use crate::{Error, Result, C64};

fn ascending(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    order
}

fn check_square<T>(a: &DMatrix<T>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::arg("eigensolver needs a square matrix"));
    }
    Ok(())
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("eigensolver produced non-finite eigenvalues".into()));
    }
    Ok(())
}

/// Eigenvalues (ascending) and, if requested, eigenvectors of a real
/// symmetric matrix. Only the lower triangle is read. Without vectors the
/// returned matrix is empty.
pub(crate) fn symmetric_eigen(a: DMatrix<f64>, vectors: bool) -> Result<(Vec<f64>, DMatrix<f64>)> {
    check_square(&a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), a));
    }
    let m = Mat::<f64>::from_fn(n, n, |i, j| a[(i, j)]);
    if !vectors {
        let mut w = m.selfadjoint_eigenvalues(Side::Lower);
        check_finite(&w)?;
        w.sort_by(f64::total_cmp);
        return Ok((w, DMatrix::zeros(0, 0)));
    }
    let evd = m.selfadjoint_eigendecomposition(Side::Lower);
    let s = evd.s().column_vector();
    let raw: Vec<f64> = (0..n).map(|i| s.read(i)).collect();
    check_finite(&raw)?;
    let order = ascending(&raw);
    let u = evd.u();
    let v = DMatrix::from_fn(n, n, |r, c| u.read(r, order[c]));
    Ok((order.iter().map(|&i| raw[i]).collect(), v))
}

/// Complex Hermitian counterpart of [`symmetric_eigen`].
pub(crate) fn hermitian_eigen_dense(a: DMatrix<C64>, vectors: bool) -> Result<(Vec<f64>, DMatrix<C64>)> {
    check_square(&a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok((Vec::new(), a));
    }
    let m = Mat::<c64>::from_fn(n, n, |i, j| a[(i, j)].into());
    if !vectors {
        let mut w = m.selfadjoint_eigenvalues(Side::Lower);
        check_finite(&w)?;
        w.sort_by(f64::total_cmp);
        return Ok((w, DMatrix::zeros(0, 0)));
    }
    let evd = m.selfadjoint_eigendecomposition(Side::Lower);
    let s = evd.s().column_vector();
    let raw: Vec<f64> = (0..n).map(|i| s.read(i).re).collect();
    check_finite(&raw)?;
    let order = ascending(&raw);
    let u = evd.u();
    let v = DMatrix::from_fn(n, n, |r, c| {
        let z = u.read(r, order[c]);
        C64::new(z.re, z.im)
    });
    Ok((order.iter().map(|&i| raw[i]).collect(), v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_two_by_two() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (w, v) = symmetric_eigen(a.clone(), true).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] - 3.0).abs() < 1e-15);
        for i in 0..2 {
            assert!((&a * v.column(i) - v.column(i) * w[i]).norm() < 1e-14);
        }
    }

    #[test]
    fn complex_pauli_y() {
        let i = C64::new(0.0, 1.0);
        let y = DMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)]);
        let (w, v) = hermitian_eigen_dense(y.clone(), true).unwrap();
        assert!((w[0] + 1.0).abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15);
        for k in 0..2 {
            assert!((&y * v.column(k) - v.column(k) * C64::new(w[k], 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn values_only_and_empty() {
        let a = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -1.0, 2.0]));
        assert_eq!(symmetric_eigen(a, false).unwrap().0, vec![-1.0, 2.0, 3.0]);
        assert!(symmetric_eigen(DMatrix::zeros(0, 0), true).unwrap().0.is_empty());
    }
}
