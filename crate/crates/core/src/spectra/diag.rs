use nalgebra::DMatrix;

use super::lanczos::{lanczos_lowest, LanczosOptions};
use crate::qop::{hermitian_eigen, symmetric_eigen, LinearOperator, OperatorMatrix, StateVector};
use crate::{Error, Result, C64};

/// Largest eigenvector residual accepted for any reported pair.
pub(crate) const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum EigenMethod {
    /// Full dense solve; the default up to `2^12`.
    #[default]
    Dense,
    /// Lanczos with full reorthogonalization.
    Lanczos,
}

/// Lowest `n_eig` eigenpairs of the bath Hamiltonian.
#[derive(Clone, Debug)]
pub struct BathSpectrum {
    energies: Vec<f64>,
    /// Eigenvectors as columns, `2^N × n_eig`.
    vectors: DMatrix<C64>,
    residuals: Vec<f64>,
}

impl BathSpectrum {
    pub fn n_eig(&self) -> usize {
        self.energies.len()
    }

    pub fn dim(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    pub fn vectors(&self) -> &DMatrix<C64> {
        &self.vectors
    }

    pub fn state(&self, n: usize) -> StateVector {
        StateVector::new(self.vectors.column(n).into_owned()).expect("non-empty")
    }

    /// `max |V†V − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.vectors.adjoint() * &self.vectors;
        (g - DMatrix::identity(self.n_eig(), self.n_eig()))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Keeps the lowest `n` pairs.
    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.n_eig());
        Self {
            energies: self.energies[..n].to_vec(),
            vectors: self.vectors.columns(0, n).into_owned(),
            residuals: self.residuals[..n].to_vec(),
        }
    }

    /// Runs of consecutive levels closer than `tol`, as `(start, len)`.
    pub fn clusters(&self, tol: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.n_eig() {
            if i == self.n_eig() || self.energies[i] - self.energies[i - 1] >= tol {
                out.push((start, i - start));
                start = i;
            }
        }
        out
    }

    /// Rotates each degenerate cluster (levels within `tol`) so that `op`
    /// is diagonal inside it, with ascending diagonal values. Returns the
    /// rotated spectrum and the sizes of clusters larger than one.
    pub fn align_degenerate(&self, op: &dyn LinearOperator, tol: f64) -> Result<(Self, Vec<usize>)> {
        if op.dim() != self.dim() {
            return Err(Error::arg("operator does not act on the bath space"));
        }
        let mut vectors = self.vectors.clone();
        let mut sizes = Vec::new();
        for (start, len) in self.clusters(tol) {
            if len < 2 {
                continue;
            }
            sizes.push(len);
            let block = self.vectors.columns(start, len).into_owned();
            let applied = apply_columns(op, &block);
            let restricted = block.adjoint() * applied;
            let h = OperatorMatrix::new((&restricted + restricted.adjoint()) * C64::new(0.5, 0.0), true)?;
            let (_, rot) = hermitian_eigen(&h)?;
            vectors.columns_mut(start, len).copy_from(&(block * rot));
        }
        Ok((
            Self {
                energies: self.energies.clone(),
                vectors,
                residuals: self.residuals.clone(),
            },
            sizes,
        ))
    }
}

pub(crate) fn apply_columns(op: &dyn LinearOperator, block: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(block.nrows(), block.ncols());
    let mut buf = vec![C64::new(0.0, 0.0); block.nrows()];
    for c in 0..block.ncols() {
        op.apply_into(block.column(c).as_slice(), &mut buf);
        out.column_mut(c).copy_from_slice(&buf);
    }
    out
}

fn residuals_of(op: &dyn LinearOperator, energies: &[f64], vectors: &DMatrix<C64>) -> Vec<f64> {
    let hv = apply_columns(op, vectors);
    energies
        .iter()
        .enumerate()
        .map(|(n, &e)| (hv.column(n) - vectors.column(n) * C64::new(e, 0.0)).norm())
        .collect()
}

fn is_real(h: &OperatorMatrix) -> bool {
    h.matrix().iter().all(|z| z.im == 0.0)
}

/// All eigenvalues of a Hermitian matrix, ascending (dense solve).
pub fn full_spectrum(h: &OperatorMatrix) -> Result<Vec<f64>> {
    if !h.is_hermitian() && h.hermiticity_error() > 1e-12 {
        return Err(Error::arg("spectrum requires a Hermitian operator"));
    }
    if is_real(h) {
        Ok(symmetric_eigen(h.matrix().map(|z| z.re), false)?.0)
    } else {
        Ok(hermitian_eigen(h)?.0)
    }
}

/// Lowest `n_eig` eigenpairs by full dense diagonalization.
pub fn diagonalize_bath(h_b: &OperatorMatrix, n_eig: usize) -> Result<BathSpectrum> {
    diagonalize_bath_with(h_b, n_eig, EigenMethod::Dense)
}

pub fn diagonalize_bath_with(h_b: &OperatorMatrix, n_eig: usize, method: EigenMethod) -> Result<BathSpectrum> {
    if n_eig == 0 || n_eig > h_b.dim() {
        return Err(Error::arg(format!("n_eig = {n_eig} outside 1..={}", h_b.dim())));
    }
    if !h_b.is_finite() {
        return Err(Error::Numeric("bath Hamiltonian has non-finite entries".into()));
    }
    if !h_b.is_hermitian() && h_b.hermiticity_error() > 1e-12 {
        return Err(Error::arg("bath Hamiltonian must be Hermitian"));
    }
    let (energies, vectors) = match method {
        EigenMethod::Dense => dense_lowest(h_b, n_eig)?,
        EigenMethod::Lanczos => {
            let res = lanczos_lowest(h_b, n_eig, &LanczosOptions::default())?;
            (res.0, fix_signs(res.1))
        }
    };
    let residuals = residuals_of(h_b, &energies, &vectors);
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if worst > RESIDUAL_TOL {
        return Err(Error::Convergence {
            reason: format!("{method:?} eigenpairs exceed residual tolerance {RESIDUAL_TOL:e}"),
            max_residual: worst,
        });
    }
    Ok(BathSpectrum { energies, vectors, residuals })
}

fn dense_lowest(h: &OperatorMatrix, n_eig: usize) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let dim = h.dim();
    if is_real(h) {
        let (values, vecs) = symmetric_eigen(h.matrix().map(|z| z.re), true)?;
        let vectors = DMatrix::from_fn(dim, n_eig, |r, c| C64::new(vecs[(r, c)], 0.0));
        Ok((values[..n_eig].to_vec(), fix_signs(vectors)))
    } else {
        let (values, vecs) = hermitian_eigen(h)?;
        Ok((values[..n_eig].to_vec(), fix_signs(vecs.columns(0, n_eig).into_owned())))
    }
}

/// Fixes the arbitrary phase of each eigenvector: the entry of largest
/// modulus is made real and positive.
fn fix_signs(mut v: DMatrix<C64>) -> DMatrix<C64> {
    for mut col in v.column_iter_mut() {
        let pivot = col
            .iter()
            .copied()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap_or(C64::new(1.0, 0.0));
        if pivot.norm() > 0.0 {
            let phase = pivot.conj() / pivot.norm();
            col.iter_mut().for_each(|z| *z *= phase);
        }
    }
    v
}
