use nalgebra::DMatrix;

use super::diag::{apply_columns, BathSpectrum};
use super::thermal::ThermalWeights;
use crate::qop::{hermitian_eigen, Axis, LinearOperator, OperatorMatrix};
use crate::{Error, Result, C64};

/// Levels closer than this are treated as one degenerate cluster.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Diagonal coupling constants `⟨n|B|n⟩` for one coupling operator.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingDiagonals {
    pub values: Vec<f64>,
    /// Sizes of the degenerate clusters in which `B` was re-diagonalized.
    pub cluster_sizes: Vec<usize>,
}

/// `⟨n|B|n⟩` for every retained level. Inside a degenerate cluster the
/// restriction of `B` is diagonalized first, so the values are its
/// eigenvalues there (ascending).
pub fn coupling_diagonals(spec: &BathSpectrum, b_op: &dyn LinearOperator) -> Result<CouplingDiagonals> {
    if b_op.dim() != spec.dim() {
        return Err(Error::arg("coupling operator does not act on the bath space"));
    }
    let block = projected(spec, b_op);
    let mut values: Vec<f64> = (0..spec.n_eig()).map(|n| block[(n, n)].re).collect();
    let mut cluster_sizes = Vec::new();
    for (start, len) in spec.clusters(DEGENERACY_TOL) {
        if len < 2 {
            continue;
        }
        cluster_sizes.push(len);
        let sub = block.view((start, start), (len, len)).into_owned();
        let h = OperatorMatrix::new((&sub + sub.adjoint()) * C64::new(0.5, 0.0), true)?;
        let (ev, _) = hermitian_eigen(&h)?;
        values[start..start + len].copy_from_slice(&ev);
    }
    Ok(CouplingDiagonals { values, cluster_sizes })
}

/// `V† B V` over the retained levels.
fn projected(spec: &BathSpectrum, b_op: &dyn LinearOperator) -> DMatrix<C64> {
    spec.vectors().adjoint() * apply_columns(b_op, spec.vectors())
}

/// `RMS_{j≠k} |⟨j|B|k⟩| / RMS_j |⟨j|B|j⟩|` over the retained levels.
///
/// Zero when `B` is diagonal in the bath eigenbasis; small values mean the
/// diagonal approximation behind the CKD is accurate.
pub fn offdiag_suppression(spec: &BathSpectrum, b_op: &dyn LinearOperator) -> Result<f64> {
    if b_op.dim() != spec.dim() {
        return Err(Error::arg("coupling operator does not act on the bath space"));
    }
    let n = spec.n_eig();
    if n < 2 {
        return Err(Error::arg("off-diagonal statistic needs at least two levels"));
    }
    let m = projected(spec, b_op);
    let (mut off, mut diag) = (0.0, 0.0);
    for j in 0..n {
        for k in 0..n {
            if j == k {
                diag += m[(j, k)].norm_sqr();
            } else {
                off += m[(j, k)].norm_sqr();
            }
        }
    }
    let off_rms = (off / (n * (n - 1)) as f64).sqrt();
    let diag_rms = (diag / n as f64).sqrt();
    if diag_rms == 0.0 {
        return Err(Error::Numeric("coupling has vanishing diagonal".into()));
    }
    Ok(off_rms / diag_rms)
}

/// The CKD trajectory family: one effective coupling per retained level
/// and coupling term, with thermal weights.
#[derive(Clone, Debug, PartialEq)]
pub struct CkdEnsemble {
    /// `b_diag[n][μ] = B_μ^{n,n}`.
    pub b_diag: Vec<Vec<f64>>,
    pub weights: ThermalWeights,
    pub axis: Option<Axis>,
    pub cluster_sizes: Vec<usize>,
}

impl CkdEnsemble {
    /// Builds the ensemble from per-term diagonals (outer index `μ`).
    pub fn new(terms: Vec<CouplingDiagonals>, weights: ThermalWeights, axis: Option<Axis>) -> Result<Self> {
        let n = weights.len();
        if terms.is_empty() || terms.iter().any(|t| t.values.len() != n) {
            return Err(Error::arg("coupling diagonals and weights differ in length"));
        }
        let b_diag = (0..n).map(|k| terms.iter().map(|t| t.values[k]).collect()).collect();
        let mut cluster_sizes: Vec<usize> = terms.iter().flat_map(|t| t.cluster_sizes.clone()).collect();
        cluster_sizes.dedup();
        Ok(Self { b_diag, weights, axis, cluster_sizes })
    }

    /// Ensemble with explicit values, e.g. all zeros.
    pub fn from_values(b_diag: Vec<Vec<f64>>, weights: ThermalWeights) -> Result<Self> {
        if b_diag.len() != weights.len() {
            return Err(Error::arg("coupling diagonals and weights differ in length"));
        }
        Ok(Self { b_diag, weights, axis: None, cluster_sizes: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.b_diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b_diag.is_empty()
    }
}
