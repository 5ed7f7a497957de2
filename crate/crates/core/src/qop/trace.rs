use nalgebra::DMatrix;

use super::layout::QubitLayout;
use super::matrix::DensityMatrix;
use crate::{Error, Result, C64};

/// Reduced density on the qubits in `keep`, tracing out the rest.
///
/// Kept qubits appear in layout order regardless of the order in `keep`.
pub fn partial_trace(
    rho: &DensityMatrix,
    keep: &[usize],
    layout: &QubitLayout,
) -> Result<DensityMatrix> {
    if rho.dim() != layout.dim() {
        return Err(Error::arg(format!(
            "density of dim {} does not match a {}-qubit layout",
            rho.dim(),
            layout.n_qubits()
        )));
    }
    if keep.is_empty() {
        return Err(Error::arg("partial trace must keep at least one qubit"));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::arg("duplicate qubit in kept subset"));
    }
    let kept_bits = kept
        .iter()
        .map(|&q| layout.bit(q))
        .collect::<Result<Vec<_>>>()?;
    let traced_bits: Vec<usize> = (1..=layout.n_qubits())
        .filter(|q| !kept.contains(q))
        .map(|q| layout.n_qubits() - q)
        .collect();

    // Full-register index contributed by each reduced / traced configuration;
    // the first listed qubit is the most significant in both.
    let scatter = |bits: &[usize], k: usize| -> usize {
        bits.iter()
            .enumerate()
            .filter(|&(pos, _)| (k >> (bits.len() - 1 - pos)) & 1 == 1)
            .fold(0, |acc, (_, &b)| acc | (1 << b))
    };
    let kept_dim = 1 << kept_bits.len();
    let traced_dim = 1 << traced_bits.len();
    let kept_idx: Vec<usize> = (0..kept_dim).map(|k| scatter(&kept_bits, k)).collect();
    let traced_idx: Vec<usize> = (0..traced_dim).map(|k| scatter(&traced_bits, k)).collect();

    let full = rho.matrix();
    let mut out = DMatrix::<C64>::zeros(kept_dim, kept_dim);
    for (r, &ri) in kept_idx.iter().enumerate() {
        for (c, &ci) in kept_idx.iter().enumerate() {
            out[(r, c)] = traced_idx
                .iter()
                .map(|&t| full[(ri | t, ci | t)])
                .sum();
        }
    }
    DensityMatrix::from_matrix(out)
}
