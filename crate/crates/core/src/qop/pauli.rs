use nalgebra::DMatrix;
use std::collections::BTreeMap;

use super::layout::{Axis, QubitLayout};
use super::matrix::{kron, LinearOperator, OperatorMatrix, StateVector};
use crate::{Error, Result, C64};

/// 2×2 Pauli matrix for `axis`.
pub fn pauli_matrix(axis: Axis) -> DMatrix<C64> {
    let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    match axis {
        Axis::X => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        Axis::Z => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
    }
}

/// `I ⊗ … ⊗ σ_axis ⊗ … ⊗ I` with the Pauli factor at `qubit`.
pub fn pauli_on_qubit(axis: Axis, qubit: usize, layout: &QubitLayout) -> Result<OperatorMatrix> {
    layout.bit(qubit)?;
    let id = DMatrix::<C64>::identity(2, 2);
    let mut acc = DMatrix::<C64>::identity(1, 1);
    for q in 1..=layout.n_qubits() {
        let factor = if q == qubit { pauli_matrix(axis) } else { id.clone() };
        acc = kron(&acc, &factor);
    }
    OperatorMatrix::new(acc, true)
}

/// A real-weighted Pauli string `coeff · X^x_mask Z^z_mask`.
///
/// The X and Z supports are disjoint, so every term is a Hermitian real
/// matrix in the computational basis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliTerm {
    pub x_mask: usize,
    pub z_mask: usize,
    pub coeff: f64,
}

/// Sum of Pauli strings over an `n_qubits` register.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn new(layout: &QubitLayout) -> Self {
        Self {
            n_qubits: layout.n_qubits(),
            terms: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coeff · Π σ_axis^qubit` over `factors`.
    pub fn add_string(
        &mut self,
        factors: &[(Axis, usize)],
        coeff: f64,
        layout: &QubitLayout,
    ) -> Result<&mut Self> {
        if layout.n_qubits() != self.n_qubits {
            return Err(Error::arg("layout does not match Pauli sum register"));
        }
        let (mut x_mask, mut z_mask) = (0usize, 0usize);
        for &(axis, qubit) in factors {
            let m = layout.mask(qubit)?;
            if (x_mask | z_mask) & m != 0 {
                return Err(Error::arg(format!("qubit {qubit} appears twice in a Pauli string")));
            }
            match axis {
                Axis::X => x_mask |= m,
                Axis::Z => z_mask |= m,
            }
        }
        if !coeff.is_finite() {
            return Err(Error::Numeric(format!("non-finite Pauli coefficient {coeff}")));
        }
        if coeff != 0.0 {
            self.terms.push(PauliTerm { x_mask, z_mask, coeff });
        }
        Ok(self)
    }

    pub fn add_single(
        &mut self,
        axis: Axis,
        qubit: usize,
        coeff: f64,
        layout: &QubitLayout,
    ) -> Result<&mut Self> {
        self.add_string(&[(axis, qubit)], coeff, layout)
    }

    /// Adds the constant `coeff · I`.
    pub fn add_identity(&mut self, coeff: f64) -> &mut Self {
        if coeff != 0.0 {
            self.terms.push(PauliTerm { x_mask: 0, z_mask: 0, coeff });
        }
        self
    }

    pub fn extend(&mut self, other: &PauliSum) -> Result<&mut Self> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::arg("cannot add Pauli sums on different registers"));
        }
        self.terms.extend_from_slice(&other.terms);
        Ok(self)
    }

    /// Dense real matrix, built entry by entry from the bit rules.
    pub fn to_dense_real(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for t in &self.terms {
            for col in 0..dim {
                let row = col ^ t.x_mask;
                m[(row, col)] += t.coeff * z_sign(col, t.z_mask);
            }
        }
        m
    }

    pub fn to_dense(&self) -> OperatorMatrix {
        OperatorMatrix::from_real(&self.to_dense_real(), true)
            .expect("Pauli sums are square")
    }

    /// Merges terms and splits diagonal from bit-flip parts for fast
    /// matrix-vector products.
    pub fn compile(&self) -> SparsePauliOperator {
        let dim = self.dim();
        let mut diag = vec![0.0; dim];
        let mut flips: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for t in &self.terms {
            if t.x_mask == 0 {
                for (i, d) in diag.iter_mut().enumerate() {
                    *d += t.coeff * z_sign(i, t.z_mask);
                }
            } else {
                *flips.entry((t.x_mask, t.z_mask)).or_insert(0.0) += t.coeff;
            }
        }
        let flips = flips
            .into_iter()
            .filter(|&(_, c)| c != 0.0)
            .map(|((x_mask, z_mask), coeff)| PauliTerm { x_mask, z_mask, coeff })
            .collect();
        SparsePauliOperator { diag, flips }
    }
}

#[inline]
fn z_sign(index: usize, z_mask: usize) -> f64 {
    if (index & z_mask).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Matrix-free form of a [`PauliSum`]: a real diagonal plus bit-flip terms.
///
/// `H|i⟩ = diag[i] |i⟩ + Σ_t c_t (−1)^{|i ∧ z_t|} |i ⊕ x_t⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsePauliOperator {
    diag: Vec<f64>,
    flips: Vec<PauliTerm>,
}

impl SparsePauliOperator {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn flip_terms(&self) -> &[PauliTerm] {
        &self.flips
    }

    /// Upper bound on the spectral radius (sum of absolute row weights).
    pub fn norm_bound(&self) -> f64 {
        let d = self.diag.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        d + self.flips.iter().map(|t| t.coeff.abs()).sum::<f64>()
    }

    /// `out = H psi`.
    pub fn apply_into(&self, psi: &[C64], out: &mut [C64]) {
        debug_assert_eq!(psi.len(), self.dim());
        debug_assert_eq!(out.len(), self.dim());
        for ((o, p), d) in out.iter_mut().zip(psi).zip(&self.diag) {
            *o = p * *d;
        }
        for t in &self.flips {
            let (x, c) = (t.x_mask, t.coeff);
            if t.z_mask == 0 {
                for (i, o) in out.iter_mut().enumerate() {
                    *o += psi[i ^ x] * c;
                }
            } else {
                // (X^x Z^z ψ)[i] = (−1)^{|(i⊕x) ∧ z|} ψ[i⊕x]
                for (i, o) in out.iter_mut().enumerate() {
                    let j = i ^ x;
                    *o += psi[j] * (c * z_sign(j, t.z_mask));
                }
            }
        }
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::arg("state dimension does not match operator"));
        }
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        self.apply_into(psi.as_slice(), &mut out);
        StateVector::from_slice(&out)
    }
}

impl LinearOperator for SparsePauliOperator {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply_into(&self, x: &[C64], out: &mut [C64]) {
        SparsePauliOperator::apply_into(self, x, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct index-arithmetic construction, independent of `kron`.
    fn embed_by_bits(axis: Axis, qubit: usize, n: usize) -> DMatrix<C64> {
        let dim = 1 << n;
        let bit = n - qubit;
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let b = (col >> bit) & 1;
            match axis {
                Axis::X => m[(col ^ (1 << bit), col)] = C64::new(1.0, 0.0),
                Axis::Z => m[(col, col)] = C64::new(if b == 0 { 1.0 } else { -1.0 }, 0.0),
            }
        }
        m
    }

    #[test]
    fn sigma_x_on_first_of_two() {
        let l = QubitLayout::register(2).unwrap();
        let op = pauli_on_qubit(Axis::X, 1, &l).unwrap();
        assert_eq!(op.dim(), 4);
        assert!(op.is_hermitian());
        // ⟨00|X₁|10⟩ = 1: |00⟩ is index 0, |10⟩ is index 2.
        assert_eq!(op.get(0, 2), C64::new(1.0, 0.0));
        assert_eq!(op.get(0, 1), C64::new(0.0, 0.0));
    }

    #[test]
    fn sigma_z_on_second_of_two() {
        let l = QubitLayout::register(2).unwrap();
        let op = pauli_on_qubit(Axis::Z, 2, &l).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| op.get(i, i).re).collect();
        assert_eq!(diag, vec![1.0, -1.0, 1.0, -1.0]);
        assert_eq!(op.hermiticity_error(), 0.0);
    }

    #[test]
    fn bath_qubit_embedding_matches_bit_oracle() {
        let l = QubitLayout::new(2, 1).unwrap();
        let op = pauli_on_qubit(Axis::X, 3, &l).unwrap();
        assert_eq!(op.matrix(), &embed_by_bits(Axis::X, 3, 3));
    }

    #[test]
    fn embedding_equals_index_arithmetic_up_to_six_qubits() {
        for n in 1..=6 {
            let l = QubitLayout::register(n).unwrap();
            for q in 1..=n {
                for axis in [Axis::X, Axis::Z] {
                    let op = pauli_on_qubit(axis, q, &l).unwrap();
                    assert_eq!(op.matrix(), &embed_by_bits(axis, q, n), "n={n} q={q} {axis}");
                }
            }
        }
    }

    #[test]
    fn out_of_range_qubit_is_rejected() {
        let l = QubitLayout::register(2).unwrap();
        assert!(pauli_on_qubit(Axis::X, 0, &l).is_err());
        assert!(pauli_on_qubit(Axis::Z, 3, &l).is_err());
    }

    #[test]
    fn pauli_sum_dense_matches_kron_products() {
        let l = QubitLayout::register(3).unwrap();
        let mut s = PauliSum::new(&l);
        s.add_single(Axis::X, 1, 0.7, &l).unwrap();
        s.add_string(&[(Axis::X, 1), (Axis::X, 3)], -0.3, &l).unwrap();
        s.add_string(&[(Axis::Z, 2), (Axis::X, 3)], 1.1, &l).unwrap();
        s.add_identity(0.25);
        let x1 = pauli_on_qubit(Axis::X, 1, &l).unwrap();
        let x3 = pauli_on_qubit(Axis::X, 3, &l).unwrap();
        let z2 = pauli_on_qubit(Axis::Z, 2, &l).unwrap();
        let expected = &(&(&x1.scale(0.7) + &(&x1 * &x3).scale(-0.3)) + &(&z2 * &x3).scale(1.1))
            + &OperatorMatrix::identity(8).scale(0.25);
        assert!(s.to_dense().max_abs_diff(&expected) < 1e-15);
        assert!(s.add_string(&[(Axis::X, 2), (Axis::Z, 2)], 1.0, &l).is_err());
    }

    #[test]
    fn sparse_apply_matches_dense() {
        let l = QubitLayout::register(4).unwrap();
        let mut s = PauliSum::new(&l);
        s.add_single(Axis::Z, 1, -0.5, &l).unwrap();
        s.add_single(Axis::X, 4, 0.8, &l).unwrap();
        s.add_string(&[(Axis::X, 2), (Axis::X, 3)], 0.4, &l).unwrap();
        s.add_string(&[(Axis::X, 2), (Axis::X, 3)], 0.1, &l).unwrap();
        s.add_string(&[(Axis::Z, 1), (Axis::X, 4)], -0.9, &l).unwrap();
        let amps: Vec<C64> = (0..16)
            .map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let psi = StateVector::from_slice(&amps).unwrap();
        let dense = s.to_dense().apply(&psi).unwrap();
        let sparse = s.compile().apply(&psi).unwrap();
        assert!(dense.distance(&sparse) < 1e-14);
        assert_eq!(s.compile().flip_terms().len(), 3);
    }
}
