use nalgebra::{DMatrix, DVector};

use super::eigen::{hermitian_eigen_dense, symmetric_eigen};
use super::matrix::{OperatorMatrix, StateVector};
use crate::{Error, Result, C64};

/// Tolerance on `max |H - H†|` below which an unflagged input is still
/// accepted by the Hermitian routines.
const HERMITIAN_TOL: f64 = 1e-12;

/// Eigendecomposition of a Hermitian operator: ascending eigenvalues and the
/// matching orthonormal eigenvectors as columns.
pub fn hermitian_eigen(h: &OperatorMatrix) -> Result<(Vec<f64>, DMatrix<C64>)> {
    if !h.is_finite() {
        return Err(Error::Numeric("operator has non-finite entries".into()));
    }
    if !h.is_hermitian() && h.hermiticity_error() > HERMITIAN_TOL {
        return Err(Error::arg("eigendecomposition requires a Hermitian operator"));
    }
    if h.matrix().iter().all(|z| z.im == 0.0) {
        let (values, vectors) = symmetric_eigen(h.matrix().map(|z| z.re), true)?;
        return Ok((values, vectors.map(|x| C64::new(x, 0.0))));
    }
    let sym = (h.matrix() + h.matrix().adjoint()) * C64::new(0.5, 0.0);
    hermitian_eigen_dense(sym, true)
}

/// `exp(−i H dt)` with ħ = 1, computed from the eigendecomposition of `H`.
pub fn matrix_exponential(h: &OperatorMatrix, dt: f64) -> Result<OperatorMatrix> {
    if !dt.is_finite() {
        return Err(Error::Numeric(format!("non-finite time step {dt}")));
    }
    HermitianPropagator::new(h)?.unitary(dt)
}

/// Cached eigendecomposition of a time-independent Hermitian `H` that
/// evaluates `exp(−i H t)` for any `t`.
#[derive(Clone, Debug)]
pub struct HermitianPropagator {
    energies: Vec<f64>,
    vectors: DMatrix<C64>,
}

impl HermitianPropagator {
    pub fn new(h: &OperatorMatrix) -> Result<Self> {
        let (energies, vectors) = hermitian_eigen(h)?;
        Ok(Self { energies, vectors })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    fn phases(&self, t: f64) -> DVector<C64> {
        DVector::from_iterator(
            self.dim(),
            self.energies.iter().map(|&e| C64::from_polar(1.0, -e * t)),
        )
    }

    pub fn unitary(&self, t: f64) -> Result<OperatorMatrix> {
        if !t.is_finite() {
            return Err(Error::Numeric(format!("non-finite time {t}")));
        }
        let ph = self.phases(t);
        let mut scaled = self.vectors.clone();
        for (c, p) in ph.iter().enumerate() {
            for z in scaled.column_mut(c).iter_mut() {
                *z *= p;
            }
        }
        OperatorMatrix::new(scaled * self.vectors.adjoint(), false)
    }

    /// Coefficients of `psi` in the eigenbasis.
    pub fn to_eigenbasis(&self, psi: &StateVector) -> DVector<C64> {
        self.vectors.adjoint() * psi.amplitudes()
    }

    /// State at time `t` from eigenbasis coefficients taken at time 0.
    pub fn evolve_coefficients(&self, coeffs: &DVector<C64>, t: f64) -> StateVector {
        let ph = self.phases(t);
        let rotated = coeffs.component_mul(&ph);
        StateVector::new(&self.vectors * rotated).expect("non-empty")
    }

    pub fn apply(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::arg("state dimension does not match propagator"));
        }
        Ok(self.evolve_coefficients(&self.to_eigenbasis(psi), t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qop::{pauli_on_qubit, Axis, QubitLayout};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Scaling-and-squaring Taylor series for `exp(A)`; independent of any
    /// eigensolver.
    fn taylor_expm(a: &DMatrix<C64>) -> DMatrix<C64> {
        let norm: f64 = a.iter().map(|z| z.norm()).sum::<f64>();
        let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
        let scaled = a / C64::new(2f64.powi(squarings), 0.0);
        let n = a.nrows();
        let mut term = DMatrix::<C64>::identity(n, n);
        let mut sum = term.clone();
        for k in 1..30 {
            term = &term * &scaled / C64::new(k as f64, 0.0);
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    pub(crate) fn random_hermitian(dim: usize, seed: u64) -> OperatorMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = DMatrix::from_fn(dim, dim, |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h = (&a + a.adjoint()) * C64::new(0.5, 0.0);
        OperatorMatrix::new(h, true).unwrap()
    }

    #[test]
    fn sigma_z_by_pi_is_minus_identity() {
        let l = QubitLayout::register(1).unwrap();
        let z = pauli_on_qubit(Axis::Z, 1, &l).unwrap();
        let u = matrix_exponential(&z, std::f64::consts::PI).unwrap();
        assert!((u.get(0, 0) - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((u.get(1, 1) - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!(u.get(0, 1).norm() < 1e-15);
    }

    #[test]
    fn sigma_z_rotation_closed_form() {
        let l = QubitLayout::register(1).unwrap();
        let z = pauli_on_qubit(Axis::Z, 1, &l).unwrap();
        let theta = 0.731;
        let u = matrix_exponential(&z, theta).unwrap();
        assert!((u.get(0, 0) - C64::from_polar(1.0, -theta)).norm() < 1e-15);
        assert!((u.get(1, 1) - C64::from_polar(1.0, theta)).norm() < 1e-15);
    }

    #[test]
    fn zero_generator_gives_identity() {
        let u = matrix_exponential(&OperatorMatrix::zeros(4), 3.3).unwrap();
        assert!(u.max_abs_diff(&OperatorMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn random_hermitian_matches_taylor_oracle() {
        let h = random_hermitian(8, 11);
        let u = matrix_exponential(&h, 0.37).unwrap();
        let oracle = taylor_expm(&(h.matrix() * C64::new(0.0, -0.37)));
        let err = (u.matrix() - oracle).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "err {err:e}");
    }

    #[test]
    fn non_finite_inputs_are_numeric_errors() {
        assert!(matches!(
            matrix_exponential(&OperatorMatrix::identity(2), f64::NAN),
            Err(Error::Numeric(_))
        ));
        let mut m = DMatrix::<C64>::identity(2, 2);
        m[(0, 0)] = C64::new(f64::INFINITY, 0.0);
        let h = OperatorMatrix::new(m, true).unwrap();
        assert!(matches!(matrix_exponential(&h, 1.0), Err(Error::Numeric(_))));
    }

    #[test]
    fn unitarity_on_a_256_dim_generator() {
        let h = random_hermitian(256, 5);
        let u = matrix_exponential(&h, -16.0).unwrap();
        assert!(u.unitarity_error() < 1e-12, "{:e}", u.unitarity_error());
    }

    #[test]
    fn propagator_composes_in_time() {
        let h = random_hermitian(6, 3);
        let p = HermitianPropagator::new(&h).unwrap();
        let u1 = p.unitary(0.4).unwrap();
        let u2 = p.unitary(0.9).unwrap();
        assert!((&u2 * &u1).max_abs_diff(&p.unitary(1.3).unwrap()) < 1e-13);
    }
}
