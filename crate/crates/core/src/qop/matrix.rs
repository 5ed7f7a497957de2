use nalgebra::{DMatrix, DVector};
use std::ops::{Add, Mul, Sub};

use crate::{Error, Result, C64};

/// Kronecker product `a ⊗ b`; `a` is the more significant factor.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = DMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn hermiticity_error_of(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Anything that can apply a square matrix to a vector without exposing its
/// storage.
pub trait LinearOperator: Send + Sync {
    fn dim(&self) -> usize;

    /// `out = A x`; both slices have length `dim()`.
    fn apply_into(&self, x: &[C64], out: &mut [C64]);
}

impl LinearOperator for OperatorMatrix {
    fn dim(&self) -> usize {
        self.data.nrows()
    }

    fn apply_into(&self, x: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
        for (j, &xj) in x.iter().enumerate() {
            if xj == C64::new(0.0, 0.0) {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.data.column(j).iter()) {
                *o += a * xj;
            }
        }
    }
}

/// Dense complex square matrix acting on a qubit register.
///
/// The `hermitian` flag is a claim made at construction; it survives sums,
/// real scalings and tensor products of flagged operands and can be checked
/// with [`OperatorMatrix::hermiticity_error`].
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    data: DMatrix<C64>,
    hermitian: bool,
}

impl OperatorMatrix {
    pub fn new(data: DMatrix<C64>, hermitian: bool) -> Result<Self> {
        if !data.is_square() || data.nrows() == 0 {
            return Err(Error::arg(format!(
                "operator must be square and non-empty, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        Ok(Self { data, hermitian })
    }

    /// Wraps `data` and sets the Hermitian flag iff it holds to `tol`.
    pub fn detect_hermitian(data: DMatrix<C64>, tol: f64) -> Result<Self> {
        let h = data.is_square() && hermiticity_error_of(&data) <= tol;
        Self::new(data, h)
    }

    pub fn from_real(data: &DMatrix<f64>, hermitian: bool) -> Result<Self> {
        Self::new(data.map(|x| C64::new(x, 0.0)), hermitian)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            data: DMatrix::identity(dim, dim),
            hermitian: true,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: DMatrix::zeros(dim, dim),
            hermitian: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    /// `max |A - A†|` over all entries.
    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error_of(&self.data)
    }

    /// Errors if the Hermitian flag is set but `max |A - A†| > tol`.
    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let err = self.hermiticity_error();
        if self.hermitian && err > tol {
            return Err(Error::Numeric(format!(
                "operator flagged Hermitian deviates by {err:e}"
            )));
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
            hermitian: self.hermitian,
        }
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            data: kron(&self.data, &other.data),
            hermitian: self.hermitian && other.hermitian,
        }
    }

    /// Scaling by a real factor keeps the Hermitian flag.
    pub fn scale(&self, factor: f64) -> Self {
        Self {
            data: &self.data * C64::new(factor, 0.0),
            hermitian: self.hermitian,
        }
    }

    pub fn scale_complex(&self, factor: C64) -> Self {
        Self {
            data: &self.data * factor,
            hermitian: self.hermitian && factor.im == 0.0,
        }
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs(&(&self.data - &other.data))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `max |U†U - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.data.adjoint() * &self.data;
        max_abs(&(p - DMatrix::identity(self.dim(), self.dim())))
    }

    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::arg(format!(
                "operator of dim {} applied to state of dim {}",
                self.dim(),
                psi.dim()
            )));
        }
        Ok(StateVector {
            amps: &self.data * &psi.amps,
        })
    }

    /// `⟨φ|A|ψ⟩`.
    pub fn matrix_element(&self, phi: &StateVector, psi: &StateVector) -> C64 {
        phi.amps.dotc(&(&self.data * &psi.amps))
    }
}

impl<'a> Add<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;

    fn add(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix {
            data: &self.data + &rhs.data,
            hermitian: self.hermitian && rhs.hermitian,
        }
    }
}

impl<'a> Sub<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;

    fn sub(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix {
            data: &self.data - &rhs.data,
            hermitian: self.hermitian && rhs.hermitian,
        }
    }
}

impl<'a> Mul<&'a OperatorMatrix> for &'a OperatorMatrix {
    type Output = OperatorMatrix;

    fn mul(self, rhs: &'a OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix {
            data: &self.data * &rhs.data,
            hermitian: false,
        }
    }
}

/// Pure state of a register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: DVector<C64>,
}

impl StateVector {
    pub fn new(amps: DVector<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::arg("empty state vector"));
        }
        Ok(Self { amps })
    }

    pub fn from_slice(amps: &[C64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(amps))
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(DVector::from_iterator(
            amps.len(),
            amps.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::arg(format!("basis index {index} >= dim {dim}")));
        }
        let mut amps = DVector::zeros(dim);
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amps
    }

    pub fn as_slice(&self) -> &[C64] {
        self.amps.as_slice()
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Numeric("cannot normalize a zero or non-finite state".into()));
        }
        Ok(Self {
            amps: &self.amps / C64::new(n, 0.0),
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut amps = DVector::zeros(self.dim() * other.dim());
        for (i, a) in self.amps.iter().enumerate() {
            for (j, b) in other.amps.iter().enumerate() {
                amps[i * other.dim() + j] = a * b;
            }
        }
        Self { amps }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.amps - &other.amps).norm()
    }
}

/// Density matrix of a register.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    data: DMatrix<C64>,
}

impl DensityMatrix {
    /// Wraps a matrix after checking that it is square; the physical
    /// invariants are checked separately by [`DensityMatrix::validate`].
    pub fn from_matrix(data: DMatrix<C64>) -> Result<Self> {
        if !data.is_square() || data.nrows() == 0 {
            return Err(Error::arg("density matrix must be square and non-empty"));
        }
        Ok(Self { data })
    }

    /// Rank-one projector `|ψ⟩⟨ψ|`; its trace is `‖ψ‖²`.
    pub fn from_state(psi: &StateVector) -> Self {
        Self {
            data: &psi.amps * psi.amps.adjoint(),
        }
    }

    /// `Σ_k w_k |ψ_k⟩⟨ψ_k|`.
    pub fn mixture(states: &[(f64, StateVector)]) -> Result<Self> {
        let dim = states
            .first()
            .map(|(_, s)| s.dim())
            .ok_or_else(|| Error::arg("empty mixture"))?;
        let mut data = DMatrix::zeros(dim, dim);
        for (w, s) in states {
            if s.dim() != dim {
                return Err(Error::arg("mixture components differ in dimension"));
            }
            data += (&s.amps * s.amps.adjoint()) * C64::new(*w, 0.0);
        }
        Ok(Self { data })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            data: DMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[(row, col)]
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error_of(&self.data)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        super::eigen::hermitian_eigen_dense(h, false)
            .map(|(ev, _)| ev)
            .unwrap_or_else(|_| vec![f64::NAN; self.dim()])
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        max_abs(&(&self.data - &other.data))
    }

    /// Checks Hermiticity, unit trace and positivity against the given
    /// tolerances.
    pub fn validate(&self, herm_tol: f64, trace_tol: f64, eig_floor: f64) -> Result<()> {
        let h = self.hermiticity_error();
        if h > herm_tol {
            return Err(Error::Numeric(format!("density not Hermitian: {h:e}")));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > trace_tol || tr.im.abs() > trace_tol {
            return Err(Error::Numeric(format!("density trace {tr} != 1")));
        }
        let min = self.min_eigenvalue();
        if min < -eig_floor {
            return Err(Error::Numeric(format!("density has eigenvalue {min:e}")));
        }
        Ok(())
    }

    pub fn scaled(&self, w: f64) -> Self {
        Self {
            data: &self.data * C64::new(w, 0.0),
        }
    }

    pub fn add_scaled(&mut self, w: f64, other: &Self) {
        self.data += &other.data * C64::new(w, 0.0);
    }
}
