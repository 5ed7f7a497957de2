//! Complex operator algebra on multi-qubit registers.

mod expm;
mod eigen;
mod layout;
mod matrix;
mod pauli;
mod trace;

pub(crate) use eigen::symmetric_eigen;
pub use expm::{hermitian_eigen, matrix_exponential, HermitianPropagator};
pub use layout::{Axis, QubitLayout};
pub use matrix::{kron, DensityMatrix, LinearOperator, OperatorMatrix, StateVector};
pub use pauli::{pauli_matrix, pauli_on_qubit, PauliSum, PauliTerm, SparsePauliOperator};
pub use trace::partial_trace;
