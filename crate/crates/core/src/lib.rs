//! Chaotic Kraus decomposition (CKD) of open-system gate dynamics.
//!
//! The crate simulates a two-qubit register running a CNOT pulse sequence
//! while statically coupled to `N` flawed idle qubits, and compares three
//! routes to the register's reduced density matrix:
//!
//! * **exact**: full `(N + 2)`-qubit propagation for each low-lying bath
//!   eigenstate, thermally weighted and traced over the bath;
//! * **ckd**: one 4-dimensional trajectory per bath eigenstate, driven by the
//!   control Hamiltonian plus the diagonal coupling constant `⟨n|B|n⟩`;
//! * **ideal**: the control Hamiltonian alone.
//!
//! Module map:
//!
//! * [`qop`]: operators, states, Pauli embeddings, exponentials, partial traces
//! * [`model`]: pulse schedule, disorder sampling, bath and coupling Hamiltonians
//! * [`spectra`]: bath diagonalization, thermal weights, coupling diagonals,
//!   chaos diagnostics
//! * [`dynamics`]: piecewise propagation and the three reduced-density routes
//! * [`observables`]: purity, fidelity, single-qubit elements, set averages
//! * [`experiment`]: configs, sweeps, CSV/JSON artifacts and run manifests

pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod model;
pub mod observables;
pub mod qop;
pub mod spectra;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
