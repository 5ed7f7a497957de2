//! The benchmark: a CNOT pulse sequence on two system qubits statically
//! coupled to `N` flawed idle qubits.

mod config;
mod disorder;
mod hamiltonian;
mod params;
mod schedule;

pub use config::{BathSection, Config, ControlSection, RunSection, SweepSection};
pub use disorder::{pair_index, sample_disorder, DisorderRealization, Substream};
pub use hamiltonian::{
    bath_coupling_sum, bath_pauli_sum, build_bath_hamiltonian, build_interaction,
    BenchmarkModel, Interaction,
};
pub use params::{BathParams, ControlParams};
pub use schedule::{build_pulse_schedule, ControlTerm, PulseSchedule, Segment};
