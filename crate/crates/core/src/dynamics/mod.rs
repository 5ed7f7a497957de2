//! Piecewise-constant propagation and the exact, CKD and ideal routes to
//! the reduced system density.

mod ckd;
mod exact;
mod generator;
mod ideal;
mod krylov;
mod options;
mod propagate;
mod result;
mod rk;

pub use ckd::{ckd_mixed_reduced_density, ckd_reduced_density, ckd_trajectories, liouvillian, CkdTrajectorySet};
pub use exact::{exact_channel, exact_reduced_density, ExactChannel, DENSE_EXPM_LIMIT};
pub use generator::{PiecewiseHamiltonian, SegmentOperator};
pub use ideal::{ideal_evolution, ideal_states};
pub use options::{default_grid, PropagationMethod, PropagatorOptions};
pub use propagate::{propagate_piecewise, Propagator};
pub use result::{EvolutionResult, InvariantReport, InvariantTolerances, RouteTag, RunMetadata};
