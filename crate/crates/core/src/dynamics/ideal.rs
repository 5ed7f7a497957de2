use super::generator::PiecewiseHamiltonian;
use super::options::PropagatorOptions;
use super::propagate::Propagator;
use super::result::{EvolutionResult, RouteTag, RunMetadata};
use crate::model::PulseSchedule;
use crate::qop::{DensityMatrix, StateVector};
use crate::{Error, Result};

/// Subsystem evolution under the control Hamiltonian alone.
pub fn ideal_states(schedule: &PulseSchedule, psi0: &StateVector, opts: &PropagatorOptions) -> Result<Vec<StateVector>> {
    opts.validate(schedule)?;
    if psi0.dim() != 4 {
        return Err(Error::arg("initial state must be a 2-qubit state"));
    }
    let h = PiecewiseHamiltonian::from_schedule(schedule, None)?;
    Propagator::new(&h, opts)?.run(psi0)
}

pub fn ideal_evolution(schedule: &PulseSchedule, psi0: &StateVector, opts: &PropagatorOptions) -> Result<EvolutionResult> {
    let states = ideal_states(schedule, psi0, opts)?;
    Ok(EvolutionResult {
        route: RouteTag::Ideal,
        times: opts.grid.clone(),
        rho: states.iter().map(DensityMatrix::from_state).collect(),
        metadata: RunMetadata { method: opts.method.label().into(), ..Default::default() },
    })
}
