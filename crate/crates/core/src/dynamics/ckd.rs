use nalgebra::DMatrix;

use super::generator::PiecewiseHamiltonian;
use super::options::PropagatorOptions;
use super::propagate::Propagator;
use super::result::{EvolutionResult, RouteTag, RunMetadata};
use crate::model::PulseSchedule;
use crate::qop::{kron, DensityMatrix, OperatorMatrix, StateVector};
use crate::spectra::CkdEnsemble;
use crate::{Error, Result, C64};

/// `Σ_μ B_μ^{k,k} Ŝ_μ` for level `k`.
fn effective_shift(ensemble: &CkdEnsemble, s_ops: &[OperatorMatrix], k: usize) -> Result<OperatorMatrix> {
    let b = &ensemble.b_diag[k];
    if b.len() != s_ops.len() {
        return Err(Error::arg("one system operator per coupling term is required"));
    }
    let mut shift = OperatorMatrix::zeros(4);
    for (s, &bk) in s_ops.iter().zip(b) {
        if s.dim() != 4 {
            return Err(Error::arg("system operators must be 4×4"));
        }
        shift = &shift + &s.scale(bk);
    }
    Ok(shift)
}

/// The CKD trajectory family for one initial state.
#[derive(Clone, Debug)]
pub struct CkdTrajectorySet {
    pub times: Vec<f64>,
    /// `states[k][i] = |ψ_k(t_i)⟩`.
    pub states: Vec<Vec<StateVector>>,
    pub weights: Vec<f64>,
    /// `Σ_μ B_μ^{k,k} Ŝ_μ` per level.
    pub shifts: Vec<OperatorMatrix>,
}

impl CkdTrajectorySet {
    /// `ρ_S(t_i) = Σ_k p_k |ψ_k(t_i)⟩⟨ψ_k(t_i)|`, summed in level order.
    pub fn reduced(&self) -> Vec<DensityMatrix> {
        (0..self.times.len())
            .map(|i| {
                let mut rho = DMatrix::<C64>::zeros(4, 4);
                for (k, traj) in self.states.iter().enumerate() {
                    let a = traj[i].amplitudes();
                    rho += (a * a.adjoint()) * C64::new(self.weights[k], 0.0);
                }
                DensityMatrix::from_matrix(rho).expect("4×4")
            })
            .collect()
    }

    /// `max_{k,i} |‖ψ_k(t_i)‖ − 1|`.
    pub fn norm_drift(&self) -> f64 {
        self.states
            .iter()
            .flatten()
            .map(|s| (s.norm_sqr().sqrt() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Propagates `ψ_S0` under `Ĥ_S(t) + Σ_μ Ŝ_μ B_μ^{k,k}` for every retained
/// level `k`. The phase `exp(−iE_k t)` multiplies `|ψ_k⟩` as a whole and
/// is left out.
pub fn ckd_trajectories(
    ensemble: &CkdEnsemble,
    s_ops: &[OperatorMatrix],
    schedule: &PulseSchedule,
    psi0: &StateVector,
    opts: &PropagatorOptions,
) -> Result<CkdTrajectorySet> {
    opts.validate(schedule)?;
    if psi0.dim() != 4 {
        return Err(Error::arg("initial state must be a 2-qubit state"));
    }
    let mut states = Vec::with_capacity(ensemble.len());
    let mut shifts = Vec::with_capacity(ensemble.len());
    for k in 0..ensemble.len() {
        let shift = effective_shift(ensemble, s_ops, k)?;
        let h = PiecewiseHamiltonian::from_schedule(schedule, Some(&shift))?;
        let traj = Propagator::new(&h, opts)?
            .run(psi0)
            .map_err(|e| Error::Trajectory { bath_state: k, initial_state: 0, source: Box::new(e) })?;
        states.push(traj);
        shifts.push(shift);
    }
    Ok(CkdTrajectorySet { times: opts.grid.clone(), states, weights: ensemble.weights.p.clone(), shifts })
}

fn ckd_metadata(ensemble: &CkdEnsemble, opts: &PropagatorOptions) -> RunMetadata {
    RunMetadata {
        axis: ensemble.axis,
        n_eig: Some(ensemble.len()),
        method: opts.method.label().into(),
        ..Default::default()
    }
}

/// `ρ_S(t) = Σ_k p_k |ψ_k(t)⟩⟨ψ_k(t)|`.
pub fn ckd_reduced_density(
    ensemble: &CkdEnsemble,
    s_ops: &[OperatorMatrix],
    schedule: &PulseSchedule,
    psi0: &StateVector,
    opts: &PropagatorOptions,
) -> Result<EvolutionResult> {
    let set = ckd_trajectories(ensemble, s_ops, schedule, psi0, opts)?;
    Ok(EvolutionResult {
        route: RouteTag::Ckd,
        rho: set.reduced(),
        times: set.times,
        metadata: ckd_metadata(ensemble, opts),
    })
}

/// `L = I ⊗ H − Hᵀ ⊗ I`, so that `vec(−i[H, ρ]) = −i L vec(ρ)` for
/// column-stacked `vec`.
pub fn liouvillian(h: &OperatorMatrix) -> OperatorMatrix {
    let n = h.dim();
    let id = DMatrix::<C64>::identity(n, n);
    let l = kron(&id, h.matrix()) - kron(&h.matrix().transpose(), &id);
    OperatorMatrix::new(l, true).expect("square")
}

/// Liouville–von Neumann counterpart of [`ckd_reduced_density`]: each
/// `ρ_k` evolves under the commutator with the `k`-th effective
/// Hamiltonian and `ρ_S = Σ_k p_k ρ_k`.
pub fn ckd_mixed_reduced_density(
    ensemble: &CkdEnsemble,
    s_ops: &[OperatorMatrix],
    schedule: &PulseSchedule,
    rho0: &DensityMatrix,
    opts: &PropagatorOptions,
) -> Result<EvolutionResult> {
    opts.validate(schedule)?;
    if rho0.dim() != 4 {
        return Err(Error::arg("initial density must be 4×4"));
    }
    let v0 = StateVector::from_slice(rho0.matrix().as_slice())?;
    let n_t = opts.grid.len();
    let mut acc = vec![DMatrix::<C64>::zeros(4, 4); n_t];
    for k in 0..ensemble.len() {
        let shift = effective_shift(ensemble, s_ops, k)?;
        let segs = schedule
            .segments()
            .iter()
            .map(|seg| super::generator::SegmentOperator::Dense(liouvillian(&(&seg.hamiltonian() + &shift))))
            .collect();
        let l = PiecewiseHamiltonian::new(segs, schedule.switch_times().to_vec())?;
        let w = C64::new(ensemble.weights.p[k], 0.0);
        Propagator::new(&l, opts)?
            .run_with(v0.as_slice(), &mut |i, v| {
                acc[i] += DMatrix::from_column_slice(4, 4, v) * w;
            })
            .map_err(|e| Error::Trajectory { bath_state: k, initial_state: 0, source: Box::new(e) })?;
    }
    Ok(EvolutionResult {
        route: RouteTag::Ckd,
        times: opts.grid.clone(),
        rho: acc.into_iter().map(DensityMatrix::from_matrix).collect::<Result<_>>()?,
        metadata: ckd_metadata(ensemble, opts),
    })
}
