use crate::dynamics::{
    ckd_reduced_density, exact_channel, ideal_evolution, EvolutionResult, ExactChannel, InvariantReport,
    PropagatorOptions,
};
use crate::model::{BenchmarkModel, Config};
use crate::qop::{Axis, OperatorMatrix, StateVector};
use crate::spectra::{coupling_diagonals, diagonalize_bath, thermal_populations, BathSpectrum, CkdEnsemble, ThermalWeights};
use crate::Result;

/// One benchmark cell: a bath realization at fixed `(axis, J_x, seed)`
/// with everything both open-system routes need.
#[derive(Clone, Debug)]
pub struct BathInstance {
    pub model: BenchmarkModel,
    pub spectrum: BathSpectrum,
    pub weights: ThermalWeights,
    pub ensemble: CkdEnsemble,
    pub system_ops: Vec<OperatorMatrix>,
    pub opts: PropagatorOptions,
}

impl BathInstance {
    pub fn build(cfg: &Config, axis: Axis, j_x: f64, seed: u64) -> Result<Self> {
        let bath = cfg.bath_params().with_axis(axis).with_j(j_x);
        let model = BenchmarkModel::new(cfg.control_params(), bath, seed)?;
        let spectrum = diagonalize_bath(&model.bath_hamiltonian()?, cfg.run.n_eig)?;
        let weights = thermal_populations(&spectrum, cfg.run.kt)?;
        let diag = coupling_diagonals(&spectrum, &model.coupling_sum()?.compile())?;
        if !diag.cluster_sizes.is_empty() {
            log::info!("seed {seed}, J={j_x}: degenerate clusters {:?}", diag.cluster_sizes);
        }
        let ensemble = CkdEnsemble::new(vec![diag], weights.clone(), Some(axis))?;
        let system_ops = vec![model.system_coupling()?];
        let opts = PropagatorOptions::for_schedule(&model.schedule, cfg.run.grid_points)
            .with_tolerances(cfg.run.rtol, cfg.run.atol);
        Ok(Self { model, spectrum, weights, ensemble, system_ops, opts })
    }

    pub fn exact_channel(&self) -> Result<ExactChannel> {
        exact_channel(&self.model, &self.spectrum, &self.weights, &self.opts)
    }

    pub fn ckd(&self, psi0: &StateVector) -> Result<EvolutionResult> {
        let mut r = ckd_reduced_density(&self.ensemble, &self.system_ops, &self.model.schedule, psi0, &self.opts)?;
        r.metadata.seed = Some(self.model.disorder.seed);
        r.metadata.j_x = Some(self.model.bath.j_x);
        r.metadata.lambda = Some(self.model.bath.lambda);
        Ok(r)
    }

    pub fn ideal(&self, psi0: &StateVector) -> Result<EvolutionResult> {
        ideal_evolution(&self.model.schedule, psi0, &self.opts)
    }

    pub fn times(&self) -> &[f64] {
        &self.opts.grid
    }
}

/// Bounds every benchmark run must satisfy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchmarkInvariants {
    pub trace: f64,
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
    pub purity_excess: f64,
    pub initial_metric: f64,
}

impl Default for BenchmarkInvariants {
    fn default() -> Self {
        Self { trace: 1e-9, hermiticity: 1e-10, min_eigenvalue: -1e-12, purity_excess: 1e-9, initial_metric: 1e-12 }
    }
}

/// Worst observed invariant values over a set of runs.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct InvariantSummary {
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue_ckd: f64,
    pub min_eigenvalue_exact: f64,
    pub max_purity: f64,
    pub max_initial_metric_error: f64,
}

impl Default for InvariantSummary {
    fn default() -> Self {
        Self {
            max_trace_error: 0.0,
            max_hermiticity_error: 0.0,
            min_eigenvalue_ckd: f64::INFINITY,
            min_eigenvalue_exact: f64::INFINITY,
            max_purity: f64::NEG_INFINITY,
            max_initial_metric_error: 0.0,
        }
    }
}

impl InvariantSummary {
    pub fn absorb(&mut self, report: &InvariantReport, ckd: bool) {
        self.max_trace_error = self.max_trace_error.max(report.max_trace_error);
        self.max_hermiticity_error = self.max_hermiticity_error.max(report.max_hermiticity_error);
        if ckd {
            self.min_eigenvalue_ckd = self.min_eigenvalue_ckd.min(report.min_eigenvalue);
        } else {
            self.min_eigenvalue_exact = self.min_eigenvalue_exact.min(report.min_eigenvalue);
        }
    }

    pub fn merge(mut self, other: &Self) -> Self {
        self.max_trace_error = self.max_trace_error.max(other.max_trace_error);
        self.max_hermiticity_error = self.max_hermiticity_error.max(other.max_hermiticity_error);
        self.min_eigenvalue_ckd = self.min_eigenvalue_ckd.min(other.min_eigenvalue_ckd);
        self.min_eigenvalue_exact = self.min_eigenvalue_exact.min(other.min_eigenvalue_exact);
        self.max_purity = self.max_purity.max(other.max_purity);
        self.max_initial_metric_error = self.max_initial_metric_error.max(other.max_initial_metric_error);
        self
    }

    /// Violations against `bounds`, empty when all hold. The eigenvalue
    /// floor applies to the CKD densities.
    pub fn violations(&self, bounds: &BenchmarkInvariants) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.max_trace_error <= bounds.trace) {
            v.push(format!("trace error {:e}", self.max_trace_error));
        }
        if !(self.max_hermiticity_error <= bounds.hermiticity) {
            v.push(format!("hermiticity error {:e}", self.max_hermiticity_error));
        }
        if !(self.min_eigenvalue_ckd >= bounds.min_eigenvalue) {
            v.push(format!("ckd eigenvalue {:e}", self.min_eigenvalue_ckd));
        }
        if !(self.max_purity <= 1.0 + bounds.purity_excess) {
            v.push(format!("purity {}", self.max_purity));
        }
        if !(self.max_initial_metric_error <= bounds.initial_metric) {
            v.push(format!("initial purity/fidelity error {:e}", self.max_initial_metric_error));
        }
        v
    }
}
