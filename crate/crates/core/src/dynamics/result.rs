use serde::Serialize;

use crate::qop::{Axis, DensityMatrix};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RouteTag {
    Exact,
    Ckd,
    Ideal,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RunMetadata {
    pub seed: Option<u64>,
    pub j_x: Option<f64>,
    pub axis: Option<Axis>,
    pub lambda: Option<f64>,
    pub n_eig: Option<usize>,
    pub method: String,
}

/// Reduced system densities on the output grid.
#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub route: RouteTag,
    pub times: Vec<f64>,
    pub rho: Vec<DensityMatrix>,
    pub metadata: RunMetadata,
}

/// Tolerances of [`EvolutionResult::check_invariants`].
#[derive(Clone, Copy, Debug)]
pub struct InvariantTolerances {
    pub trace: f64,
    pub hermiticity: f64,
    pub eig_floor: f64,
}

impl Default for InvariantTolerances {
    fn default() -> Self {
        Self { trace: 1e-9, hermiticity: 1e-10, eig_floor: 1e-12 }
    }
}

/// Worst deviations found over a series.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct InvariantReport {
    pub max_trace_error: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

impl InvariantReport {
    pub fn merge(self, other: Self) -> Self {
        Self {
            max_trace_error: self.max_trace_error.max(other.max_trace_error),
            max_hermiticity_error: self.max_hermiticity_error.max(other.max_hermiticity_error),
            min_eigenvalue: self.min_eigenvalue.min(other.min_eigenvalue),
        }
    }

    pub fn within(&self, tol: &InvariantTolerances) -> bool {
        self.max_trace_error <= tol.trace
            && self.max_hermiticity_error <= tol.hermiticity
            && self.min_eigenvalue >= -tol.eig_floor
    }
}

impl EvolutionResult {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_rho(&self) -> &DensityMatrix {
        self.rho.last().expect("non-empty result")
    }

    pub fn invariant_report(&self) -> InvariantReport {
        let mut r = InvariantReport { min_eigenvalue: f64::INFINITY, ..Default::default() };
        for rho in &self.rho {
            let tr = rho.trace();
            r.max_trace_error = r.max_trace_error.max((tr.re - 1.0).abs().max(tr.im.abs()));
            r.max_hermiticity_error = r.max_hermiticity_error.max(rho.hermiticity_error());
            r.min_eigenvalue = r.min_eigenvalue.min(rho.min_eigenvalue());
        }
        r
    }

    /// Trace, Hermiticity and positivity on every grid point.
    pub fn check_invariants(&self, tol: &InvariantTolerances) -> Result<InvariantReport> {
        let r = self.invariant_report();
        if !r.within(tol) {
            return Err(Error::Numeric(format!("{:?} result violates density invariants: {r:?}", self.route)));
        }
        Ok(r)
    }

    /// `max_t max_ij |ρ_ij − σ_ij|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.times != other.times {
            return Err(Error::arg("results live on different grids"));
        }
        Ok(self.rho.iter().zip(&other.rho).map(|(a, b)| a.max_abs_diff(b)).fold(0.0, f64::max))
    }
}
