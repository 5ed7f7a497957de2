use crate::model::PulseSchedule;
use crate::{Error, Result};

/// Grid points closer than this are merged.
pub(crate) const GRID_MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropagationMethod {
    /// Embedded Dormand–Prince 8(5,3) pair, restarted at every switch time.
    AdaptiveRk,
    /// Product of exact segment exponentials from dense eigendecompositions.
    #[default]
    ExpmProduct,
    /// Segment exponentials applied through Lanczos subspaces with an
    /// a-posteriori error bound; matrix-free.
    Krylov,
}

impl PropagationMethod {
    pub fn label(self) -> &'static str {
        match self {
            Self::AdaptiveRk => "adaptive_rk",
            Self::ExpmProduct => "expm_product",
            Self::Krylov => "krylov",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropagatorOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Output times, sorted, within `[0, τ_9]`.
    pub grid: Vec<f64>,
    pub method: PropagationMethod,
}

/// `points` uniform times on `[0, τ_9]` merged with every switch time.
pub fn default_grid(schedule: &PulseSchedule, points: usize) -> Vec<f64> {
    let total = schedule.total_time();
    let mut grid: Vec<f64> = if points >= 2 {
        (0..points).map(|i| total * i as f64 / (points - 1) as f64).collect()
    } else {
        vec![0.0, total]
    };
    grid.extend_from_slice(schedule.switch_times());
    grid.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(grid.len());
    for t in grid {
        match out.last_mut() {
            Some(last) if (t - *last).abs() <= GRID_MERGE_TOL * total.max(1.0) => {
                // keep the exact switch time when one is involved
                if schedule.switch_times().contains(&t) {
                    *last = t;
                }
            }
            _ => out.push(t),
        }
    }
    out
}

impl PropagatorOptions {
    /// Default tolerances `rtol = 1e-10`, `atol = 1e-12` on the default
    /// grid with `points` uniform samples.
    pub fn for_schedule(schedule: &PulseSchedule, points: usize) -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            grid: default_grid(schedule, points),
            method: PropagationMethod::default(),
        }
    }

    pub fn with_method(mut self, method: PropagationMethod) -> Self {
        self.method = method;
        self
    }

    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    /// Checks the grid invariants against `schedule`.
    pub fn validate(&self, schedule: &PulseSchedule) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::arg("tolerances must be positive"));
        }
        if self.grid.is_empty() || self.grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::arg("grid must be non-empty and finite"));
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::arg("grid must be strictly increasing"));
        }
        let total = schedule.total_time();
        if self.grid[0] != 0.0 || *self.grid.last().unwrap() != total {
            return Err(Error::arg("grid must start at 0 and end at the gate time"));
        }
        for &tau in schedule.switch_times() {
            if !self.grid.iter().any(|&t| t == tau) {
                return Err(Error::arg(format!("grid misses switch time {tau}")));
            }
        }
        Ok(())
    }
}
