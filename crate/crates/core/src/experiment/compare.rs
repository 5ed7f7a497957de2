use serde::Serialize;

use super::instance::{BathInstance, InvariantSummary};
use super::table::CsvTable;
use crate::dynamics::EvolutionResult;
use crate::model::Config;
use crate::observables::{average_over_set, purity, ErrorMetrics, InitialStateSet, StateMetrics};
use crate::qop::Axis;
use crate::Result;

/// Set-averaged purity and fidelity of the exact and CKD routes for one
/// `(axis, J_x, seed, set)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonRecord {
    pub axis: Axis,
    pub j_x: f64,
    pub seed: u64,
    pub set: InitialStateSet,
    pub exact: ErrorMetrics,
    pub ckd: ErrorMetrics,
    pub max_dpurity: f64,
    pub max_dfidelity: f64,
}

impl ComparisonRecord {
    pub fn times(&self) -> &[f64] {
        &self.exact.times
    }

    pub fn to_table(&self) -> Result<CsvTable> {
        let mut t = CsvTable::new(["t", "purity_exact", "purity_ckd", "fidelity_exact", "fidelity_ckd"]);
        for i in 0..self.times().len() {
            t.push_row(vec![
                self.exact.times[i],
                self.exact.purity_avg[i],
                self.ckd.purity_avg[i],
                self.exact.fidelity_avg[i],
                self.ckd.fidelity_avg[i],
            ])?;
        }
        Ok(t)
    }

    /// `max_t (1 − 𝒫̄_exact(t))`.
    pub fn max_purity_loss(&self) -> f64 {
        self.exact.purity_avg.iter().map(|p| 1.0 - p).fold(0.0, f64::max)
    }

    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "axis": self.axis.coupling_label(),
            "j_x": self.j_x,
            "seed": self.seed,
            "set": self.set.label(),
            "max_dpurity": self.max_dpurity,
            "max_dfidelity": self.max_dfidelity,
            "max_purity_loss_exact": self.max_purity_loss(),
            "final_purity_exact": self.exact.final_purity(),
            "final_purity_ckd": self.ckd.final_purity(),
            "final_fidelity_exact": self.exact.final_fidelity(),
            "final_fidelity_ckd": self.ckd.final_fidelity(),
        })
    }
}

/// All records of one bath realization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompareCell {
    pub axis: Axis,
    pub j_x: f64,
    pub seed: u64,
    pub lambda: f64,
    pub records: Vec<ComparisonRecord>,
    pub invariants: InvariantSummary,
    pub cluster_sizes: Vec<usize>,
}

impl CompareCell {
    pub fn record(&self, set: InitialStateSet) -> Option<&ComparisonRecord> {
        self.records.iter().find(|r| r.set == set)
    }

    /// Purity average over the requested sets at every time.
    pub fn mean_purity_exact(&self) -> Vec<f64> {
        let n = self.records.len() as f64;
        let len = self.records[0].exact.purity_avg.len();
        (0..len).map(|i| self.records.iter().map(|r| r.exact.purity_avg[i]).sum::<f64>() / n).collect()
    }
}

fn absorb(inv: &mut InvariantSummary, r: &EvolutionResult, ckd: bool) {
    inv.absorb(&r.invariant_report(), ckd);
    inv.max_purity = r.rho.iter().map(purity).fold(inv.max_purity, f64::max);
}

fn initial_error(m: &ErrorMetrics) -> f64 {
    (m.purity_avg[0] - 1.0).abs().max((m.fidelity_avg[0] - 1.0).abs())
}

/// Runs ideal, exact and CKD on every member of `sets`. The exact channel
/// is propagated once on the computational basis and reused for all sets.
pub fn compare_instance(inst: &BathInstance, sets: &[InitialStateSet]) -> Result<CompareCell> {
    let channel = inst.exact_channel()?;
    let mut inv = InvariantSummary::default();
    let mut records = Vec::with_capacity(sets.len());
    for &set in sets {
        let (mut ex_m, mut ck_m) = (Vec::with_capacity(4), Vec::with_capacity(4));
        for psi in set.states() {
            let ideal = inst.ideal(&psi)?;
            let exact = channel.evolution_for(&psi)?;
            let ckd = inst.ckd(&psi)?;
            absorb(&mut inv, &exact, false);
            absorb(&mut inv, &ckd, true);
            ex_m.push(StateMetrics::from_results(&exact, &ideal)?);
            ck_m.push(StateMetrics::from_results(&ckd, &ideal)?);
        }
        let exact = average_over_set(inst.times(), ex_m, set)?;
        let ckd = average_over_set(inst.times(), ck_m, set)?;
        inv.max_initial_metric_error = inv.max_initial_metric_error.max(initial_error(&exact)).max(initial_error(&ckd));
        let (max_dpurity, max_dfidelity) = exact.max_gaps(&ckd)?;
        records.push(ComparisonRecord {
            axis: inst.model.bath.axis,
            j_x: inst.model.bath.j_x,
            seed: inst.model.disorder.seed,
            set,
            exact,
            ckd,
            max_dpurity,
            max_dfidelity,
        });
    }
    Ok(CompareCell {
        axis: inst.model.bath.axis,
        j_x: inst.model.bath.j_x,
        seed: inst.model.disorder.seed,
        lambda: inst.model.bath.lambda,
        records,
        invariants: inv,
        cluster_sizes: inst.ensemble.cluster_sizes.clone(),
    })
}

/// [`compare_instance`] on a freshly built realization.
pub fn compare_cell(cfg: &Config, axis: Axis, j_x: f64, seed: u64, sets: &[InitialStateSet]) -> Result<CompareCell> {
    compare_instance(&BathInstance::build(cfg, axis, j_x, seed)?, sets)
}
