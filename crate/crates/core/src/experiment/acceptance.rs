//! The benchmark acceptance suite.
//!
//! Criteria 1–12 are evaluated against the configured benchmark. Band
//! criteria share a cache of N-qubit comparison cells, computed once and
//! in parallel.

use rayon::prelude::*;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use super::compare::{compare_instance, CompareCell};
use super::instance::{BathInstance, BenchmarkInvariants, InvariantSummary};
use super::runs::worker_pool;
use crate::dynamics::{
    ckd_mixed_reduced_density, ckd_reduced_density, ckd_trajectories, ideal_states, EvolutionResult, ExactChannel,
    PiecewiseHamiltonian, PropagationMethod, PropagatorOptions,
};
use crate::model::{build_pulse_schedule, BenchmarkModel, Config};
use crate::observables::InitialStateSet;
use crate::qop::{Axis, DensityMatrix, OperatorMatrix, StateVector};
use crate::spectra::{
    coupling_diagonals, diagonalize_bath, full_spectrum, nnsd, offdiag_suppression, thermal_populations, CkdEnsemble,
};
use crate::{Error, Result};

/// λ that puts the seed-1 benchmark fidelities at τ_9 inside the
/// criterion-8 bands, from the `calibrate_lambda` scan (window
/// 0.074–0.080).
pub const CALIBRATED_LAMBDA: f64 = 0.076;

/// Couplings of the benchmark sweep.
pub const SWEEP_JX: [f64; 3] = [0.5, 1.0, 2.0];

/// Seeds voting in criterion 6.
pub const ORDERING_SEEDS: usize = 3;

/// Seeds averaged in the off-diagonal trend of criterion 11.
pub const SUPPRESSION_SEEDS: usize = 5;

/// Criteria whose thresholds are realization-dependent bands rather than
/// exact properties.
pub const BAND_CRITERIA: [u8; 5] = [5, 6, 7, 8, 9];

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    /// Set when the check itself could not be evaluated.
    pub error: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {}: {} ({:.1} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.detail,
            self.seconds
        )
    }
}

const TITLES: [&str; 12] = [
    "CNOT correctness",
    "closed-system limit",
    "CKD exactness oracle",
    "invariant suite",
    "purity scale",
    "CKD accuracy ordering (xx)",
    "zz worst case",
    "fidelity magnitudes (calibrated)",
    "fidelity agreement",
    "unitary-error signature",
    "chaos diagnostics",
    "oracle equivalence",
];

type CellKey = (Axis, u64, u64, u64);

/// Cached comparison cells plus the invariant record of every run.
pub struct AcceptanceSuite {
    cfg: Config,
    pool: rayon::ThreadPool,
    cells: Mutex<HashMap<CellKey, Arc<CompareCell>>>,
    invariants: Mutex<InvariantSummary>,
}

fn mean2(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect()
}

fn spread(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join("/")
}

/// Both-set mean of the exact and CKD purity and fidelity series.
struct Averaged {
    purity_exact: Vec<f64>,
    purity_ckd: Vec<f64>,
    fidelity_exact: Vec<f64>,
    fidelity_ckd: Vec<f64>,
}

fn averaged(cell: &CompareCell) -> Averaged {
    let (s, b) = (&cell.records[0], &cell.records[1]);
    Averaged {
        purity_exact: mean2(&s.exact.purity_avg, &b.exact.purity_avg),
        purity_ckd: mean2(&s.ckd.purity_avg, &b.ckd.purity_avg),
        fidelity_exact: mean2(&s.exact.fidelity_avg, &b.exact.fidelity_avg),
        fidelity_ckd: mean2(&s.ckd.fidelity_avg, &b.ckd.fidelity_avg),
    }
}

/// `max_t |𝒫̄_ckd − 𝒫̄_exact|`, worst of the two state sets.
fn purity_gap(cell: &CompareCell) -> f64 {
    cell.records.iter().map(|r| r.max_dpurity).fold(0.0, f64::max)
}

fn fidelity_gap(cell: &CompareCell) -> f64 {
    cell.records.iter().map(|r| r.max_dfidelity).fold(0.0, f64::max)
}

fn dist(a: &EvolutionResult, b: &EvolutionResult) -> Result<f64> {
    a.max_abs_diff(b)
}

impl AcceptanceSuite {
    pub fn new(cfg: Config, workers: Option<usize>) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            pool: worker_pool(workers)?,
            cells: Mutex::new(HashMap::new()),
            invariants: Mutex::new(InvariantSummary::default()),
        })
    }

    pub fn config(&self) -> &Config {
        &self.cfg
    }

    fn seed(&self) -> u64 {
        self.cfg.run.seed
    }

    fn ordering_seeds(&self) -> Vec<u64> {
        let mut s = self.cfg.seeds();
        let mut next = self.seed();
        while s.len() < ORDERING_SEEDS {
            if !s.contains(&next) {
                s.push(next);
            }
            next += 1;
        }
        s
    }

    fn record(&self, inv: &InvariantSummary) {
        let mut g = self.invariants.lock().expect("poisoned");
        *g = g.merge(inv);
    }

    /// Comparison cells on both state sets, computed in parallel when
    /// missing.
    pub fn cells(&self, keys: &[(Axis, f64, u64, f64)]) -> Result<Vec<Arc<CompareCell>>> {
        let key = |&(a, j, s, l): &(Axis, f64, u64, f64)| (a, j.to_bits(), s, l.to_bits());
        let missing: Vec<_> = {
            let have = self.cells.lock().expect("poisoned");
            let mut seen = std::collections::HashSet::new();
            keys.iter().filter(|k| !have.contains_key(&key(k)) && seen.insert(key(k))).copied().collect()
        };
        let computed: Vec<Result<CompareCell>> = self.pool.install(|| {
            missing
                .par_iter()
                .map(|&(axis, j, seed, lambda)| {
                    let mut cfg = self.cfg.clone();
                    cfg.bath.lambda = lambda;
                    log::info!("acceptance cell {} J={j} seed={seed} lambda={lambda}", axis.coupling_label());
                    compare_instance(&BathInstance::build(&cfg, axis, j, seed)?, &InitialStateSet::ALL)
                })
                .collect()
        });
        {
            let mut have = self.cells.lock().expect("poisoned");
            for (k, c) in missing.iter().zip(computed) {
                let c = c?;
                self.record(&c.invariants);
                have.insert(key(k), Arc::new(c));
            }
        }
        let have = self.cells.lock().expect("poisoned");
        Ok(keys.iter().map(|k| Arc::clone(&have[&key(k)])).collect())
    }

    fn sweep_keys(&self, axis: Axis, seed: u64, lambda: f64) -> Vec<(Axis, f64, u64, f64)> {
        SWEEP_JX.iter().map(|&j| (axis, j, seed, lambda)).collect()
    }

    /// Computes every N-qubit cell the band criteria need in one batch.
    pub fn prefetch(&self) -> Result<()> {
        let lam = self.cfg.bath.lambda;
        let mut keys = Vec::new();
        for axis in [Axis::X, Axis::Z] {
            keys.extend(self.sweep_keys(axis, self.seed(), lam));
        }
        for s in self.ordering_seeds() {
            keys.extend(self.sweep_keys(Axis::X, s, lam));
        }
        for axis in [Axis::X, Axis::Z] {
            keys.extend(self.sweep_keys(axis, self.seed(), CALIBRATED_LAMBDA));
        }
        self.cells(&keys).map(|_| ())
    }

    fn small_opts(&self, model: &BenchmarkModel) -> PropagatorOptions {
        PropagatorOptions::for_schedule(&model.schedule, self.cfg.run.grid_points)
            .with_tolerances(self.cfg.run.rtol, self.cfg.run.atol)
    }

    /// Evaluates one criterion, timing it and converting errors to a
    /// failed outcome.
    pub fn evaluate(&self, id: u8) -> CriterionOutcome {
        let start = Instant::now();
        let res = match id {
            1 => self.c1_cnot(),
            2 => self.c2_closed_system(),
            3 => self.c3_ckd_oracle(),
            4 => self.c4_invariants(),
            5 => self.c5_purity_scale(),
            6 => self.c6_ordering(),
            7 => self.c7_zz_worst(),
            8 => self.c8_fidelity_magnitudes(),
            9 => self.c9_fidelity_agreement(),
            10 => self.c10_unitary_signature(),
            11 => self.c11_chaos(),
            12 => self.c12_oracles(),
            _ => Err(Error::arg(format!("no criterion {id}"))),
        };
        let (passed, error, detail) = match res {
            Ok((p, d)) => (p, false, d),
            Err(e) => (false, true, format!("error: {e}")),
        };
        CriterionOutcome {
            id,
            title: TITLES.get((id as usize).wrapping_sub(1)).copied().unwrap_or("unknown"),
            passed,
            error,
            detail,
            seconds: start.elapsed().as_secs_f64(),
        }
    }

    /// Runs criteria 1–12, reporting each outcome as it completes. The
    /// invariant suite runs last so that it covers every benchmark run.
    pub fn run_all(&self, mut report: impl FnMut(&CriterionOutcome)) -> Vec<CriterionOutcome> {
        let mut out = Vec::new();
        for id in [1, 2, 3, 12, 11, 5, 6, 7, 8, 9, 10, 4] {
            if id == 5 {
                if let Err(e) = self.prefetch() {
                    log::error!("prefetch failed: {e}");
                }
            }
            let o = self.evaluate(id);
            report(&o);
            out.push(o);
        }
        out.sort_by_key(|o| o.id);
        out
    }

    fn c1_cnot(&self) -> Result<(bool, String)> {
        let sched = build_pulse_schedule(&self.cfg.control_params())?;
        let opts = PropagatorOptions::for_schedule(&sched, 2).with_method(PropagationMethod::ExpmProduct);
        let mut worst: f64 = 1.0;
        let mut phases = Vec::new();
        for (i, target) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            let st = ideal_states(&sched, &StateVector::basis(4, i)?, &opts)?;
            let a = st.last().expect("grid").as_slice()[target];
            worst = worst.min(a.norm_sqr());
            phases.push(format!("{:.4}", a.arg()));
        }
        Ok((worst >= 1.0 - 1e-9, format!("min transfer {worst:.12}, phases [{}]", phases.join(", "))))
    }

    fn c2_closed_system(&self) -> Result<(bool, String)> {
        let mut cfg = self.cfg.clone();
        cfg.bath.n = 4;
        cfg.bath.lambda = 0.0;
        cfg.run.n_eig = cfg.run.n_eig.min(16);
        let mut worst: f64 = 0.0;
        for axis in [Axis::X, Axis::Z] {
            let inst = BathInstance::build(&cfg, axis, 1.0, self.seed())?;
            let cell = compare_instance(&inst, &InitialStateSet::ALL)?;
            self.record(&cell.invariants);
            let ch = inst.exact_channel()?;
            for set in InitialStateSet::ALL {
                for psi in set.states() {
                    let ideal = inst.ideal(&psi)?;
                    worst = worst.max(dist(&ch.evolution_for(&psi)?, &ideal)?).max(dist(&inst.ckd(&psi)?, &ideal)?);
                }
            }
            for r in &cell.records {
                for m in [&r.exact, &r.ckd] {
                    for v in m.purity_avg.iter().chain(&m.fidelity_avg) {
                        worst = worst.max((v - 1.0).abs());
                    }
                }
            }
        }
        Ok((worst <= 1e-9, format!("N=4, max deviation from ideal {worst:.2e}")))
    }

    fn c3_ckd_oracle(&self) -> Result<(bool, String)> {
        let bath = self.cfg.bath_params().with_n(2).with_j(1.0);
        let m = BenchmarkModel::new(self.cfg.control_params(), bath, self.seed())?;
        let h_b = m.bath_hamiltonian()?;
        // 0.2 H_B + 0.05 H_B² is diagonal in the bath eigenbasis
        let f = &h_b.scale(0.2) + &(&h_b * &h_b).scale(0.05);
        let s_op = m.system_coupling()?;
        let stat = &s_op.kron(&f) + &OperatorMatrix::identity(4).kron(&h_b);
        let gen = PiecewiseHamiltonian::from_schedule(&m.schedule, Some(&stat))?;
        let spec = diagonalize_bath(&h_b, 4)?;
        let w = thermal_populations(&spec, self.cfg.run.kt)?;
        let opts = self.small_opts(&m);
        let channel = ExactChannel::on_basis(&gen, &spec, &w, &opts)?;
        let ens = CkdEnsemble::new(vec![coupling_diagonals(&spec, &f)?], w, Some(bath.axis))?;
        let mut worst: f64 = 0.0;
        for set in InitialStateSet::ALL {
            for psi in set.states() {
                let ex = channel.evolution_for(&psi)?;
                let ck = ckd_reduced_density(&ens, std::slice::from_ref(&s_op), &m.schedule, &psi, &opts)?;
                worst = worst.max(dist(&ex, &ck)?);
            }
        }
        Ok((worst <= 1e-8, format!("N=2, max_t |rho_ckd - rho_exact|_max = {worst:.2e}")))
    }

    fn c4_invariants(&self) -> Result<(bool, String)> {
        let inv = *self.invariants.lock().expect("poisoned");
        let bad = inv.violations(&BenchmarkInvariants::default());
        let detail = format!(
            "trace {:.1e}, herm {:.1e}, min eig ckd {:.1e} (exact {:.1e}), max purity {:.12}, initial {:.1e}",
            inv.max_trace_error,
            inv.max_hermiticity_error,
            inv.min_eigenvalue_ckd,
            inv.min_eigenvalue_exact,
            inv.max_purity,
            inv.max_initial_metric_error
        );
        if inv.max_purity == f64::NEG_INFINITY {
            return Ok((false, "no benchmark runs recorded".into()));
        }
        Ok((bad.is_empty(), if bad.is_empty() { detail } else { format!("{detail}; violated: {}", bad.join(", ")) }))
    }

    fn c5_purity_scale(&self) -> Result<(bool, String)> {
        let lam = self.cfg.bath.lambda;
        let mut worst: f64 = 0.0;
        let mut parts = Vec::new();
        for axis in [Axis::X, Axis::Z] {
            for c in self.cells(&self.sweep_keys(axis, self.seed(), lam))? {
                let loss = averaged(&c).purity_exact.iter().map(|p| 1.0 - p).fold(0.0, f64::max);
                worst = worst.max(loss);
                parts.push(format!("{}{}:{loss:.4}", axis.coupling_label(), c.j_x));
            }
        }
        Ok((worst <= 0.015, format!("max_t 1-P_exact {} (band 0.015)", parts.join(" "))))
    }

    fn c6_ordering(&self) -> Result<(bool, String)> {
        let lam = self.cfg.bath.lambda;
        let seeds = self.ordering_seeds();
        let mut votes = 0;
        let mut parts = Vec::new();
        for &s in &seeds {
            let g: Vec<f64> = self.cells(&self.sweep_keys(Axis::X, s, lam))?.iter().map(|c| purity_gap(c)).collect();
            let ok = g[0] >= g[1] && g[1] >= g[2] && g[1] <= 2e-3 && g[2] <= 2e-3;
            votes += ok as usize;
            parts.push(format!("seed {s}: {} {}", fmt_list(&g), if ok { "ok" } else { "no" }));
        }
        Ok((2 * votes > seeds.len(), format!("{}/{} seeds; {}", votes, seeds.len(), parts.join("; "))))
    }

    fn c7_zz_worst(&self) -> Result<(bool, String)> {
        let c = self.cells(&self.sweep_keys(Axis::Z, self.seed(), self.cfg.bath.lambda))?;
        let (low, high) = (purity_gap(&c[0]), purity_gap(&c[2]));
        Ok((low >= 3.0 * high, format!("zz gap J=0.5 {low:.3e} vs J=2 {high:.3e} (ratio {:.1})", low / high)))
    }

    fn c8_fidelity_magnitudes(&self) -> Result<(bool, String)> {
        let final_f = |axis| -> Result<Vec<f64>> {
            Ok(self
                .cells(&self.sweep_keys(axis, self.seed(), CALIBRATED_LAMBDA))?
                .iter()
                .map(|c| *averaged(c).fidelity_exact.last().expect("grid"))
                .collect())
        };
        let (fx, fz) = (final_f(Axis::X)?, final_f(Axis::Z)?);
        let ok = fx.iter().all(|f| (0.05..=0.3).contains(f))
            && fz.iter().all(|f| (0.5..=0.9).contains(f))
            && spread(&fx) < spread(&fz);
        Ok((
            ok,
            format!(
                "lambda={CALIBRATED_LAMBDA}: xx F {} (spread {:.3}), zz F {} (spread {:.3})",
                fmt_list(&fx),
                spread(&fx),
                fmt_list(&fz),
                spread(&fz)
            ),
        ))
    }

    fn c9_fidelity_agreement(&self) -> Result<(bool, String)> {
        let mut worst: f64 = 0.0;
        let mut parts = Vec::new();
        for axis in [Axis::X, Axis::Z] {
            for c in self.cells(&self.sweep_keys(axis, self.seed(), self.cfg.bath.lambda))? {
                if c.j_x >= 1.0 {
                    let g = fidelity_gap(&c);
                    worst = worst.max(g);
                    parts.push(format!("{}{}:{g:.2e}", axis.coupling_label(), c.j_x));
                }
            }
        }
        Ok((worst <= 0.02, format!("max_t |F_ckd-F_exact| {}", parts.join(" "))))
    }

    fn c10_unitary_signature(&self) -> Result<(bool, String)> {
        let c = self.cells(&[(Axis::X, 1.0, self.seed(), self.cfg.bath.lambda)])?;
        let a = averaged(&c[0]);
        let (p, f) = (*a.purity_exact.last().expect("grid"), *a.fidelity_exact.last().expect("grid"));
        let fc = *a.fidelity_ckd.last().expect("grid");
        let pc = *a.purity_ckd.last().expect("grid");
        Ok((f < p - 0.05, format!("xx J=1: F(tau9)={f:.4} vs P(tau9)={p:.4} (ckd {fc:.4}/{pc:.4})")))
    }

    fn c11_chaos(&self) -> Result<(bool, String)> {
        let nnsd_at = |j: f64| -> Result<_> {
            let bath = self.cfg.bath_params().with_j(j);
            let m = BenchmarkModel::new(self.cfg.control_params(), bath, self.seed())?;
            nnsd(&full_spectrum(&m.bath_hamiltonian()?)?)
        };
        let (chaotic, integrable) = (nnsd_at(2.0)?, nnsd_at(0.0)?);
        let mean_suppression = |n: usize| -> Result<f64> {
            let levels = 16usize.min(1 << n);
            let vals: Vec<f64> = self.pool.install(|| {
                (0..SUPPRESSION_SEEDS as u64)
                    .into_par_iter()
                    .map(|k| {
                        let bath = self.cfg.bath_params().with_n(n).with_j(1.0);
                        let m = BenchmarkModel::new(self.cfg.control_params(), bath, self.seed() + k)?;
                        let spec = diagonalize_bath(&m.bath_hamiltonian()?, levels)?;
                        offdiag_suppression(&spec, &m.coupling_sum()?.compile())
                    })
                    .collect::<Result<_>>()
            })?;
            Ok(vals.iter().sum::<f64>() / vals.len() as f64)
        };
        let (s4, s10) = (mean_suppression(4)?, mean_suppression(self.cfg.bath.n)?);
        let ok = chaotic.closer_to_wigner() && !integrable.closer_to_wigner() && s10 < s4;
        Ok((
            ok,
            format!(
                "J=2 L1 W/P {:.3}/{:.3}; J=0 L1 W/P {:.3}/{:.3}; suppression N=4 {s4:.3} -> N={} {s10:.3}",
                chaotic.l1_wigner(),
                chaotic.l1_poisson(),
                integrable.l1_wigner(),
                integrable.l1_poisson(),
                self.cfg.bath.n
            ),
        ))
    }

    fn c12_oracles(&self) -> Result<(bool, String)> {
        let rk = |o: &PropagatorOptions| o.clone().with_method(PropagationMethod::AdaptiveRk);
        let ex = |o: &PropagatorOptions| o.clone().with_method(PropagationMethod::ExpmProduct);
        // CKD trajectories of the full benchmark bath
        let inst = BathInstance::build(&self.cfg, Axis::X, 1.0, self.seed())?;
        let sched = &inst.model.schedule;
        let mut traj: f64 = 0.0;
        for set in InitialStateSet::ALL {
            for psi in set.states() {
                let a = ckd_trajectories(&inst.ensemble, &inst.system_ops, sched, &psi, &ex(&inst.opts))?;
                let b = ckd_trajectories(&inst.ensemble, &inst.system_ops, sched, &psi, &rk(&inst.opts))?;
                for (ta, tb) in a.states.iter().zip(&b.states) {
                    for (x, y) in ta.iter().zip(tb) {
                        traj = traj.max(x.distance(y));
                    }
                }
            }
        }
        // N = 4 exact runs
        let mut small = self.cfg.clone();
        small.bath.n = 4;
        small.run.n_eig = small.run.n_eig.min(16);
        let mut exact: f64 = 0.0;
        for axis in [Axis::X, Axis::Z] {
            let s = BathInstance::build(&small, axis, 1.0, self.seed())?;
            let h = PiecewiseHamiltonian::benchmark(&s.model)?;
            let a = ExactChannel::on_basis(&h, &s.spectrum, &s.weights, &ex(&s.opts))?;
            let b = ExactChannel::on_basis(&h, &s.spectrum, &s.weights, &rk(&s.opts))?;
            for set in InitialStateSet::ALL {
                for psi in set.states() {
                    exact = exact.max(dist(&a.evolution_for(&psi)?, &b.evolution_for(&psi)?)?);
                }
            }
        }
        // linearity of the mixed-state path over each set
        let mut lin: f64 = 0.0;
        let w = [0.4, 0.3, 0.2, 0.1];
        for set in InitialStateSet::ALL {
            let states = set.states();
            let rho0 = DensityMatrix::mixture(&w.iter().copied().zip(states.iter().cloned()).collect::<Vec<_>>())?;
            let mixed = ckd_mixed_reduced_density(&inst.ensemble, &inst.system_ops, sched, &rho0, &inst.opts)?;
            let parts = states
                .iter()
                .map(|psi| ckd_reduced_density(&inst.ensemble, &inst.system_ops, sched, psi, &inst.opts))
                .collect::<Result<Vec<_>>>()?;
            for (i, rho) in mixed.rho.iter().enumerate() {
                let mut want = parts[0].rho[i].scaled(w[0]);
                for k in 1..4 {
                    want.add_scaled(w[k], &parts[k].rho[i]);
                }
                lin = lin.max(rho.max_abs_diff(&want));
            }
        }
        let ok = traj <= 1e-8 && exact <= 1e-8 && lin <= 1e-10;
        Ok((ok, format!("ckd trajectories {traj:.2e}, N=4 exact {exact:.2e}, mixed-path linearity {lin:.2e}")))
    }
}
