use rayon::prelude::*;
use std::path::Path;
use std::sync::Arc;

use super::compare::compare_instance;
use super::instance::{BathInstance, BenchmarkInvariants};
use super::manifest::{sha256_hex, unix_now, OutputEntry, RunManifest, TaskFailure, CONFIG_SNAPSHOT};
use super::table::CsvTable;
use crate::dynamics::{exact_reduced_density, EvolutionResult};
use crate::model::{build_pulse_schedule, sample_disorder, BenchmarkModel, Config};
use crate::observables::{average_over_set, named_state, single_qubit_elements, InitialStateSet, StateMetrics};
use crate::qop::Axis;
use crate::spectra::{
    coupling_diagonals, diagonalize_bath, full_spectrum, nnsd, thermal_populations, NNSD_BINS, NNSD_MAX_SPACING,
    UNFOLDING_WINDOW,
};
use crate::{Error, Result};

/// Overrides `--workers`.
pub const THREADS_ENV: &str = "CKD_LAB_THREADS";

/// Worker count: `CKD_LAB_THREADS` if set, else `cli`, else rayon's default.
pub fn resolve_workers(cli: Option<usize>) -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(cli),
    }
}

pub fn worker_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
}

/// Seeds, couplings, axes and state sets to sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPlan {
    pub seeds: Vec<u64>,
    pub jx: Vec<f64>,
    pub axes: Vec<Axis>,
    pub sets: Vec<InitialStateSet>,
    pub workers: Option<usize>,
}

impl SweepPlan {
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let sets = cfg
            .sweep
            .sets
            .iter()
            .map(|s| s.parse::<InitialStateSet>().map_err(|e| Error::Config(e.to_string())))
            .collect::<Result<_>>()?;
        Ok(Self { seeds: cfg.seeds(), jx: cfg.sweep.jx.clone(), axes: cfg.sweep.axes.clone(), sets, workers: None })
    }

    /// `cfg` with its sweep section replaced by this plan.
    pub fn snapshot(&self, cfg: &Config) -> Config {
        let mut c = cfg.clone();
        c.sweep.seeds = self.seeds.clone();
        c.sweep.jx = self.jx.clone();
        c.sweep.axes = self.axes.clone();
        c.sweep.sets = self.sets.iter().map(|s| s.label().to_string()).collect();
        c
    }

    fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() || self.jx.is_empty() || self.axes.is_empty() || self.sets.is_empty() {
            return Err(Error::Config("empty sweep".into()));
        }
        if self.jx.iter().any(|&j| !(j >= 0.0 && j.is_finite())) {
            return Err(Error::Config("J_x values must be non-negative".into()));
        }
        Ok(())
    }
}

/// A file produced by a task, relative to the output directory.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub path: String,
    pub contents: String,
}

#[derive(Clone, Debug, Default)]
pub struct TaskOutput {
    pub artifacts: Vec<Artifact>,
    pub summary: Option<serde_json::Value>,
}

type TaskFn = Box<dyn Fn(&Context) -> Result<TaskOutput> + Send + Sync>;

struct Task {
    label: String,
    run: TaskFn,
}

/// Run-wide provenance shared by every task.
pub struct Context {
    pub cfg: Config,
    pub config_hash: String,
    switch_times: String,
    multi_seed: bool,
}

impl Context {
    fn new(cfg: Config, multi_seed: bool) -> Result<Self> {
        let sched = build_pulse_schedule(&cfg.control_params())?;
        let switch_times = sched.switch_times().iter().map(|t| format!("{t:e}")).collect::<Vec<_>>().join(";");
        Ok(Self { config_hash: cfg.hash(), cfg, switch_times, multi_seed })
    }

    fn stamp(&self, t: &mut CsvTable, seed: Option<u64>, axis: Option<Axis>, j_x: Option<f64>) {
        t.set_meta("config_hash", &self.config_hash);
        t.set_meta("version", env!("CARGO_PKG_VERSION"));
        if let Some(s) = seed {
            t.set_meta("seed", s);
        }
        t.set_meta("lambda", format!("{:e}", self.cfg.bath.lambda));
        t.set_meta("n_eig", self.cfg.run.n_eig);
        t.set_meta("kT", format!("{:e}", self.cfg.run.kt));
        t.set_meta("N", self.cfg.bath.n);
        if let Some(a) = axis {
            t.set_meta("axis", a.coupling_label());
        }
        if let Some(j) = j_x {
            t.set_meta("Jx", j);
        }
        t.set_meta("switch_times", &self.switch_times);
    }

    fn path(&self, seed: u64, name: String) -> String {
        if self.multi_seed {
            format!("seed_{seed}/{name}")
        } else {
            name
        }
    }

    fn artifact(&self, seed: u64, name: String, table: &CsvTable) -> Result<Artifact> {
        Ok(Artifact { path: self.path(seed, name), contents: table.to_csv_string()? })
    }
}

fn execute(command: &str, cfg: &Config, plan: &SweepPlan, out: &Path, tasks: Vec<Task>) -> Result<RunManifest> {
    plan.validate()?;
    let snapshot = plan.snapshot(cfg);
    snapshot.validate()?;
    let ctx = Context::new(snapshot.clone(), plan.seeds.len() > 1)?;
    let pool = worker_pool(plan.workers)?;
    let started = unix_now();
    let results: Vec<Result<TaskOutput>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|t| {
                log::info!("{command}: {}", t.label);
                (t.run)(&ctx)
            })
            .collect()
    });
    std::fs::create_dir_all(out)?;
    let mut outputs = Vec::new();
    let mut emit = |path: String, contents: &str| -> Result<()> {
        let full = out.join(&path);
        if let Some(dir) = full.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(&full, contents)?;
        outputs.push(OutputEntry { path, sha256: sha256_hex(contents.as_bytes()) });
        Ok(())
    };
    emit(CONFIG_SNAPSHOT.into(), &snapshot.to_toml_string())?;
    let mut summaries = Vec::new();
    let mut failures = Vec::new();
    for (task, res) in tasks.iter().zip(results) {
        match res {
            Ok(o) => {
                for a in o.artifacts {
                    emit(a.path, &a.contents)?;
                }
                summaries.extend(o.summary);
            }
            Err(e) => {
                log::error!("{command}: {} failed: {e}", task.label);
                let numeric = !matches!(e, Error::Config(_) | Error::Argument(_));
                failures.push(TaskFailure { task: task.label.clone(), error: e.to_string(), numeric });
            }
        }
    }
    if !summaries.is_empty() {
        emit(format!("{command}_summary.json"), &(serde_json::to_string_pretty(&summaries)? + "\n"))?;
    }
    let manifest = RunManifest {
        command: command.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: ctx.config_hash.clone(),
        config: snapshot,
        seeds: plan.seeds.clone(),
        jx: plan.jx.clone(),
        axes: plan.axes.iter().map(|a| a.coupling_label().to_string()).collect(),
        sets: plan.sets.iter().map(|s| s.label().to_string()).collect(),
        workers: pool.current_num_threads(),
        started_unix: started,
        finished_unix: unix_now(),
        outputs,
        failures,
    };
    manifest.write(out)?;
    Ok(manifest)
}

fn cells(plan: &SweepPlan) -> Vec<(u64, Axis, f64)> {
    let mut v = Vec::new();
    for &seed in &plan.seeds {
        for &axis in &plan.axes {
            for &j in &plan.jx {
                v.push((seed, axis, j));
            }
        }
    }
    v
}

fn seed_j(plan: &SweepPlan) -> Vec<(u64, f64)> {
    plan.seeds.iter().flat_map(|&s| plan.jx.iter().map(move |&j| (s, j))).collect()
}

/// `compare_{axis}_{Jx}_{set}.csv` for every cell plus `compare_summary.json`.
pub fn run_compare(cfg: &Config, plan: &SweepPlan, out: &Path) -> Result<RunManifest> {
    let sets = Arc::new(plan.sets.clone());
    let tasks = cells(plan)
        .into_iter()
        .map(|(seed, axis, j)| {
            let sets = Arc::clone(&sets);
            Task {
                label: format!("compare seed={seed} axis={} Jx={j}", axis.coupling_label()),
                run: Box::new(move |ctx: &Context| {
                    let inst = BathInstance::build(&ctx.cfg, axis, j, seed)?;
                    let cell = compare_instance(&inst, &sets)?;
                    let bad = cell.invariants.violations(&BenchmarkInvariants::default());
                    if !bad.is_empty() {
                        return Err(Error::Numeric(format!("invariants violated: {}", bad.join(", "))));
                    }
                    let mut artifacts = Vec::new();
                    for r in &cell.records {
                        let mut t = r.to_table()?;
                        ctx.stamp(&mut t, Some(seed), Some(axis), Some(j));
                        t.set_meta("set", r.set.label());
                        t.set_meta("max_dpurity", format!("{:e}", r.max_dpurity));
                        t.set_meta("max_dfidelity", format!("{:e}", r.max_dfidelity));
                        let name = format!("compare_{}_{j}_{}.csv", axis.coupling_label(), r.set.label());
                        artifacts.push(ctx.artifact(seed, name, &t)?);
                    }
                    let summary = serde_json::json!({
                        "axis": axis.coupling_label(),
                        "j_x": j,
                        "seed": seed,
                        "lambda": cell.lambda,
                        "cluster_sizes": cell.cluster_sizes,
                        "invariants": cell.invariants,
                        "records": cell.records.iter().map(|r| r.summary()).collect::<Vec<_>>(),
                    });
                    Ok(TaskOutput { artifacts, summary: Some(summary) })
                }),
            }
        })
        .collect();
    execute("compare", cfg, plan, out, tasks)
}

/// Which reduced density a route subcommand writes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Exact,
    Ckd,
    Ideal,
}

impl Route {
    pub fn label(self) -> &'static str {
        match self {
            Route::Exact => "exact",
            Route::Ckd => "ckd",
            Route::Ideal => "ideal",
        }
    }
}

fn route_table(times: &[f64], set: InitialStateSet, per_state: Vec<StateMetrics>) -> Result<CsvTable> {
    let mut cols = vec!["t".to_string(), "purity_avg".into(), "fidelity_avg".into()];
    for l in set.state_labels() {
        cols.push(format!("purity_{l}"));
        cols.push(format!("fidelity_{l}"));
    }
    let avg = average_over_set(times, per_state, set)?;
    let mut t = CsvTable::new(cols);
    for i in 0..times.len() {
        let mut row = vec![times[i], avg.purity_avg[i], avg.fidelity_avg[i]];
        for m in &avg.per_state {
            row.push(m.purity[i]);
            row.push(m.fidelity[i]);
        }
        t.push_row(row)?;
    }
    Ok(t)
}

/// Per-state and set-averaged purity and fidelity of one route:
/// `{route}_{axis}_{Jx}_{set}.csv`, or `ideal_{set}.csv`.
pub fn run_route(route: Route, cfg: &Config, plan: &SweepPlan, out: &Path) -> Result<RunManifest> {
    let sets = Arc::new(plan.sets.clone());
    let tasks: Vec<Task> = if route == Route::Ideal {
        plan.sets
            .iter()
            .map(|&set| Task {
                label: format!("ideal set={}", set.label()),
                run: Box::new(move |ctx: &Context| {
                    let sched = build_pulse_schedule(&ctx.cfg.control_params())?;
                    let opts = crate::dynamics::PropagatorOptions::for_schedule(&sched, ctx.cfg.run.grid_points)
                        .with_tolerances(ctx.cfg.run.rtol, ctx.cfg.run.atol);
                    let mut per_state = Vec::new();
                    for psi in set.states() {
                        let r = crate::dynamics::ideal_evolution(&sched, &psi, &opts)?;
                        per_state.push(StateMetrics::from_results(&r, &r)?);
                    }
                    let mut t = route_table(&opts.grid, set, per_state)?;
                    ctx.stamp(&mut t, None, None, None);
                    t.set_meta("set", set.label());
                    Ok(TaskOutput {
                        artifacts: vec![Artifact { path: format!("ideal_{}.csv", set.label()), contents: t.to_csv_string()? }],
                        summary: None,
                    })
                }),
            })
            .collect()
    } else {
        cells(plan)
            .into_iter()
            .map(|(seed, axis, j)| {
                let sets = Arc::clone(&sets);
                Task {
                    label: format!("{} seed={seed} axis={} Jx={j}", route.label(), axis.coupling_label()),
                    run: Box::new(move |ctx: &Context| {
                        let inst = BathInstance::build(&ctx.cfg, axis, j, seed)?;
                        let channel = if route == Route::Exact { Some(inst.exact_channel()?) } else { None };
                        let mut artifacts = Vec::new();
                        for &set in sets.iter() {
                            let mut per_state = Vec::new();
                            for psi in set.states() {
                                let ideal = inst.ideal(&psi)?;
                                let r: EvolutionResult = match &channel {
                                    Some(ch) => ch.evolution_for(&psi)?,
                                    None => inst.ckd(&psi)?,
                                };
                                per_state.push(StateMetrics::from_results(&r, &ideal)?);
                            }
                            let mut t = route_table(inst.times(), set, per_state)?;
                            ctx.stamp(&mut t, Some(seed), Some(axis), Some(j));
                            t.set_meta("set", set.label());
                            let name = format!("{}_{}_{j}_{}.csv", route.label(), axis.coupling_label(), set.label());
                            artifacts.push(ctx.artifact(seed, name, &t)?);
                        }
                        Ok(TaskOutput { artifacts, summary: None })
                    }),
                }
            })
            .collect()
    };
    execute(route.label(), cfg, plan, out, tasks)
}

/// Column names of the elements table: `t`, then for each route
/// (ideal, exact, ckd) and qubit (1, 2) the diagonal populations and the
/// real and imaginary coherence.
pub fn element_columns() -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    for route in ["ideal", "exact", "ckd"] {
        for q in 1..=2 {
            for e in ["rho00", "rho11", "re_rho01", "im_rho01"] {
                cols.push(format!("{route}_q{q}_{e}"));
            }
        }
    }
    cols
}

/// The eight one-qubit elements per route for a named initial state:
/// `elements_{axis}_{Jx}_{state}.csv`.
pub fn run_elements(cfg: &Config, plan: &SweepPlan, state: &str, out: &Path) -> Result<RunManifest> {
    let psi0 = named_state(state)?;
    let state = state.to_string();
    let tasks = cells(plan)
        .into_iter()
        .map(|(seed, axis, j)| {
            let (psi0, state) = (psi0.clone(), state.clone());
            Task {
                label: format!("elements seed={seed} axis={} Jx={j} state={state}", axis.coupling_label()),
                run: Box::new(move |ctx: &Context| {
                    let inst = BathInstance::build(&ctx.cfg, axis, j, seed)?;
                    let ideal = inst.ideal(&psi0)?;
                    let exact = exact_reduced_density(&inst.model, &inst.spectrum, &inst.weights, &psi0, &inst.opts)?;
                    let ckd = inst.ckd(&psi0)?;
                    let mut t = CsvTable::new(element_columns());
                    let mut gap: f64 = 0.0;
                    for i in 0..inst.times().len() {
                        let mut row = vec![inst.times()[i]];
                        for r in [&ideal, &exact, &ckd] {
                            for q in 1..=2 {
                                let e = single_qubit_elements(&r.rho[i], q)?;
                                row.extend([e.rho00, e.rho11, e.re01, e.im01]);
                            }
                        }
                        gap = (0..8).map(|k| (row[9 + k] - row[17 + k]).abs()).fold(gap, f64::max);
                        t.push_row(row)?;
                    }
                    ctx.stamp(&mut t, Some(seed), Some(axis), Some(j));
                    t.set_meta("state", &state);
                    t.set_meta("max_gap_exact_ckd", format!("{gap:e}"));
                    let name = format!("elements_{}_{j}_{state}.csv", axis.coupling_label());
                    Ok(TaskOutput {
                        artifacts: vec![ctx.artifact(seed, name, &t)?],
                        summary: Some(serde_json::json!({
                            "axis": axis.coupling_label(), "j_x": j, "seed": seed, "state": state, "max_gap_exact_ckd": gap,
                        })),
                    })
                }),
            }
        })
        .collect();
    execute("elements", cfg, plan, out, tasks)
}

/// Lowest bath levels with thermal weights and both coupling diagonals:
/// `spectrum_{Jx}.csv`.
pub fn run_spectrum(cfg: &Config, plan: &SweepPlan, out: &Path) -> Result<RunManifest> {
    let tasks = seed_j(plan)
        .into_iter()
        .map(|(seed, j)| Task {
            label: format!("spectrum seed={seed} Jx={j}"),
            run: Box::new(move |ctx: &Context| {
                let c = &ctx.cfg;
                let diag = |axis: Axis| -> Result<_> {
                    let m = BenchmarkModel::new(c.control_params(), c.bath_params().with_j(j).with_axis(axis), seed)?;
                    let spec = diagonalize_bath(&m.bath_hamiltonian()?, c.run.n_eig)?;
                    let d = coupling_diagonals(&spec, &m.coupling_sum()?.compile())?;
                    Ok((spec, d))
                };
                let (spec, bxx) = diag(Axis::X)?;
                let (_, bzz) = diag(Axis::Z)?;
                let w = thermal_populations(&spec, c.run.kt)?;
                let mut t = CsvTable::new(["n", "E_n", "p_n", "B_xx_diag", "B_zz_diag", "residual"]);
                for n in 0..spec.n_eig() {
                    t.push_row(vec![
                        n as f64,
                        spec.energies()[n],
                        w.p[n],
                        bxx.values[n],
                        bzz.values[n],
                        spec.residuals()[n],
                    ])?;
                }
                ctx.stamp(&mut t, Some(seed), None, Some(j));
                let mut clusters = bxx.cluster_sizes.clone();
                clusters.extend(&bzz.cluster_sizes);
                t.set_meta("degenerate_clusters", format!("{clusters:?}"));
                Ok(TaskOutput { artifacts: vec![ctx.artifact(seed, format!("spectrum_{j}.csv"), &t)?], summary: None })
            }),
        })
        .collect();
    execute("spectrum", cfg, plan, out, tasks)
}

/// Nearest-neighbor spacing histogram of the full bath spectrum with the
/// Wigner and Poisson references: `nnsd_{Jx}.csv`.
pub fn run_nnsd(cfg: &Config, plan: &SweepPlan, out: &Path) -> Result<RunManifest> {
    let tasks = seed_j(plan)
        .into_iter()
        .map(|(seed, j)| Task {
            label: format!("nnsd seed={seed} Jx={j}"),
            run: Box::new(move |ctx: &Context| {
                let c = &ctx.cfg;
                let bath = c.bath_params().with_j(j);
                let d = sample_disorder(&bath, seed);
                let m = BenchmarkModel::with_disorder(c.control_params(), bath, d)?;
                let h = nnsd(&full_spectrum(&m.bath_hamiltonian()?)?)?;
                let mut t = CsvTable::new(["bin_center", "density", "wigner_ref", "poisson_ref"]);
                for i in 0..h.bin_centers.len() {
                    t.push_row(vec![h.bin_centers[i], h.density[i], h.wigner_ref[i], h.poisson_ref[i]])?;
                }
                ctx.stamp(&mut t, Some(seed), None, Some(j));
                t.set_meta("unfolding_window", UNFOLDING_WINDOW);
                t.set_meta("bins", NNSD_BINS);
                t.set_meta("max_spacing", NNSD_MAX_SPACING);
                t.set_meta("n_spacings", h.n_spacings);
                t.set_meta("overflow", h.overflow);
                t.set_meta("l1_wigner", format!("{:e}", h.l1_wigner()));
                t.set_meta("l1_poisson", format!("{:e}", h.l1_poisson()));
                Ok(TaskOutput {
                    artifacts: vec![ctx.artifact(seed, format!("nnsd_{j}.csv"), &t)?],
                    summary: Some(serde_json::json!({
                        "seed": seed, "j_x": j, "l1_wigner": h.l1_wigner(), "l1_poisson": h.l1_poisson(),
                        "closer_to_wigner": h.closer_to_wigner(),
                    })),
                })
            }),
        })
        .collect();
    execute("nnsd", cfg, plan, out, tasks)
}
