use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use ckd_lab::experiment::{
    compare_cell, run_compare, run_elements, run_nnsd, run_route, run_spectrum, BathInstance, CsvTable, Route,
    RunManifest, SweepPlan, CONFIG_SNAPSHOT, MANIFEST_FILE,
};
use ckd_lab::model::Config;
use ckd_lab::observables::InitialStateSet;
use ckd_lab::qop::Axis;

fn small() -> Config {
    let mut cfg = Config::default();
    cfg.bath.n = 3;
    cfg.run.n_eig = 8;
    cfg.run.grid_points = 25;
    cfg.sweep.jx = vec![0.5, 2.0];
    cfg
}

fn plan(cfg: &Config, workers: usize) -> SweepPlan {
    let mut p = SweepPlan::from_config(cfg).unwrap();
    p.workers = Some(workers);
    p
}

fn csv_files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "csv") {
                let key = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(key, std::fs::read(&p).unwrap());
            }
        }
    }
    out
}

#[test]
fn compare_is_deterministic_and_thread_independent() {
    let cfg = small();
    let (a, b, c) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_compare(&cfg, &plan(&cfg, 1), a.path()).unwrap();
    run_compare(&cfg, &plan(&cfg, 1), b.path()).unwrap();
    run_compare(&cfg, &plan(&cfg, 3), c.path()).unwrap();
    let (fa, fb, fc) = (csv_files(a.path()), csv_files(b.path()), csv_files(c.path()));
    assert_eq!(fa.len(), 2 * 2 * 2);
    assert_eq!(fa, fb);
    assert_eq!(fa, fc);
}

#[test]
fn manifest_lists_every_output() {
    let mut cfg = small();
    cfg.sweep.seeds = vec![4, 5];
    let dir = tempfile::tempdir().unwrap();
    let m = run_compare(&cfg, &plan(&cfg, 2), dir.path()).unwrap();
    assert!(m.is_success());
    assert_eq!(m.seeds, vec![4, 5]);
    let loaded = RunManifest::load(&dir.path().join(MANIFEST_FILE)).unwrap();
    loaded.verify(dir.path()).unwrap();
    assert!(loaded.outputs.iter().any(|o| o.path == CONFIG_SNAPSHOT));
    assert!(loaded.outputs.iter().any(|o| o.path.starts_with("seed_5/compare_")));
    let snap = Config::load(&dir.path().join(CONFIG_SNAPSHOT)).unwrap();
    assert_eq!(snap.hash(), loaded.config_hash);

    std::fs::write(dir.path().join("stray.txt"), "x").unwrap();
    assert!(loaded.verify(dir.path()).is_err());
    std::fs::remove_file(dir.path().join("stray.txt")).unwrap();
    let victim = dir.path().join(&loaded.outputs[1].path);
    std::fs::write(&victim, "tampered").unwrap();
    assert!(loaded.verify(dir.path()).is_err());
}

#[test]
fn csv_headers_carry_provenance() {
    let cfg = small();
    let dir = tempfile::tempdir().unwrap();
    let mut p = plan(&cfg, 1);
    p.jx = vec![1.0];
    p.axes = vec![Axis::Z];
    p.sets = vec![InitialStateSet::Bell];
    run_compare(&cfg, &p, dir.path()).unwrap();
    let t = CsvTable::read(&dir.path().join("compare_zz_1_bell.csv")).unwrap();
    for key in ["config_hash", "seed", "lambda", "n_eig", "kT", "N", "axis", "Jx", "switch_times"] {
        assert!(t.meta(key).is_some(), "missing {key}");
    }
    assert_eq!(t.meta("n_eig"), Some("8"));
    assert_eq!(t.columns, ["t", "purity_exact", "purity_ckd", "fidelity_exact", "fidelity_ckd"]);
    assert!(t.rows.len() >= 25);
    assert_eq!(t.meta("switch_times").unwrap().split(';').count(), 10);
}

#[test]
fn uncoupled_bath_leaves_the_gate_ideal() {
    let mut cfg = small();
    cfg.bath.lambda = 0.0;
    for axis in [Axis::X, Axis::Z] {
        let cell = compare_cell(&cfg, axis, 1.0, 1, &InitialStateSet::ALL).unwrap();
        for r in &cell.records {
            for m in [&r.exact, &r.ckd] {
                assert!(m.purity_avg.iter().all(|p| (p - 1.0).abs() <= 1e-9));
                assert!(m.fidelity_avg.iter().all(|f| (f - 1.0).abs() <= 1e-9));
            }
        }
    }
}

#[test]
fn set_averages_start_at_one() {
    let cfg = small();
    let cell = compare_cell(&cfg, Axis::X, 0.5, 2, &InitialStateSet::ALL).unwrap();
    for r in &cell.records {
        for m in [&r.exact, &r.ckd] {
            assert!((m.purity_avg[0] - 1.0).abs() <= 1e-12);
            assert!((m.fidelity_avg[0] - 1.0).abs() <= 1e-12);
            assert!(m.purity_avg.iter().all(|&p| p <= 1.0 + 1e-9));
        }
    }
    assert!(cell.invariants.violations(&Default::default()).is_empty());
}

#[test]
fn grid_refinement_leaves_observables_unchanged() {
    let mut coarse = small();
    coarse.run.grid_points = 21;
    let mut fine = coarse.clone();
    fine.run.grid_points = 41;
    let psi = InitialStateSet::Bell.states()[2].clone();
    let a = BathInstance::build(&coarse, Axis::X, 1.0, 3).unwrap();
    let b = BathInstance::build(&fine, Axis::X, 1.0, 3).unwrap();
    let (ra, rb) = (a.ckd(&psi).unwrap(), b.ckd(&psi).unwrap());
    let mut matched = 0;
    for (k, t) in a.times().iter().enumerate() {
        let j = b.times().iter().position(|s| s == t).unwrap();
        assert!(ra.rho[k].max_abs_diff(&rb.rho[j]) <= 1e-10);
        matched += 1;
    }
    assert_eq!(matched, a.times().len());
}

#[test]
fn elements_start_from_the_prepared_state() {
    let cfg = small();
    let dir = tempfile::tempdir().unwrap();
    let mut p = plan(&cfg, 1);
    p.jx = vec![1.0];
    p.axes = vec![Axis::X];
    run_elements(&cfg, &p, "11", dir.path()).unwrap();
    run_elements(&cfg, &p, "phi+", dir.path()).unwrap();

    let t = CsvTable::read(&dir.path().join("elements_xx_1_11.csv")).unwrap();
    for route in ["ideal", "exact", "ckd"] {
        let col = |n: &str| t.column(&format!("{route}_q1_{n}")).unwrap()[0];
        assert!(col("rho00").abs() <= 1e-12);
        assert!((col("rho11") - 1.0).abs() <= 1e-12);
    }
    let t = CsvTable::read(&dir.path().join("elements_xx_1_phi+.csv")).unwrap();
    for route in ["ideal", "exact", "ckd"] {
        for q in ["q1", "q2"] {
            let col = |n: &str| t.column(&format!("{route}_{q}_{n}")).unwrap()[0];
            assert!((col("rho00") - 0.5).abs() <= 1e-12);
            assert!(col("re_rho01").abs() <= 1e-12);
        }
    }
    // Ideal CNOT maps |11⟩ to |10⟩: qubit 1 stays in |1⟩.
    let t = CsvTable::read(&dir.path().join("elements_xx_1_11.csv")).unwrap();
    let last = t.rows.len() - 1;
    assert!((t.column("ideal_q1_rho11").unwrap()[last] - 1.0).abs() <= 1e-9);
    assert!(t.column("ideal_q2_rho00").unwrap()[last] > 1.0 - 1e-9);
}

#[test]
fn route_spectrum_and_nnsd_outputs() {
    let cfg = small();
    let dir = tempfile::tempdir().unwrap();
    let mut p = plan(&cfg, 1);
    p.jx = vec![1.0];
    p.axes = vec![Axis::Z];
    p.sets = vec![InitialStateSet::Standard];
    run_route(Route::Ckd, &cfg, &p, dir.path()).unwrap();
    let t = CsvTable::read(&dir.path().join("ckd_zz_1_standard.csv")).unwrap();
    assert_eq!(&t.columns[..3], ["t", "purity_avg", "fidelity_avg"]);
    assert_eq!(t.columns.len(), 3 + 8);

    let ideal = tempfile::tempdir().unwrap();
    run_route(Route::Ideal, &cfg, &p, ideal.path()).unwrap();
    let t = CsvTable::read(&ideal.path().join("ideal_standard.csv")).unwrap();
    assert!(t.column("purity_avg").unwrap().iter().all(|p| (p - 1.0).abs() <= 1e-9));

    let sd = tempfile::tempdir().unwrap();
    run_spectrum(&cfg, &p, sd.path()).unwrap();
    let t = CsvTable::read(&sd.path().join("spectrum_1.csv")).unwrap();
    assert_eq!(t.rows.len(), 8);
    let p_n = t.column("p_n").unwrap();
    assert!((p_n.iter().sum::<f64>() - 1.0).abs() <= 1e-14);
    assert!(t.column("residual").unwrap().iter().all(|&r| r <= 1e-10));

    let mut big = cfg.clone();
    big.bath.n = 8;
    let nd = tempfile::tempdir().unwrap();
    run_nnsd(&big, &p, nd.path()).unwrap();
    let t = CsvTable::read(&nd.path().join("nnsd_1.csv")).unwrap();
    assert_eq!(t.columns, ["bin_center", "density", "wigner_ref", "poisson_ref"]);
    let width = t.rows[1][0] - t.rows[0][0];
    let mass: f64 = t.column("density").unwrap().iter().map(|d| d * width).sum();
    assert!(mass > 0.9 && mass <= 1.0 + 1e-12);
}

fn cli(args: &[&str], threads: Option<&str>) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ckd-lab"));
    cmd.args(args).env_remove("CKD_LAB_THREADS");
    if let Some(t) = threads {
        cmd.env("CKD_LAB_THREADS", t);
    }
    let out = cmd.output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("small.toml");
    std::fs::write(&cfg_path, small().to_toml_string()).unwrap();
    let cfg = cfg_path.to_str().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let (code, stdout) = cli(&["compare", "--config", cfg, "--jx", "1", "--axis", "zz", "--out", out], None);
    assert_eq!(code, 0, "{stdout}");
    RunManifest::load(&Path::new(out).join(MANIFEST_FILE)).unwrap().verify(Path::new(out)).unwrap();

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[bath]\nN = 3\nbogus = 1\n").unwrap();
    assert_eq!(cli(&["spectrum", "--config", bad.to_str().unwrap(), "--out", out], None).0, 2);
    assert_eq!(cli(&["ideal", "--config", cfg, "--out", out], Some("zero")).0, 2);
    assert_eq!(cli(&["elements", "--config", cfg, "--state", "nope", "--out", out], None).0, 2);
    assert_eq!(cli(&["ideal", "--config", cfg, "--seeds", "0", "--out", out], None).0, 2);
    assert_eq!(cli(&["ideal", "--config", cfg, "--out", out], Some("2")).0, 0);
}
