//! Scans the system-bath coupling scale λ with the CKD route.
//!
//! For a fixed seed the coupling constants ⟨n|Σ|n⟩ are linear in λ, so
//! one diagonalization per (axis, J_x) serves the whole scan. Prints the
//! set-averaged fidelity and purity loss at τ_9 and marks the λ values
//! that put xx fidelities in [0.05, 0.3] and zz fidelities in [0.5, 0.9].
//!
//! ```text
//! cargo run --release --example calibrate_lambda -- [seed] [n_bath] [lo] [hi] [step]
//! ```

use ckd_lab::experiment::BathInstance;
use ckd_lab::model::Config;
use ckd_lab::observables::{average_over_set, InitialStateSet, StateMetrics};
use ckd_lab::qop::Axis;

fn main() -> ckd_lab::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let seed: u64 = args.get(1).map_or(1, |s| s.parse().expect("seed"));
    let n: usize = args.get(2).map_or(10, |s| s.parse().expect("n_bath"));
    let mut cfg = Config::default();
    cfg.bath.n = n;
    cfg.bath.lambda = 1.0;
    cfg.run.grid_points = 50;
    let js = [0.5, 1.0, 2.0];
    let arg = |i: usize, d: f64| args.get(i).map_or(d, |s| s.parse().expect("number"));
    let (lo, hi, step) = (arg(3, 0.005), arg(4, 0.2), arg(5, 0.005));
    let count = ((hi - lo) / step).round() as usize;
    let lambdas: Vec<f64> = (0..=count).map(|i| lo + step * i as f64).collect();

    // unit[axis][j] = instance at λ = 1
    let mut unit = Vec::new();
    for axis in [Axis::X, Axis::Z] {
        let row: Vec<BathInstance> =
            js.iter().map(|&j| BathInstance::build(&cfg, axis, j, seed)).collect::<Result<_, _>>()?;
        unit.push(row);
    }

    println!("lambda  F_xx(0.5,1,2)          F_zz(0.5,1,2)          maxloss  ok");
    for &lam in &lambdas {
        let mut f = [[0.0; 3]; 2];
        let mut loss: f64 = 0.0;
        for (a, row) in unit.iter().enumerate() {
            for (k, inst) in row.iter().enumerate() {
                let mut scaled = inst.clone();
                scaled.ensemble.b_diag.iter_mut().flatten().for_each(|b| *b *= lam);
                let (mut fsum, mut psum) = (0.0, 0.0);
                for set in InitialStateSet::ALL {
                    let mut per = Vec::new();
                    for psi in set.states() {
                        per.push(StateMetrics::from_results(&scaled.ckd(&psi)?, &scaled.ideal(&psi)?)?);
                    }
                    let m = average_over_set(scaled.times(), per, set)?;
                    fsum += m.final_fidelity();
                    psum += m.purity_avg.iter().map(|p| 1.0 - p).fold(0.0, f64::max);
                }
                f[a][k] = fsum / 2.0;
                loss = loss.max(psum / 2.0);
            }
        }
        let spread = |v: &[f64; 3]| v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min);
        let ok = f[0].iter().all(|x| (0.05..=0.3).contains(x))
            && f[1].iter().all(|x| (0.5..=0.9).contains(x))
            && spread(&f[0]) < spread(&f[1]);
        println!(
            "{lam:.4}  {:.3} {:.3} {:.3}      {:.3} {:.3} {:.3}      {loss:.4}   {}",
            f[0][0], f[0][1], f[0][2], f[1][0], f[1][1], f[1][2], if ok { "*" } else { "" }
        );
    }
    Ok(())
}
