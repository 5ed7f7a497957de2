//! Exact versus CKD set-averaged purity and fidelity for one benchmark cell.
//!
//! ```text
//! cargo run --release --example compare_purity_fidelity -- [xx|zz] [Jx] [seed] [lambda] [N]
//! ```

use ckd_lab::experiment::{compare_cell, BenchmarkInvariants};
use ckd_lab::model::Config;
use ckd_lab::observables::InitialStateSet;
use ckd_lab::qop::Axis;

fn main() -> ckd_lab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let axis: Axis = args.first().map_or(Ok(Axis::X), |s| s.parse())?;
    let j: f64 = args.get(1).map_or(1.0, |s| s.parse().expect("Jx"));
    let seed: u64 = args.get(2).map_or(1, |s| s.parse().expect("seed"));
    let mut cfg = Config::default();
    cfg.bath.lambda = args.get(3).map_or(cfg.bath.lambda, |s| s.parse().expect("lambda"));
    cfg.bath.n = args.get(4).map_or(cfg.bath.n, |s| s.parse().expect("N"));

    let start = std::time::Instant::now();
    let cell = compare_cell(&cfg, axis, j, seed, &InitialStateSet::ALL)?;
    println!(
        "{} J={j} seed={seed} lambda={} N={} ({:.1} s)",
        axis.coupling_label(),
        cfg.bath.lambda,
        cfg.bath.n,
        start.elapsed().as_secs_f64()
    );
    for r in &cell.records {
        println!(
            "  {:8} max|dP|={:.2e} max|dF|={:.2e} max(1-P_exact)={:.4} P(tau9) exact/ckd={:.4}/{:.4} F(tau9) exact/ckd={:.4}/{:.4}",
            r.set.label(),
            r.max_dpurity,
            r.max_dfidelity,
            r.max_purity_loss(),
            r.exact.final_purity(),
            r.ckd.final_purity(),
            r.exact.final_fidelity(),
            r.ckd.final_fidelity()
        );
    }
    let bad = cell.invariants.violations(&BenchmarkInvariants::default());
    println!("  invariants: {}", if bad.is_empty() { "ok".to_string() } else { bad.join(", ") });
    Ok(())
}
