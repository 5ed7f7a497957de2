//! One-qubit reduced density elements during the gate for a single input,
//! from the ideal, exact and CKD routes side by side.
//!
//! ```text
//! cargo run --release --example reduced_elements -- [state] [xx|zz] [Jx] [N]
//! ```

use ckd_lab::experiment::BathInstance;
use ckd_lab::model::Config;
use ckd_lab::observables::{named_state, single_qubit_elements};
use ckd_lab::qop::Axis;

fn main() -> ckd_lab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let state = args.first().map_or("11", String::as_str);
    let axis: Axis = args.get(1).map_or(Ok(Axis::X), |s| s.parse())?;
    let j: f64 = args.get(2).map_or(1.0, |s| s.parse().expect("Jx"));
    let mut cfg = Config::default();
    cfg.bath.n = args.get(3).map_or(6, |s| s.parse().expect("N"));
    cfg.run.grid_points = 13;
    cfg.run.n_eig = cfg.run.n_eig.min(1 << cfg.bath.n);

    let psi = named_state(state)?;
    let inst = BathInstance::build(&cfg, axis, j, cfg.run.seed)?;
    let ideal = inst.ideal(&psi)?;
    let ckd = inst.ckd(&psi)?;
    let exact = inst.exact_channel()?.evolution_for(&psi)?;

    println!("|{state}> {} Jx={j} N={}", axis.coupling_label(), cfg.bath.n);
    println!("       t  q  route   rho00    rho11   Re rho01  Im rho01");
    for (k, t) in inst.times().iter().enumerate() {
        for q in [1, 2] {
            for (route, r) in [("ideal", &ideal), ("exact", &exact), ("ckd", &ckd)] {
                let e = single_qubit_elements(&r.rho[k], q)?;
                println!(
                    "{t:8.3}  {q}  {route:5} {:8.5} {:8.5} {:+9.5} {:+9.5}",
                    e.rho00, e.rho11, e.re01, e.im01
                );
            }
        }
    }
    Ok(())
}
