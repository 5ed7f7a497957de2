//! Runs the nine-segment pulse sequence on the computational basis and the
//! Bell states with no bath, and prints the output populations.
//!
//! ```text
//! cargo run --release --example cnot_truth_table -- [Bx] [Bz] [Jx]
//! ```

use ckd_lab::dynamics::{ideal_states, PropagationMethod, PropagatorOptions};
use ckd_lab::model::{build_pulse_schedule, ControlParams};
use ckd_lab::observables::InitialStateSet;

fn main() -> ckd_lab::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).map(|s| s.parse().expect("number")).collect();
    let d = ControlParams::default();
    let cp = ControlParams {
        b_x: args.first().copied().unwrap_or(d.b_x),
        b_z: args.get(1).copied().unwrap_or(d.b_z),
        j_x: args.get(2).copied().unwrap_or(d.j_x),
    };
    let schedule = build_pulse_schedule(&cp)?;
    println!("tau_9 = {:.12}", schedule.total_time());
    for (k, seg) in schedule.segments().iter().enumerate() {
        println!("  segment {} [{:9.5}, {:9.5}]", k + 1, seg.t_start, seg.t_end);
    }

    let opts = PropagatorOptions::for_schedule(&schedule, 2).with_method(PropagationMethod::ExpmProduct);
    let basis = InitialStateSet::Standard.states();
    println!("input    |<00|out>|^2 |<01|out>|^2 |<10|out>|^2 |<11|out>|^2  global phase");
    for set in InitialStateSet::ALL {
        for (label, psi) in set.state_labels().iter().zip(set.states()) {
            let out = ideal_states(&schedule, &psi, &opts)?.pop().expect("final state");
            let pops: Vec<f64> = basis.iter().map(|b| b.inner(&out).norm_sqr()).collect();
            let lead = out.as_slice().iter().find(|a| a.norm() > 1e-6).expect("nonzero state");
            print!("|{label:4}>");
            for p in &pops {
                print!(" {p:12.9}");
            }
            println!("  {:+.6} rad", lead.arg());
        }
    }
    Ok(())
}
