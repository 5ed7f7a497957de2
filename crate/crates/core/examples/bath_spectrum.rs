//! Lowest levels of one flawed-qubit bath: energies, thermal weights, the
//! coupling constants ⟨n|Σ_α|n⟩ for both axes and how far Σ_α is from
//! diagonal in the retained eigenbasis.
//!
//! ```text
//! cargo run --release --example bath_spectrum -- [Jx] [seed] [N] [n_eig]
//! ```

use ckd_lab::model::{BathParams, BenchmarkModel, Config};
use ckd_lab::qop::Axis;
use ckd_lab::spectra::{coupling_diagonals, diagonalize_bath, offdiag_suppression, thermal_populations};

fn main() -> ckd_lab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cfg = Config::default();
    let j: f64 = args.first().map_or(1.0, |s| s.parse().expect("Jx"));
    let seed: u64 = args.get(1).map_or(cfg.run.seed, |s| s.parse().expect("seed"));
    let n: usize = args.get(2).map_or(cfg.bath.n, |s| s.parse().expect("N"));
    let n_eig: usize = args.get(3).map_or(cfg.run.n_eig, |s| s.parse().expect("n_eig"));

    let bath = BathParams { n_bath: n, ..cfg.bath_params() }.with_j(j);
    let xx = BenchmarkModel::new(cfg.control_params(), bath.with_axis(Axis::X), seed)?;
    let zz = BenchmarkModel::new(cfg.control_params(), bath.with_axis(Axis::Z), seed)?;
    let spec = diagonalize_bath(&xx.bath_hamiltonian()?, n_eig)?;
    let w = thermal_populations(&spec, cfg.run.kt)?;
    let bx = coupling_diagonals(&spec, &xx.coupling_sum()?.compile())?;
    let bz = coupling_diagonals(&spec, &zz.coupling_sum()?.compile())?;

    println!("N={n} Jx={j} seed={seed} lambda={} kT={}", bath.lambda, cfg.run.kt);
    println!("  n        E_n          p_n       B_xx         B_zz      residual");
    for k in 0..spec.n_eig() {
        println!(
            "{k:3} {:12.6} {:12.4e} {:+11.6} {:+11.6} {:9.1e}",
            spec.energies()[k],
            w.p[k],
            bx.values[k],
            bz.values[k],
            spec.residuals()[k]
        );
    }
    for (label, m) in [("xx", &xx), ("zz", &zz)] {
        println!(
            "{label}: off-diagonal/diagonal RMS ratio = {:.4}",
            offdiag_suppression(&spec, &m.coupling_sum()?.compile())?
        );
    }
    if !bx.cluster_sizes.is_empty() {
        println!("degenerate clusters: {:?}", bx.cluster_sizes);
    }
    Ok(())
}
