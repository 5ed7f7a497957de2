//! Nearest-neighbour spacing statistics of the full bath spectrum as the
//! intra-bath coupling grows, with L1 distances to the Wigner surmise and
//! to the Poisson law.
//!
//! ```text
//! cargo run --release --example level_statistics -- [seed] [N] [Jx ...]
//! ```

use ckd_lab::model::{sample_disorder, BathParams, BenchmarkModel, Config};
use ckd_lab::spectra::{full_spectrum, nnsd};

fn main() -> ckd_lab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cfg = Config::default();
    let seed: u64 = args.first().map_or(cfg.run.seed, |s| s.parse().expect("seed"));
    let n: usize = args.get(1).map_or(cfg.bath.n, |s| s.parse().expect("N"));
    let mut js: Vec<f64> = args.iter().skip(2).map(|s| s.parse().expect("Jx")).collect();
    if js.is_empty() {
        js = vec![0.0, 0.25, 0.5, 1.0, 2.0];
    }

    println!("seed={seed} N={n}");
    println!("   Jx   L1(Wigner)  L1(Poisson)  closer to");
    for j in js {
        let bath = BathParams { n_bath: n, ..cfg.bath_params() }.with_j(j);
        let model = BenchmarkModel::with_disorder(cfg.control_params(), bath, sample_disorder(&bath, seed))?;
        let levels = full_spectrum(&model.bath_hamiltonian()?)?;
        let h = nnsd(&levels)?;
        println!(
            "{j:5.2} {:11.4} {:12.4}  {}",
            h.l1_wigner(),
            h.l1_poisson(),
            if h.closer_to_wigner() { "Wigner" } else { "Poisson" }
        );
    }
    Ok(())
}
