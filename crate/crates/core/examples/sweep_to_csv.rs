//! Writes a small compare sweep to a directory, then re-reads the manifest
//! and one CSV from disk.
//!
//! ```text
//! cargo run --release --example sweep_to_csv -- [out_dir] [N]
//! ```

use std::path::PathBuf;

use ckd_lab::experiment::{run_compare, CsvTable, RunManifest, SweepPlan, MANIFEST_FILE};
use ckd_lab::model::Config;

fn main() -> ckd_lab::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out = PathBuf::from(args.first().map_or("sweep_out", String::as_str));
    let mut cfg = Config::default();
    cfg.bath.n = args.get(1).map_or(4, |s| s.parse().expect("N"));
    cfg.run.grid_points = 60;
    cfg.run.n_eig = cfg.run.n_eig.min(1 << cfg.bath.n);
    cfg.sweep.seeds = vec![1, 2];

    let plan = SweepPlan::from_config(&cfg)?;
    let m = run_compare(&cfg, &plan, &out)?;
    println!("{} outputs, {} failures", m.outputs.len(), m.failures.len());

    let loaded = RunManifest::load(&out.join(MANIFEST_FILE))?;
    loaded.verify(&out)?;
    println!("manifest verified, config hash {}", loaded.config_hash);

    let first = loaded.outputs.iter().find(|o| o.path.ends_with(".csv")).expect("a csv output");
    let t = CsvTable::read(&out.join(&first.path))?;
    println!("{}: {} rows, columns {:?}", first.path, t.rows.len(), t.columns);
    for (k, v) in &t.meta {
        println!("  # {k}={v}");
    }
    Ok(())
}
