use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ckd_lab::experiment::acceptance::AcceptanceSuite;
use ckd_lab::experiment::{
    resolve_workers, run_compare, run_elements, run_nnsd, run_route, run_spectrum, Route, RunManifest, SweepPlan,
};
use ckd_lab::model::Config;
use ckd_lab::observables::InitialStateSet;
use ckd_lab::qop::Axis;
use ckd_lab::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_BAND: u8 = 4;

#[derive(Parser)]
#[command(name = "ckd-lab", version, about = "Exact versus chaotic-Kraus open-system CNOT benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    Xx,
    Zz,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum SetArg {
    Standard,
    Bell,
    Both,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML run configuration; defaults apply to missing keys
    #[arg(long)]
    config: Option<PathBuf>,
    /// Disorder seed (first seed of the sweep)
    #[arg(long)]
    seed: Option<u64>,
    /// Number of consecutive seeds starting at the first seed
    #[arg(long)]
    seeds: Option<usize>,
    /// Comma-separated bath couplings J_x
    #[arg(long, value_delimiter = ',')]
    jx: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    axis: Option<AxisArg>,
    #[arg(long = "set", value_enum)]
    set: Option<SetArg>,
    /// Output directory
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; CKD_LAB_THREADS takes precedence
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Exact reduced-density purity and fidelity per state
    Exact(Common),
    /// CKD reduced-density purity and fidelity per state
    Ckd(Common),
    /// Ideal (closed-system) evolution
    Ideal(Common),
    /// Exact versus CKD set averages with a summary of the gaps
    Compare(Common),
    /// One-qubit reduced elements for one initial state
    Elements {
        #[command(flatten)]
        common: Common,
        /// Initial state: 00, 01, 10, 11, phi+, phi-, psi+, psi-
        #[arg(long, default_value = "11")]
        state: String,
    },
    /// Lowest bath levels, thermal weights and coupling diagonals
    Spectrum(Common),
    /// Level-spacing histogram of the full bath spectrum
    Nnsd(Common),
    /// Runs the acceptance suite
    Accept(Common),
}

fn load(common: &Common) -> ckd_lab::Result<(Config, SweepPlan)> {
    let mut cfg = match &common.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Some(s) = common.seed {
        cfg.run.seed = s;
        cfg.sweep.seeds.clear();
    }
    let mut plan = SweepPlan::from_config(&cfg)?;
    if let Some(n) = common.seeds {
        if n == 0 {
            return Err(Error::Config("--seeds must be at least 1".into()));
        }
        let first = plan.seeds[0];
        plan.seeds = (first..first + n as u64).collect();
    }
    if let Some(j) = &common.jx {
        plan.jx = j.clone();
    }
    if let Some(a) = common.axis {
        plan.axes = match a {
            AxisArg::Xx => vec![Axis::X],
            AxisArg::Zz => vec![Axis::Z],
            AxisArg::Both => vec![Axis::X, Axis::Z],
        };
    }
    if let Some(s) = common.set {
        plan.sets = match s {
            SetArg::Standard => vec![InitialStateSet::Standard],
            SetArg::Bell => vec![InitialStateSet::Bell],
            SetArg::Both => InitialStateSet::ALL.to_vec(),
        };
    }
    plan.workers = resolve_workers(common.workers)?;
    Ok((cfg, plan))
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Argument(_) => EXIT_CONFIG,
        _ => EXIT_NUMERIC,
    }
}

fn report(m: &RunManifest, out: &std::path::Path) -> u8 {
    println!("{}: {} files in {}", m.command, m.outputs.len(), out.display());
    for f in &m.failures {
        eprintln!("failed: {}: {}", f.task, f.error);
    }
    match m.failures.iter().find(|f| f.numeric) {
        Some(_) => EXIT_NUMERIC,
        None if !m.failures.is_empty() => EXIT_CONFIG,
        None => 0,
    }
}

fn accept(common: &Common) -> ckd_lab::Result<u8> {
    let (cfg, plan) = load(common)?;
    let suite = AcceptanceSuite::new(plan.snapshot(&cfg), plan.workers)?;
    let outcomes = suite.run_all(|o| println!("{o}"));
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("acceptance: {passed}/{} criteria passed", outcomes.len());
    Ok(if outcomes.iter().any(|o| o.error) {
        EXIT_NUMERIC
    } else if passed < outcomes.len() {
        EXIT_BAND
    } else {
        0
    })
}

fn run(cli: Cli) -> ckd_lab::Result<u8> {
    let go = |common: &Common, f: &dyn Fn(&Config, &SweepPlan, &std::path::Path) -> ckd_lab::Result<RunManifest>| {
        let (cfg, plan) = load(common)?;
        let m = f(&cfg, &plan, &common.out)?;
        Ok(report(&m, &common.out))
    };
    match &cli.command {
        Command::Exact(c) => go(c, &|cfg, p, o| run_route(Route::Exact, cfg, p, o)),
        Command::Ckd(c) => go(c, &|cfg, p, o| run_route(Route::Ckd, cfg, p, o)),
        Command::Ideal(c) => go(c, &|cfg, p, o| run_route(Route::Ideal, cfg, p, o)),
        Command::Compare(c) => go(c, &run_compare),
        Command::Elements { common, state } => go(common, &|cfg, p, o| run_elements(cfg, p, state, o)),
        Command::Spectrum(c) => go(c, &run_spectrum),
        Command::Nnsd(c) => go(c, &run_nnsd),
        Command::Accept(c) => accept(c),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
