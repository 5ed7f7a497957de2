mod common;

use ckd_lab::experiment::CsvTable;
use ckd_lab::model::{build_pulse_schedule, sample_disorder, BathParams, BenchmarkModel, Config, ControlParams};
use ckd_lab::observables::{fidelity, purity};
use ckd_lab::qop::{
    matrix_exponential, partial_trace, pauli_on_qubit, Axis, DensityMatrix, OperatorMatrix, PauliSum, QubitLayout,
    StateVector,
};
use ckd_lab::spectra::{coupling_diagonals, diagonalize_bath, thermal_populations};
use ckd_lab::C64;
use common::c;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn axis() -> impl Strategy<Value = Axis> {
    prop_oneof![Just(Axis::X), Just(Axis::Z)]
}

fn random_state(dim: usize, parts: &[(f64, f64)]) -> StateVector {
    let amps: Vec<C64> = (0..dim).map(|i| c(parts[i].0, parts[i].1)).collect();
    StateVector::from_slice(&amps).unwrap().normalized().unwrap()
}

/// Mixture of `k` random pure states with random weights.
fn random_density(dim: usize, seeds: &[(f64, f64)], weights: &[f64]) -> DensityMatrix {
    let total: f64 = weights.iter().sum();
    let states: Vec<(f64, StateVector)> = weights
        .iter()
        .enumerate()
        .map(|(k, w)| (w / total, random_state(dim, &seeds[k * dim..(k + 1) * dim])))
        .collect();
    DensityMatrix::mixture(&states).unwrap()
}

fn random_hermitian(dim: usize, entries: &[(f64, f64)]) -> OperatorMatrix {
    let a = DMatrix::from_fn(dim, dim, |i, j| c(entries[i * dim + j].0, entries[i * dim + j].1));
    OperatorMatrix::new((&a + a.adjoint()) * c(0.5, 0.0), true).unwrap()
}

fn pairs(n: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pauli_embedding_matches_index_arithmetic(n in 1usize..=6, q in 1usize..=6, ax in axis()) {
        let q = q.min(n);
        let layout = QubitLayout::register(n).unwrap();
        let op = pauli_on_qubit(ax, q, &layout).unwrap();
        let dim = 1usize << n;
        let bit = n - q;
        for col in 0..dim {
            let b = (col >> bit) & 1;
            let (row, val) = match ax {
                Axis::X => (col ^ (1 << bit), c(1.0, 0.0)),
                Axis::Z => (col, c(if b == 0 { 1.0 } else { -1.0 }, 0.0)),
            };
            for r in 0..dim {
                let want = if r == row { val } else { c(0.0, 0.0) };
                prop_assert_eq!(op.get(r, col), want);
            }
        }
    }

    #[test]
    fn partial_trace_preserves_trace(
        n in 2usize..=5,
        mask in 1usize..32,
        seeds in pairs(3 * 32),
        weights in prop::collection::vec(0.05..1.0f64, 3),
    ) {
        let layout = QubitLayout::register(n).unwrap();
        let rho = random_density(1 << n, &seeds, &weights);
        let mut keep: Vec<usize> = (1..=n).filter(|q| mask & (1 << (q - 1)) != 0).collect();
        if keep.is_empty() {
            keep.push(1);
        }
        let red = partial_trace(&rho, &keep, &layout).unwrap();
        prop_assert!((red.trace() - rho.trace()).norm() <= 1e-14);
        let all: Vec<usize> = (1..=n).rev().collect();
        let same = partial_trace(&rho, &all, &layout).unwrap();
        prop_assert!(same.max_abs_diff(&rho) == 0.0);
    }

    #[test]
    fn exponential_is_unitary(dim in 1usize..=32, entries in pairs(32 * 32), dt in -16.0..16.0f64) {
        let h = random_hermitian(dim, &entries);
        let u = matrix_exponential(&h, dt).unwrap();
        prop_assert!(u.unitarity_error() <= 1e-12, "unitarity error {}", u.unitarity_error());
    }

    #[test]
    fn real_combinations_stay_hermitian(
        dim in 1usize..=16,
        a in pairs(256),
        b in pairs(256),
        wa in -3.0..3.0f64,
        wb in -3.0..3.0f64,
    ) {
        let ha = random_hermitian(dim, &a);
        let hb = random_hermitian(dim, &b);
        let sum = ha.scale(wa).matrix() + hb.scale(wb).matrix();
        let op = OperatorMatrix::detect_hermitian(sum, 1e-13).unwrap();
        prop_assert!(op.is_hermitian());
        prop_assert!(op.hermiticity_error() <= 1e-13);
    }

    #[test]
    fn pauli_sums_are_real_symmetric(
        n in 1usize..=5,
        terms in prop::collection::vec((axis(), 1usize..=5, axis(), 1usize..=5, -2.0..2.0f64), 1..12),
    ) {
        let layout = QubitLayout::register(n).unwrap();
        let mut s = PauliSum::new(&layout);
        for (a1, q1, a2, q2, w) in terms {
            let (q1, q2) = (q1.min(n), q2.min(n));
            if q1 == q2 {
                s.add_single(a1, q1, w, &layout).unwrap();
            } else {
                s.add_string(&[(a1, q1), (a2, q2)], w, &layout).unwrap();
            }
        }
        let op = s.to_dense();
        prop_assert!(op.hermiticity_error() <= 1e-13);
        prop_assert!(op.matrix().iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn density_purity_and_fidelity(
        seeds in pairs(4 * 16),
        weights in prop::collection::vec(0.01..1.0f64, 1..=4),
        other in pairs(16),
    ) {
        let rho = random_density(16, &seeds, &weights);
        let sigma = DensityMatrix::from_state(&random_state(16, &other));
        let p = purity(&rho);
        prop_assert!(p <= 1.0 + 1e-12 && p >= 1.0 / 16.0 - 1e-12);
        prop_assert!(rho.min_eigenvalue() >= -1e-12);
        prop_assert!((rho.trace().re - 1.0).abs() <= 1e-12);
        prop_assert_eq!(fidelity(&rho, &sigma).unwrap(), fidelity(&sigma, &rho).unwrap());
        prop_assert!((purity(&sigma) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn csv_round_trip_is_exact(
        rows in prop::collection::vec(prop::collection::vec(prop::num::f64::NORMAL | prop::num::f64::ZERO, 3), 0..20),
        seed in any::<u64>(),
    ) {
        let mut t = CsvTable::new(["a", "b", "c"]).with_meta("seed", seed);
        for r in &rows {
            t.push_row(r.clone()).unwrap();
        }
        let back = CsvTable::parse(&t.to_csv_string().unwrap()).unwrap();
        prop_assert_eq!(&back.rows, &t.rows);
        prop_assert_eq!(back.meta("seed").map(str::to_owned), Some(seed.to_string()));
    }

    #[test]
    fn schedule_tiles_the_gate(bx in 0.2..3.0f64, bz in 0.2..3.0f64, jx in 0.01..1.0f64) {
        let s = build_pulse_schedule(&ControlParams { b_x: bx, b_z: bz, j_x: jx }).unwrap();
        let segs = s.segments();
        prop_assert_eq!(segs.len(), 9);
        prop_assert_eq!(segs[0].t_start, 0.0);
        for w in segs.windows(2) {
            prop_assert_eq!(w[0].t_end, w[1].t_start);
        }
        let total: f64 = segs.iter().map(|g| g.duration).sum();
        prop_assert!((total - s.total_time()).abs() <= 1e-14 * total.max(1.0) * 4.0);
        prop_assert!(s.segments().iter().all(|g| g.hamiltonian().hermiticity_error() <= 1e-13));
    }

    #[test]
    fn coupling_constants_are_linear_in_lambda(seed in any::<u64>(), n in 1usize..=6, scale in 0.1..4.0f64) {
        let base = BathParams { n_bath: n, ..BathParams::default() };
        let d1 = sample_disorder(&base, seed);
        let d2 = sample_disorder(&base.with_lambda(base.lambda * scale), seed);
        prop_assert_eq!(&d1.b_x, &d2.b_x);
        prop_assert_eq!(&d1.j, &d2.j);
        for (a, b) in d1.lambda.iter().zip(&d2.lambda) {
            prop_assert!((a * scale - b).abs() <= 1e-15 * scale.max(1.0));
            prop_assert!(a.abs() <= base.lambda);
        }
        prop_assert_eq!(sample_disorder(&base, seed), d1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn bath_spectrum_invariants(
        seed in any::<u64>(),
        n in 2usize..=6,
        j in 0.0..2.0f64,
        kt in 0.05..5.0f64,
        ax in axis(),
    ) {
        let bath = BathParams { n_bath: n, j_x: j, axis: ax, ..BathParams::default() };
        let model = BenchmarkModel::new(ControlParams::default(), bath, seed).unwrap();
        let h = model.bath_hamiltonian().unwrap();
        prop_assert!(h.matrix().iter().all(|z| z.im == 0.0));
        prop_assert!(h.hermiticity_error() <= 1e-13);
        let n_eig = (1usize << n).min(20);
        let spec = diagonalize_bath(&h, n_eig).unwrap();
        prop_assert!(spec.residuals().iter().all(|&r| r <= 1e-10));
        prop_assert!(spec.energies().windows(2).all(|w| w[0] <= w[1]));
        let w = thermal_populations(&spec, kt).unwrap();
        prop_assert!((w.p.iter().sum::<f64>() - 1.0).abs() <= 1e-14);
        prop_assert!(w.p.windows(2).all(|p| p[0] >= p[1]));
        let sum = model.coupling_sum().unwrap();
        let dense = coupling_diagonals(&spec, &sum.to_dense()).unwrap();
        let sparse = coupling_diagonals(&spec, &sum.compile()).unwrap();
        for (a, b) in dense.values.iter().zip(&sparse.values) {
            prop_assert!((a - b).abs() <= 1e-11);
        }
    }

    #[test]
    fn clean_bath_is_free_spins(n in 1usize..=6, b0x in 0.1..2.0f64, b0z in 0.1..2.0f64) {
        let bath = BathParams { n_bath: n, b0_x: b0x, b0_z: b0z, detuning: 0.0, j_x: 0.0, lambda: 0.0, axis: Axis::X };
        let model = BenchmarkModel::new(ControlParams::default(), bath, 7).unwrap();
        let dim = 1usize << n;
        let spec = diagonalize_bath(&model.bath_hamiltonian().unwrap(), dim).unwrap();
        let half = 0.5 * (b0x * b0x + b0z * b0z).sqrt();
        let mut want: Vec<f64> = (0..dim)
            .map(|m| (0..n).map(|k| if m >> k & 1 == 1 { half } else { -half }).sum())
            .collect();
        want.sort_by(f64::total_cmp);
        for (e, w) in spec.energies().iter().zip(&want) {
            prop_assert!((e - w).abs() <= 1e-12, "{e} vs {w}");
        }
    }
}

#[test]
fn config_round_trips_through_toml() {
    let mut cfg = Config::default();
    cfg.bath.n = 6;
    cfg.sweep.seeds = vec![3, 4];
    cfg.bath.lambda = 0.0375;
    let back = Config::from_toml_str(&cfg.to_toml_string()).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.hash(), cfg.hash());
    let zz = Config::from_toml_str("[bath]\naxis = \"zz\"\n").unwrap();
    assert_eq!(zz.bath.axis, Axis::Z);
    assert_eq!(Config::from_toml_str("[bath]\naxis = \"z\"\n").unwrap(), zz);
}
