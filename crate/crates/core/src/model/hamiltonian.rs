use super::disorder::{sample_disorder, DisorderRealization};
use super::params::{BathParams, ControlParams};
use super::schedule::{build_pulse_schedule, PulseSchedule};
use crate::qop::{Axis, OperatorMatrix, PauliSum, QubitLayout};
use crate::{Error, Result};

fn check_sizes(params: &BathParams, d: &DisorderRealization, layout: &QubitLayout) -> Result<()> {
    if layout.n_bath() != params.n_bath || d.n_bath() != params.n_bath {
        return Err(Error::arg(format!(
            "bath size mismatch: params N={}, realization N={}, layout N={}",
            params.n_bath,
            d.n_bath(),
            layout.n_bath()
        )));
    }
    Ok(())
}

/// `Ĥ_B = −½ Σ_k (B_k^x σ_x^k + B_k^z σ_z^k) + Σ_{a<b} J_ab σ_x^a σ_x^b` as a
/// Pauli sum on `target`, with bath-local qubit `k` placed at register qubit
/// `offset + k + 1`.
fn bath_terms(d: &DisorderRealization, target: &QubitLayout, offset: usize) -> Result<PauliSum> {
    let mut s = PauliSum::new(target);
    for k in 0..d.n_bath() {
        let q = offset + k + 1;
        s.add_single(Axis::X, q, -0.5 * d.b_x[k], target)?;
        s.add_single(Axis::Z, q, -0.5 * d.b_z[k], target)?;
    }
    for (a, b, j) in d.pairs() {
        s.add_string(&[(Axis::X, offset + a + 1), (Axis::X, offset + b + 1)], j, target)?;
    }
    Ok(s)
}

/// Bath Hamiltonian as a Pauli sum on the `N`-qubit bath factor.
pub fn bath_pauli_sum(params: &BathParams, d: &DisorderRealization, layout: &QubitLayout) -> Result<PauliSum> {
    check_sizes(params, d, layout)?;
    bath_terms(d, &layout.bath_factor()?, 0)
}

/// Bath coupling operator `Σ̂_α = Σ_k λ_k σ_α^k` on the bath factor.
pub fn bath_coupling_sum(params: &BathParams, d: &DisorderRealization, layout: &QubitLayout) -> Result<PauliSum> {
    check_sizes(params, d, layout)?;
    let bath = layout.bath_factor()?;
    let mut s = PauliSum::new(&bath);
    for (k, &l) in d.lambda.iter().enumerate() {
        s.add_single(params.axis, k + 1, l, &bath)?;
    }
    Ok(s)
}

/// Dense `Ĥ_B` on the `2^N`-dimensional bath factor.
pub fn build_bath_hamiltonian(
    params: &BathParams,
    d: &DisorderRealization,
    layout: &QubitLayout,
) -> Result<OperatorMatrix> {
    Ok(bath_pauli_sum(params, d, layout)?.to_dense())
}

/// `Ĥ_SB = Σ_μ Ŝ_μ ⊗ B̂_μ`; the benchmark has the single term
/// `(σ_α¹ + σ_α²) ⊗ Σ̂_α`.
#[derive(Clone, Debug)]
pub struct Interaction {
    pub system_ops: Vec<OperatorMatrix>,
    pub bath_ops: Vec<OperatorMatrix>,
}

impl Interaction {
    /// Dense `Σ_μ Ŝ_μ ⊗ B̂_μ` on the full register.
    pub fn full_operator(&self) -> OperatorMatrix {
        let dim = self.system_ops[0].dim() * self.bath_ops[0].dim();
        self.system_ops
            .iter()
            .zip(&self.bath_ops)
            .fold(OperatorMatrix::zeros(dim), |acc, (s, b)| &acc + &s.kron(b))
    }
}

pub fn build_interaction(
    params: &BathParams,
    d: &DisorderRealization,
    layout: &QubitLayout,
) -> Result<Interaction> {
    let sys = layout.system_factor()?;
    let mut s = PauliSum::new(&sys);
    for q in 1..=sys.n_qubits() {
        s.add_single(params.axis, q, 1.0, &sys)?;
    }
    Ok(Interaction {
        system_ops: vec![s.to_dense()],
        bath_ops: vec![bath_coupling_sum(params, d, layout)?.to_dense()],
    })
}

/// All ingredients of one benchmark instance: controls, bath draw, layout
/// and pulse schedule.
#[derive(Clone, Debug)]
pub struct BenchmarkModel {
    pub control: ControlParams,
    pub bath: BathParams,
    pub disorder: DisorderRealization,
    pub layout: QubitLayout,
    pub schedule: PulseSchedule,
}

impl BenchmarkModel {
    pub fn new(control: ControlParams, bath: BathParams, seed: u64) -> Result<Self> {
        let disorder = sample_disorder(&bath, seed);
        Self::with_disorder(control, bath, disorder)
    }

    pub fn with_disorder(control: ControlParams, bath: BathParams, disorder: DisorderRealization) -> Result<Self> {
        bath.validate()?;
        let layout = QubitLayout::new(2, bath.n_bath)?;
        check_sizes(&bath, &disorder, &layout)?;
        Ok(Self {
            schedule: build_pulse_schedule(&control)?,
            control,
            bath,
            disorder,
            layout,
        })
    }

    pub fn bath_sum(&self) -> Result<PauliSum> {
        bath_pauli_sum(&self.bath, &self.disorder, &self.layout)
    }

    pub fn coupling_sum(&self) -> Result<PauliSum> {
        bath_coupling_sum(&self.bath, &self.disorder, &self.layout)
    }

    pub fn bath_hamiltonian(&self) -> Result<OperatorMatrix> {
        build_bath_hamiltonian(&self.bath, &self.disorder, &self.layout)
    }

    pub fn interaction(&self) -> Result<Interaction> {
        build_interaction(&self.bath, &self.disorder, &self.layout)
    }

    /// The system coupling operator `Ŝ = σ_α¹ + σ_α²` on the 2-qubit register.
    pub fn system_coupling(&self) -> Result<OperatorMatrix> {
        Ok(self.interaction()?.system_ops.remove(0))
    }

    /// Time-independent part `Ĥ_SB + Ĥ_B` on the full register.
    pub fn static_sum(&self) -> Result<PauliSum> {
        let full = &self.layout;
        let mut s = bath_terms(&self.disorder, full, full.n_system())?;
        for q in full.system_qubits() {
            for (k, &l) in self.disorder.lambda.iter().enumerate() {
                let b = full.n_system() + k + 1;
                s.add_string(&[(self.bath.axis, q), (self.bath.axis, b)], l, full)?;
            }
        }
        Ok(s)
    }

    /// Full-register Hamiltonian of each control segment plus the static part.
    pub fn segment_sums(&self) -> Result<Vec<PauliSum>> {
        let stat = self.static_sum()?;
        self.schedule
            .segments()
            .iter()
            .map(|seg| {
                let mut s = seg.pauli_sum(&self.layout)?;
                s.extend(&stat)?;
                Ok(s)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qop::{kron, pauli_on_qubit, StateVector};
    use nalgebra::DMatrix;

    fn params(n: usize) -> BathParams {
        BathParams::default().with_n(n)
    }

    fn fixed(b_x: Vec<f64>, b_z: Vec<f64>, j: Vec<f64>, lambda: Vec<f64>) -> DisorderRealization {
        DisorderRealization { seed: 0, b_x, b_z, j, lambda }
    }

    #[test]
    fn single_spin_bath_spectrum() {
        let (bx, bz) = (0.9, 1.15);
        let d = fixed(vec![bx], vec![bz], vec![], vec![0.0]);
        let l = QubitLayout::new(2, 1).unwrap();
        let h = build_bath_hamiltonian(&params(1), &d, &l).unwrap();
        let ev = h.matrix().clone().symmetric_eigenvalues();
        let r = 0.5 * (bx * bx + bz * bz).sqrt();
        let mut ev: Vec<f64> = ev.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!((ev[0] + r).abs() < 1e-14 && (ev[1] - r).abs() < 1e-14);
    }

    #[test]
    fn pure_xx_pair_spectrum() {
        let j = 0.3;
        let d = fixed(vec![0.0; 2], vec![0.0; 2], vec![j], vec![0.0; 2]);
        let l = QubitLayout::new(2, 2).unwrap();
        let h = build_bath_hamiltonian(&params(2), &d, &l).unwrap();
        let mut ev: Vec<f64> = h.matrix().clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        for (e, x) in ev.iter().zip([-j, -j, j, j]) {
            assert!((e - x).abs() < 1e-14);
        }
    }

    /// Loop over basis states, applying each Pauli by hand.
    fn bath_by_basis_loop(d: &DisorderRealization) -> DMatrix<f64> {
        let n = d.n_bath();
        let dim = 1 << n;
        let bit = |k: usize| n - 1 - k;
        let mut m = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            for k in 0..n {
                let up = (col >> bit(k)) & 1 == 0;
                m[(col, col)] += -0.5 * d.b_z[k] * if up { 1.0 } else { -1.0 };
                m[(col ^ (1 << bit(k)), col)] += -0.5 * d.b_x[k];
            }
            for a in 0..n {
                for b in a + 1..n {
                    m[(col ^ (1 << bit(a)) ^ (1 << bit(b)), col)] += d.j_pair(a, b);
                }
            }
        }
        m
    }

    #[test]
    fn seeded_bath_matches_basis_loop() {
        let p = params(4).with_j(1.3);
        let d = sample_disorder(&p, 21);
        let l = QubitLayout::new(2, 4).unwrap();
        let h = build_bath_hamiltonian(&p, &d, &l).unwrap();
        let oracle = bath_by_basis_loop(&d);
        let diff = h.matrix().map(|z| z.re) - oracle;
        assert!(diff.amax() < 1e-15);
        assert!(h.matrix().iter().all(|z| z.im == 0.0));
        assert!(h.hermiticity_error() < 1e-13);
    }

    #[test]
    fn free_spin_spectrum_without_disorder() {
        let p = BathParams { detuning: 0.0, j_x: 0.0, lambda: 0.0, ..params(3) };
        let d = sample_disorder(&p, 1);
        let l = QubitLayout::new(2, 3).unwrap();
        let h = build_bath_hamiltonian(&p, &d, &l).unwrap();
        let mut ev: Vec<f64> = h.matrix().clone().symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        let r = 0.5 * 2f64.sqrt();
        let mut expected: Vec<f64> = (0..8u32)
            .map(|m| (0..3).map(|k| if (m >> k) & 1 == 1 { r } else { -r }).sum())
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn z_coupling_single_bath_qubit() {
        let p = BathParams { axis: Axis::Z, ..params(1) };
        let d = fixed(vec![1.0], vec![1.0], vec![], vec![0.2]);
        let l = QubitLayout::new(2, 1).unwrap();
        let int = build_interaction(&p, &d, &l).unwrap();
        let b = &int.bath_ops[0];
        assert!((b.get(0, 0).re - 0.2).abs() < 1e-16 && (b.get(1, 1).re + 0.2).abs() < 1e-16);
        let s = &int.system_ops[0];
        let diag: Vec<f64> = (0..4).map(|i| s.get(i, i).re).collect();
        assert_eq!(diag, vec![2.0, 0.0, 0.0, -2.0]);
    }

    #[test]
    fn zero_lambda_decouples() {
        let p = BathParams { lambda: 0.0, ..params(3) };
        let d = sample_disorder(&p, 4);
        let l = QubitLayout::new(2, 3).unwrap();
        let int = build_interaction(&p, &d, &l).unwrap();
        assert!(int.bath_ops[0].matrix().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn static_sum_equals_dense_kron_assembly() {
        let p = params(3).with_j(0.8).with_lambda(0.1);
        let d = sample_disorder(&p, 12);
        let m = BenchmarkModel::with_disorder(ControlParams::default(), p, d).unwrap();
        let int = m.interaction().unwrap();
        let hb = m.bath_hamiltonian().unwrap();
        let id4 = OperatorMatrix::identity(4);
        let expected = &int.full_operator() + &id4.kron(&hb);
        assert!(m.static_sum().unwrap().to_dense().max_abs_diff(&expected) < 1e-14);
        // the first segment adds −½Bz σz² on the register
        let seg0 = m.segment_sums().unwrap()[0].to_dense();
        let z2 = pauli_on_qubit(Axis::Z, 2, &m.layout).unwrap().scale(-0.5);
        assert!(seg0.max_abs_diff(&(&expected + &z2)) < 1e-14);
    }

    #[test]
    fn interaction_is_kron_of_factors() {
        let p = params(3).with_lambda(0.2);
        let d = sample_disorder(&p, 2);
        let l = QubitLayout::new(2, 3).unwrap();
        let int = build_interaction(&p, &d, &l).unwrap();
        let oracle = kron(int.system_ops[0].matrix(), int.bath_ops[0].matrix());
        assert_eq!(int.full_operator().matrix(), &oracle);
        let psi = StateVector::basis(8, 0).unwrap();
        assert!(int.bath_ops[0].matrix_element(&psi, &psi).im.abs() < 1e-16);
    }
}
