use nalgebra::DMatrix;
use rayon::prelude::*;

use super::generator::PiecewiseHamiltonian;
use super::options::{PropagationMethod, PropagatorOptions};
use super::propagate::Propagator;
use super::result::{EvolutionResult, RouteTag, RunMetadata};
use crate::model::BenchmarkModel;
use crate::qop::{DensityMatrix, StateVector};
use crate::spectra::{BathSpectrum, ThermalWeights};
use crate::{Error, Result, C64};

/// Largest dimension for which `ExpmProduct` diagonalizes segment
/// generators; beyond it the Krylov exponential is used instead.
pub const DENSE_EXPM_LIMIT: usize = 1024;

pub(crate) fn effective_method(dim: usize, method: PropagationMethod) -> PropagationMethod {
    match method {
        PropagationMethod::ExpmProduct if dim > DENSE_EXPM_LIMIT => PropagationMethod::Krylov,
        m => m,
    }
}

/// The exact reduced dynamics restricted to a set of system input states.
///
/// For inputs `φ_s` and bath eigenstates `|n⟩`, the full states
/// `Ψ_s^n(t) = U(t) φ_s ⊗ |n⟩` are propagated once and reduced to
/// `C(t)[(s,a),(s',a')] = Σ_n p_n Σ_b Ψ_s^n[a,b] conj(Ψ_{s'}^n[a',b])`.
/// Any `ψ_0 = Σ_s c_s φ_s` then has
/// `ρ_S(t) = Σ_{s,s'} c_s conj(c_{s'}) C(t)[s,s']` by linearity.
#[derive(Clone, Debug)]
pub struct ExactChannel {
    pub times: Vec<f64>,
    inputs: Vec<StateVector>,
    gram: Vec<DMatrix<C64>>,
    pub metadata: RunMetadata,
}

impl ExactChannel {
    /// Propagates every input against every retained bath level. Bath
    /// levels run in parallel on the current rayon pool; their
    /// contributions are summed in level order.
    pub fn build(
        hamiltonian: &PiecewiseHamiltonian,
        spectrum: &BathSpectrum,
        weights: &ThermalWeights,
        inputs: &[StateVector],
        opts: &PropagatorOptions,
    ) -> Result<Self> {
        if inputs.is_empty() || inputs.iter().any(|s| s.dim() != 4) {
            return Err(Error::arg("inputs must be 2-qubit states"));
        }
        if weights.len() != spectrum.n_eig() {
            return Err(Error::arg("weights and spectrum differ in length"));
        }
        let bath_dim = spectrum.dim();
        if hamiltonian.dim() != 4 * bath_dim {
            return Err(Error::arg("generator does not act on system ⊗ bath"));
        }
        let method = effective_method(hamiltonian.dim(), opts.method);
        let opts = opts.clone().with_method(method);
        let prop = Propagator::new(hamiltonian, &opts)?;
        let n_t = opts.grid.len();
        let r = inputs.len();

        let per_level: Vec<Result<Vec<DMatrix<C64>>>> = (0..spectrum.n_eig())
            .into_par_iter()
            .map(|n| {
                let bath = spectrum.state(n);
                // rows (s, a), columns b, one block per grid time
                let mut blocks = vec![DMatrix::<C64>::zeros(4 * r, bath_dim); n_t];
                for (s, phi) in inputs.iter().enumerate() {
                    let psi0 = phi.kron(&bath);
                    prop.run_with(psi0.as_slice(), &mut |i, psi| {
                        let blk = &mut blocks[i];
                        for a in 0..4 {
                            for b in 0..bath_dim {
                                blk[(4 * s + a, b)] = psi[a * bath_dim + b];
                            }
                        }
                    })
                    .map_err(|e| Error::Trajectory { bath_state: n, initial_state: s, source: Box::new(e) })?;
                }
                Ok(blocks.iter().map(|m| m * m.adjoint()).collect())
            })
            .collect();

        let mut gram = vec![DMatrix::<C64>::zeros(4 * r, 4 * r); n_t];
        for (n, res) in per_level.into_iter().enumerate() {
            let w = C64::new(weights.p[n], 0.0);
            for (g, c) in gram.iter_mut().zip(res?) {
                *g += c * w;
            }
        }
        Ok(Self {
            times: opts.grid.clone(),
            inputs: inputs.to_vec(),
            gram,
            metadata: RunMetadata {
                n_eig: Some(spectrum.n_eig()),
                method: method.label().into(),
                ..Default::default()
            },
        })
    }

    /// Channel on the four computational basis states.
    pub fn on_basis(
        hamiltonian: &PiecewiseHamiltonian,
        spectrum: &BathSpectrum,
        weights: &ThermalWeights,
        opts: &PropagatorOptions,
    ) -> Result<Self> {
        let basis: Vec<StateVector> = (0..4).map(|i| StateVector::basis(4, i)).collect::<Result<_>>()?;
        Self::build(hamiltonian, spectrum, weights, &basis, opts)
    }

    pub fn inputs(&self) -> &[StateVector] {
        &self.inputs
    }

    /// `ρ_S(t)` for `ψ_0 = Σ_s c_s φ_s`.
    pub fn rho_from_coefficients(&self, c: &[C64]) -> Result<Vec<DensityMatrix>> {
        let r = self.inputs.len();
        if c.len() != r {
            return Err(Error::arg("one coefficient per input state is required"));
        }
        self.gram
            .iter()
            .map(|g| {
                let mut rho = DMatrix::<C64>::zeros(4, 4);
                for s in 0..r {
                    for sp in 0..r {
                        let w = c[s] * c[sp].conj();
                        if w == C64::new(0.0, 0.0) {
                            continue;
                        }
                        rho += g.view((4 * s, 4 * sp), (4, 4)) * w;
                    }
                }
                DensityMatrix::from_matrix(rho)
            })
            .collect()
    }

    /// `ρ_S(t)` for a state in the span of the inputs, which must be
    /// orthonormal.
    pub fn rho_for(&self, psi0: &StateVector) -> Result<Vec<DensityMatrix>> {
        let c: Vec<C64> = self.inputs.iter().map(|phi| phi.inner(psi0)).collect();
        let mut rebuilt = vec![C64::new(0.0, 0.0); 4];
        for (phi, cs) in self.inputs.iter().zip(&c) {
            for (o, a) in rebuilt.iter_mut().zip(phi.as_slice()) {
                *o += cs * a;
            }
        }
        let miss: f64 = rebuilt.iter().zip(psi0.as_slice()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if miss > 1e-12 {
            return Err(Error::arg("state lies outside the span of the channel inputs"));
        }
        self.rho_from_coefficients(&c)
    }

    pub fn evolution_for(&self, psi0: &StateVector) -> Result<EvolutionResult> {
        Ok(EvolutionResult {
            route: RouteTag::Exact,
            times: self.times.clone(),
            rho: self.rho_for(psi0)?,
            metadata: self.metadata.clone(),
        })
    }
}

fn benchmark_metadata(model: &BenchmarkModel, mut meta: RunMetadata) -> RunMetadata {
    meta.seed = Some(model.disorder.seed);
    meta.j_x = Some(model.bath.j_x);
    meta.axis = Some(model.bath.axis);
    meta.lambda = Some(model.bath.lambda);
    meta
}

/// `ρ_S(t) = Σ_n p_n Tr_B |Ψ_n(t)⟩⟨Ψ_n(t)|` with `|Ψ_n(0)⟩ = |ψ_0⟩ ⊗ |n⟩`,
/// propagated matrix-free under the full benchmark Hamiltonian.
pub fn exact_reduced_density(
    model: &BenchmarkModel,
    spectrum: &BathSpectrum,
    weights: &ThermalWeights,
    psi0: &StateVector,
    opts: &PropagatorOptions,
) -> Result<EvolutionResult> {
    opts.validate(&model.schedule)?;
    let h = PiecewiseHamiltonian::benchmark(model)?;
    let ch = ExactChannel::build(&h, spectrum, weights, std::slice::from_ref(psi0), opts)?;
    let mut res = ch.evolution_for(psi0)?;
    res.metadata = benchmark_metadata(model, res.metadata);
    Ok(res)
}

/// The benchmark channel on the computational basis, for evaluating many
/// initial states from one set of propagations.
pub fn exact_channel(
    model: &BenchmarkModel,
    spectrum: &BathSpectrum,
    weights: &ThermalWeights,
    opts: &PropagatorOptions,
) -> Result<ExactChannel> {
    opts.validate(&model.schedule)?;
    let h = PiecewiseHamiltonian::benchmark(model)?;
    let mut ch = ExactChannel::on_basis(&h, spectrum, weights, opts)?;
    ch.metadata = benchmark_metadata(model, ch.metadata);
    Ok(ch)
}
