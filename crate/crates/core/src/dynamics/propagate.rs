use nalgebra::DVector;

use super::generator::PiecewiseHamiltonian;
use super::krylov::{krylov_segment, DEFAULT_KRYLOV_DIM};
use super::options::{PropagationMethod, PropagatorOptions};
use super::rk::Dop853;
use crate::model::PulseSchedule;
use crate::qop::{HermitianPropagator, OperatorMatrix, StateVector};
use crate::{Error, Result, C64};

/// A generator bound to a method and grid, with any per-segment setup
/// (eigendecompositions) done once and shared by all trajectories.
pub struct Propagator<'a> {
    hamiltonian: &'a PiecewiseHamiltonian,
    opts: PropagatorOptions,
    eig: Option<Vec<HermitianPropagator>>,
    /// Grid indices active on each segment, as `(index, time)`.
    schedule: Vec<Vec<(usize, f64)>>,
    initial: Vec<usize>,
}

impl<'a> Propagator<'a> {
    pub fn new(hamiltonian: &'a PiecewiseHamiltonian, opts: &PropagatorOptions) -> Result<Self> {
        let b = hamiltonian.boundaries();
        let (start, end) = (b[0], *b.last().unwrap());
        if opts.grid.is_empty() || opts.grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::arg("grid must be non-empty and strictly increasing"));
        }
        if opts.grid[0] < start || *opts.grid.last().unwrap() > end {
            return Err(Error::arg("grid leaves the schedule interval"));
        }
        let initial = opts.grid.iter().enumerate().filter(|(_, &t)| t <= start).map(|(i, _)| i).collect();
        let schedule = b
            .windows(2)
            .map(|w| {
                opts.grid
                    .iter()
                    .enumerate()
                    .filter(|(_, &t)| t > w[0] && t <= w[1])
                    .map(|(i, &t)| (i, t))
                    .collect()
            })
            .collect();
        let eig = match opts.method {
            PropagationMethod::ExpmProduct => Some(hamiltonian.propagators()?),
            _ => None,
        };
        Ok(Self { hamiltonian, opts: opts.clone(), eig, schedule, initial })
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn grid(&self) -> &[f64] {
        &self.opts.grid
    }

    pub fn method(&self) -> PropagationMethod {
        self.opts.method
    }

    /// Propagates `psi0`, calling `emit(grid_index, state)` in grid order.
    pub fn run_with(&self, psi0: &[C64], emit: &mut dyn FnMut(usize, &[C64])) -> Result<()> {
        if psi0.len() != self.dim() {
            return Err(Error::arg(format!("state of dimension {} for a generator of dimension {}", psi0.len(), self.dim())));
        }
        let mut psi = psi0.to_vec();
        for &i in &self.initial {
            emit(i, &psi);
        }
        let b = self.hamiltonian.boundaries();
        for (k, seg) in self.hamiltonian.segments().iter().enumerate() {
            let (t0, t1) = (b[k], b[k + 1]);
            let outs = &self.schedule[k];
            match self.opts.method {
                PropagationMethod::AdaptiveRk => {
                    Dop853::new(seg.as_linear(), self.opts.rtol, self.opts.atol).integrate(&mut psi, t0, t1, outs, emit)?
                }
                PropagationMethod::Krylov => {
                    krylov_segment(seg.as_linear(), &mut psi, t0, t1, outs, self.opts.atol, DEFAULT_KRYLOV_DIM, emit)?
                }
                PropagationMethod::ExpmProduct => {
                    let p = &self.eig.as_ref().expect("eigendecompositions prepared")[k];
                    let coeffs = p.to_eigenbasis(&StateVector::from_slice(&psi)?);
                    let mut out = vec![C64::new(0.0, 0.0); psi.len()];
                    for &(i, t) in outs {
                        evolve_into(p, &coeffs, t - t0, &mut out);
                        emit(i, &out);
                    }
                    evolve_into(p, &coeffs, t1 - t0, &mut out);
                    psi.copy_from_slice(&out);
                }
            }
            if psi.iter().any(|z| !z.is_finite()) {
                return Err(Error::Integration { t: t1, reason: "non-finite state".into() });
            }
        }
        Ok(())
    }

    /// States on every grid point.
    pub fn run(&self, psi0: &StateVector) -> Result<Vec<StateVector>> {
        let mut out: Vec<Option<StateVector>> = vec![None; self.opts.grid.len()];
        self.run_with(psi0.as_slice(), &mut |i, s| {
            out[i] = Some(StateVector::from_slice(s).expect("non-empty"));
        })?;
        out.into_iter()
            .enumerate()
            .map(|(i, s)| s.ok_or_else(|| Error::Numeric(format!("grid point {i} was not reached"))))
            .collect()
    }
}

fn evolve_into(p: &HermitianPropagator, coeffs: &DVector<C64>, t: f64, out: &mut [C64]) {
    out.copy_from_slice(p.evolve_coefficients(coeffs, t).as_slice());
}

/// Propagates `psi0` under `H_seg(t) ⊗ I + static_term` and returns the
/// states on `opts.grid`.
pub fn propagate_piecewise(
    psi0: &StateVector,
    schedule: &PulseSchedule,
    static_term: Option<&OperatorMatrix>,
    opts: &PropagatorOptions,
) -> Result<Vec<StateVector>> {
    opts.validate(schedule)?;
    let h = PiecewiseHamiltonian::from_schedule(schedule, static_term)?;
    Propagator::new(&h, opts)?.run(psi0)
}
