use crate::model::{BenchmarkModel, PulseSchedule};
use crate::qop::{HermitianPropagator, LinearOperator, OperatorMatrix, SparsePauliOperator};
use crate::{Error, Result, C64};

/// Generator of one constant interval.
#[derive(Clone, Debug)]
pub enum SegmentOperator {
    Dense(OperatorMatrix),
    Sparse(SparsePauliOperator),
}

impl SegmentOperator {
    pub fn dim(&self) -> usize {
        match self {
            Self::Dense(m) => m.dim(),
            Self::Sparse(s) => s.dim(),
        }
    }

    pub fn as_linear(&self) -> &dyn LinearOperator {
        match self {
            Self::Dense(m) => m,
            Self::Sparse(s) => s,
        }
    }

    /// Dense form; materializes sparse operators.
    pub fn to_dense(&self) -> OperatorMatrix {
        match self {
            Self::Dense(m) => m.clone(),
            Self::Sparse(s) => {
                let n = s.dim();
                let mut data = nalgebra::DMatrix::zeros(n, n);
                let mut e = vec![C64::new(0.0, 0.0); n];
                let mut col = vec![C64::new(0.0, 0.0); n];
                for j in 0..n {
                    e[j] = C64::new(1.0, 0.0);
                    s.apply_into(&e, &mut col);
                    data.column_mut(j).copy_from_slice(&col);
                    e[j] = C64::new(0.0, 0.0);
                }
                OperatorMatrix::new(data, true).expect("square")
            }
        }
    }
}

/// A Hamiltonian that is constant on each interval `[τ_{k−1}, τ_k]`.
#[derive(Clone, Debug)]
pub struct PiecewiseHamiltonian {
    segments: Vec<SegmentOperator>,
    /// `τ_0 = 0, …, τ_K`.
    boundaries: Vec<f64>,
}

impl PiecewiseHamiltonian {
    pub fn new(segments: Vec<SegmentOperator>, boundaries: Vec<f64>) -> Result<Self> {
        if segments.is_empty() || boundaries.len() != segments.len() + 1 {
            return Err(Error::arg("need one more boundary than segments"));
        }
        if boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::arg("segment boundaries must increase"));
        }
        let dim = segments[0].dim();
        if segments.iter().any(|s| s.dim() != dim) {
            return Err(Error::arg("segments act on different spaces"));
        }
        Ok(Self { segments, boundaries })
    }

    /// `H_seg(t) ⊗ I + static_term`. The system occupies the leading qubits,
    /// so the bath dimension is `static_term.dim() / 4`. Pass `None` for the
    /// bare 4-dimensional control Hamiltonian.
    pub fn from_schedule(schedule: &PulseSchedule, static_term: Option<&OperatorMatrix>) -> Result<Self> {
        let bath_dim = match static_term {
            None => 1,
            Some(s) => {
                if s.dim() % 4 != 0 || s.dim() == 0 {
                    return Err(Error::arg("static term must act on the system and a bath"));
                }
                if !s.is_hermitian() && s.hermiticity_error() > 1e-12 {
                    return Err(Error::arg("static term must be Hermitian"));
                }
                s.dim() / 4
            }
        };
        let id = OperatorMatrix::identity(bath_dim);
        let segments = schedule
            .segments()
            .iter()
            .map(|seg| {
                let h = seg.hamiltonian().kron(&id);
                SegmentOperator::Dense(match static_term {
                    Some(s) => &h + s,
                    None => h,
                })
            })
            .collect();
        Self::new(segments, schedule.switch_times().to_vec())
    }

    /// Matrix-free full-register generator of the benchmark.
    pub fn benchmark(model: &BenchmarkModel) -> Result<Self> {
        let segments = model
            .segment_sums()?
            .iter()
            .map(|s| SegmentOperator::Sparse(s.compile()))
            .collect();
        Self::new(segments, model.schedule.switch_times().to_vec())
    }

    /// Same generator with every segment materialized.
    pub fn densified(&self) -> Self {
        Self {
            segments: self.segments.iter().map(|s| SegmentOperator::Dense(s.to_dense())).collect(),
            boundaries: self.boundaries.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.segments[0].dim()
    }

    pub fn segments(&self) -> &[SegmentOperator] {
        &self.segments
    }

    pub fn boundaries(&self) -> &[f64] {
        &self.boundaries
    }

    pub fn total_time(&self) -> f64 {
        *self.boundaries.last().unwrap()
    }

    pub(crate) fn propagators(&self) -> Result<Vec<HermitianPropagator>> {
        self.segments
            .iter()
            .map(|s| match s {
                SegmentOperator::Dense(m) => HermitianPropagator::new(m),
                SegmentOperator::Sparse(_) => HermitianPropagator::new(&s.to_dense()),
            })
            .collect()
    }
}
