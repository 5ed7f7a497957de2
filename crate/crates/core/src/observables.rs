//! Purity, fidelity, one-qubit reduced elements and initial-state set
//! averages.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::EvolutionResult;
use crate::qop::{partial_trace, DensityMatrix, QubitLayout, StateVector};
use crate::{Error, Result, C64};

/// Imaginary residue of `Tr(ρσ)` above which a warning is logged.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialStateSet {
    Standard,
    Bell,
}

impl InitialStateSet {
    pub const ALL: [InitialStateSet; 2] = [Self::Standard, Self::Bell];

    pub fn label(self) -> &'static str {
        match self {
            Self::Standard => "standard",
            Self::Bell => "bell",
        }
    }

    /// Names of the four members, in the order of [`Self::states`].
    pub fn state_labels(self) -> [&'static str; 4] {
        match self {
            Self::Standard => ["00", "01", "10", "11"],
            Self::Bell => ["phi+", "phi-", "psi+", "psi-"],
        }
    }

    /// `{|00⟩, |01⟩, |10⟩, |11⟩}` or
    /// `{(|00⟩ ± |11⟩)/√2, (|01⟩ ± |10⟩)/√2}`.
    pub fn states(self) -> [StateVector; 4] {
        let h = FRAC_1_SQRT_2;
        let rows: [[f64; 4]; 4] = match self {
            Self::Standard => [[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]],
            Self::Bell => [[h, 0.0, 0.0, h], [h, 0.0, 0.0, -h], [0.0, h, h, 0.0], [0.0, h, -h, 0.0]],
        };
        rows.map(|r| StateVector::from_real(&r).expect("4 amplitudes"))
    }
}

impl fmt::Display for InitialStateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for InitialStateSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "standard" => Ok(Self::Standard),
            "bell" => Ok(Self::Bell),
            _ => Err(Error::Config(format!("unknown initial-state set `{s}`"))),
        }
    }
}

/// Looks up a named member of either set, e.g. `11` or `phi+`.
pub fn named_state(name: &str) -> Result<StateVector> {
    for set in InitialStateSet::ALL {
        if let Some(i) = set.state_labels().iter().position(|l| *l == name) {
            return Ok(set.states()[i].clone());
        }
    }
    Err(Error::Config(format!("unknown initial state `{name}`")))
}

/// `Tr(ρσ)` with its imaginary residue.
fn trace_product(rho: &DensityMatrix, sigma: &DensityMatrix) -> C64 {
    let (a, b) = (rho.matrix(), sigma.matrix());
    let n = a.nrows();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

fn real_part(z: C64, what: &str) -> f64 {
    if z.im.abs() > IMAG_RESIDUE_TOL {
        log::warn!("{what} has imaginary residue {:e}", z.im);
    }
    z.re
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    real_part(trace_product(rho, rho), "purity")
}

/// `Tr(ρ ρ_ideal)`.
pub fn fidelity(rho: &DensityMatrix, ideal: &DensityMatrix) -> Result<f64> {
    if rho.dim() != ideal.dim() {
        return Err(Error::arg("densities differ in dimension"));
    }
    Ok(real_part(trace_product(rho, ideal), "fidelity"))
}

/// Entries of a one-qubit reduced density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QubitElements {
    pub rho00: f64,
    pub rho11: f64,
    pub re01: f64,
    pub im01: f64,
}

/// Elements of `Tr_other ρ_S` for system qubit `which ∈ {1, 2}`.
pub fn single_qubit_elements(rho: &DensityMatrix, which: usize) -> Result<QubitElements> {
    if rho.dim() != 4 || !(1..=2).contains(&which) {
        return Err(Error::arg("need a 4×4 density and qubit 1 or 2"));
    }
    let r = partial_trace(rho, &[which], &QubitLayout::register(2)?)?;
    Ok(QubitElements {
        rho00: r.get(0, 0).re,
        rho11: r.get(1, 1).re,
        re01: r.get(0, 1).re,
        im01: r.get(0, 1).im,
    })
}

/// Purity and fidelity series of one initial state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateMetrics {
    pub purity: Vec<f64>,
    pub fidelity: Vec<f64>,
}

impl StateMetrics {
    /// Both series from stored densities; `ideal` must share the grid.
    pub fn from_results(actual: &EvolutionResult, ideal: &EvolutionResult) -> Result<Self> {
        if actual.times != ideal.times {
            return Err(Error::arg("actual and ideal results live on different grids"));
        }
        Ok(Self {
            purity: actual.rho.iter().map(purity).collect(),
            fidelity: actual.rho.iter().zip(&ideal.rho).map(|(a, b)| fidelity(a, b)).collect::<Result<_>>()?,
        })
    }
}

/// Per-state series and their set averages on a common grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorMetrics {
    pub set: InitialStateSet,
    pub times: Vec<f64>,
    pub per_state: Vec<StateMetrics>,
    pub purity_avg: Vec<f64>,
    pub fidelity_avg: Vec<f64>,
}

fn mean_series(series: &[&Vec<f64>]) -> Vec<f64> {
    let n = series.len() as f64;
    (0..series[0].len()).map(|i| series.iter().map(|s| s[i]).sum::<f64>() / n).collect()
}

/// Arithmetic mean over the four members of `set` at every time.
pub fn average_over_set(times: &[f64], per_state: Vec<StateMetrics>, set: InitialStateSet) -> Result<ErrorMetrics> {
    if per_state.len() != 4 {
        return Err(Error::arg("a set has exactly four states"));
    }
    let n = times.len();
    if per_state.iter().any(|m| m.purity.len() != n || m.fidelity.len() != n) {
        return Err(Error::arg("per-state series differ from the grid length"));
    }
    let purity_avg = mean_series(&per_state.iter().map(|m| &m.purity).collect::<Vec<_>>());
    let fidelity_avg = mean_series(&per_state.iter().map(|m| &m.fidelity).collect::<Vec<_>>());
    Ok(ErrorMetrics { set, times: times.to_vec(), per_state, purity_avg, fidelity_avg })
}

impl ErrorMetrics {
    pub fn final_purity(&self) -> f64 {
        *self.purity_avg.last().expect("non-empty")
    }

    pub fn final_fidelity(&self) -> f64 {
        *self.fidelity_avg.last().expect("non-empty")
    }

    /// `max_t |𝒫̄ − 𝒫̄'|` and `max_t |ℱ̄ − ℱ̄'|`.
    pub fn max_gaps(&self, other: &Self) -> Result<(f64, f64)> {
        if self.times != other.times {
            return Err(Error::arg("metrics live on different grids"));
        }
        let gap = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        Ok((gap(&self.purity_avg, &other.purity_avg), gap(&self.fidelity_avg, &other.fidelity_avg)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn pure(v: &[f64]) -> DensityMatrix {
        DensityMatrix::from_state(&StateVector::from_real(v).unwrap())
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&pure(&[0.0, 1.0, 0.0, 0.0])) - 1.0).abs() < 1e-15);
        assert!((purity(&DensityMatrix::maximally_mixed(4)) - 0.25).abs() < 1e-15);
        let half = DensityMatrix::mixture(&[
            (0.5, StateVector::basis(4, 0).unwrap()),
            (0.5, StateVector::basis(4, 3).unwrap()),
        ])
        .unwrap();
        assert!((purity(&half) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn fidelity_examples() {
        let a = pure(&[1.0, 0.0, 0.0, 0.0]);
        let b = pure(&[0.0, 0.0, 1.0, 0.0]);
        assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&a, &b).unwrap(), 0.0);
        let bell = DensityMatrix::from_state(&InitialStateSet::Bell.states()[2]);
        assert!((fidelity(&DensityMatrix::maximally_mixed(4), &bell).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sets_are_orthonormal() {
        for set in InitialStateSet::ALL {
            let s = set.states();
            for i in 0..4 {
                for j in 0..4 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((s[i].inner(&s[j]) - C64::new(want, 0.0)).norm() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn element_examples() {
        let e = single_qubit_elements(&pure(&[0.0, 0.0, 0.0, 1.0]), 1).unwrap();
        assert_eq!((e.rho00, e.rho11, e.re01, e.im01), (0.0, 1.0, 0.0, 0.0));
        let bell = DensityMatrix::from_state(&InitialStateSet::Bell.states()[0]);
        let e = single_qubit_elements(&bell, 2).unwrap();
        assert!((e.rho00 - 0.5).abs() < 1e-15 && (e.rho11 - 0.5).abs() < 1e-15);
        assert!(e.re01.abs() < 1e-15 && e.im01.abs() < 1e-15);
    }

    #[test]
    fn qubit_order_in_elements() {
        // |01⟩: qubit 1 in |0⟩, qubit 2 in |1⟩
        let rho = pure(&[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(single_qubit_elements(&rho, 1).unwrap().rho00, 1.0);
        assert_eq!(single_qubit_elements(&rho, 2).unwrap().rho11, 1.0);
        // (|0⟩ + i|1⟩)/√2 on qubit 2, qubit 1 in |0⟩
        let h = FRAC_1_SQRT_2;
        let psi = StateVector::from_slice(&[C64::new(h, 0.0), C64::new(0.0, h), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let e = single_qubit_elements(&DensityMatrix::from_state(&psi), 2).unwrap();
        assert!((e.im01 + 0.5).abs() < 1e-15, "ρ01 = ⟨0|ρ|1⟩ = h·conj(ih)");
    }

    #[test]
    fn averages() {
        let m = StateMetrics { purity: vec![1.0, 0.5], fidelity: vec![1.0, 0.25] };
        let avg = average_over_set(&[0.0, 1.0], vec![m.clone(); 4], InitialStateSet::Standard).unwrap();
        assert_eq!(avg.purity_avg, m.purity);
        assert_eq!(avg.fidelity_avg, m.fidelity);
        assert!(average_over_set(&[0.0], vec![m; 4], InitialStateSet::Standard).is_err());
    }

    #[test]
    fn fidelity_is_symmetric() {
        let a = DensityMatrix::from_matrix(DMatrix::from_fn(4, 4, |i, j| {
            C64::new(if i == j { 0.25 } else { 0.01 * (i + j) as f64 }, 0.02 * (i as f64 - j as f64))
        }))
        .unwrap();
        let b = DensityMatrix::from_state(&InitialStateSet::Bell.states()[1]);
        assert_eq!(fidelity(&a, &b).unwrap(), fidelity(&b, &a).unwrap());
    }

    #[test]
    fn names() {
        assert!(named_state("psi-").is_ok() && named_state("10").is_ok());
        assert!(named_state("2").is_err());
        assert_eq!("Bell".parse::<InitialStateSet>().unwrap(), InitialStateSet::Bell);
    }
}
