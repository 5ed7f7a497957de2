use super::diag::BathSpectrum;
use crate::{Error, Result};

/// Boltzmann weights over the retained bath levels.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalWeights {
    pub kt: f64,
    pub p: Vec<f64>,
}

impl ThermalWeights {
    /// Uniform weights, mainly for tests and single-trajectory runs.
    pub fn uniform(n: usize) -> Self {
        Self { kt: f64::INFINITY, p: vec![1.0 / n as f64; n] }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// `p_n = exp(−(E_n − E_1)/kT) / Σ_m exp(−(E_m − E_1)/kT)` over the
/// `n_eig` retained levels.
pub fn thermal_populations(spec: &BathSpectrum, kt: f64) -> Result<ThermalWeights> {
    weights_from_energies(spec.energies(), kt)
}

pub(crate) fn weights_from_energies(energies: &[f64], kt: f64) -> Result<ThermalWeights> {
    if !(kt > 0.0) || !kt.is_finite() {
        return Err(Error::arg(format!("kT must be positive and finite, got {kt}")));
    }
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let boltz: Vec<f64> = energies.iter().map(|&e| (-(e - e0) / kt).exp()).collect();
    let z: f64 = boltz.iter().sum();
    Ok(ThermalWeights { kt, p: boltz.into_iter().map(|b| b / z).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_level_gets_all_weight() {
        assert_eq!(weights_from_energies(&[-3.2], 0.25).unwrap().p, vec![1.0]);
    }

    #[test]
    fn two_levels_ln2_apart() {
        let kt = 0.25;
        let w = weights_from_energies(&[0.0, kt * 2f64.ln()], kt).unwrap();
        assert!((w.p[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((w.p[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn deep_ground_state_does_not_overflow() {
        let w = weights_from_energies(&[-500.0, -499.9, -499.0], 0.01).unwrap();
        assert!(w.p.iter().all(|p| p.is_finite()));
        assert!((w.p.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(w.p.windows(2).all(|x| x[0] >= x[1]));
    }

    #[test]
    fn rejects_non_positive_temperature() {
        assert!(weights_from_energies(&[0.0], 0.0).is_err());
        assert!(weights_from_energies(&[0.0], -1.0).is_err());
    }
}
