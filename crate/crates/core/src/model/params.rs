use serde::{Deserialize, Serialize};

use crate::qop::Axis;
use crate::{Error, Result};

/// Control amplitudes of the two-qubit register (energies in units of ε).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlParams {
    pub b_x: f64,
    pub b_z: f64,
    pub j_x: f64,
}

impl Default for ControlParams {
    fn default() -> Self {
        Self {
            b_x: 1.0,
            b_z: 1.0,
            j_x: 0.05,
        }
    }
}

impl ControlParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("Bx", self.b_x), ("Bz", self.b_z), ("Jx", self.j_x)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::arg(format!("control {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Bath of idle qubits and its coupling to the register.
///
/// One-body fields are drawn from `[B0 − δ/2, B0 + δ/2]`, intra-bath
/// couplings from `[−J, J]` and system-bath couplings from `[−λ, λ]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BathParams {
    pub n_bath: usize,
    pub b0_x: f64,
    pub b0_z: f64,
    pub detuning: f64,
    pub j_x: f64,
    pub lambda: f64,
    pub axis: Axis,
}

impl Default for BathParams {
    fn default() -> Self {
        Self {
            n_bath: 10,
            b0_x: 1.0,
            b0_z: 1.0,
            detuning: 0.4,
            j_x: 1.0,
            lambda: 0.05,
            axis: Axis::X,
        }
    }
}

impl BathParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("delta", self.detuning), ("Jx", self.j_x), ("lambda", self.lambda)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::arg(format!("bath {name} must be non-negative, got {v}")));
            }
        }
        if !(self.b0_x.is_finite() && self.b0_z.is_finite()) {
            return Err(Error::arg("bath mean fields must be finite"));
        }
        if self.n_bath == 0 || self.n_bath > 16 {
            return Err(Error::arg(format!("bath size {} outside 1..=16", self.n_bath)));
        }
        Ok(())
    }

    pub fn with_j(self, j_x: f64) -> Self {
        Self { j_x, ..self }
    }

    pub fn with_axis(self, axis: Axis) -> Self {
        Self { axis, ..self }
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn with_n(self, n_bath: usize) -> Self {
        Self { n_bath, ..self }
    }
}
