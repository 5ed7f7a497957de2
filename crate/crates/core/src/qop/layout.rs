use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Pauli axis used by control terms and system-bath couplings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    #[serde(alias = "xx")]
    X,
    #[serde(alias = "zz")]
    Z,
}

impl Axis {
    /// Coupling label as used in file names (`xx` / `zz`).
    pub fn coupling_label(self) -> &'static str {
        match self {
            Axis::X => "xx",
            Axis::Z => "zz",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" | "xx" => Ok(Axis::X),
            "z" | "zz" => Ok(Axis::Z),
            other => Err(Error::arg(format!("unknown axis '{other}'"))),
        }
    }
}

/// Tensor-factor ordering of a register of system qubits followed by bath
/// qubits.
///
/// Qubits are numbered from 1. Qubit 1 is the leftmost (most significant)
/// tensor factor, so in a computational-basis index `i` the state of qubit
/// `q` is bit `n_qubits - q` of `i`. System qubits are `1..=n_system`, bath
/// qubits follow.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitLayout {
    n_system: usize,
    n_bath: usize,
}

impl QubitLayout {
    /// Largest register handled; dimensions are kept well inside `usize`.
    pub const MAX_QUBITS: usize = 30;

    pub fn new(n_system: usize, n_bath: usize) -> Result<Self> {
        let n = n_system + n_bath;
        if n == 0 || n > Self::MAX_QUBITS {
            return Err(Error::arg(format!("register of {n} qubits is not supported")));
        }
        Ok(Self { n_system, n_bath })
    }

    /// A plain register of `n` qubits with no system/bath split.
    pub fn register(n: usize) -> Result<Self> {
        Self::new(n, 0)
    }

    /// The layout of the bath factor alone; bath qubit `n_system + k` of
    /// `self` becomes qubit `k` of the returned layout.
    pub fn bath_factor(&self) -> Result<Self> {
        Self::register(self.n_bath)
    }

    /// The layout of the system factor alone.
    pub fn system_factor(&self) -> Result<Self> {
        Self::register(self.n_system)
    }

    pub fn n_system(&self) -> usize {
        self.n_system
    }

    pub fn n_bath(&self) -> usize {
        self.n_bath
    }

    pub fn n_qubits(&self) -> usize {
        self.n_system + self.n_bath
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits()
    }

    pub fn system_dim(&self) -> usize {
        1 << self.n_system
    }

    pub fn bath_dim(&self) -> usize {
        1 << self.n_bath
    }

    pub fn contains(&self, qubit: usize) -> bool {
        (1..=self.n_qubits()).contains(&qubit)
    }

    /// Bit position of `qubit` inside a basis index.
    pub fn bit(&self, qubit: usize) -> Result<usize> {
        if !self.contains(qubit) {
            return Err(Error::arg(format!(
                "qubit {qubit} outside register 1..={}",
                self.n_qubits()
            )));
        }
        Ok(self.n_qubits() - qubit)
    }

    /// Single-bit mask selecting `qubit`.
    pub fn mask(&self, qubit: usize) -> Result<usize> {
        Ok(1 << self.bit(qubit)?)
    }

    pub fn system_qubits(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n_system
    }

    pub fn bath_qubits(&self) -> std::ops::RangeInclusive<usize> {
        self.n_system + 1..=self.n_qubits()
    }
}
