//! TOML run configuration.
//!
//! ```toml
//! [control]
//! Bx = 1.0
//! Bz = 1.0
//! Jx = 0.05
//!
//! [bath]
//! N = 10
//! B0x = 1.0
//! B0z = 1.0
//! delta = 0.4
//! Jx = 1.0
//! lambda = 0.05
//! axis = "x"
//!
//! [run]
//! seed = 1
//! n_eig = 20
//! kT = 0.25
//! grid_points = 600
//! rtol = 1e-10
//! atol = 1e-12
//!
//! [sweep]
//! seeds = [1]
//! jx = [0.5, 1.0, 2.0]
//! axes = ["x", "z"]
//! sets = ["standard", "bell"]
//! ```

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use super::params::{BathParams, ControlParams};
use crate::qop::Axis;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSection {
    #[serde(rename = "Bx", default = "one")]
    pub b_x: f64,
    #[serde(rename = "Bz", default = "one")]
    pub b_z: f64,
    #[serde(rename = "Jx", default = "control_jx")]
    pub j_x: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSection {
    #[serde(rename = "N", default = "bath_n")]
    pub n: usize,
    #[serde(rename = "B0x", default = "one")]
    pub b0_x: f64,
    #[serde(rename = "B0z", default = "one")]
    pub b0_z: f64,
    #[serde(default = "detuning")]
    pub delta: f64,
    #[serde(rename = "Jx", default = "one")]
    pub j_x: f64,
    #[serde(default = "lambda")]
    pub lambda: f64,
    #[serde(default = "axis_x")]
    pub axis: Axis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "seed")]
    pub seed: u64,
    #[serde(default = "n_eig")]
    pub n_eig: usize,
    #[serde(rename = "kT", default = "kt")]
    pub kt: f64,
    #[serde(default = "grid_points")]
    pub grid_points: usize,
    #[serde(default = "rtol")]
    pub rtol: f64,
    #[serde(default = "atol")]
    pub atol: f64,
}

/// Parameter sweep driven by the `compare` experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    /// Disorder seeds; empty means `[run.seed]`.
    #[serde(default)]
    pub seeds: Vec<u64>,
    #[serde(default = "jx_list")]
    pub jx: Vec<f64>,
    #[serde(default = "axes")]
    pub axes: Vec<Axis>,
    #[serde(default = "sets")]
    pub sets: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub control: ControlSection,
    #[serde(default)]
    pub bath: BathSection,
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub sweep: SweepSection,
}

fn one() -> f64 {
    1.0
}
fn control_jx() -> f64 {
    0.05
}
fn bath_n() -> usize {
    10
}
fn detuning() -> f64 {
    0.4
}
fn lambda() -> f64 {
    0.05
}
fn axis_x() -> Axis {
    Axis::X
}
fn seed() -> u64 {
    1
}
fn n_eig() -> usize {
    20
}
fn kt() -> f64 {
    0.25
}
fn grid_points() -> usize {
    600
}
fn rtol() -> f64 {
    1e-10
}
fn atol() -> f64 {
    1e-12
}
fn jx_list() -> Vec<f64> {
    vec![0.5, 1.0, 2.0]
}
fn axes() -> Vec<Axis> {
    vec![Axis::X, Axis::Z]
}
fn sets() -> Vec<String> {
    vec!["standard".into(), "bell".into()]
}

impl Default for ControlSection {
    fn default() -> Self {
        Self { b_x: 1.0, b_z: 1.0, j_x: control_jx() }
    }
}

impl Default for BathSection {
    fn default() -> Self {
        Self {
            n: bath_n(),
            b0_x: 1.0,
            b0_z: 1.0,
            delta: detuning(),
            j_x: 1.0,
            lambda: lambda(),
            axis: Axis::X,
        }
    }
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            seed: seed(),
            n_eig: n_eig(),
            kt: kt(),
            grid_points: grid_points(),
            rtol: rtol(),
            atol: atol(),
        }
    }
}

impl Default for SweepSection {
    fn default() -> Self {
        Self { seeds: Vec::new(), jx: jx_list(), axes: axes(), sets: sets() }
    }
}

impl Default for Config {
    fn default() -> Self {
        Self {
            control: ControlSection::default(),
            bath: BathSection::default(),
            run: RunSection::default(),
            sweep: SweepSection::default(),
        }
    }
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical TOML rendering, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml_string().as_bytes()))
    }

    pub fn control_params(&self) -> ControlParams {
        ControlParams { b_x: self.control.b_x, b_z: self.control.b_z, j_x: self.control.j_x }
    }

    pub fn bath_params(&self) -> BathParams {
        BathParams {
            n_bath: self.bath.n,
            b0_x: self.bath.b0_x,
            b0_z: self.bath.b0_z,
            detuning: self.bath.delta,
            j_x: self.bath.j_x,
            lambda: self.bath.lambda,
            axis: self.bath.axis,
        }
    }

    pub fn seeds(&self) -> Vec<u64> {
        if self.sweep.seeds.is_empty() {
            vec![self.run.seed]
        } else {
            self.sweep.seeds.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |e: Error| Error::Config(e.to_string());
        self.control_params().validate().map_err(cfg)?;
        self.bath_params().validate().map_err(cfg)?;
        let r = &self.run;
        if r.n_eig == 0 || r.n_eig > 1 << self.bath.n {
            return Err(Error::Config(format!("n_eig = {} outside 1..=2^N", r.n_eig)));
        }
        if !(r.kt > 0.0) {
            return Err(Error::Config(format!("kT must be positive, got {}", r.kt)));
        }
        if r.grid_points < 2 {
            return Err(Error::Config("grid_points must be at least 2".into()));
        }
        if !(r.rtol > 0.0 && r.atol > 0.0) {
            return Err(Error::Config("rtol and atol must be positive".into()));
        }
        if self.sweep.jx.iter().any(|&j| !(j >= 0.0)) {
            return Err(Error::Config("sweep.jx entries must be non-negative".into()));
        }
        for s in &self.sweep.sets {
            if s != "standard" && s != "bell" {
                return Err(Error::Config(format!("unknown initial-state set '{s}'")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_benchmark() {
        let c = Config::from_toml_str("").unwrap();
        assert_eq!(c, Config::default());
        assert_eq!(c.control.j_x, 0.05);
        assert_eq!(c.bath.n, 10);
        assert_eq!(c.bath.delta, 0.4);
        assert_eq!(c.bath.lambda, 0.05);
        assert_eq!(c.run.kt, 0.25);
        assert_eq!(c.run.n_eig, 20);
    }

    #[test]
    fn parses_documented_keys() {
        let c = Config::from_toml_str(
            "[control]\nBx = 0.9\n[bath]\nN = 5\nJx = 2.0\naxis = \"z\"\n[run]\nkT = 0.5\nseed = 3\n",
        )
        .unwrap();
        assert_eq!(c.control.b_x, 0.9);
        assert_eq!(c.bath_params().axis, Axis::Z);
        assert_eq!(c.seeds(), vec![3]);
    }

    #[test]
    fn rejects_bad_values_and_unknown_keys() {
        assert!(Config::from_toml_str("[run]\nkT = 0.0\n").is_err());
        assert!(Config::from_toml_str("[bath]\nlambda = -1.0\n").is_err());
        assert!(Config::from_toml_str("[bath]\nfoo = 1\n").is_err());
        assert!(Config::from_toml_str("[sweep]\nsets = [\"ghz\"]\n").is_err());
    }

    #[test]
    fn round_trips_and_hash_is_stable() {
        let c = Config::default();
        let back = Config::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
        let mut d = c.clone();
        d.bath.lambda = 0.06;
        assert_ne!(d.hash(), c.hash());
    }
}
