use std::f64::consts::PI;

use crate::{Error, Result};

/// Number of levels in the sliding window used to estimate the local mean
/// spacing.
pub const UNFOLDING_WINDOW: usize = 21;
pub const NNSD_BINS: usize = 40;
pub const NNSD_MAX_SPACING: f64 = 4.0;
/// Smallest spectrum accepted.
pub const NNSD_MIN_LEVELS: usize = 100;

/// `P(s) = (πs/2) exp(−πs²/4)`.
pub fn wigner_surmise(s: f64) -> f64 {
    0.5 * PI * s * (-0.25 * PI * s * s).exp()
}

/// `P(s) = exp(−s)`.
pub fn poisson_pdf(s: f64) -> f64 {
    (-s).exp()
}

/// Nearest-neighbour spacings normalized by the local mean spacing.
///
/// The local mean at spacing `i` averages the raw spacings whose levels lie
/// in a window of `UNFOLDING_WINDOW` levels centred on level `i`, shifted
/// inward at the spectrum edges.
pub fn unfolded_spacings(levels: &[f64]) -> Result<Vec<f64>> {
    if levels.len() < UNFOLDING_WINDOW + 1 {
        return Err(Error::arg(format!("need more than {UNFOLDING_WINDOW} levels to unfold")));
    }
    if levels.iter().any(|e| !e.is_finite()) {
        return Err(Error::Numeric("non-finite level".into()));
    }
    let mut e = levels.to_vec();
    e.sort_by(f64::total_cmp);
    let raw: Vec<f64> = e.windows(2).map(|w| w[1] - w[0]).collect();
    let span = UNFOLDING_WINDOW - 1;
    let half = span / 2;
    let mut prefix = vec![0.0; raw.len() + 1];
    for (i, d) in raw.iter().enumerate() {
        prefix[i + 1] = prefix[i] + d;
    }
    let mut out = Vec::with_capacity(raw.len());
    for i in 0..raw.len() {
        let lo = i.saturating_sub(half).min(raw.len() - span);
        let mean = (prefix[lo + span] - prefix[lo]) / span as f64;
        if mean <= 0.0 {
            return Err(Error::Numeric(format!("vanishing local mean spacing near level {i}")));
        }
        out.push(raw[i] / mean);
    }
    Ok(out)
}

/// Normalized spacing histogram with analytic reference curves.
#[derive(Clone, Debug, PartialEq)]
pub struct NnsdHistogram {
    pub bin_centers: Vec<f64>,
    pub density: Vec<f64>,
    pub wigner_ref: Vec<f64>,
    pub poisson_ref: Vec<f64>,
    pub n_spacings: usize,
    /// Spacings beyond `NNSD_MAX_SPACING`; they count toward normalization.
    pub overflow: usize,
}

impl NnsdHistogram {
    pub fn bin_width(&self) -> f64 {
        NNSD_MAX_SPACING / NNSD_BINS as f64
    }

    fn l1(&self, reference: &[f64]) -> f64 {
        self.density.iter().zip(reference).map(|(a, b)| (a - b).abs()).sum::<f64>() * self.bin_width()
    }

    /// `Σ |P_hist − P_Wigner| Δs`.
    pub fn l1_wigner(&self) -> f64 {
        self.l1(&self.wigner_ref)
    }

    /// `Σ |P_hist − P_Poisson| Δs`.
    pub fn l1_poisson(&self) -> f64 {
        self.l1(&self.poisson_ref)
    }

    pub fn closer_to_wigner(&self) -> bool {
        self.l1_wigner() < self.l1_poisson()
    }
}

/// NNSD of a full spectrum.
pub fn nnsd(levels: &[f64]) -> Result<NnsdHistogram> {
    if levels.len() < NNSD_MIN_LEVELS {
        return Err(Error::arg(format!(
            "NNSD needs at least {NNSD_MIN_LEVELS} levels, got {}",
            levels.len()
        )));
    }
    let s = unfolded_spacings(levels)?;
    let width = NNSD_MAX_SPACING / NNSD_BINS as f64;
    let mut counts = vec![0usize; NNSD_BINS];
    let mut overflow = 0;
    for &x in &s {
        let b = (x / width).floor() as usize;
        if b < NNSD_BINS {
            counts[b] += 1;
        } else {
            overflow += 1;
        }
    }
    let norm = s.len() as f64 * width;
    let bin_centers: Vec<f64> = (0..NNSD_BINS).map(|b| (b as f64 + 0.5) * width).collect();
    Ok(NnsdHistogram {
        density: counts.iter().map(|&c| c as f64 / norm).collect(),
        wigner_ref: bin_centers.iter().map(|&x| wigner_surmise(x)).collect(),
        poisson_ref: bin_centers.iter().map(|&x| poisson_pdf(x)).collect(),
        bin_centers,
        n_spacings: s.len(),
        overflow,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        (0..=n).map(|i| f(a + i as f64 * h) * if i == 0 || i == n { 0.5 } else { 1.0 }).sum::<f64>() * h
    }

    #[test]
    fn references_are_unit_mean_densities() {
        for f in [wigner_surmise as fn(f64) -> f64, poisson_pdf] {
            assert!((trapezoid(f, 0.0, 40.0, 400_000) - 1.0).abs() < 1e-8);
            assert!((trapezoid(|s| s * f(s), 0.0, 40.0, 400_000) - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn equally_spaced_spectrum_unfolds_to_one() {
        let levels: Vec<f64> = (0..200).map(|i| 0.37 * i as f64 - 5.0).collect();
        let s = unfolded_spacings(&levels).unwrap();
        assert!(s.iter().all(|x| (x - 1.0).abs() < 1e-12));
        let h = nnsd(&levels).unwrap();
        let around_one: f64 = h.density[9..=10].iter().sum::<f64>() * h.bin_width();
        assert!((around_one - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unfolding_removes_smooth_density() {
        let levels: Vec<f64> = (0..500).map(|i| ((i + 200) as f64 / 10.0).powi(2)).collect();
        let s = unfolded_spacings(&levels).unwrap();
        let mean = s.iter().sum::<f64>() / s.len() as f64;
        assert!((mean - 1.0).abs() < 1e-3);
    }

    #[test]
    fn poisson_levels_are_recognized() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let mut e = 0.0;
        let levels: Vec<f64> = (0..4000)
            .map(|_| {
                e += -(1.0 - rng.gen::<f64>()).ln();
                e
            })
            .collect();
        let h = nnsd(&levels).unwrap();
        assert!(!h.closer_to_wigner());
        assert!(h.l1_poisson() < 0.15);
    }

    #[test]
    fn goe_levels_are_recognized() {
        let n = 600;
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let mut normal = move || {
            let (u, v): (f64, f64) = (rng.gen(), rng.gen());
            (-2.0 * (1.0 - u).ln()).sqrt() * (2.0 * PI * v).cos()
        };
        let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let x = normal() * if i == j { 2f64.sqrt() } else { 1.0 };
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        let ev = crate::qop::symmetric_eigen(m, false).unwrap().0;
        let bulk = &ev[n / 4..3 * n / 4];
        let h = nnsd(bulk).unwrap();
        assert!(h.closer_to_wigner(), "W {} P {}", h.l1_wigner(), h.l1_poisson());
    }

    #[test]
    fn histogram_is_normalized() {
        let levels: Vec<f64> = (0..300).map(|i| (i as f64).sqrt() + 0.01 * (i as f64).sin()).collect();
        let h = nnsd(&levels).unwrap();
        let mass: f64 = h.density.iter().sum::<f64>() * h.bin_width();
        assert!((mass + h.overflow as f64 / h.n_spacings as f64 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn short_spectrum_is_rejected() {
        assert!(nnsd(&[0.0; 99]).is_err());
    }
}
