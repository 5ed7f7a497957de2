//! Seeded sampling of the static bath flaws.
//!
//! Generator: ChaCha20 (20 rounds, as in `rand_chacha::ChaCha20Rng`). The
//! 256-bit key is the run seed as 8 little-endian bytes followed by 24 zero
//! bytes; each [`Substream`] selects the ChaCha stream id, and the block
//! counter starts at 0. A 64-bit draw is two consecutive 32-bit output words,
//! low word first. A uniform draw on `[lo, hi]` is
//! `lo + (hi − lo) · (u64 >> 11) · 2⁻⁵³`.
//!
//! Draw order within a substream: one-body fields by bath qubit
//! `k = 0, 1, …`; pair couplings with the higher qubit outermost
//! (`(0,1), (0,2), (1,2), (0,3), …`), so growing the bath appends draws
//! without disturbing earlier ones.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::params::BathParams;

/// Named, independent ChaCha streams used for each family of parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u64)]
pub enum Substream {
    OneBodyX = 1,
    OneBodyZ = 2,
    TwoBody = 3,
    Coupling = 4,
}

struct UniformStream(ChaCha20Rng);

impl UniformStream {
    fn new(seed: u64, stream: Substream) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(stream as u64);
        Self(rng)
    }

    fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }
}

/// Position of the pair `(a, b)`, `a < b` (bath-local, 0-based) in the pair
/// arrays of a [`DisorderRealization`].
pub fn pair_index(a: usize, b: usize) -> usize {
    debug_assert!(a < b);
    b * (b - 1) / 2 + a
}

/// One draw of all static bath parameters. Vectors are indexed by the
/// bath-local qubit `k = 0..N`, i.e. register qubit `k + 3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisorderRealization {
    pub seed: u64,
    pub b_x: Vec<f64>,
    pub b_z: Vec<f64>,
    /// Pair couplings, ordered by [`pair_index`].
    pub j: Vec<f64>,
    pub lambda: Vec<f64>,
}

impl DisorderRealization {
    pub fn n_bath(&self) -> usize {
        self.b_x.len()
    }

    /// Coupling between bath-local qubits `a` and `b` (any order).
    pub fn j_pair(&self, a: usize, b: usize) -> f64 {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.j[pair_index(lo, hi)]
    }

    /// Pairs `(a, b, J_ab)` in draw order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let n = self.n_bath();
        (1..n).flat_map(move |b| (0..b).map(move |a| (a, b, self.j[pair_index(a, b)])))
    }
}

/// Draws every static flaw uniformly from its interval; deterministic in
/// `(params, seed)`.
pub fn sample_disorder(params: &BathParams, seed: u64) -> DisorderRealization {
    let n = params.n_bath;
    let half = params.detuning / 2.0;
    let draw = |stream: Substream, count: usize, lo: f64, hi: f64| -> Vec<f64> {
        let mut s = UniformStream::new(seed, stream);
        (0..count).map(|_| s.uniform(lo, hi)).collect()
    };
    DisorderRealization {
        seed,
        b_x: draw(Substream::OneBodyX, n, params.b0_x - half, params.b0_x + half),
        b_z: draw(Substream::OneBodyZ, n, params.b0_z - half, params.b0_z + half),
        j: draw(Substream::TwoBody, n * n.saturating_sub(1) / 2, -params.j_x, params.j_x),
        lambda: draw(Substream::Coupling, n, -params.lambda, params.lambda),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_intervals_give_means() {
        let p = BathParams {
            detuning: 0.0,
            j_x: 0.0,
            lambda: 0.0,
            ..BathParams::default()
        };
        let d = sample_disorder(&p, 99);
        assert!(d.b_x.iter().all(|&b| b == p.b0_x));
        assert!(d.b_z.iter().all(|&b| b == p.b0_z));
        assert!(d.j.iter().all(|&j| j == 0.0));
        assert!(d.lambda.iter().all(|&l| l == 0.0));
        assert_eq!(d.j.len(), 45);
    }

    #[test]
    fn same_seed_same_realization() {
        let p = BathParams::default();
        assert_eq!(sample_disorder(&p, 7), sample_disorder(&p, 7));
        assert_ne!(sample_disorder(&p, 7), sample_disorder(&p, 8));
    }

    #[test]
    fn draws_respect_intervals() {
        let p = BathParams {
            j_x: 2.0,
            lambda: 0.1,
            ..BathParams::default()
        };
        for seed in 0..20 {
            let d = sample_disorder(&p, seed);
            assert!(d.b_x.iter().chain(&d.b_z).all(|&b| (0.8..=1.2).contains(&b)));
            assert!(d.j.iter().all(|&j| (-2.0..=2.0).contains(&j)));
            assert!(d.lambda.iter().all(|&l| (-0.1..=0.1).contains(&l)));
        }
    }

    #[test]
    fn one_body_mean_converges() {
        // 10^5 draws of U(0.8, 1.2): standard error of the mean ≈ 3.7e-4.
        let mut s = UniformStream::new(3, Substream::OneBodyX);
        let xs: Vec<f64> = (0..100_000).map(|_| s.uniform(0.8, 1.2)).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((0.996..=1.004).contains(&mean), "mean {mean}");
        let (lo, hi) = xs.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        assert!(lo >= 0.8 && hi <= 1.2);
    }

    #[test]
    fn growing_the_bath_keeps_earlier_draws() {
        let small = sample_disorder(&BathParams::default().with_n(4), 5);
        let large = sample_disorder(&BathParams::default().with_n(10), 5);
        assert_eq!(small.b_x[..], large.b_x[..4]);
        assert_eq!(small.lambda[..], large.lambda[..4]);
        for (a, b, j) in small.pairs() {
            assert_eq!(large.j_pair(a, b), j);
        }
    }

    #[test]
    fn substreams_are_independent() {
        let mut x = UniformStream::new(1, Substream::OneBodyX);
        let mut z = UniformStream::new(1, Substream::OneBodyZ);
        assert_ne!(x.unit(), z.unit());
    }
}
