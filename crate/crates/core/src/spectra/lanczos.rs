//! Lanczos iteration with full reorthogonalization for the lowest
//! eigenpairs of a Hermitian operator.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::qop::{symmetric_eigen, LinearOperator};
use crate::{Error, Result, C64};

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Krylov dimension cap; also capped by the operator dimension.
    pub max_dim: usize,
    /// Convergence threshold on the Ritz residual estimate, relative to
    /// `max(1, |θ|)`.
    pub tol: f64,
    pub check_every: usize,
    /// Seed of the deterministic start vector.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_dim: 800,
            tol: 1e-12,
            check_every: 10,
            seed: 0x1a2b_3c4d,
        }
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn orthogonalize(w: &mut [C64], basis: &[Vec<C64>]) {
    for _ in 0..2 {
        for v in basis {
            let c = dot(v, w);
            w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
        }
    }
}

fn random_start(dim: usize, rng: &mut ChaCha8Rng, basis: &[Vec<C64>]) -> Option<Vec<C64>> {
    for _ in 0..8 {
        let mut w: Vec<C64> = (0..dim).map(|_| C64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
        orthogonalize(&mut w, basis);
        let n = norm(&w);
        if n > 1e-8 {
            w.iter_mut().for_each(|z| *z /= n);
            return Some(w);
        }
    }
    None
}

/// Ritz values (ascending), Ritz vectors (columns) and the final Krylov
/// dimension.
pub fn lanczos_lowest(
    op: &dyn LinearOperator,
    n_eig: usize,
    opts: &LanczosOptions,
) -> Result<(Vec<f64>, DMatrix<C64>, usize)> {
    let dim = op.dim();
    if n_eig == 0 || n_eig > dim {
        return Err(Error::arg(format!("n_eig = {n_eig} outside 1..={dim}")));
    }
    let max_dim = opts.max_dim.min(dim).max(n_eig);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(max_dim);
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![C64::new(0.0, 0.0); dim];
    let mut v = random_start(dim, &mut rng, &basis).expect("non-trivial start vector");
    let mut last_estimate = f64::INFINITY;

    loop {
        op.apply_into(&v, &mut w);
        let a = dot(&v, &w).re;
        basis.push(std::mem::take(&mut v));
        alpha.push(a);
        orthogonalize(&mut w, &basis);
        let b = norm(&w);
        let m = basis.len();

        let done_by_size = m >= max_dim;
        let check = m >= n_eig && (m % opts.check_every == 0 || done_by_size || b < 1e-12);
        if check {
            let (theta, s) = tridiagonal_eigen(&alpha, &beta)?;
            let worst = (0..n_eig)
                .map(|i| b * s[(m - 1, i)].abs() / theta[i].abs().max(1.0))
                .fold(0.0, f64::max);
            last_estimate = worst;
            if worst <= opts.tol || m == dim {
                return Ok((theta[..n_eig].to_vec(), ritz_vectors(&basis, &s, n_eig), m));
            }
        }
        if done_by_size {
            return Err(Error::Convergence {
                reason: format!("Lanczos reached Krylov dimension {m} without converging {n_eig} pairs"),
                max_residual: last_estimate,
            });
        }
        if b < 1e-12 {
            // Invariant subspace: continue from a fresh orthogonal direction.
            beta.push(0.0);
            v = random_start(dim, &mut rng, &basis).ok_or_else(|| Error::Convergence {
                reason: "could not extend the Krylov basis".into(),
                max_residual: last_estimate,
            })?;
        } else {
            beta.push(b);
            v = w.iter().map(|z| z / b).collect();
        }
    }
}

fn tridiagonal_eigen(alpha: &[f64], beta: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    symmetric_eigen(t, true)
}

fn ritz_vectors(basis: &[Vec<C64>], s: &DMatrix<f64>, n: usize) -> DMatrix<C64> {
    let dim = basis[0].len();
    let mut out = DMatrix::zeros(dim, n);
    for i in 0..n {
        let mut col = vec![C64::new(0.0, 0.0); dim];
        for (k, v) in basis.iter().enumerate() {
            let c = s[(k, i)];
            col.iter_mut().zip(v).for_each(|(x, y)| *x += y * c);
        }
        let nrm = norm(&col);
        for (r, z) in col.into_iter().enumerate() {
            out[(r, i)] = z / nrm;
        }
    }
    out
}
