//! `exp(−iHt)ψ` through Lanczos subspaces, for operators too large to
//! diagonalize.
//!
//! Each step builds an `m`-dimensional Krylov basis `V` with tridiagonal
//! projection `T` and uses `ψ(t + s) ≈ ‖ψ‖ V exp(−iTs) e₁`. The step length
//! is the largest `s` for which the a-posteriori bound
//! `‖ψ‖ β_m |[exp(−iTs) e₁]_m|` stays below `tol · s`, and every output
//! time inside the step reuses the same basis.

use nalgebra::DMatrix;

use crate::qop::{symmetric_eigen, LinearOperator};
use crate::{Error, Result, C64};

pub(crate) const DEFAULT_KRYLOV_DIM: usize = 40;

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

struct Subspace {
    basis: Vec<Vec<C64>>,
    theta: Vec<f64>,
    q: DMatrix<f64>,
    /// `β_m`; zero when the subspace is invariant.
    beta_last: f64,
}

impl Subspace {
    fn build(op: &dyn LinearOperator, psi: &[C64], beta0: f64, m_max: usize) -> Result<Self> {
        let dim = psi.len();
        let m_max = m_max.min(dim).max(1);
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m_max);
        basis.push(psi.iter().map(|z| z / beta0).collect());
        let (mut alpha, mut beta) = (Vec::with_capacity(m_max), Vec::with_capacity(m_max));
        let mut w = vec![C64::new(0.0, 0.0); dim];
        let mut beta_last = 0.0;
        loop {
            let j = basis.len() - 1;
            op.apply_into(&basis[j], &mut w);
            let a = dot(&basis[j], &w).re;
            alpha.push(a);
            let before = norm(&w);
            for v in &basis {
                let c = dot(v, &w);
                w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
            }
            let mut b = norm(&w);
            if b < 0.7 * before {
                for v in &basis {
                    let c = dot(v, &w);
                    w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
                }
                b = norm(&w);
            }
            if !b.is_finite() {
                return Err(Error::Numeric("non-finite Lanczos vector".into()));
            }
            if b <= 1e-13 * before.max(1e-300) || b == 0.0 {
                break;
            }
            if basis.len() == m_max {
                beta_last = b;
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|z| z / b).collect());
        }
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
        let (theta, q) = symmetric_eigen(t, true)?;
        Ok(Self { basis, theta, q, beta_last })
    }

    /// `exp(−iTs) e₁`.
    fn coefficients(&self, s: f64) -> Vec<C64> {
        let m = self.theta.len();
        let mut out = vec![C64::new(0.0, 0.0); m];
        for l in 0..m {
            let w = C64::from_polar(self.q[(0, l)], -self.theta[l] * s);
            for (r, o) in out.iter_mut().enumerate() {
                *o += w * self.q[(r, l)];
            }
        }
        out
    }

    fn error(&self, s: f64, beta0: f64) -> f64 {
        if self.beta_last == 0.0 {
            return 0.0;
        }
        let m = self.theta.len();
        let last: C64 = (0..m)
            .map(|l| C64::from_polar(self.q[(0, l)] * self.q[(m - 1, l)], -self.theta[l] * s))
            .sum();
        beta0 * self.beta_last * last.norm()
    }

    fn combine(&self, coeffs: &[C64], beta0: f64, out: &mut [C64]) {
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (v, c) in self.basis.iter().zip(coeffs) {
            let c = c * beta0;
            out.iter_mut().zip(v).for_each(|(o, x)| *o += c * x);
        }
    }
}

/// Propagates `psi` under a constant `op` from `t0` to `t1`, emitting the
/// state at every `outputs` time in `(t0, t1]`. `tol` bounds the local
/// error per unit time.
pub(crate) fn krylov_segment(
    op: &dyn LinearOperator,
    psi: &mut [C64],
    t0: f64,
    t1: f64,
    outputs: &[(usize, f64)],
    tol: f64,
    m_max: usize,
    emit: &mut dyn FnMut(usize, &[C64]),
) -> Result<()> {
    let mut t = t0;
    let mut next = 0;
    let mut h_guess = t1 - t0;
    let mut buf = vec![C64::new(0.0, 0.0); psi.len()];
    while t < t1 {
        let beta0 = norm(psi);
        if beta0 == 0.0 {
            // zero stays zero
            while next < outputs.len() {
                emit(outputs[next].0, psi);
                next += 1;
            }
            return Ok(());
        }
        let sub = Subspace::build(op, psi, beta0, m_max)?;
        let remaining = t1 - t;
        let mut h = (h_guess * 1.5).min(remaining);
        if sub.error(remaining, beta0) <= tol * remaining {
            h = remaining;
        } else {
            while sub.error(h, beta0) > tol * h {
                h *= 0.8;
                if h <= 1e-13 * t.abs().max(1.0) {
                    return Err(Error::Integration { t, reason: format!("Krylov step underflow (h = {h:e})") });
                }
            }
            // grow while the bound allows
            while h < remaining {
                let trial = (h * 1.1).min(remaining);
                if sub.error(trial, beta0) > tol * trial {
                    break;
                }
                h = trial;
            }
        }
        let t_end = if h >= remaining { t1 } else { t + h };
        while next < outputs.len() && outputs[next].1 <= t_end {
            let c = sub.coefficients(outputs[next].1 - t);
            sub.combine(&c, beta0, &mut buf);
            emit(outputs[next].0, &buf);
            next += 1;
        }
        let c = sub.coefficients(t_end - t);
        sub.combine(&c, beta0, &mut buf);
        psi.copy_from_slice(&buf);
        h_guess = h;
        t = t_end;
    }
    Ok(())
}
