#![allow(dead_code)]

use ckd_lab::C64;
use nalgebra::DMatrix;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn sx() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn sz() -> DMatrix<C64> {
    DMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

pub fn id(n: usize) -> DMatrix<C64> {
    DMatrix::identity(n, n)
}

pub fn kron_all(parts: &[DMatrix<C64>]) -> DMatrix<C64> {
    parts.iter().skip(1).fold(parts[0].clone(), |acc, p| acc.kronecker(p))
}

/// `exp(−iHt)` by scaling and squaring a Taylor series.
pub fn taylor_propagator(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let a = h * c(0.0, -t);
    let norm: f64 = a.iter().map(|z| z.norm()).sum();
    let squarings = (norm.max(1.0).log2().ceil() as i32 + 3).max(0);
    let scaled = &a / c(2f64.powi(squarings), 0.0);
    let n = h.nrows();
    let mut sum = DMatrix::<C64>::identity(n, n);
    let mut term = DMatrix::<C64>::identity(n, n);
    for k in 1..40 {
        term = &term * &scaled / c(k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Tr over the trailing `dim_b` factor of a `(4·dim_b)`-dimensional matrix.
pub fn trace_bath(rho: &DMatrix<C64>, dim_b: usize) -> DMatrix<C64> {
    DMatrix::from_fn(4, 4, |a, ap| (0..dim_b).map(|b| rho[(a * dim_b + b, ap * dim_b + b)]).sum())
}
