//! Independent reference implementations used as test oracles. Everything
//! here works on raw matrices with explicit index loops or nalgebra calls,
//! never through the library's own channel or divergence code.

#![allow(dead_code)]

use thermo_recover::{ComplexMatrix, C64};

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// `m^p` on the eigenvalues above `cut`, via nalgebra's Hermitian eigensolver.
pub fn herm_pow(m: &ComplexMatrix, p: f64, cut: f64) -> ComplexMatrix {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let lam = eig.eigenvalues[k];
        if lam > cut {
            let v = eig.eigenvectors.column(k);
            out += (v * v.adjoint()).scale(lam.powf(p));
        }
    }
    out
}

pub fn herm_log(m: &ComplexMatrix) -> ComplexMatrix {
    let eig = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let v = eig.eigenvectors.column(k);
        out += (v * v.adjoint()).scale(eig.eigenvalues[k].ln());
    }
    out
}

/// `Tr_B` or `Tr_A` of an operator on `A (x) B` by explicit summation.
pub fn trace_out_second(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(da, da, |i, j| (0..db).map(|b| m[(i * db + b, j * db + b)]).sum())
}

pub fn trace_out_first(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(db, db, |i, j| (0..da).map(|a| m[(a * db + i, a * db + j)]).sum())
}

/// Kraus operators `sqrt(p_b) <b'| V |b>` of `X -> Tr_B[V (X (x) diag(p)) V^dag]`.
pub fn kraus(v: &ComplexMatrix, ds: usize, bath_probs: &[f64]) -> Vec<ComplexMatrix> {
    let db = bath_probs.len();
    let mut out = Vec::new();
    for bp in 0..db {
        for (b, &p) in bath_probs.iter().enumerate() {
            out.push(ComplexMatrix::from_fn(ds, ds, |s2, s| v[(s2 * db + bp, s * db + b)] * p.sqrt()));
        }
    }
    out
}

pub fn apply_kraus(ks: &[ComplexMatrix], x: &ComplexMatrix) -> ComplexMatrix {
    ks.iter().map(|k| k * x * k.adjoint()).fold(ComplexMatrix::zeros(x.nrows(), x.nrows()), |a, b| a + b)
}

pub fn apply_kraus_adjoint(ks: &[ComplexMatrix], y: &ComplexMatrix) -> ComplexMatrix {
    ks.iter().map(|k| k.adjoint() * y * k).fold(ComplexMatrix::zeros(y.nrows(), y.nrows()), |a, b| a + b)
}

/// `theta^1/2 N^dag(N(theta)^-1/2 Y N(theta)^-1/2) theta^1/2` from Kraus operators.
pub fn petz_via_kraus(ks: &[ComplexMatrix], theta: &ComplexMatrix, y: &ComplexMatrix) -> ComplexMatrix {
    let image = apply_kraus(ks, theta);
    let inv = herm_pow(&image, -0.5, 1e-12);
    let half = herm_pow(theta, 0.5, 0.0);
    &half * apply_kraus_adjoint(ks, &(&inv * y * &inv)) * &half
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn diag_of(m: &ComplexMatrix) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, i)].re).collect()
}

/// Classical Renyi divergence of probability vectors, straight from the sum.
pub fn classical_renyi(p: &[f64], q: &[f64], alpha: f64) -> f64 {
    let s: f64 = p.iter().zip(q).filter(|(pi, _)| **pi > 0.0).map(|(pi, qi)| pi.powf(alpha) * qi.powf(1.0 - alpha)).sum();
    s.ln() / (alpha - 1.0)
}

pub fn classical_kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).filter(|(pi, _)| **pi > 0.0).map(|(pi, qi)| pi * (pi / qi).ln()).sum()
}
