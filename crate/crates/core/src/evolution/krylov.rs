//! Lanczos approximation of `exp(-i H dt) v` for real symmetric `H`.
//!
//! The Krylov basis is built directly on the complex vector; since `H` is
//! Hermitian the projected matrix is real tridiagonal.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::SparseHamiltonian;
use crate::states::norm;

/// Outcome of one Lanczos projection.
pub(crate) struct KrylovResult {
    pub vector: Vec<Complex64>,
    /// A posteriori estimate of the local error norm.
    pub error_estimate: f64,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn lanczos_exp(h: &SparseHamiltonian, v: &[Complex64], dt: f64, max_dim: usize) -> KrylovResult {
    let n = v.len();
    let beta0 = norm(v);
    if beta0 == 0.0 || dt == 0.0 {
        return KrylovResult {
            vector: v.to_vec(),
            error_estimate: 0.0,
        };
    }
    let m_max = max_dim.min(n).max(1);
    let scale = h.norm_bound().max(1.0);

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m_max + 1);
    basis.push(v.iter().map(|z| z / beta0).collect());
    let mut alpha = Vec::with_capacity(m_max);
    let mut beta: Vec<f64> = Vec::with_capacity(m_max);
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut residual_beta = 0.0;

    for j in 0..m_max {
        h.apply(&basis[j], &mut w);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        for (wi, vi) in w.iter_mut().zip(&basis[j]) {
            *wi -= vi * a;
        }
        if j > 0 {
            let b = beta[j - 1];
            for (wi, vi) in w.iter_mut().zip(&basis[j - 1]) {
                *wi -= vi * b;
            }
        }
        // full reorthogonalization
        for q in &basis {
            let c = dot(q, &w);
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= qi * c;
            }
        }
        let b = norm(&w);
        if b <= 1e-13 * scale {
            // invariant subspace: projection is exact
            residual_beta = 0.0;
            break;
        }
        if j + 1 == m_max {
            residual_beta = b;
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|z| z / b).collect());
    }

    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    // coefficients c = S exp(-i theta dt) S^T e1
    let coeffs: Vec<Complex64> = (0..m)
        .map(|r| {
            (0..m)
                .map(|k| {
                    let s = eig.eigenvectors[(r, k)] * eig.eigenvectors[(0, k)];
                    Complex64::from_polar(s, -eig.eigenvalues[k] * dt)
                })
                .sum()
        })
        .collect();

    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (c, q) in coeffs.iter().zip(&basis) {
        let c = c * beta0;
        for (o, qi) in out.iter_mut().zip(q) {
            *o += qi * c;
        }
    }
    KrylovResult {
        vector: out,
        error_estimate: beta0 * residual_beta * coeffs[m - 1].norm(),
    }
}

/// One Krylov step with recursive halving until the local error estimate
/// is below `tolerance * |dt|`.
pub(crate) fn krylov_step(
    h: &SparseHamiltonian,
    v: &[Complex64],
    dt: f64,
    max_dim: usize,
    tolerance: f64,
) -> Result<Vec<Complex64>> {
    const MAX_DEPTH: u32 = 24;
    fn go(
        h: &SparseHamiltonian,
        v: &[Complex64],
        dt: f64,
        max_dim: usize,
        tolerance: f64,
        depth: u32,
    ) -> Result<Vec<Complex64>> {
        let r = lanczos_exp(h, v, dt, max_dim);
        if r.error_estimate <= tolerance * dt.abs() {
            return Ok(r.vector);
        }
        if depth >= MAX_DEPTH {
            return Err(Error::Numerical {
                message: "Krylov step failed to reach tolerance".into(),
                residual: r.error_estimate,
                step: dt,
                dim: v.len(),
            });
        }
        let half = go(h, v, dt / 2.0, max_dim, tolerance, depth + 1)?;
        go(h, &half, dt / 2.0, max_dim, tolerance, depth + 1)
    }
    go(h, v, dt, max_dim, tolerance, 0)
}
