//! Independent reference implementations for integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use fhtunnel::{FockConfig, HubbardParams, ProductBasis};

/// Full Fock space of `2L` fermionic modes built from Jordan-Wigner strings.
///
/// Mode `j - 1` is `(j, up)` and mode `L + j - 1` is `(j, down)`. A basis
/// state is `prod_k (c_k^dag)^{n_k} |0>` with `k` ascending left to right.
/// Mode 0 is the leftmost Kronecker factor.
pub struct FockOracle {
    pub sites: usize,
    creators: Vec<DMatrix<f64>>,
}

impl FockOracle {
    pub fn new(sites: usize) -> Self {
        let modes = 2 * sites;
        let id = DMatrix::<f64>::identity(2, 2);
        let z = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        // |0> = e0, |1> = e1; raising puts e0 -> e1
        let raise = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        let creators = (0..modes)
            .map(|k| {
                let mut m = DMatrix::<f64>::identity(1, 1);
                for q in 0..modes {
                    let factor = match q.cmp(&k) {
                        std::cmp::Ordering::Less => &z,
                        std::cmp::Ordering::Equal => &raise,
                        std::cmp::Ordering::Greater => &id,
                    };
                    m = m.kronecker(factor);
                }
                m
            })
            .collect();
        Self { sites, creators }
    }

    pub fn dim(&self) -> usize {
        1 << (2 * self.sites)
    }

    fn mode(&self, site: usize, up: bool) -> usize {
        if up {
            site - 1
        } else {
            self.sites + site - 1
        }
    }

    pub fn cdag(&self, site: usize, up: bool) -> &DMatrix<f64> {
        &self.creators[self.mode(site, up)]
    }

    pub fn c(&self, site: usize, up: bool) -> DMatrix<f64> {
        self.cdag(site, up).transpose()
    }

    pub fn number(&self, site: usize, up: bool) -> DMatrix<f64> {
        self.cdag(site, up) * self.c(site, up)
    }

    pub fn hamiltonian(&self, p: &HubbardParams) -> DMatrix<f64> {
        let l = self.sites;
        let mut h = DMatrix::zeros(self.dim(), self.dim());
        for (up, j_s) in [(true, p.hopping_up), (false, p.hopping_down)] {
            for j in 1..l {
                let hop = self.cdag(j, up) * self.c(j + 1, up);
                h -= (&hop + hop.transpose()) * j_s;
            }
        }
        for j in 1..=l {
            let (nu, nd) = (self.number(j, true), self.number(j, false));
            h += &nu * &nd * p.interaction;
            h += (nu + nd) * p.potential[j - 1];
        }
        h
    }

    /// `S^- S^+ + S_z (S_z + 1)`.
    pub fn spin_squared(&self) -> DMatrix<f64> {
        let l = self.sites;
        let mut s_plus = DMatrix::zeros(self.dim(), self.dim());
        let mut s_z = DMatrix::zeros(self.dim(), self.dim());
        for j in 1..=l {
            s_plus += self.cdag(j, true) * self.c(j, false);
            s_z += (self.number(j, true) - self.number(j, false)) * 0.5;
        }
        let id = DMatrix::<f64>::identity(self.dim(), self.dim());
        s_plus.transpose() * &s_plus + &s_z * (&s_z + id)
    }

    pub fn vacuum(&self) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        v[0] = 1.0;
        v
    }

    /// Apply creation operators, rightmost first.
    pub fn create(&self, ops: &[(usize, bool)], v: &DVector<f64>) -> DVector<f64> {
        ops.iter().rev().fold(v.clone(), |acc, &(s, up)| self.cdag(s, up) * acc)
    }

    /// Full-space index of a configuration.
    pub fn index(&self, cfg: FockConfig) -> usize {
        let modes = 2 * self.sites;
        let mut idx = 0;
        for k in 0..modes {
            let occupied = if k < self.sites {
                cfg.up >> k & 1
            } else {
                cfg.down >> (k - self.sites) & 1
            };
            if occupied == 1 {
                idx |= 1 << (modes - 1 - k);
            }
        }
        idx
    }

    pub fn restrict(&self, full: &DMatrix<f64>, basis: &ProductBasis) -> DMatrix<f64> {
        let idx: Vec<usize> = basis.configs().map(|c| self.index(c)).collect();
        DMatrix::from_fn(idx.len(), idx.len(), |r, c| full[(idx[r], idx[c])])
    }

    pub fn restrict_vector(&self, full: &DVector<f64>, basis: &ProductBasis) -> Vec<f64> {
        basis.configs().map(|c| full[self.index(c)]).collect()
    }
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `exp(-i H t) v` from an eigendecomposition computed here.
pub fn reference_evolve(h: &DMatrix<f64>, v: &[Complex64], t: f64) -> Vec<Complex64> {
    let eig = SymmetricEigen::new(h.clone());
    let q = &eig.eigenvectors;
    let n = v.len();
    let coeffs: Vec<Complex64> = (0..n)
        .map(|k| {
            let proj: Complex64 = (0..n).map(|i| v[i] * q[(i, k)]).sum();
            proj * Complex64::from_polar(1.0, -eig.eigenvalues[k] * t)
        })
        .collect();
    (0..n)
        .map(|i| (0..n).map(|k| coeffs[k] * q[(i, k)]).sum())
        .collect()
}

pub fn vec_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_deviation(values: &[f64], reference: f64) -> f64 {
    values.iter().map(|v| (v - reference).abs()).fold(0.0, f64::max)
}

/// Coefficient of determination of a least-squares line through `(x, y)`.
pub fn linear_r2(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    let ss_tot: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    1.0 - ss_res / ss_tot
}
