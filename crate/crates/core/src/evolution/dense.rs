//! Exact propagation through a full symmetric eigendecomposition.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::SparseHamiltonian;
use crate::states::StateVector;

pub const DEFAULT_DENSE_CAP: usize = 4096;

/// `H = Q diag(E) Q^T`; evolves by `Q exp(-i E t) Q^T psi`.
#[derive(Debug, Clone)]
pub struct DensePropagator {
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl DensePropagator {
    pub fn new(h: &SparseHamiltonian, cap: usize) -> Result<Self> {
        if h.dim() > cap {
            return Err(Error::Capacity { dim: h.dim(), cap });
        }
        Ok(Self::from_matrix(h.to_dense()))
    }

    pub fn from_matrix(m: DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(m);
        Self {
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &DVector<f64> {
        &self.energies
    }

    pub fn evolve_amplitudes(&self, psi: &[Complex64], t: f64) -> Vec<Complex64> {
        if t == 0.0 {
            return psi.to_vec();
        }
        let n = self.dim();
        let re = DVector::from_iterator(n, psi.iter().map(|z| z.re));
        let im = DVector::from_iterator(n, psi.iter().map(|z| z.im));
        let qre = self.vectors.tr_mul(&re);
        let qim = self.vectors.tr_mul(&im);
        let mut yre = DVector::zeros(n);
        let mut yim = DVector::zeros(n);
        for k in 0..n {
            let phase = Complex64::from_polar(1.0, -self.energies[k] * t);
            let c = Complex64::new(qre[k], qim[k]) * phase;
            yre[k] = c.re;
            yim[k] = c.im;
        }
        let xre = &self.vectors * yre;
        let xim = &self.vectors * yim;
        (0..n).map(|k| Complex64::new(xre[k], xim[k])).collect()
    }

    pub fn evolve(&self, psi: &StateVector, t: f64) -> StateVector {
        StateVector::from_raw(psi.basis().clone(), self.evolve_amplitudes(psi.amplitudes(), t))
    }

    /// Full propagator matrix `exp(-i H t)`.
    pub fn unitary(&self, t: f64) -> DMatrix<Complex64> {
        let n = self.dim();
        if t == 0.0 {
            return DMatrix::identity(n, n);
        }
        let q = self.vectors.map(|x| Complex64::new(x, 0.0));
        let phases = DMatrix::from_diagonal(&DVector::from_iterator(
            n,
            self.energies.iter().map(|&e| Complex64::from_polar(1.0, -e * t)),
        ));
        &q * phases * q.transpose()
    }
}

/// `exp(-i H t) psi` via eigendecomposition; errors past `cap`.
pub fn evolve_dense(h: &SparseHamiltonian, psi: &StateVector, t: f64, cap: usize) -> Result<StateVector> {
    Ok(DensePropagator::new(h, cap)?.evolve(psi, t))
}
