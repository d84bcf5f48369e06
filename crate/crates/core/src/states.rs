//! Initial states and the spatial reflection.
//!
//! Two-particle spin states are built from operator products, e.g. the
//! singlet `(c+_{i,up} c+_{j,down} - c+_{i,down} c+_{j,up}) |0> / sqrt(2)`,
//! and then reordered into the basis convention of [`crate::basis`].

use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;

use crate::basis::{mirror_mask, reflection_sign, FockConfig, ProductBasis, Spin};
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: Arc<ProductBasis>,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wrap amplitudes that are already unit-norm.
    pub fn from_amplitudes(basis: Arc<ProductBasis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::param(format!(
                "{} amplitudes for basis dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::param(format!("state norm is {n}, expected 1")));
        }
        Ok(Self { basis, amplitudes })
    }

    /// Normalize arbitrary nonzero amplitudes.
    pub fn normalized(basis: Arc<ProductBasis>, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::param(format!(
                "{} amplitudes for basis dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        let n = norm(&amplitudes);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::param("cannot normalize a zero or non-finite state"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= n);
        Ok(Self { basis, amplitudes })
    }

    /// Evolution output; skips the norm check since propagators only
    /// approximately preserve it.
    pub(crate) fn from_raw(basis: Arc<ProductBasis>, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(amplitudes.len(), basis.dim());
        Self { basis, amplitudes }
    }

    /// Normalized combination `sum_k w_k * (ops_k) |0>` of operator products.
    pub fn from_operator_terms(
        basis: Arc<ProductBasis>,
        terms: &[(f64, &[(usize, Spin)])],
    ) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); basis.dim()];
        for &(weight, ops) in terms {
            for &(site, _) in ops {
                check_site(&basis, site)?;
            }
            let (cfg, sign) = FockConfig::from_creations(ops)
                .ok_or_else(|| Error::param("operator product annihilates the vacuum"))?;
            let k = basis.index_of(cfg).ok_or_else(|| {
                Error::param(format!(
                    "configuration lies outside sector ({}, {})",
                    basis.n_up(),
                    basis.n_down()
                ))
            })?;
            amps[k] += weight * f64::from(sign);
        }
        Self::normalized(basis, amps)
    }

    /// Uniformly random direction on the unit sphere (Gaussian components).
    pub fn random<R: Rng + ?Sized>(basis: Arc<ProductBasis>, rng: &mut R) -> Self {
        loop {
            let amps: Vec<Complex64> = (0..basis.dim())
                .map(|_| Complex64::new(gaussian(rng), gaussian(rng)))
                .collect();
            if let Ok(s) = Self::normalized(basis.clone(), amps) {
                return s;
            }
        }
    }

    pub fn basis(&self) -> &Arc<ProductBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn amplitude(&self, cfg: FockConfig) -> Complex64 {
        self.basis
            .index_of(cfg)
            .map(|k| self.amplitudes[k])
            .unwrap_or_default()
    }
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn check_site(basis: &ProductBasis, site: usize) -> Result<()> {
    if site == 0 || site > basis.sites() {
        return Err(Error::param(format!(
            "site {site} outside 1..={}",
            basis.sites()
        )));
    }
    Ok(())
}

fn require_sector(basis: &ProductBasis, n_up: usize, n_down: usize, what: &str) -> Result<()> {
    if basis.n_up() != n_up || basis.n_down() != n_down {
        return Err(Error::param(format!(
            "{what} needs sector ({n_up}, {n_down}), basis is ({}, {})",
            basis.n_up(),
            basis.n_down()
        )));
    }
    Ok(())
}

/// Both species on `site`: `c+_{s,up} c+_{s,down} |0>`.
pub fn doublon_at(basis: Arc<ProductBasis>, site: usize) -> Result<StateVector> {
    require_sector(&basis, 1, 1, "doublon")?;
    StateVector::from_operator_terms(basis, &[(1.0, &[(site, Spin::Up), (site, Spin::Down)])])
}

fn pair(basis: Arc<ProductBasis>, i: usize, j: usize, relative: f64, what: &str) -> Result<StateVector> {
    require_sector(&basis, 1, 1, what)?;
    if i == j {
        return Err(Error::param(format!(
            "{what} needs two distinct sites (i = j = {i} is a doublon)"
        )));
    }
    StateVector::from_operator_terms(
        basis,
        &[
            (1.0, &[(i, Spin::Up), (j, Spin::Down)]),
            (relative, &[(i, Spin::Down), (j, Spin::Up)]),
        ],
    )
}

/// `(|up_i down_j> - |down_i up_j>) / sqrt(2)`, total spin 0.
pub fn singlet_pair(basis: Arc<ProductBasis>, i: usize, j: usize) -> Result<StateVector> {
    pair(basis, i, j, -1.0, "singlet")
}

/// `(|up_i down_j> + |down_i up_j>) / sqrt(2)`, total spin 1 with `S_z = 0`.
pub fn triplet_pair(basis: Arc<ProductBasis>, i: usize, j: usize) -> Result<StateVector> {
    pair(basis, i, j, 1.0, "triplet")
}

/// A doublon on `doublon_site` plus a spin-up spectator on `up_site`:
/// `c+_{u,up} c+_{d,up} c+_{d,down} |0>`.
pub fn doublon_plus_up(basis: Arc<ProductBasis>, doublon_site: usize, up_site: usize) -> Result<StateVector> {
    require_sector(&basis, 2, 1, "doublon plus spin-up")?;
    if doublon_site == up_site {
        return Err(Error::param(format!(
            "spin-up spectator collides with the doublon on site {up_site}"
        )));
    }
    StateVector::from_operator_terms(
        basis,
        &[(
            1.0,
            &[(up_site, Spin::Up), (doublon_site, Spin::Up), (doublon_site, Spin::Down)],
        )],
    )
}

/// One fermion of the given spin on `site`.
pub fn single_particle(basis: Arc<ProductBasis>, site: usize, spin: Spin) -> Result<StateVector> {
    match spin {
        Spin::Up => require_sector(&basis, 1, 0, "single spin-up particle")?,
        Spin::Down => require_sector(&basis, 0, 1, "single spin-down particle")?,
    }
    StateVector::from_operator_terms(basis, &[(1.0, &[(site, spin)])])
}

/// Unitary parity: every `c+_{j,s}` becomes `c+_{L+1-j,s}`.
pub fn mirror_state(psi: &StateVector) -> StateVector {
    let basis = psi.basis.clone();
    let sites = basis.sites();
    let mut out = vec![Complex64::new(0.0, 0.0); basis.dim()];
    for (k, cfg) in basis.configs().enumerate() {
        let target = FockConfig {
            up: mirror_mask(sites, cfg.up),
            down: mirror_mask(sites, cfg.down),
        };
        let sign = reflection_sign(cfg.up) * reflection_sign(cfg.down);
        let t = basis.index_of(target).expect("reflection preserves particle numbers");
        out[t] = psi.amplitudes[k] * f64::from(sign);
    }
    StateVector::from_raw(basis, out)
}
