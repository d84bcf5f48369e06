//! Fermi-Hubbard Hamiltonian assembly on a fixed `(N_up, N_down)` sector.
//!
//! ```text
//! H = -sum_{j=1}^{L-1} sum_s J_s (c+_{j,s} c_{j+1,s} + h.c.)
//!     + sum_j (U n_{j,up} n_{j,down} + V_j n_j)
//! ```
//!
//! with open boundaries. Energies are in units of the hopping amplitude.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{is_occupied, FockConfig, ProductBasis, Spin};
use crate::error::{Error, Result};

/// Model parameters. Hopping is per species so that one species can be frozen.
#[derive(Debug, Clone, PartialEq)]
pub struct HubbardParams {
    pub sites: usize,
    pub hopping_up: f64,
    pub hopping_down: f64,
    pub interaction: f64,
    pub potential: Vec<f64>,
}

impl HubbardParams {
    pub fn new(sites: usize, hopping: f64, interaction: f64, potential: Vec<f64>) -> Result<Self> {
        let p = Self {
            sites,
            hopping_up: hopping,
            hopping_down: hopping,
            interaction,
            potential,
        };
        p.validate()?;
        if !(hopping > 0.0) {
            return Err(Error::param(format!("hopping must be positive, got {hopping}")));
        }
        Ok(p)
    }

    /// Suppress spin-down hopping (Falicov-Kimball limit).
    pub fn with_frozen_down(mut self) -> Self {
        self.hopping_down = 0.0;
        self
    }

    pub fn hopping(&self, spin: Spin) -> f64 {
        match spin {
            Spin::Up => self.hopping_up,
            Spin::Down => self.hopping_down,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.potential.len() != self.sites {
            return Err(Error::param(format!(
                "potential has {} entries for {} sites",
                self.potential.len(),
                self.sites
            )));
        }
        for (name, j) in [("hopping_up", self.hopping_up), ("hopping_down", self.hopping_down)] {
            if !j.is_finite() || j < 0.0 {
                return Err(Error::param(format!("{name} must be finite and >= 0, got {j}")));
            }
        }
        if !self.interaction.is_finite() {
            return Err(Error::param("interaction must be finite"));
        }
        if self.potential.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("potential entries must be finite"));
        }
        Ok(())
    }
}

/// Which barrier site carries the full height.
///
/// `A`: `V[L/2] = h`, `V[L/2+1] = h/2` (a left-incident particle meets the
/// steep side). `B`: the reverse (it meets the ramp).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BarrierOrientation {
    A,
    B,
}

impl BarrierOrientation {
    pub const BOTH: [BarrierOrientation; 2] = [BarrierOrientation::A, BarrierOrientation::B];

    pub fn label(self) -> &'static str {
        match self {
            BarrierOrientation::A => "A",
            BarrierOrientation::B => "B",
        }
    }
}

fn check_even_chain(sites: usize) -> Result<()> {
    if sites < 4 || !sites.is_multiple_of(2) {
        return Err(Error::param(format!(
            "barrier requires an even chain with L >= 4, got L = {sites}"
        )));
    }
    Ok(())
}

/// Two-site asymmetric barrier on the central sites `L/2` and `L/2 + 1`.
pub fn barrier_potential(sites: usize, height: f64, orientation: BarrierOrientation) -> Result<Vec<f64>> {
    check_even_chain(sites)?;
    if !height.is_finite() || height < 0.0 {
        return Err(Error::param(format!("barrier height must be >= 0, got {height}")));
    }
    let mut v = vec![0.0; sites];
    let (left, right) = match orientation {
        BarrierOrientation::A => (height, height / 2.0),
        BarrierOrientation::B => (height / 2.0, height),
    };
    v[sites / 2 - 1] = left;
    v[sites / 2] = right;
    Ok(v)
}

/// The barrier site whose potential is `h/2`.
pub fn jstar_site(sites: usize, height: f64, orientation: BarrierOrientation) -> Result<usize> {
    check_even_chain(sites)?;
    if !(height > 0.0) {
        return Err(Error::param("j* is undefined for a zero barrier"));
    }
    Ok(match orientation {
        BarrierOrientation::A => sites / 2 + 1,
        BarrierOrientation::B => sites / 2,
    })
}

/// Real symmetric sparse matrix in compressed-row form with both triangles
/// stored, tied to the basis it acts on.
///
/// Each row holds its diagonal first, then off-diagonal entries in assembly
/// order. Assembly is deterministic, so two builds with the same inputs are
/// bit-identical.
#[derive(Debug, Clone)]
pub struct SparseHamiltonian {
    basis: Arc<ProductBasis>,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl PartialEq for SparseHamiltonian {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis
            && self.row_ptr == other.row_ptr
            && self.cols == other.cols
            && self.values.iter().map(|v| v.to_bits()).eq(other.values.iter().map(|v| v.to_bits()))
    }
}

impl SparseHamiltonian {
    /// Build from explicit rows; every row lists `(column, value)` pairs.
    /// Rejects out-of-range columns, duplicates and asymmetric input.
    pub fn from_rows(basis: Arc<ProductBasis>, rows: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        let dim = basis.dim();
        if rows.len() != dim {
            return Err(Error::param(format!(
                "{} rows supplied for dimension {dim}",
                rows.len()
            )));
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (c, v) in row {
                if c >= dim {
                    return Err(Error::param(format!("column {c} out of range {dim}")));
                }
                cols.push(c);
                values.push(v);
            }
            row_ptr.push(cols.len());
        }
        let h = Self {
            basis,
            row_ptr,
            cols,
            values,
        };
        for r in 0..dim {
            let mut seen: Vec<usize> = h.row(r).map(|(c, _)| c).collect();
            seen.sort_unstable();
            if seen.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::param(format!("duplicate entry in row {r}")));
            }
        }
        if !h.is_symmetric() {
            return Err(Error::param("matrix is not symmetric"));
        }
        Ok(h)
    }

    pub fn zeros(basis: Arc<ProductBasis>) -> Self {
        let dim = basis.dim();
        Self {
            basis,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn basis(&self) -> &Arc<ProductBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).filter(|&(cc, _)| cc == c).map(|(_, v)| v).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|r| self.get(r, r)).collect()
    }

    /// Exact (bitwise) symmetry check.
    pub fn is_symmetric(&self) -> bool {
        (0..self.dim()).all(|r| self.row(r).all(|(c, v)| self.get(c, r).to_bits() == v.to_bits()))
    }

    /// `out = H x`.
    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim());
        debug_assert_eq!(out.len(), self.dim());
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += x[self.cols[k]] * self.values[k];
            }
            *o = acc;
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.apply(x, &mut out);
        out
    }

    /// `<x|H|x>` (real, since H is real symmetric).
    pub fn expectation(&self, x: &[Complex64]) -> f64 {
        let hx = self.mul_vec(x);
        x.iter().zip(&hx).map(|(a, b)| (a.conj() * b).re).sum()
    }

    /// Upper bound on the spectral radius (max absolute row sum).
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim())
            .map(|r| self.row(r).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for r in 0..n {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }
}

/// Assemble the sector Hamiltonian.
pub fn build_hamiltonian(params: &HubbardParams, basis: Arc<ProductBasis>) -> Result<SparseHamiltonian> {
    params.validate()?;
    if basis.sites() != params.sites {
        return Err(Error::param(format!(
            "basis has {} sites, parameters have {}",
            basis.sites(),
            params.sites
        )));
    }
    let sites = params.sites;
    let dim = basis.dim();
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);

    for (r, cfg) in basis.configs().enumerate() {
        let potential: f64 = (1..=sites)
            .map(|j| {
                let n = is_occupied(cfg.up, j) as u8 + is_occupied(cfg.down, j) as u8;
                params.potential[j - 1] * f64::from(n)
            })
            .sum();
        let doublons = (cfg.up & cfg.down).count_ones();
        cols.push(r);
        values.push(potential + params.interaction * f64::from(doublons));

        for spin in [Spin::Up, Spin::Down] {
            let j_hop = params.hopping(spin);
            if j_hop == 0.0 {
                continue;
            }
            for j in 1..sites {
                for (from, to) in [(j + 1, j), (j, j + 1)] {
                    if let Some((target, sign)) = hop(cfg, from, to, spin) {
                        let c = basis
                            .index_of(target)
                            .expect("hop stays inside the sector");
                        cols.push(c);
                        values.push(-j_hop * f64::from(sign));
                    }
                }
            }
        }
        row_ptr.push(cols.len());
    }

    Ok(SparseHamiltonian {
        basis,
        row_ptr,
        cols,
        values,
    })
}

/// `c+_{to,s} c_{from,s}` on a two-species configuration.
fn hop(cfg: FockConfig, from: usize, to: usize, spin: Spin) -> Option<(FockConfig, i32)> {
    let (mid, s1) = cfg.annihilate(from, spin)?;
    let (out, s2) = mid.create(to, spin)?;
    Some((out, s1 * s2))
}

/// Single-particle tight-binding matrix `H_ij = V_i d_ij - J d_{i,j+1} - J d_{i,j-1}`.
pub fn build_single_particle(sites: usize, hopping: f64, potential: &[f64]) -> Result<DMatrix<f64>> {
    if potential.len() != sites {
        return Err(Error::param(format!(
            "potential has {} entries for {sites} sites",
            potential.len()
        )));
    }
    if sites == 0 {
        return Err(Error::param("site count must be positive"));
    }
    let mut m = DMatrix::zeros(sites, sites);
    for i in 0..sites {
        m[(i, i)] = potential[i];
        if i + 1 < sites {
            m[(i, i + 1)] = -hopping;
            m[(i + 1, i)] = -hopping;
        }
    }
    Ok(m)
}

/// Effective single-particle Hamiltonian for the mobile spin-up fermion when
/// the spin-down fermion is pinned at site 1.
pub fn build_fk_hamiltonian(
    sites: usize,
    hopping: f64,
    interaction: f64,
    height: f64,
    orientation: BarrierOrientation,
) -> Result<DMatrix<f64>> {
    let mut v = barrier_potential(sites, height, orientation)?;
    v[0] += interaction;
    build_single_particle(sites, hopping, &v)
}

/// Total spin `S^2 = S^- S^+ + S_z (S_z + 1)` restricted to the sector.
pub fn total_spin_squared(basis: Arc<ProductBasis>) -> SparseHamiltonian {
    let sites = basis.sites();
    let sz = (basis.n_up() as f64 - basis.n_down() as f64) / 2.0;
    let dim = basis.dim();
    let mut row_ptr = Vec::with_capacity(dim + 1);
    let mut cols = Vec::new();
    let mut values = Vec::new();
    row_ptr.push(0);

    for (r, cfg) in basis.configs().enumerate() {
        let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
        acc.insert(r, sz * (sz + 1.0));
        // S^+ = sum_j c+_{j,up} c_{j,down}, then S^- = sum_i c+_{i,down} c_{i,up}.
        for j in 1..=sites {
            let Some((mid, s1)) = cfg.annihilate(j, Spin::Down) else { continue };
            let Some((raised, s2)) = mid.create(j, Spin::Up) else { continue };
            for i in 1..=sites {
                let Some((mid2, s3)) = raised.annihilate(i, Spin::Up) else { continue };
                let Some((lowered, s4)) = mid2.create(i, Spin::Down) else { continue };
                let c = basis.index_of(lowered).expect("S^-S^+ preserves the sector");
                *acc.entry(c).or_insert(0.0) += f64::from(s1 * s2 * s3 * s4);
            }
        }
        let diag = acc.remove(&r).unwrap_or(0.0);
        cols.push(r);
        values.push(diag);
        for (c, v) in acc {
            if v != 0.0 {
                cols.push(c);
                values.push(v);
            }
        }
        row_ptr.push(cols.len());
    }

    SparseHamiltonian {
        basis,
        row_ptr,
        cols,
        values,
    }
}

/// `[A, B] x` for two operators on the same basis.
pub fn commutator_apply(a: &SparseHamiltonian, b: &SparseHamiltonian, x: &[Complex64]) -> Vec<Complex64> {
    let ab = a.mul_vec(&b.mul_vec(x));
    let ba = b.mul_vec(&a.mul_vec(x));
    ab.iter().zip(&ba).map(|(p, q)| p - q).collect()
}
