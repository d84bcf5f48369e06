//! Occupation-number bases for spin-1/2 fermions on an open chain.
//!
//! Sites are labelled `1..=L` in every public function. Internally site `j`
//! is bit `j - 1` of a [`Mask`].
//!
//! Fermionic ordering: a basis configuration `(m_up, m_down)` is the state
//!
//! ```text
//! (prod_{j ascending in m_up} c+_{j,up}) (prod_{j ascending in m_down} c+_{j,down}) |0>
//! ```
//!
//! i.e. all spin-up creation operators stand to the left of all spin-down
//! ones, each block in ascending site order. Every sign in this crate follows
//! from that convention.

use std::fmt;

use crate::error::{Error, Result};

/// Occupation bitmask for one spin species. Bit `j - 1` set means site `j`
/// is occupied.
pub type Mask = u64;

/// Largest supported chain length.
pub const MAX_SITES: usize = 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Spin::Up => f.write_str("up"),
            Spin::Down => f.write_str("dn"),
        }
    }
}

#[inline]
pub(crate) fn bit(site: usize) -> Mask {
    1 << (site - 1)
}

#[inline]
pub fn is_occupied(mask: Mask, site: usize) -> bool {
    mask & bit(site) != 0
}

/// Mask with sites `lo..=hi` set (1-based, inclusive). Empty if `lo > hi`.
pub fn site_range_mask(lo: usize, hi: usize) -> Mask {
    if lo > hi {
        return 0;
    }
    let upper = if hi >= 64 { Mask::MAX } else { (1 << hi) - 1 };
    upper & !((1 << (lo - 1)) - 1)
}

/// Sites occupied in `mask`, ascending, 1-based.
pub fn occupied_sites(mask: Mask) -> impl Iterator<Item = usize> {
    let mut rest = mask;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let tz = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(tz + 1)
        }
    })
}

/// All `sites`-bit masks with exactly `particles` bits set, in one spin sector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinSectorBasis {
    sites: usize,
    particles: usize,
    masks: Vec<Mask>,
}

impl SpinSectorBasis {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    /// Masks sorted ascending as integers.
    pub fn masks(&self) -> &[Mask] {
        &self.masks
    }

    pub fn mask(&self, index: usize) -> Mask {
        self.masks[index]
    }

    /// Position of `mask` in the sorted list, or `None` if it is not a
    /// member of this sector.
    pub fn index_of(&self, mask: Mask) -> Option<usize> {
        self.masks.binary_search(&mask).ok()
    }
}

/// Enumerate the `binomial(L, N)` configurations of `particles` fermions of
/// one species on `sites` sites, sorted ascending.
pub fn enumerate_sector(sites: usize, particles: usize) -> Result<SpinSectorBasis> {
    if sites == 0 || sites > MAX_SITES {
        return Err(Error::param(format!(
            "site count must be in 1..={MAX_SITES}, got {sites}"
        )));
    }
    if particles > sites {
        return Err(Error::param(format!(
            "particle count {particles} exceeds site count {sites}"
        )));
    }
    let limit: Mask = 1 << sites;
    let mut masks = Vec::with_capacity(binomial(sites, particles));
    if particles == 0 {
        masks.push(0);
    } else {
        // Gosper's hack: next integer with the same popcount.
        let mut m: Mask = (1 << particles) - 1;
        while m < limit {
            masks.push(m);
            let c = m & m.wrapping_neg();
            let r = m + c;
            m = (((r ^ m) >> 2) / c) | r;
        }
    }
    Ok(SpinSectorBasis {
        sites,
        particles,
        masks,
    })
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

fn check_site(site: usize) -> Result<()> {
    if site == 0 || site > MAX_SITES {
        return Err(Error::param(format!(
            "site {site} outside 1..={MAX_SITES}"
        )));
    }
    Ok(())
}

/// Move a fermion from `from` to `to` (`c+_to c_from`) within one species,
/// for arbitrary distance. The sign is `(-1)^k` with `k` the number of
/// occupied sites strictly between the two.
pub fn transfer(mask: Mask, from: usize, to: usize) -> Option<(Mask, i32)> {
    if !is_occupied(mask, from) {
        return None;
    }
    if from == to {
        return Some((mask, 1));
    }
    if is_occupied(mask, to) {
        return None;
    }
    let (lo, hi) = if from < to { (from, to) } else { (to, from) };
    let between = (mask & site_range_mask(lo + 1, hi - 1)).count_ones();
    let sign = if between.is_multiple_of(2) { 1 } else { -1 };
    Some(((mask & !bit(from)) | bit(to), sign))
}

/// Nearest-neighbour hop `c+_to c_from`. Returns `None` when the source is
/// empty or the destination is Pauli-blocked.
pub fn apply_hop(mask: Mask, from: usize, to: usize) -> Result<Option<(Mask, i32)>> {
    check_site(from)?;
    check_site(to)?;
    if from.abs_diff(to) != 1 {
        return Err(Error::param(format!(
            "hop requires adjacent sites, got {from} -> {to}"
        )));
    }
    Ok(transfer(mask, from, to))
}

/// Reflect a mask through the chain centre: site `j` goes to `L + 1 - j`.
pub fn mirror_mask(sites: usize, mask: Mask) -> Mask {
    occupied_sites(mask).fold(0, |acc, j| acc | bit(sites + 1 - j))
}

/// Sign picked up by one species' creation string under reflection.
///
/// After `c+_j -> c+_{L+1-j}` the ascending product becomes descending;
/// restoring ascending order takes one transposition per pair.
pub fn reflection_sign(mask: Mask) -> i32 {
    let n = mask.count_ones() as usize;
    let transpositions = n * n.saturating_sub(1) / 2;
    if transpositions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// A two-species configuration under the crate ordering convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FockConfig {
    pub up: Mask,
    pub down: Mask,
}

impl FockConfig {
    pub const VACUUM: FockConfig = FockConfig { up: 0, down: 0 };

    pub fn species(&self, spin: Spin) -> Mask {
        match spin {
            Spin::Up => self.up,
            Spin::Down => self.down,
        }
    }

    fn with_species(mut self, spin: Spin, mask: Mask) -> Self {
        match spin {
            Spin::Up => self.up = mask,
            Spin::Down => self.down = mask,
        }
        self
    }

    /// Number of modes ordered before `(site, spin)`.
    fn preceding(&self, site: usize, spin: Spin) -> u32 {
        let below = bit(site) - 1;
        match spin {
            Spin::Up => (self.up & below).count_ones(),
            Spin::Down => self.up.count_ones() + (self.down & below).count_ones(),
        }
    }

    /// Apply `c+_{site,spin}`; `None` if the mode is already filled.
    pub fn create(self, site: usize, spin: Spin) -> Option<(FockConfig, i32)> {
        let m = self.species(spin);
        if is_occupied(m, site) {
            return None;
        }
        let sign = if self.preceding(site, spin).is_multiple_of(2) { 1 } else { -1 };
        Some((self.with_species(spin, m | bit(site)), sign))
    }

    /// Apply `c_{site,spin}`; `None` if the mode is empty.
    pub fn annihilate(self, site: usize, spin: Spin) -> Option<(FockConfig, i32)> {
        let m = self.species(spin);
        if !is_occupied(m, site) {
            return None;
        }
        let sign = if self.preceding(site, spin).is_multiple_of(2) { 1 } else { -1 };
        Some((self.with_species(spin, m & !bit(site)), sign))
    }

    /// Apply a product of creation operators to the vacuum, rightmost first:
    /// `ops = [(i, a), (j, b)]` builds `c+_{i,a} c+_{j,b} |0>`.
    pub fn from_creations(ops: &[(usize, Spin)]) -> Option<(FockConfig, i32)> {
        ops.iter()
            .rev()
            .try_fold((FockConfig::VACUUM, 1), |(cfg, sign), &(site, spin)| {
                cfg.create(site, spin).map(|(c, s)| (c, sign * s))
            })
    }
}

/// Tensor product of the spin-up and spin-down sector bases.
///
/// Flattened index is `up_index * down.len() + down_index`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductBasis {
    up: SpinSectorBasis,
    down: SpinSectorBasis,
}

impl ProductBasis {
    pub fn new(sites: usize, n_up: usize, n_down: usize) -> Result<Self> {
        Ok(Self {
            up: enumerate_sector(sites, n_up)?,
            down: enumerate_sector(sites, n_down)?,
        })
    }

    pub fn from_sectors(up: SpinSectorBasis, down: SpinSectorBasis) -> Result<Self> {
        if up.sites != down.sites {
            return Err(Error::param(format!(
                "sector site counts differ: {} vs {}",
                up.sites, down.sites
            )));
        }
        Ok(Self { up, down })
    }

    pub fn sites(&self) -> usize {
        self.up.sites
    }

    pub fn n_up(&self) -> usize {
        self.up.particles
    }

    pub fn n_down(&self) -> usize {
        self.down.particles
    }

    pub fn up(&self) -> &SpinSectorBasis {
        &self.up
    }

    pub fn down(&self) -> &SpinSectorBasis {
        &self.down
    }

    pub fn sector(&self, spin: Spin) -> &SpinSectorBasis {
        match spin {
            Spin::Up => &self.up,
            Spin::Down => &self.down,
        }
    }

    pub fn dim(&self) -> usize {
        self.up.len() * self.down.len()
    }

    pub fn config(&self, index: usize) -> FockConfig {
        let nd = self.down.len();
        FockConfig {
            up: self.up.masks[index / nd],
            down: self.down.masks[index % nd],
        }
    }

    pub fn index_of(&self, cfg: FockConfig) -> Option<usize> {
        let u = self.up.index_of(cfg.up)?;
        let d = self.down.index_of(cfg.down)?;
        Some(u * self.down.len() + d)
    }

    pub fn configs(&self) -> impl Iterator<Item = FockConfig> + '_ {
        self.up.masks.iter().flat_map(move |&up| {
            self.down
                .masks
                .iter()
                .map(move |&down| FockConfig { up, down })
        })
    }
}
