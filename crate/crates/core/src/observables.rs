//! Densities, conserved quantities and time-series reductions.

use std::fmt;

use crate::basis::{is_occupied, Spin};
use crate::error::{Error, Result};
use crate::hamiltonian::{total_spin_squared, SparseHamiltonian};
use crate::states::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableSpec {
    /// `<n_j>`
    Site { site: usize },
    /// `<n_{j,s}>`
    SiteSpin { site: usize, spin: Spin },
    /// Sum of `<n_j>` over `j = L/2+2 ..= L`.
    After,
    /// `<n_j*>`, the density on the half-height barrier site.
    HalfBarrier { site: usize },
    /// Sum of all site densities.
    Total,
    Norm,
    Energy,
    SpinSquared,
    DoublonCount,
}

impl ObservableSpec {
    /// Parse a column name such as `n_3`, `n_L`, `n_L_dn`, `n_after`, `n_h2`,
    /// `n_total`, `norm`, `energy`, `s2` or `doublons`.
    ///
    /// `jstar` is required for `n_h2`.
    pub fn parse(name: &str, sites: usize, jstar: Option<usize>) -> Result<Self> {
        let bad = |why: &str| Error::config("observables", format!("`{name}`: {why}"));
        let spec = match name {
            "n_after" => ObservableSpec::After,
            "n_total" => ObservableSpec::Total,
            "norm" => ObservableSpec::Norm,
            "energy" => ObservableSpec::Energy,
            "s2" => ObservableSpec::SpinSquared,
            "doublons" => ObservableSpec::DoublonCount,
            "n_h2" => ObservableSpec::HalfBarrier {
                site: jstar.ok_or_else(|| bad("needs a nonzero barrier to locate j*"))?,
            },
            _ => {
                let rest = name.strip_prefix("n_").ok_or_else(|| bad("unknown observable"))?;
                let (site_str, spin) = match rest.rsplit_once('_') {
                    Some((s, "up")) => (s, Some(Spin::Up)),
                    Some((s, "dn")) => (s, Some(Spin::Down)),
                    Some(_) => return Err(bad("spin suffix must be `_up` or `_dn`")),
                    None => (rest, None),
                };
                let site = if site_str == "L" {
                    sites
                } else {
                    site_str.parse::<usize>().map_err(|_| bad("unknown observable"))?
                };
                if site == 0 || site > sites {
                    return Err(bad(&format!("site outside 1..={sites}")));
                }
                match spin {
                    Some(spin) => ObservableSpec::SiteSpin { site, spin },
                    None => ObservableSpec::Site { site },
                }
            }
        };
        if spec == ObservableSpec::After && !sites.is_multiple_of(2) {
            return Err(bad("needs an even chain"));
        }
        Ok(spec)
    }
}

impl fmt::Display for ObservableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservableSpec::Site { site } => write!(f, "n_{site}"),
            ObservableSpec::SiteSpin { site, spin } => write!(f, "n_{site}_{spin}"),
            ObservableSpec::After => f.write_str("n_after"),
            ObservableSpec::HalfBarrier { .. } => f.write_str("n_h2"),
            ObservableSpec::Total => f.write_str("n_total"),
            ObservableSpec::Norm => f.write_str("norm"),
            ObservableSpec::Energy => f.write_str("energy"),
            ObservableSpec::SpinSquared => f.write_str("s2"),
            ObservableSpec::DoublonCount => f.write_str("doublons"),
        }
    }
}

/// Spin-resolved densities `(<n_{j,up}>, <n_{j,down}>)` for all sites, 0-indexed.
pub fn spin_densities(psi: &StateVector) -> (Vec<f64>, Vec<f64>) {
    let basis = psi.basis();
    let l = basis.sites();
    let mut up = vec![0.0; l];
    let mut down = vec![0.0; l];
    for (cfg, a) in basis.configs().zip(psi.amplitudes()) {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        for j in 1..=l {
            if is_occupied(cfg.up, j) {
                up[j - 1] += p;
            }
            if is_occupied(cfg.down, j) {
                down[j - 1] += p;
            }
        }
    }
    (up, down)
}

/// Total densities `<n_j>`, 0-indexed.
pub fn densities(psi: &StateVector) -> Vec<f64> {
    let (up, down) = spin_densities(psi);
    up.iter().zip(&down).map(|(a, b)| a + b).collect()
}

pub fn site_density(psi: &StateVector, site: usize, spin: Option<Spin>) -> Result<f64> {
    let l = psi.basis().sites();
    if site == 0 || site > l {
        return Err(Error::param(format!("site {site} outside 1..={l}")));
    }
    let (up, down) = spin_densities(psi);
    Ok(match spin {
        Some(Spin::Up) => up[site - 1],
        Some(Spin::Down) => down[site - 1],
        None => up[site - 1] + down[site - 1],
    })
}

/// Summed density over sites `lo..=hi`.
pub fn region_density(psi: &StateVector, lo: usize, hi: usize) -> f64 {
    densities(psi)
        .iter()
        .enumerate()
        .filter(|(k, _)| (lo..=hi).contains(&(k + 1)))
        .map(|(_, n)| n)
        .sum()
}

/// Density past the barrier, sites `L/2+2 ..= L`.
pub fn n_after(psi: &StateVector) -> Result<f64> {
    let l = psi.basis().sites();
    if !l.is_multiple_of(2) {
        return Err(Error::param(format!("n_after needs an even chain, got L = {l}")));
    }
    Ok(region_density(psi, l / 2 + 2, l))
}

pub fn doublon_count(psi: &StateVector) -> f64 {
    psi.basis()
        .configs()
        .zip(psi.amplitudes())
        .map(|(cfg, a)| a.norm_sqr() * f64::from((cfg.up & cfg.down).count_ones()))
        .sum()
}

/// Evaluates a fixed set of observables against one Hamiltonian.
pub struct Evaluator<'a> {
    hamiltonian: &'a SparseHamiltonian,
    spin_squared: Option<SparseHamiltonian>,
    specs: Vec<ObservableSpec>,
}

impl<'a> Evaluator<'a> {
    pub fn new(hamiltonian: &'a SparseHamiltonian, specs: &[ObservableSpec]) -> Result<Self> {
        let l = hamiltonian.basis().sites();
        for spec in specs {
            match *spec {
                ObservableSpec::Site { site }
                | ObservableSpec::SiteSpin { site, .. }
                | ObservableSpec::HalfBarrier { site } => {
                    if site == 0 || site > l {
                        return Err(Error::param(format!("observable {spec}: site outside 1..={l}")));
                    }
                }
                ObservableSpec::After if !l.is_multiple_of(2) => {
                    return Err(Error::param("n_after needs an even chain"));
                }
                _ => {}
            }
        }
        let spin_squared = specs
            .contains(&ObservableSpec::SpinSquared)
            .then(|| total_spin_squared(hamiltonian.basis().clone()));
        Ok(Self {
            hamiltonian,
            spin_squared,
            specs: specs.to_vec(),
        })
    }

    pub fn specs(&self) -> &[ObservableSpec] {
        &self.specs
    }

    pub fn evaluate(&self, psi: &StateVector) -> Vec<f64> {
        let l = psi.basis().sites();
        let (up, down) = spin_densities(psi);
        let total = |j: usize| up[j - 1] + down[j - 1];
        self.specs
            .iter()
            .map(|spec| match *spec {
                ObservableSpec::Site { site } | ObservableSpec::HalfBarrier { site } => total(site),
                ObservableSpec::SiteSpin { site, spin: Spin::Up } => up[site - 1],
                ObservableSpec::SiteSpin { site, spin: Spin::Down } => down[site - 1],
                ObservableSpec::After => (l / 2 + 2..=l).map(total).sum(),
                ObservableSpec::Total => (1..=l).map(total).sum(),
                ObservableSpec::Norm => psi.norm(),
                ObservableSpec::Energy => self.hamiltonian.expectation(psi.amplitudes()),
                ObservableSpec::SpinSquared => self
                    .spin_squared
                    .as_ref()
                    .expect("built when requested")
                    .expectation(psi.amplitudes()),
                ObservableSpec::DoublonCount => doublon_count(psi),
            })
            .collect()
    }
}

/// `(1/T) * integral_0^T f dt` by the trapezoid rule on the sample grid.
/// A final partial interval is linearly interpolated.
pub fn time_average(times: &[f64], values: &[f64], horizon: f64) -> Result<f64> {
    if times.len() != values.len() {
        return Err(Error::param("times and values differ in length"));
    }
    if !(horizon > 0.0) {
        return Err(Error::param(format!("averaging window must be positive, got {horizon}")));
    }
    let last = *times.last().ok_or_else(|| Error::param("empty trajectory"))?;
    let slack = 1e-9 * horizon.max(1.0);
    if times[0].abs() > slack || last < horizon - slack {
        return Err(Error::param(format!(
            "trajectory covers [{}, {last}], shorter than the window [0, {horizon}]",
            times[0]
        )));
    }
    let mut integral = 0.0;
    for k in 1..times.len() {
        let (t0, t1) = (times[k - 1], times[k]);
        if t0 >= horizon - slack {
            break;
        }
        let (f0, f1) = (values[k - 1], values[k]);
        if t1 <= horizon + slack {
            integral += 0.5 * (t1 - t0) * (f0 + f1);
        } else {
            let fh = f0 + (f1 - f0) * (horizon - t0) / (t1 - t0);
            integral += 0.5 * (horizon - t0) * (f0 + fh);
        }
    }
    Ok(integral / horizon)
}

/// First sample time at which `values` strictly exceeds `threshold`.
pub fn trap_time(times: &[f64], values: &[f64], threshold: f64) -> Result<Option<f64>> {
    if !(threshold > 0.0) {
        return Err(Error::param(format!("threshold must be positive, got {threshold}")));
    }
    if times.len() != values.len() {
        return Err(Error::param("times and values differ in length"));
    }
    Ok(times
        .iter()
        .zip(values)
        .find(|(_, &v)| v > threshold)
        .map(|(&t, _)| t))
}

pub const DEFAULT_TRAP_THRESHOLD: f64 = 0.01;
