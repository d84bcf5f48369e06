//! Time evolution `psi(t) = exp(-i H t) psi(0)`.
//!
//! Three propagators share one interface: an exact eigendecomposition for
//! small sectors, a Lanczos/Krylov propagator (the default) and a truncated
//! Taylor series.

mod dense;
mod krylov;
mod taylor;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::SparseHamiltonian;
use crate::observables::{Evaluator, ObservableSpec};
use crate::states::StateVector;

pub use dense::{evolve_dense, DensePropagator, DEFAULT_DENSE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[serde(alias = "dense_eig")]
    Dense,
    Krylov,
    Taylor,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" | "dense_eig" => Ok(Method::Dense),
            "krylov" => Ok(Method::Krylov),
            "taylor" => Ok(Method::Taylor),
            other => Err(Error::config("method", format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagatorConfig {
    pub method: Method,
    /// Largest sub-step between samples, in units of 1/J.
    pub dt: f64,
    /// Local error bound per unit time.
    pub tolerance: f64,
    pub krylov_dim: usize,
    pub max_taylor_terms: usize,
    pub dense_cap: usize,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            method: Method::Krylov,
            dt: 0.05,
            tolerance: 1e-10,
            krylov_dim: 30,
            max_taylor_terms: 60,
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

impl PropagatorConfig {
    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::config("propagator.dt", "must be positive"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::config("propagator.tolerance", "must be positive"));
        }
        if self.krylov_dim < 2 {
            return Err(Error::config("propagator.krylov_dim", "must be at least 2"));
        }
        if self.max_taylor_terms < 2 {
            return Err(Error::config("propagator.max_taylor_terms", "must be at least 2"));
        }
        Ok(())
    }
}

fn check_dims(h: &SparseHamiltonian, psi: &StateVector) -> Result<()> {
    if !Arc::ptr_eq(h.basis(), psi.basis()) && h.basis() != psi.basis() {
        return Err(Error::param("state and Hamiltonian live on different bases"));
    }
    Ok(())
}

/// Advance `psi` by `dt` (may be negative) with the configured propagator.
pub fn evolve_step(h: &SparseHamiltonian, psi: &StateVector, dt: f64, config: &PropagatorConfig) -> Result<StateVector> {
    config.validate()?;
    check_dims(h, psi)?;
    let amps = match config.method {
        Method::Dense => return evolve_dense(h, psi, dt, config.dense_cap),
        Method::Krylov => krylov::krylov_step(h, psi.amplitudes(), dt, config.krylov_dim, config.tolerance)?,
        Method::Taylor => taylor::taylor_step(h, psi.amplitudes(), dt, config.tolerance, config.max_taylor_terms)?,
    };
    Ok(StateVector::from_raw(psi.basis().clone(), amps))
}

/// Propagate from 0 to `t` in sub-steps no longer than `config.dt`.
pub fn evolve_to(h: &SparseHamiltonian, psi: &StateVector, t: f64, config: &PropagatorConfig) -> Result<StateVector> {
    config.validate()?;
    check_dims(h, psi)?;
    if config.method == Method::Dense {
        return evolve_dense(h, psi, t, config.dense_cap);
    }
    let mut state = psi.clone();
    let steps = substeps(t.abs(), config.dt);
    let tau = t / steps as f64;
    for _ in 0..steps {
        state = evolve_step(h, &state, tau, config)?;
    }
    Ok(state)
}

fn substeps(span: f64, dt: f64) -> usize {
    ((span / dt) - 1e-9).ceil().max(1.0) as usize
}

/// Sampled observables (and optionally states) along one evolution.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    columns: Vec<(String, Vec<f64>)>,
    states: Option<Vec<StateVector>>,
}

impl Trajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(n, _)| n.as_str())
    }

    pub fn columns(&self) -> &[(String, Vec<f64>)] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn column_at(&self, index: usize) -> &[f64] {
        &self.columns[index].1
    }

    pub fn states(&self) -> Option<&[StateVector]> {
        self.states.as_deref()
    }

    pub fn rename_columns<I: IntoIterator<Item = String>>(&mut self, names: I) {
        for ((n, _), new) in self.columns.iter_mut().zip(names) {
            *n = new;
        }
    }
}

/// Uniform grid `0, dt, 2 dt, ..., t_max` (the last point is `t_max`).
pub fn uniform_grid(t_max: f64, sample_dt: f64) -> Result<Vec<f64>> {
    if !(t_max > 0.0) || !(sample_dt > 0.0) {
        return Err(Error::param("t_max and sample_dt must be positive"));
    }
    let n = substeps(t_max, sample_dt);
    Ok((0..=n).map(|k| if k == n { t_max } else { k as f64 * sample_dt }).collect())
}

fn validate_times(times: &[f64]) -> Result<()> {
    match times.first() {
        None => return Err(Error::param("time grid is empty")),
        Some(&t0) if t0 != 0.0 => return Err(Error::param("time grid must start at 0")),
        _ => {}
    }
    if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("time grid must be finite and strictly increasing"));
    }
    Ok(())
}

pub fn evolve_trajectory(
    h: &SparseHamiltonian,
    psi0: &StateVector,
    times: &[f64],
    config: &PropagatorConfig,
    observables: &[ObservableSpec],
) -> Result<Trajectory> {
    run_trajectory(h, psi0, times, config, observables, false)
}

/// As [`evolve_trajectory`], additionally keeping the state at every sample.
pub fn evolve_trajectory_with_states(
    h: &SparseHamiltonian,
    psi0: &StateVector,
    times: &[f64],
    config: &PropagatorConfig,
    observables: &[ObservableSpec],
) -> Result<Trajectory> {
    run_trajectory(h, psi0, times, config, observables, true)
}

fn run_trajectory(
    h: &SparseHamiltonian,
    psi0: &StateVector,
    times: &[f64],
    config: &PropagatorConfig,
    observables: &[ObservableSpec],
    keep_states: bool,
) -> Result<Trajectory> {
    config.validate()?;
    check_dims(h, psi0)?;
    validate_times(times)?;
    let evaluator = Evaluator::new(h, observables)?;
    let mut values: Vec<Vec<f64>> = vec![Vec::with_capacity(times.len()); observables.len()];
    let mut states = keep_states.then(|| Vec::with_capacity(times.len()));

    let mut record = |psi: &StateVector| {
        for (col, v) in values.iter_mut().zip(evaluator.evaluate(psi)) {
            col.push(v);
        }
        if let Some(s) = states.as_mut() {
            s.push(psi.clone());
        }
    };

    if config.method == Method::Dense {
        let prop = DensePropagator::new(h, config.dense_cap)?;
        for &t in times {
            record(&prop.evolve(psi0, t));
        }
    } else {
        let mut psi = psi0.clone();
        record(&psi);
        for w in times.windows(2) {
            let span = w[1] - w[0];
            let n = substeps(span, config.dt);
            let tau = span / n as f64;
            for _ in 0..n {
                psi = evolve_step(h, &psi, tau, config)?;
            }
            record(&psi);
        }
    }

    Ok(Trajectory {
        times: times.to_vec(),
        columns: observables.iter().map(|s| s.to_string()).zip(values).collect(),
        states,
    })
}
