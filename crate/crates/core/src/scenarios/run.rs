use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::{Mask, ProductBasis};
use crate::error::{Error, Result};
use crate::evolution::{evolve_trajectory, uniform_grid, PropagatorConfig, Trajectory};
use crate::hamiltonian::{
    barrier_potential, build_hamiltonian, jstar_site, BarrierOrientation, HubbardParams, SparseHamiltonian,
};
use crate::observables::{time_average, trap_time, ObservableSpec};
use crate::states::{self, StateVector};

use super::config::{InitialState, OrientationChoice, Reduction, ScenarioConfig, SweepConfig};

/// Everything needed to evolve one orientation of a scenario.
#[derive(Debug, Clone)]
pub struct RunPlan {
    pub orientation: BarrierOrientation,
    pub params: HubbardParams,
    pub hamiltonian: SparseHamiltonian,
    pub initial: StateVector,
    pub observables: Vec<ObservableSpec>,
    pub times: Vec<f64>,
    pub propagator: PropagatorConfig,
}

impl RunPlan {
    pub fn run(&self) -> Result<Trajectory> {
        self.run_with(&self.observables)
    }

    /// Evolve while recording a different observable set.
    pub fn run_with(&self, observables: &[ObservableSpec]) -> Result<Trajectory> {
        evolve_trajectory(&self.hamiltonian, &self.initial, &self.times, &self.propagator, observables)
    }
}

/// Build the initial state of `kind` on `basis`.
pub fn build_initial_state(
    kind: &InitialState,
    basis: Arc<ProductBasis>,
    base_dir: Option<&Path>,
) -> Result<StateVector> {
    match kind {
        InitialState::DoublonAt { site } => states::doublon_at(basis, *site),
        InitialState::SingletPair { i, j } => states::singlet_pair(basis, *i, *j),
        InitialState::TripletPair { i, j } => states::triplet_pair(basis, *i, *j),
        InitialState::DoublonPlusUp { doublon, up } => states::doublon_plus_up(basis, *doublon, *up),
        InitialState::SingleParticle { site, spin } => states::single_particle(basis, *site, (*spin).into()),
        InitialState::Custom { path, .. } => {
            let full = match base_dir {
                Some(dir) if path.is_relative() => dir.join(path),
                _ => path.clone(),
            };
            let text = std::fs::read_to_string(&full)
                .map_err(|e| Error::config("initial_state.path", format!("cannot read {}: {e}", full.display())))?;
            parse_amplitudes(&text, basis)
        }
    }
}

/// Parse `up_mask,down_mask,re,im` lines into a normalized state.
pub fn parse_amplitudes(text: &str, basis: Arc<ProductBasis>) -> Result<StateVector> {
    let bad = |line: usize, why: String| Error::config("initial_state.path", format!("line {line}: {why}"));
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
    let mut seen = vec![false; basis.dim()];
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("up_mask") {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let [up, down, re, im] = fields.as_slice() else {
            return Err(bad(n + 1, "expected four comma-separated fields".into()));
        };
        let up: Mask = up.parse().map_err(|_| bad(n + 1, format!("bad mask `{up}`")))?;
        let down: Mask = down.parse().map_err(|_| bad(n + 1, format!("bad mask `{down}`")))?;
        let re: f64 = re.parse().map_err(|_| bad(n + 1, format!("bad number `{re}`")))?;
        let im: f64 = im.parse().map_err(|_| bad(n + 1, format!("bad number `{im}`")))?;
        let idx = basis
            .index_of(crate::basis::FockConfig { up, down })
            .ok_or_else(|| bad(n + 1, format!("({up}, {down}) is not in the sector")))?;
        if std::mem::replace(&mut seen[idx], true) {
            return Err(bad(n + 1, "duplicate configuration".into()));
        }
        amplitudes[idx] = Complex64::new(re, im);
    }
    StateVector::normalized(basis, amplitudes)
}

fn jstar(sites: usize, height: f64, orientation: BarrierOrientation) -> Option<usize> {
    (height > 0.0).then(|| jstar_site(sites, height, orientation).ok()).flatten()
}

impl ScenarioConfig {
    pub fn orientations(&self) -> Vec<BarrierOrientation> {
        self.orientation.orientations()
    }

    /// Hamiltonian, initial state and grid for each requested orientation.
    pub fn plan(&self) -> Result<Vec<RunPlan>> {
        self.validate()?;
        let (n_up, n_down) = self.initial_state.sector();
        let basis = Arc::new(ProductBasis::new(self.sites, n_up, n_down)?);
        let initial = build_initial_state(&self.initial_state, basis.clone(), self.base_dir.as_deref())?;
        let times = uniform_grid(self.t_max, self.sample_dt)?;
        self.orientations()
            .into_iter()
            .map(|orientation| {
                let potential = barrier_potential(self.sites, self.height, orientation)?;
                let mut params = HubbardParams::new(self.sites, self.hopping, self.interaction, potential)?;
                if self.frozen_down {
                    params = params.with_frozen_down();
                }
                let hamiltonian = build_hamiltonian(&params, basis.clone())?;
                let js = jstar(self.sites, self.height, orientation);
                let observables = self
                    .observables
                    .iter()
                    .map(|name| ObservableSpec::parse(name, self.sites, js))
                    .collect::<Result<Vec<_>>>()?;
                Ok(RunPlan {
                    orientation,
                    params,
                    hamiltonian,
                    initial: initial.clone(),
                    observables,
                    times: times.clone(),
                    propagator: self.propagator.clone(),
                })
            })
            .collect()
    }

    fn column_labels(&self) -> Vec<String> {
        let both = self.orientation == OrientationChoice::Both;
        let mut labels = Vec::new();
        for name in &self.observables {
            for o in self.orientations() {
                labels.push(if both { format!("{name}_{}", o.label()) } else { name.clone() });
            }
        }
        labels
    }
}

/// Fixed-width scientific notation with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn format_cell(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// Trajectories of one scenario, one per orientation.
#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub name: String,
    pub output: String,
    pub runs: Vec<(BarrierOrientation, Trajectory)>,
    labels: Vec<String>,
}

impl ScenarioResult {
    pub fn times(&self) -> &[f64] {
        self.runs[0].1.times()
    }

    /// CSV column names after `t`.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Series of the `observable`-th configured observable in one orientation.
    pub fn series(&self, observable: usize, orientation: BarrierOrientation) -> Option<&[f64]> {
        let (_, tr) = self.runs.iter().find(|(o, _)| *o == orientation)?;
        (observable < tr.columns().len()).then(|| tr.column_at(observable))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        let n_obs = self.runs[0].1.columns().len();
        for (k, t) in self.times().iter().enumerate() {
            out.push_str(&format_float(*t));
            for i in 0..n_obs {
                for (_, tr) in &self.runs {
                    let _ = write!(out, ",{}", format_float(tr.column_at(i)[k]));
                }
            }
            out.push('\n');
        }
        out
    }
}

fn run_plans(name: &str, plans: &[RunPlan]) -> Result<Vec<(BarrierOrientation, Trajectory)>> {
    plans
        .par_iter()
        .map(|p| {
            p.run().map(|tr| (p.orientation, tr)).map_err(|e| match e {
                Error::Numerical { message, residual, step, dim } => Error::Numerical {
                    message: format!("{name}, orientation {}: {message}", p.orientation.label()),
                    residual,
                    step,
                    dim,
                },
                other => other,
            })
        })
        .collect()
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioResult> {
    let plans = config.plan()?;
    Ok(ScenarioResult {
        name: config.name.clone(),
        output: config.output.clone(),
        runs: run_plans(&config.name, &plans)?,
        labels: config.column_labels(),
    })
}

/// Run a scenario and write its CSV into `dir`. Returns the file written.
pub fn run_scenario_to_dir(config: &ScenarioConfig, dir: &Path) -> Result<(ScenarioResult, PathBuf)> {
    let result = run_scenario(config)?;
    let path = write_output(dir, &config.output, &result.to_csv())?;
    Ok((result, path))
}

fn write_output(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

/// Reduced sweep table; `None` cells (no trap time) are written empty.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub name: String,
    pub output: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl SweepResult {
    pub fn column(&self, label: &str) -> Option<Vec<Option<f64>>> {
        let i = self.header.iter().position(|h| h == label)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| format_cell(*c)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn sweep_rows(sweep: &SweepConfig, value: f64, runs: &[(BarrierOrientation, Trajectory)]) -> Result<Vec<Vec<Option<f64>>>> {
    let n_obs = runs[0].1.columns().len();
    let times = runs[0].1.times();
    let cells = |f: &dyn Fn(&[f64]) -> Result<Option<f64>>| -> Result<Vec<Option<f64>>> {
        let mut row = vec![Some(value)];
        for i in 0..n_obs {
            for (_, tr) in runs {
                row.push(f(tr.column_at(i))?);
            }
        }
        Ok(row)
    };
    match sweep.reduction {
        Reduction::TimeAverage { window } => Ok(vec![cells(&|v| time_average(times, v, window).map(Some))?]),
        Reduction::TrapTime { threshold } => Ok(vec![cells(&|v| trap_time(times, v, threshold))?]),
        Reduction::Trajectory => Ok((0..times.len())
            .map(|k| {
                let mut row = vec![Some(value), Some(times[k])];
                for i in 0..n_obs {
                    for (_, tr) in runs {
                        row.push(Some(tr.column_at(i)[k]));
                    }
                }
                row
            })
            .collect()),
    }
}

fn run_sweep_inner(sweep: &SweepConfig) -> Result<SweepResult> {
    sweep.validate()?;
    let per_value: Vec<Vec<Vec<Option<f64>>>> = sweep
        .values
        .par_iter()
        .map(|&v| {
            let config = sweep.config_for(v);
            let runs = run_plans(&format!("{} at {} = {v}", config.name, sweep.parameter.label()), &config.plan()?)?;
            sweep_rows(sweep, v, &runs)
        })
        .collect::<Result<_>>()?;
    let mut header = vec![sweep.parameter.label().to_string()];
    if sweep.reduction == Reduction::Trajectory {
        header.push("t".into());
    }
    header.extend(sweep.base.column_labels());
    Ok(SweepResult {
        name: sweep.base.name.clone(),
        output: sweep.base.output.clone(),
        header,
        rows: per_value.into_iter().flatten().collect(),
    })
}

/// Run every sweep point in parallel; rows keep the input order.
/// `threads` pins the worker count, otherwise rayon's global pool is used.
pub fn run_sweep(sweep: &SweepConfig, threads: Option<usize>) -> Result<SweepResult> {
    match threads {
        None => run_sweep_inner(sweep),
        Some(0) => Err(Error::config("threads", "must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config("threads", e.to_string()))?
            .install(|| run_sweep_inner(sweep)),
    }
}

pub fn run_sweep_to_dir(sweep: &SweepConfig, dir: &Path, threads: Option<usize>) -> Result<(SweepResult, PathBuf)> {
    let result = run_sweep(sweep, threads)?;
    let path = write_output(dir, &sweep.base.output, &result.to_csv())?;
    Ok((result, path))
}
