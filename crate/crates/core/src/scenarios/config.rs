use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::basis::Spin;
use crate::error::{Error, Result};
use crate::evolution::PropagatorConfig;
use crate::hamiltonian::BarrierOrientation;
use crate::observables::DEFAULT_TRAP_THRESHOLD;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrientationChoice {
    A,
    B,
    #[serde(rename = "both")]
    Both,
}

impl OrientationChoice {
    pub fn orientations(self) -> Vec<BarrierOrientation> {
        match self {
            OrientationChoice::A => vec![BarrierOrientation::A],
            OrientationChoice::B => vec![BarrierOrientation::B],
            OrientationChoice::Both => BarrierOrientation::BOTH.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinLabel {
    Up,
    Down,
}

impl From<SpinLabel> for Spin {
    fn from(s: SpinLabel) -> Spin {
        match s {
            SpinLabel::Up => Spin::Up,
            SpinLabel::Down => Spin::Down,
        }
    }
}

fn default_spin() -> SpinLabel {
    SpinLabel::Up
}

/// Initial state; sites are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialState {
    DoublonAt { site: usize },
    SingletPair { i: usize, j: usize },
    TripletPair { i: usize, j: usize },
    DoublonPlusUp { doublon: usize, up: usize },
    SingleParticle {
        site: usize,
        #[serde(default = "default_spin")]
        spin: SpinLabel,
    },
    /// CSV file with header `up_mask,down_mask,re,im`; bit `j-1` marks site
    /// `j`. Amplitudes are normalized on load. Relative paths resolve
    /// against the config file's directory.
    Custom { path: PathBuf, n_up: usize, n_down: usize },
}

impl InitialState {
    /// `(N_up, N_down)` sector the state lives in.
    pub fn sector(&self) -> (usize, usize) {
        match self {
            InitialState::DoublonAt { .. }
            | InitialState::SingletPair { .. }
            | InitialState::TripletPair { .. } => (1, 1),
            InitialState::DoublonPlusUp { .. } => (2, 1),
            InitialState::SingleParticle { spin: SpinLabel::Up, .. } => (1, 0),
            InitialState::SingleParticle { spin: SpinLabel::Down, .. } => (0, 1),
            InitialState::Custom { n_up, n_down, .. } => (*n_up, *n_down),
        }
    }
}

fn default_hopping() -> f64 {
    1.0
}

fn default_sample_dt() -> f64 {
    0.05
}

/// One evolution experiment, run for one or both barrier orientations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    #[serde(rename = "L")]
    pub sites: usize,
    #[serde(rename = "J", default = "default_hopping")]
    pub hopping: f64,
    #[serde(rename = "U")]
    pub interaction: f64,
    #[serde(rename = "h")]
    pub height: f64,
    pub orientation: OrientationChoice,
    pub initial_state: InitialState,
    pub t_max: f64,
    #[serde(default = "default_sample_dt")]
    pub sample_dt: f64,
    #[serde(default)]
    pub propagator: PropagatorConfig,
    pub observables: Vec<String>,
    /// Output file name, relative to the output directory.
    pub output: String,
    /// Switch off spin-down hopping.
    #[serde(default)]
    pub frozen_down: bool,
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sites < 4 || !self.sites.is_multiple_of(2) {
            return Err(Error::config("L", format!("must be even and >= 4, got {}", self.sites)));
        }
        if self.hopping != 1.0 {
            return Err(Error::config("J", "energies are in units of J, so J must be 1"));
        }
        if !self.interaction.is_finite() {
            return Err(Error::config("U", "must be finite"));
        }
        if !self.height.is_finite() || self.height < 0.0 {
            return Err(Error::config("h", "must be finite and >= 0"));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(Error::config("t_max", "must be positive"));
        }
        if !(self.sample_dt > 0.0) || !self.sample_dt.is_finite() {
            return Err(Error::config("sample_dt", "must be positive"));
        }
        if self.observables.is_empty() {
            return Err(Error::config("observables", "at least one observable is required"));
        }
        if self.output.trim().is_empty() {
            return Err(Error::config("output", "must name a file"));
        }
        let (n_up, n_down) = self.initial_state.sector();
        if n_up > self.sites || n_down > self.sites {
            return Err(Error::config("initial_state", "more particles than sites"));
        }
        self.propagator.validate()
    }
}

/// Swept model parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepParameter {
    U,
    #[serde(rename = "h")]
    H,
    L,
}

impl SweepParameter {
    pub fn label(self) -> &'static str {
        match self {
            SweepParameter::U => "U",
            SweepParameter::H => "h",
            SweepParameter::L => "L",
        }
    }
}

fn default_threshold() -> f64 {
    DEFAULT_TRAP_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Reduction {
    TimeAverage {
        #[serde(rename = "T")]
        window: f64,
    },
    TrapTime {
        #[serde(default = "default_threshold")]
        threshold: f64,
    },
    Trajectory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl ValueRange {
    /// Inclusive grid `start, start + step, ...` up to `stop`.
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.stop >= self.start) {
            return Err(Error::config("sweep.range", "needs step > 0 and stop >= start"));
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|k| self.start + k as f64 * self.step).collect())
    }
}

impl std::str::FromStr for ValueRange {
    type Err = Error;

    /// `START:STOP:STEP`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let parse = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::config("range", format!("`{s}` is not START:STOP:STEP")))
        };
        match parts.as_slice() {
            [a, b, c] => Ok(ValueRange {
                start: parse(a)?,
                stop: parse(b)?,
                step: parse(c)?,
            }),
            _ => Err(Error::config("range", format!("`{s}` is not START:STOP:STEP"))),
        }
    }
}

/// The `[sweep]` table of a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub range: Option<ValueRange>,
    pub reduction: Reduction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub base: ScenarioConfig,
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub reduction: Reduction,
}

impl SweepConfig {
    pub fn from_section(base: ScenarioConfig, section: SweepSection) -> Result<Self> {
        let values = match (section.values, section.range) {
            (Some(v), None) => v,
            (None, Some(r)) => r.values()?,
            _ => {
                return Err(Error::config(
                    "sweep",
                    "give exactly one of `values` or `range`",
                ))
            }
        };
        let sweep = Self {
            base,
            parameter: section.parameter,
            values,
            reduction: section.reduction,
        };
        sweep.validate()?;
        Ok(sweep)
    }

    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::config("sweep.values", "must not be empty"));
        }
        let mut seen = HashSet::new();
        for v in &self.values {
            if !v.is_finite() {
                return Err(Error::config("sweep.values", "must be finite"));
            }
            if !seen.insert(v.to_bits()) {
                return Err(Error::config("sweep.values", format!("duplicate value {v}")));
            }
            if self.parameter == SweepParameter::L && (v.fract() != 0.0 || *v < 4.0 || *v % 2.0 != 0.0) {
                return Err(Error::config("sweep.values", format!("L = {v} is not an even integer >= 4")));
            }
        }
        match self.reduction {
            Reduction::TimeAverage { window } => {
                if !(window > 0.0) || window > self.base.t_max * (1.0 + 1e-12) {
                    return Err(Error::config("sweep.reduction.T", "must lie in (0, t_max]"));
                }
            }
            Reduction::TrapTime { threshold } => {
                if !(threshold > 0.0) {
                    return Err(Error::config("sweep.reduction.threshold", "must be positive"));
                }
            }
            Reduction::Trajectory => {}
        }
        for &v in &self.values {
            self.config_for(v).validate()?;
        }
        Ok(())
    }

    /// Base config with the swept parameter set to `value`.
    pub fn config_for(&self, value: f64) -> ScenarioConfig {
        let mut c = self.base.clone();
        match self.parameter {
            SweepParameter::U => c.interaction = value,
            SweepParameter::H => c.height = value,
            SweepParameter::L => c.sites = value as usize,
        }
        c
    }

    /// Shorten the run; an averaging window longer than `t_max` shrinks to it.
    pub fn set_t_max(&mut self, t_max: f64) {
        self.base.t_max = t_max;
        if let Reduction::TimeAverage { window } = &mut self.reduction {
            *window = window.min(t_max);
        }
    }
}

/// A parsed config file: a single scenario or a sweep over one.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Scenario(ScenarioConfig),
    Sweep(SweepConfig),
}

impl Job {
    pub fn name(&self) -> &str {
        match self {
            Job::Scenario(c) => &c.name,
            Job::Sweep(s) => &s.base.name,
        }
    }
}

fn toml_error(e: toml::de::Error) -> Error {
    let field = e
        .message()
        .split('`')
        .nth(1)
        .unwrap_or("document")
        .to_string();
    Error::config(field, e.to_string())
}

/// Parse a config document. `base_dir` anchors relative paths inside it.
pub fn parse_job(text: &str, base_dir: Option<&Path>) -> Result<Job> {
    let mut table: toml::Table = text.parse().map_err(toml_error)?;
    let sweep = table.remove("sweep");
    let mut base: ScenarioConfig = table.try_into().map_err(toml_error)?;
    base.base_dir = base_dir.map(Path::to_path_buf);
    base.validate()?;
    match sweep {
        None => Ok(Job::Scenario(base)),
        Some(s) => {
            let section: SweepSection = s.try_into().map_err(toml_error)?;
            Ok(Job::Sweep(SweepConfig::from_section(base, section)?))
        }
    }
}

pub fn load_job(path: &Path) -> Result<Job> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
    parse_job(&text, path.parent())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::Method;

    const MINIMAL: &str = r#"
        name = "t"
        L = 4
        U = 2.0
        h = 10.0
        orientation = "both"
        t_max = 1.0
        observables = ["n_L"]
        output = "t.csv"
        [initial_state]
        kind = "doublon_at"
        site = 1
    "#;

    #[test]
    fn parses_scenario_with_defaults() {
        let Job::Scenario(c) = parse_job(MINIMAL, None).unwrap() else { panic!() };
        assert_eq!(c.sites, 4);
        assert_eq!(c.hopping, 1.0);
        assert_eq!(c.sample_dt, 0.05);
        assert_eq!(c.propagator.method, Method::Krylov);
        assert_eq!(c.initial_state, InitialState::DoublonAt { site: 1 });
    }

    #[test]
    fn parses_sweep() {
        let text = format!(
            "{MINIMAL}\n[sweep]\nparameter = \"U\"\nrange = {{ start = 0.0, stop = 1.0, step = 0.5 }}\nreduction = {{ kind = \"time_average\", T = 1.0 }}\n"
        );
        let Job::Sweep(s) = parse_job(&text, None).unwrap() else { panic!() };
        assert_eq!(s.values, vec![0.0, 0.5, 1.0]);
        assert_eq!(s.reduction, Reduction::TimeAverage { window: 1.0 });
    }

    #[test]
    fn field_level_errors() {
        let cases = [
            (MINIMAL.replace("L = 4", "L = 5"), "L"),
            (MINIMAL.replace("t_max = 1.0", "t_max = -1.0"), "t_max"),
            (MINIMAL.replace("U = 2.0", "U = 2.0\nJ = 2.0"), "J"),
            (MINIMAL.replace("U = 2.0", "U = 2.0\nbogus = 1"), "bogus"),
            (MINIMAL.replace("observables = [\"n_L\"]", "observables = []"), "observables"),
        ];
        for (text, field) in cases {
            match parse_job(&text, None) {
                Err(Error::Config { field: f, .. }) => assert_eq!(f, field),
                other => panic!("expected config error on {field}, got {other:?}"),
            }
        }
    }

    #[test]
    fn sweep_validation() {
        let bad_values = format!(
            "{MINIMAL}\n[sweep]\nparameter = \"U\"\nvalues = [1.0, 1.0]\nreduction = {{ kind = \"trajectory\" }}\n"
        );
        assert!(parse_job(&bad_values, None).is_err());
        let empty = format!(
            "{MINIMAL}\n[sweep]\nparameter = \"U\"\nvalues = []\nreduction = {{ kind = \"trajectory\" }}\n"
        );
        assert!(parse_job(&empty, None).is_err());
        let long_window = format!(
            "{MINIMAL}\n[sweep]\nparameter = \"U\"\nvalues = [1.0]\nreduction = {{ kind = \"time_average\", T = 5.0 }}\n"
        );
        assert!(parse_job(&long_window, None).is_err());
        let odd_l = format!(
            "{MINIMAL}\n[sweep]\nparameter = \"L\"\nvalues = [4.0, 7.0]\nreduction = {{ kind = \"trap_time\" }}\n"
        );
        assert!(parse_job(&odd_l, None).is_err());
    }

    #[test]
    fn range_parsing() {
        let r: ValueRange = "0:20:0.5".parse().unwrap();
        assert_eq!(r.values().unwrap().len(), 41);
        assert!("0:1".parse::<ValueRange>().is_err());
        assert!(ValueRange { start: 1.0, stop: 0.0, step: 0.1 }.values().is_err());
    }
}
