//! Config-driven experiments: single runs, parameter sweeps and the bundled
//! presets.
//!
//! Configs are TOML. A document with a `[sweep]` table is a sweep over the
//! scenario described by the rest of the document.

mod config;
mod presets;
mod run;

pub use config::{
    load_job, parse_job, InitialState, Job, OrientationChoice, Reduction, ScenarioConfig, SpinLabel, SweepConfig,
    SweepParameter, SweepSection, ValueRange,
};
pub use presets::{preset, preset_names, resolve, PRESETS};
pub use run::{
    build_initial_state, format_float, parse_amplitudes, run_scenario, run_scenario_to_dir, run_sweep,
    run_sweep_to_dir, RunPlan, ScenarioResult, SweepResult,
};
