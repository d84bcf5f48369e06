use super::config::{parse_job, Job};
use crate::error::{Error, Result};

/// `(name, TOML source)` for every bundled preset.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig2", include_str!("../../presets/fig2.toml")),
    ("fig3a", include_str!("../../presets/fig3a.toml")),
    ("fig3b", include_str!("../../presets/fig3b.toml")),
    ("fig4", include_str!("../../presets/fig4.toml")),
    ("fig5a", include_str!("../../presets/fig5a.toml")),
    ("fig5b", include_str!("../../presets/fig5b.toml")),
    ("fig6", include_str!("../../presets/fig6.toml")),
    ("fig6d", include_str!("../../presets/fig6d.toml")),
    ("supp3", include_str!("../../presets/supp3.toml")),
];

pub fn preset_names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}

pub fn preset(name: &str) -> Result<Job> {
    let (_, text) = PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::config("preset", format!("no preset named `{name}`")))?;
    parse_job(text, None)
}

/// A preset name, or else a path to a config file.
pub fn resolve(spec: &str) -> Result<Job> {
    if PRESETS.iter().any(|(n, _)| *n == spec) {
        preset(spec)
    } else {
        super::config::load_job(std::path::Path::new(spec))
    }
}
