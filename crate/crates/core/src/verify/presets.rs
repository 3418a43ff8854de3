//! Shipped experiment presets and line-anchored config parsing.

use serde::de::DeserializeOwned;

use super::config::ExperimentConfig;
use super::probe::ProbeSweep;
use crate::error::{Error, Result};

/// Name and JSON source of every shipped preset.
pub const PRESETS: [(&str, &str); 9] = [
    ("thm2", include_str!("../../presets/thm2.json")),
    ("thm3", include_str!("../../presets/thm3.json")),
    ("thm4", include_str!("../../presets/thm4.json")),
    ("counterexample", include_str!("../../presets/counterexample.json")),
    ("stationary", include_str!("../../presets/stationary.json")),
    ("zero", include_str!("../../presets/zero.json")),
    ("thm31-i", include_str!("../../presets/thm31-i.json")),
    ("thm31-ii", include_str!("../../presets/thm31-ii.json")),
    ("thm31-iii", include_str!("../../presets/thm31-iii.json")),
];

pub fn preset_source(name: &str) -> Result<&'static str> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| Error::Config {
            line: None,
            message: format!(
                "unknown preset `{name}` (known: {})",
                PRESETS.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
            ),
        })
}

/// 1-based line of the key named by the last segment of a dotted path,
/// searched after the line of each parent segment.
pub fn locate_field(text: &str, path: &str) -> Option<usize> {
    let lines: Vec<&str> = text.lines().collect();
    let mut from = 0;
    let mut found = None;
    for seg in path.split('.') {
        let key = format!("\"{seg}\"");
        let hit = (from..lines.len()).find(|&i| lines[i].contains(&key))?;
        found = Some(hit + 1);
        from = hit;
    }
    found
}

/// Parse JSON, reporting syntax and schema errors with their line.
pub fn parse_config<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Config {
        line: Some(e.line()),
        message: e.to_string(),
    })
}

/// Attach the line of the offending field to a validation error.
pub fn anchor(text: &str, err: Error) -> Error {
    match err {
        Error::InvalidParameter { name, reason } => Error::Config {
            line: locate_field(text, name),
            message: format!("invalid `{name}`: {reason}"),
        },
        other => other,
    }
}

pub fn parse_experiment(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = parse_config(text)?;
    cfg.validate().map_err(|e| anchor(text, e))?;
    Ok(cfg)
}

pub fn parse_probe(text: &str) -> Result<ProbeSweep> {
    let cfg: ProbeSweep = parse_config(text)?;
    cfg.validate().map_err(|e| anchor(text, e))?;
    Ok(cfg)
}

pub fn experiment_preset(name: &str) -> Result<ExperimentConfig> {
    parse_experiment(preset_source(name)?)
}

pub fn probe_preset(name: &str) -> Result<ProbeSweep> {
    parse_probe(preset_source(name)?)
}
