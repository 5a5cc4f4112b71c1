//! Scenario files: a JSON document mirroring [`Scenario`] plus optional
//! explicit adjacency matrix and boundary chain. Unknown keys are rejected;
//! physical quantities are metres, seconds, and radians.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AdjacencyMatrix, SwarmParams};
use crate::kernels::Bias;
use crate::sim::{
    Controller, GuardConfig, InitialStates, Scenario, SweepSetup, DEFAULT_CONSENSUS_TOL,
    DEFAULT_MAX_STEPS,
};

/// On-disk scenario schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub seed: u64,
    pub controller: Controller,
    pub params: SwarmParams,
    pub initial: InitialStates,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default = "default_consensus_tol")]
    pub consensus_tol: f64,
    /// Embedded 0/1 adjacency matrix overriding range-based topology.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_adjacency: Option<Vec<Vec<u8>>>,
    /// Sidecar file (whitespace or JSON matrix) with the same meaning;
    /// mutually exclusive with `fixed_adjacency`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_adjacency_file: Option<String>,
    #[serde(default = "default_bias")]
    pub bias: Bias,
    #[serde(default)]
    pub aperiodicity_guard: GuardConfig,
    #[serde(default)]
    pub record_weights: bool,
    #[serde(default = "default_true")]
    pub stop_at_consensus: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSetup>,
}

fn default_true() -> bool {
    true
}

fn default_max_steps() -> usize {
    DEFAULT_MAX_STEPS
}

fn default_consensus_tol() -> f64 {
    DEFAULT_CONSENSUS_TOL
}

fn default_bias() -> Bias {
    Bias::Nearest
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Resolves sidecar references (relative to `base_dir`) and produces a
    /// validated runnable scenario.
    pub fn into_scenario(self, base_dir: &Path) -> Result<Scenario> {
        let fixed_adjacency = match (self.fixed_adjacency, self.fixed_adjacency_file) {
            (Some(_), Some(_)) => {
                return Err(Error::Schema(
                    "fixed_adjacency and fixed_adjacency_file are mutually exclusive".into(),
                ))
            }
            (Some(rows), None) => Some(AdjacencyMatrix::from_rows(&rows)?),
            (None, Some(file)) => {
                let rows = load_matrix(&base_dir.join(&file))?;
                let rows_u8: Result<Vec<Vec<u8>>> = rows
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|&v| {
                                if v == 0.0 {
                                    Ok(0u8)
                                } else if v == 1.0 {
                                    Ok(1u8)
                                } else {
                                    Err(Error::Schema(format!(
                                        "adjacency entry {v} is not 0 or 1"
                                    )))
                                }
                            })
                            .collect()
                    })
                    .collect();
                Some(AdjacencyMatrix::from_rows(&rows_u8?)?)
            }
            (None, None) => None,
        };
        Ok(Scenario {
            params: self.params,
            controller: self.controller,
            initial: self.initial,
            max_steps: self.max_steps,
            consensus_tol: self.consensus_tol,
            seed: self.seed,
            fixed_adjacency,
            sweep: self.sweep,
            bias: self.bias,
            guard: self.aperiodicity_guard,
            record_weights: self.record_weights,
            stop_at_consensus: self.stop_at_consensus,
        })
    }
}

/// Parses a dense matrix from JSON (`[[...],...]`) or whitespace-delimited
/// text, one row per line.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>> {
    let trimmed = text.trim_start();
    let rows: Vec<Vec<f64>> = if trimmed.starts_with('[') {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?
    } else {
        text.lines()
            .filter(|line| !line.trim().is_empty())
            .map(|line| {
                line.split_whitespace()
                    .map(|tok| {
                        tok.parse::<f64>()
                            .map_err(|e| Error::Schema(format!("bad matrix entry {tok:?}: {e}")))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?
    };
    if rows.is_empty() {
        return Err(Error::Schema("empty matrix".into()));
    }
    let n = rows[0].len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Schema("ragged matrix rows".into()));
    }
    Ok(rows)
}

pub fn load_matrix(path: &Path) -> Result<Vec<Vec<f64>>> {
    parse_matrix(&std::fs::read_to_string(path)?)
}

/// Whitespace-delimited text form, one row per line.
pub fn matrix_to_text(rows: &[Vec<f64>]) -> String {
    rows.iter()
        .map(|row| {
            row.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}

pub fn matrix_to_json(rows: &[Vec<f64>]) -> String {
    serde_json::to_string(rows).expect("matrix serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::run;

    fn minimal_json() -> String {
        r#"{
            "seed": 3,
            "controller": "simple",
            "params": {
                "n": 4, "comm_range": 1.4, "sense_range": 2.0,
                "boundary_range": 2.0, "speed": 0.002, "sweep_speed": 0.0,
                "period": 0.5, "spacing": 1.0, "steps_per_rev": 20
            },
            "initial": { "mode": "random", "position_box": { "min": [0.0, 0.0], "max": [2.0, 2.0] } }
        }"#
        .to_string()
    }

    #[test]
    fn parse_round_trip_is_identity() {
        let file = ScenarioFile::from_json(&minimal_json()).unwrap();
        let text = file.to_json();
        let again = ScenarioFile::from_json(&text).unwrap();
        assert_eq!(text, again.to_json());
        assert_eq!(again.max_steps, DEFAULT_MAX_STEPS);
        assert_eq!(again.consensus_tol, DEFAULT_CONSENSUS_TOL);
    }

    #[test]
    fn unknown_keys_rejected() {
        let json = minimal_json().replace("\"seed\": 3,", "\"seed\": 3, \"tpyo\": 1,");
        assert!(matches!(ScenarioFile::from_json(&json), Err(Error::Schema(_))));
    }

    #[test]
    fn loaded_scenario_runs() {
        let file = ScenarioFile::from_json(&minimal_json()).unwrap();
        let scenario = file.into_scenario(Path::new(".")).unwrap();
        let trace = run(&scenario).unwrap();
        assert!(!trace.steps.is_empty());
    }

    #[test]
    fn matrix_text_and_json_forms() {
        let rows = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let text = matrix_to_text(&rows);
        assert_eq!(parse_matrix(&text).unwrap(), rows);
        let json = matrix_to_json(&rows);
        assert_eq!(parse_matrix(&json).unwrap(), rows);
        assert!(parse_matrix("1 0\n1").is_err());
        assert!(parse_matrix("").is_err());
    }

    #[test]
    fn embedded_and_sidecar_adjacency_exclusive() {
        let json = minimal_json().replace(
            "\"seed\": 3,",
            "\"seed\": 3, \"fixed_adjacency\": [[0,1],[1,0]], \"fixed_adjacency_file\": \"a.txt\",",
        );
        let file = ScenarioFile::from_json(&json).unwrap();
        assert!(file.into_scenario(Path::new(".")).is_err());
    }
}
