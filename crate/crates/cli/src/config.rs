//! Run settings, read from an optional TOML file and overridden by flags.

use std::fs;
use std::path::{Path, PathBuf};

use absagen::{Dataset, DecodePolicy, ImplicitPairing, Mode, ScoreOptions, SerializationFormat, TaskKind};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Every setting a command can take. Unset values fall back to per-command
/// defaults when resolved.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    /// One task, or a comma-separated list for `prepare`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub task: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub policy: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gold: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pred: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub implicit_pairing: Option<ImplicitPairing>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skip_absent_categories: Option<bool>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::usage(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    #[cfg(test)]
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config fields are plain strings, paths and booleans")
    }

    /// Values set in `over` replace those in `self`.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        RunConfig {
            dataset: over.dataset.or(self.dataset),
            task: over.task.or(self.task),
            format: over.format.or(self.format),
            mode: over.mode.or(self.mode),
            prefix: over.prefix.or(self.prefix),
            policy: over.policy.or(self.policy),
            gold: if over.gold.is_empty() { self.gold } else { over.gold },
            pred: over.pred.or(self.pred),
            out: over.out.or(self.out),
            report: over.report.or(self.report),
            implicit_pairing: over.implicit_pairing.or(self.implicit_pairing),
            skip_absent_categories: over.skip_absent_categories.or(self.skip_absent_categories),
        }
    }

    pub fn dataset(&self) -> Result<Dataset, CliError> {
        let raw = self
            .dataset
            .as_deref()
            .ok_or_else(|| CliError::usage("--dataset is required"))?;
        Ok(raw.parse()?)
    }

    pub fn format(&self) -> Result<SerializationFormat, CliError> {
        Ok(self.format.as_deref().unwrap_or("phrase").parse()?)
    }

    pub fn mode(&self) -> Result<Mode, CliError> {
        Ok(self.mode.as_deref().unwrap_or("separate").parse()?)
    }

    pub fn policy(&self) -> Result<DecodePolicy, CliError> {
        Ok(self.policy.as_deref().unwrap_or("strict").parse()?)
    }

    /// Tasks named by `task`; empty when unset.
    pub fn tasks(&self) -> Result<Vec<TaskKind>, CliError> {
        let Some(raw) = self.task.as_deref() else {
            return Ok(Vec::new());
        };
        let mut tasks = Vec::new();
        for part in raw.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let task: TaskKind = part.parse()?;
            if !tasks.contains(&task) {
                tasks.push(task);
            }
        }
        Ok(tasks)
    }

    /// The single task a command works on. In joint mode it defaults to the
    /// dataset's joint task.
    pub fn task(&self, dataset: Dataset, mode: Mode) -> Result<TaskKind, CliError> {
        match self.tasks()?.as_slice() {
            [] if mode == Mode::Joint => Ok(TaskKind::joint_for(&dataset.schema())),
            [] => Err(CliError::usage("--task is required in separate mode")),
            [one] => Ok(*one),
            _ => Err(CliError::usage("this command takes a single --task")),
        }
    }

    pub fn score_options(&self) -> ScoreOptions {
        let defaults = ScoreOptions::default();
        ScoreOptions {
            implicit_pairing: self.implicit_pairing.unwrap_or(defaults.implicit_pairing),
            skip_absent_categories: self.skip_absent_categories.unwrap_or(defaults.skip_absent_categories),
        }
    }

    pub fn single_gold(&self) -> Result<&Path, CliError> {
        match self.gold.as_slice() {
            [one] => Ok(one),
            [] => Err(CliError::usage("--gold is required")),
            _ => Err(CliError::usage("this command takes a single --gold file")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full() -> RunConfig {
        RunConfig {
            dataset: Some("restaurants-16".into()),
            task: Some("TASD".into()),
            format: Some("sentence".into()),
            mode: Some("joint".into()),
            prefix: Some("".into()),
            policy: Some("lenient:3".into()),
            gold: vec!["a.xml".into(), "b.xml".into()],
            pred: Some("p.jsonl".into()),
            out: Some("out".into()),
            report: Some("r.json".into()),
            implicit_pairing: Some(ImplicitPairing::OverallIncludesImplicit),
            skip_absent_categories: Some(false),
        }
    }

    #[test]
    fn toml_round_trip() {
        let cfg = full();
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_toml("datset = \"sentihood\"").unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn flags_win_over_file() {
        let file = full();
        let flags = RunConfig {
            task: Some("AD".into()),
            ..RunConfig::default()
        };
        let merged = file.clone().overlay(flags);
        assert_eq!(merged.task.as_deref(), Some("AD"));
        assert_eq!(merged.gold, file.gold);
        assert_eq!(merged.policy, file.policy);
    }

    #[test]
    fn task_resolution() {
        let mut cfg = RunConfig {
            dataset: Some("sentihood".into()),
            ..RunConfig::default()
        };
        assert_eq!(cfg.task(Dataset::Sentihood, Mode::Joint).unwrap(), TaskKind::Asd);
        assert_eq!(cfg.task(Dataset::Sentihood, Mode::Separate).unwrap_err().exit_code(), 1);
        cfg.task = Some("ad, tasd,AD".into());
        assert_eq!(cfg.tasks().unwrap(), vec![TaskKind::Ad, TaskKind::Tasd]);
        cfg.task = Some("XYZ".into());
        assert!(cfg.tasks().is_err());
    }
}
