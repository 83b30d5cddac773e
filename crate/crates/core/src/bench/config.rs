use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::adversaries::ScenarioSpec;
use crate::error::{Error, Result};

use super::registry::LearnerSpec;

/// An experiment file.
///
/// ```toml
/// trials = 20
/// seed = 7
///
/// [scenario]
/// kind = "complementary-pair"
/// T = 4096
/// d = 3
///
/// [[learners]]
/// kind = "k-hints"
/// alpha = 0.25
///
/// [[learners]]
/// kind = "mwu"
/// alpha = 0.25
///
/// [output]
/// path = "results.csv"
/// ```
///
/// Trial `i` generates its scenario with seed
/// `trial_seed(seed ^ scenario.seed, i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    pub scenario: ScenarioSpec,
    pub learners: Vec<LearnerSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_trials() -> usize {
    1
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// CSV destination, relative to the working directory. Standard output
    /// when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    /// Write `<path>.json` metadata next to the CSV.
    #[serde(default = "yes")]
    pub sidecar: bool,
}

fn yes() -> bool {
    true
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            path: None,
            format: OutputFormat::Csv,
            sidecar: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.scenario.horizon == 0 {
            return Err(Error::Config("scenario T must be >= 1".into()));
        }
        if self.learners.is_empty() {
            return Err(Error::Config("at least one [[learners]] entry is required".into()));
        }
        let mut seen = HashSet::new();
        for l in &self.learners {
            l.validate()?;
            if !seen.insert(l.label()) {
                return Err(Error::Config(format!(
                    "duplicate learner name `{}`; set `label` to tell them apart",
                    l.label()
                )));
            }
        }
        Ok(())
    }

    /// Canonical TOML rendering; formatting and comments of the source file
    /// do not affect it.
    pub fn canonical_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of [`Self::canonical_toml`], lowercase hex.
    pub fn hash(&self) -> String {
        Sha256::digest(self.canonical_toml().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::ScenarioKind;

    const BASIC: &str = r#"
trials = 3
seed = 5

[scenario]
kind = "correlated"
T = 64
d = 3
alpha = 0.25

[[learners]]
kind = "one-hint"

[[learners]]
kind = "k-hints"
label = "kh"
"#;

    #[test]
    fn parses_and_defaults() {
        let cfg = ExperimentConfig::from_toml_str(BASIC).unwrap();
        assert_eq!(cfg.trials, 3);
        assert_eq!(cfg.scenario.kind, ScenarioKind::Correlated);
        assert_eq!(cfg.scenario.k, 1);
        assert_eq!(cfg.learners[1].label(), "kh");
        assert!(cfg.output.sidecar);
        assert_eq!(cfg.output.path, None);
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = ExperimentConfig::from_toml_str(BASIC).unwrap();
        let b = ExperimentConfig::from_toml_str(&BASIC.replace("seed = 5", "# comment\nseed   =   5")).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
        let c = ExperimentConfig::from_toml_str(&BASIC.replace("seed = 5", "seed = 6")).unwrap();
        assert_ne!(a.hash(), c.hash());
        assert_eq!(ExperimentConfig::from_toml_str(&a.canonical_toml()).unwrap(), a);
    }

    #[test]
    fn rejects_bad_configs() {
        for bad in [
            BASIC.replace("trials = 3", "trials = 0"),
            BASIC.replace("label = \"kh\"", "label = \"one-hint\""),
            BASIC.replace("\"k-hints\"", "\"k-hint\""),
            BASIC.replace("\"correlated\"", "\"corr\""),
            BASIC.replace("T = 64", "T = 0"),
            BASIC.replace("d = 3", "d = 3\nbogus = 1"),
            "trials = ".to_string(),
        ] {
            let err = ExperimentConfig::from_toml_str(&bad).unwrap_err();
            assert!(matches!(err, Error::Config(_) | Error::UnknownName { .. }), "{err}");
        }
    }
}
