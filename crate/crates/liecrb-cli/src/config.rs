//! Declarative experiment configs (TOML) and flag overrides.
//!
//! The config file is the committed artifact of an experiment; command-line
//! flags override individual fields and always win. Unknown keys are
//! rejected everywhere.

use std::path::{Path, PathBuf};

use liecrb::harness::{ExperimentConfig, ReportFormat};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: ExperimentConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<ReportFormat>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("invalid config: {e}"))
    }

    #[cfg(test)]
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialization cannot fail")
    }
}

/// Flag overrides shared by the config-driven commands; flags win over the
/// file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub group: Option<String>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<ReportFormat>,
}

impl Overrides {
    pub fn apply(&self, file: &mut ConfigFile) {
        if let Some(group) = &self.group {
            file.experiment.group = group.clone();
        }
        if let Some(seed) = self.seed {
            file.experiment.seed = seed;
        }
        if let Some(trials) = self.trials {
            file.experiment.n_trials = trials;
        }
        if let Some(tol) = self.tol {
            file.experiment.tolerances.psd_tol = tol;
        }
        let output = file.output.get_or_insert(OutputConfig {
            path: None,
            format: None,
        });
        if let Some(out) = &self.out {
            output.path = Some(out.clone());
        }
        if let Some(format) = self.format {
            output.format = Some(format);
        }
    }
}
