//! Run configuration files: TOML by default, JSON for `.json` paths.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use qhlab::scenarios::ScenarioRequest;
use serde::Deserialize;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Base mesh `h` for scenarios that do not set their own.
    #[serde(default)]
    pub mesh: Option<f64>,
    #[serde(default)]
    pub budget: Option<u64>,
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default, rename = "scenario")]
    pub scenarios: Vec<ScenarioRequest>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let cfg: RunConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).with_context(|| format!("{}: invalid configuration", path.display()))?
        } else {
            toml::from_str(&text).with_context(|| format!("{}: invalid configuration", path.display()))?
        };
        cfg.validate().with_context(|| format!("{}: invalid configuration", path.display()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(h) = self.mesh {
            if !(h > 0.0 && h.is_finite()) {
                bail!("field `mesh`: must be positive, got {h}");
            }
        }
        if self.jobs == Some(0) {
            bail!("field `jobs`: must be at least 1");
        }
        if self.scenarios.is_empty() {
            bail!("no [[scenario]] entries");
        }
        for (i, s) in self.scenarios.iter().enumerate() {
            s.validate().with_context(|| format!("scenario #{} (`{}`)", i + 1, s.name))?;
        }
        Ok(())
    }
}
