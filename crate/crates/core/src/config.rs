//! Optional TOML run configuration.
//!
//! Values given on the command line win over the file, and the file wins
//! over the selected preset. Every field is optional.
//!
//! ```toml
//! [index]
//! preset = "us"
//! freq = "monthly"
//! excitement = "lexicons/excitement.txt"
//! anxiety = "lexicons/anxiety.txt"
//! negation = 3
//!
//! [filter]
//! dateline_allow = ["NEW YORK", "WASHINGTON"]
//!
//! [stats]
//! p_max = 20
//! alpha = 0.05
//! ```

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::FilterSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub index: IndexSection,
    #[serde(default)]
    pub filter: FilterOverrides,
    #[serde(default)]
    pub stats: StatsSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexSection {
    pub preset: Option<String>,
    pub freq: Option<String>,
    pub excitement: Option<PathBuf>,
    pub anxiety: Option<PathBuf>,
    pub from: Option<String>,
    pub to: Option<String>,
    pub concept: Option<String>,
    /// Character radius for concept proximity.
    pub window: Option<usize>,
    /// Preceding-token window for negation.
    pub negation: Option<usize>,
    pub negation_cues: Option<Vec<String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterOverrides {
    pub attribution: Option<String>,
    pub language: Option<String>,
    pub dateline_allow: Option<Vec<String>>,
    pub dateline_deny: Option<Vec<String>>,
    pub exclude_tags: Option<Vec<String>>,
}

impl FilterOverrides {
    pub fn apply(&self, mut spec: FilterSpec) -> FilterSpec {
        if let Some(a) = &self.attribution {
            spec.required_attribution = a.clone();
        }
        if let Some(l) = &self.language {
            spec.required_language = l.clone();
        }
        if let Some(v) = &self.dateline_allow {
            spec.dateline_allow = v.clone();
        }
        if let Some(v) = &self.dateline_deny {
            spec.dateline_deny = v.clone();
        }
        if let Some(v) = &self.exclude_tags {
            spec.excluded_tags = v.iter().map(|t| t.to_ascii_uppercase()).collect::<BTreeSet<_>>();
        }
        spec
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatsSection {
    pub lags: Option<usize>,
    pub det: Option<String>,
    pub p_max: Option<usize>,
    pub alpha: Option<f64>,
    pub max_order: Option<usize>,
    pub adf_lags: Option<usize>,
    pub kpss_lag: Option<usize>,
    pub portmanteau_lags: Option<usize>,
    pub bg_lags: Option<usize>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::InvalidInput(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
    }
}
