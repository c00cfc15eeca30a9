//! Fan files: `{"dim", "rays", "max_cones", "galois"?}` in JSON.

use std::path::{Path, PathBuf};

use manin_core::fan::Fan;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    #[serde(default = "default_version")]
    schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    dim: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    galois: Vec<Vec<Vec<i64>>>,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0} (expected {SCHEMA_VERSION})")]
    Version(u32),
    #[error("{0}")]
    Fan(#[from] manin_core::Error),
}

#[derive(Clone, Debug)]
pub struct FanFile {
    pub path: PathBuf,
    pub name: String,
    pub schema_version: u32,
    pub fan: Fan,
}

impl FanFile {
    pub fn read(path: &Path) -> Result<FanFile, ParseError> {
        let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io { path: path.into(), source })?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("fan");
        let mut f = Self::parse(&text, stem)?;
        f.path = path.into();
        Ok(f)
    }

    /// Parses JSON text; `fallback_name` is used when the file has no name.
    pub fn parse(text: &str, fallback_name: &str) -> Result<FanFile, ParseError> {
        let raw: Raw = serde_json::from_str(text)?;
        if raw.schema_version != SCHEMA_VERSION {
            return Err(ParseError::Version(raw.schema_version));
        }
        let fan = Fan::new(raw.dim, raw.rays, raw.max_cones, raw.galois)?;
        Ok(FanFile {
            path: PathBuf::new(),
            name: raw.name.unwrap_or_else(|| fallback_name.to_string()),
            schema_version: raw.schema_version,
            fan,
        })
    }

    pub fn to_json(&self) -> String {
        let raw = Raw {
            schema_version: self.schema_version,
            name: Some(self.name.clone()),
            dim: self.fan.dim(),
            rays: self.fan.rays().to_vec(),
            max_cones: self.fan.max_cones().to_vec(),
            galois: self.fan.galois().iter().map(|g| g.to_rows()).collect(),
        };
        serde_json::to_string_pretty(&raw).expect("fan files serialize")
    }
}
