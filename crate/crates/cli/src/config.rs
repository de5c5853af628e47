use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use symlap_core::verify::VerifyConfig;
use symlap_core::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything that shapes a run. Loaded from `--config` and overridden by
/// flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub recipes: Vec<String>,
    pub tol: f64,
    pub count: usize,
    pub kernel_threshold: f64,
    pub class_threshold: f64,
    pub equality: f64,
    /// Not part of the checksum, so runs into different directories agree.
    pub output_dir: PathBuf,
    pub seed_label: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        let v = VerifyConfig::default();
        Self {
            recipes: Vec::new(),
            tol: v.tol,
            count: v.count,
            kernel_threshold: v.kernel_floor,
            class_threshold: v.class_floor,
            equality: v.equality,
            output_dir: PathBuf::from("."),
            seed_label: v.seed_label,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.verify_config().validate()
    }

    pub fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            tol: self.tol,
            count: self.count,
            kernel_floor: self.kernel_threshold,
            class_floor: self.class_threshold,
            equality: self.equality,
            coarse_equality: 2.0 * self.equality,
            seed_label: self.seed_label.clone(),
            ..VerifyConfig::default()
        }
    }

    fn checksummed(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        v.as_object_mut().expect("object").remove("output_dir");
        v
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn checksum(&self) -> String {
        let text = serde_json::to_string(&self.checksummed()).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// The `config` object written into reports.
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.checksummed();
        let obj = v.as_object_mut().expect("object");
        obj.insert("version".into(), VERSION.into());
        obj.insert("checksum".into(), self.checksum().into());
        v
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn output_path(&self, p: &std::path::Path) -> PathBuf {
        self.output_dir.join(p)
    }
}
