//! Run manifest: what was run, with which inputs, and what it produced.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use ntn_peb::channel::{ChannelTables, TABLE_VERSION};
use ntn_peb::scenarios::calibration::{CALIBRATED_PROCESSING_GAIN_DB, CALIBRATED_TDOA_SYNC_SIGMA_M};
use ntn_peb::scenarios::ScenarioConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub frozen_processing_gain_db: f64,
    pub frozen_tdoa_sync_sigma_m: f64,
    /// Values the run actually used, after config overrides.
    pub processing_gain_db: Option<f64>,
    pub tdoa_sync_sigma_m: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TableRecord {
    pub version: String,
    /// `embedded` or the directory the tables were read from.
    pub source: Option<String>,
    pub checksums: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub started_at: String,
    pub finished_at: Option<String>,
    pub workers: Option<usize>,
    /// SHA-256 of the canonical JSON of the resolved config.
    pub config_hash: Option<String>,
    pub seed: Option<u64>,
    pub config: Option<ScenarioConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub case_configs: Vec<ScenarioConfig>,
    pub calibration: CalibrationRecord,
    pub channel_tables: TableRecord,
    pub outputs: Vec<String>,
    pub errors: Vec<String>,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Hash of the resolved config; independent of key order and of defaults
/// being spelled out or not.
pub fn config_hash(cfg: &ScenarioConfig) -> String {
    hex::encode(Sha256::digest(cfg.to_canonical_json().as_bytes()))
}

impl RunManifest {
    pub fn start(command: &str, workers: Option<usize>) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            started_at: now(),
            finished_at: None,
            workers,
            config_hash: None,
            seed: None,
            config: None,
            case_configs: Vec::new(),
            calibration: CalibrationRecord {
                frozen_processing_gain_db: CALIBRATED_PROCESSING_GAIN_DB,
                frozen_tdoa_sync_sigma_m: CALIBRATED_TDOA_SYNC_SIGMA_M,
                processing_gain_db: None,
                tdoa_sync_sigma_m: None,
            },
            channel_tables: TableRecord {
                version: TABLE_VERSION.to_string(),
                ..Default::default()
            },
            outputs: Vec::new(),
            errors: Vec::new(),
        }
    }

    pub fn record_config(&mut self, cfg: &ScenarioConfig, tables: &ChannelTables) {
        self.config_hash = Some(config_hash(cfg));
        self.seed = Some(cfg.seed);
        self.config = Some(cfg.clone());
        self.calibration.processing_gain_db = Some(cfg.links.processing_gain_db);
        self.calibration.tdoa_sync_sigma_m = Some(cfg.links.tdoa_sync_sigma_m);
        self.channel_tables.source = Some(match &cfg.channel_table_dir {
            Some(d) => d.display().to_string(),
            None => "embedded".to_string(),
        });
        self.channel_tables.checksums = tables.checksums().clone();
        self.channel_tables.warnings = tables.checksum_warnings();
    }

    /// Writes `value` as pretty JSON into `dir/name` and lists it as an output.
    pub fn write_json<T: Serialize>(&mut self, dir: &Path, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        let path = dir.join(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    pub fn add_output(&mut self, name: &str) {
        self.outputs.push(name.to_string());
    }

    pub fn finish_and_write(&mut self, dir: &Path) -> Result<()> {
        self.finished_at = Some(now());
        self.outputs.push(MANIFEST_FILE.to_string());
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        let path = dir.join(MANIFEST_FILE);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ntn_peb::scenarios::Variant;

    #[test]
    fn hash_ignores_key_order() {
        let a = ScenarioConfig::from_json_str(r#"{"variant":"multi-leo","seed":3,"n_ue_drops":10}"#).unwrap();
        let b = ScenarioConfig::from_json_str(r#"{"n_ue_drops":10,"seed":3,"variant":"multi-leo"}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        let c = ScenarioConfig::from_json_str(r#"{"n_ue_drops":10,"seed":4,"variant":"multi-leo"}"#).unwrap();
        assert_ne!(config_hash(&a), config_hash(&c));
    }

    #[test]
    fn explicit_defaults_hash_like_implicit_ones() {
        let a = ScenarioConfig::from_json_str(r#"{"variant":"single-leo"}"#).unwrap();
        let b = ScenarioConfig::from_json_str(r#"{"variant":"single-leo","leo_altitude_m":600000.0}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_eq!(a, ScenarioConfig::default_for(Variant::SingleLeo));
    }
}
