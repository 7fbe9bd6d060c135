use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const TOOL: &str = "joints";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_sha256: String,
    pub timestamp: String,
}

impl Provenance {
    /// Provenance for a run whose configuration serializes to `config`.
    pub fn for_config<T: Serialize>(config: &T) -> Self {
        Provenance {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_sha256: config_hash(config),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }

    /// The first line of CSV reports.
    pub fn csv_comment(&self) -> String {
        format!(
            "# tool={} version={} config_sha256={} timestamp={}",
            self.tool, self.version, self.config_sha256, self.timestamp
        )
    }
}

/// SHA-256 of the compact JSON form of `config`.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let bytes = serde_json::to_vec(config).expect("configurations serialize");
    hex::encode(Sha256::digest(&bytes))
}

/// Hash of a JSON document with its own provenance block removed, so that
/// regenerated inputs hash identically.
pub fn document_hash(doc: &serde_json::Value) -> String {
    let mut doc = doc.clone();
    if let Some(map) = doc.as_object_mut() {
        map.remove("provenance");
    }
    config_hash(&doc)
}
