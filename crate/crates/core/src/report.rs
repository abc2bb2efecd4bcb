//! Machine-readable run reports emitted by the CLI with `--json`.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: &str = "1.0";

/// The JSON schema every report validates against.
pub const SCHEMA: &str = include_str!("../schema/run-report.schema.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommandEcho {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn new(role: &str, path: &str, bytes: &[u8]) -> Self {
        InputDigest {
            role: role.to_string(),
            path: path.to_string(),
            sha256: sha256_hex(bytes),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BoundsEcho {
    pub max_domain: usize,
    pub budget: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_fresh: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_branch: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema_version: &'static str,
    pub command: CommandEcho,
    pub inputs: Vec<InputDigest>,
    pub bounds: BoundsEcho,
    pub result: Value,
    pub warnings: Vec<String>,
    pub exit_code: i32,
}

impl RunReport {
    pub fn new(command: CommandEcho, bounds: BoundsEcho) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            command,
            inputs: Vec::new(),
            bounds,
            result: Value::Null,
            warnings: Vec::new(),
            exit_code: 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
