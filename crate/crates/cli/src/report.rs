use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = concat!("rvz ", env!("CARGO_PKG_VERSION"));

/// How a run ended. Determines the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    NotConverged,
    BudgetExceeded,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::NotConverged => 3,
            Status::BudgetExceeded => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandEcho {
    pub name: String,
    /// Every parameter after defaults are applied; file arguments appear
    /// by path here and by content in the digest.
    pub params: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
    pub cache_hit: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: CommandEcho,
    /// SHA-256 of the command name, its parameters and the parsed contents
    /// of its input files.
    pub input_digest: String,
    pub status: Status,
    pub results: Value,
    pub certificates: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
    pub tool_version: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digest of the resolved inputs. `serde_json::Value` keeps object keys
/// sorted, so the serialization is canonical.
pub fn input_digest(command: &str, params_without_paths: &Value, inputs: &Value) -> String {
    let doc = serde_json::json!({ "command": command, "params": params_without_paths, "inputs": inputs });
    sha256_hex(doc.to_string().as_bytes())
}
