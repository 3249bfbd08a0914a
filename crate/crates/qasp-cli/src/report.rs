use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Effective resource limits of a run.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Caps {
    pub max_atoms: usize,
    pub max_ground: usize,
    pub timeout_secs: u64,
}

#[derive(Debug, Serialize)]
pub struct ErrorPayload {
    pub kind: &'static str,
    pub message: String,
}

/// The JSON document printed on standard output for every command.
#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub command: &'static str,
    pub input_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorPayload>,
    /// Milliseconds per phase.
    pub timings: BTreeMap<String, u64>,
    pub caps: Caps,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Accumulates per-phase timings.
#[derive(Default)]
pub struct Timer {
    phases: BTreeMap<String, u64>,
}

impl Timer {
    pub fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.phases.entry(phase.to_string()).or_default() += start.elapsed().as_millis() as u64;
        out
    }

    pub fn into_map(self) -> BTreeMap<String, u64> {
        self.phases
    }
}
