use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

/// Bumped whenever a JSON envelope changes shape.
pub const SCHEMA_VERSION: u32 = 1;

/// Everything needed to re-run an invocation and get the same output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<u8>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_range: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<SplitManifest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cv: Option<CvManifest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case2_scope: Option<&'static str>,
    pub jitter: bool,
    /// Seconds since the Unix epoch; only present with `--timestamp`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SplitManifest {
    pub train_fraction: f64,
    pub stratified: bool,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CvManifest {
    pub method: &'static str,
    pub folds: usize,
}

impl RunManifest {
    pub fn new(command: &'static str) -> Self {
        RunManifest {
            tool: "varcos",
            version: env!("CARGO_PKG_VERSION"),
            command,
            dataset: None,
            case: None,
            k: None,
            k_range: None,
            seed: None,
            split: None,
            cv: None,
            case2_scope: None,
            jitter: false,
            timestamp: None,
        }
    }

    pub fn stamp(&mut self, enabled: bool) {
        if enabled {
            self.timestamp = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
        }
    }

    /// Single-line form used as a `#` comment in table and CSV output.
    pub fn comment(&self) -> String {
        format!("# manifest: {}", serde_json::to_string(self).expect("manifest serializes"))
    }
}

/// JSON wrapper shared by every command.
#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema_version: u32,
    pub manifest: &'a RunManifest,
    #[serde(flatten)]
    pub body: T,
}

pub fn to_json<T: Serialize>(manifest: &RunManifest, body: T) -> String {
    let env = Envelope {
        schema_version: SCHEMA_VERSION,
        manifest,
        body,
    };
    serde_json::to_string_pretty(&env).expect("report serializes")
}
