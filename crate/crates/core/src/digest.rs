//! Stable digests of configurations, embedded in every report.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// SHA-256 of the canonical JSON form of `value` (object keys sorted, no
/// whitespace), as lowercase hex.
pub fn config_digest<T: Serialize>(value: &T) -> Result<String> {
    // `serde_json::Value` keeps object keys in sorted order.
    let canonical = serde_json::to_string(&serde_json::to_value(value)?)?;
    let hash = Sha256::digest(canonical.as_bytes());
    Ok(hash.iter().map(|b| format!("{b:02x}")).collect())
}
