//! Deterministic result persistence: every output file starts with a
//! comment header recording version, seed, and config hash, and is
//! written atomically (temp file + rename).

use crate::error::Result;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::Path;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of the effective configuration text.
pub fn config_hash(config_text: &str) -> String {
    let mut h = Sha256::new();
    h.update(config_text.as_bytes());
    let out = h.finalize();
    let mut s = String::with_capacity(64);
    for b in out {
        let _ = write!(s, "{b:02x}");
    }
    s
}

pub fn file_header(seed: u64, config_hash: &str) -> String {
    format!("# apkam v{VERSION} seed={seed} config_sha256={config_hash}\n")
}

/// Atomic write: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".into())
    ));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Stable float formatting for byte-identical reruns.
pub fn fmt_float(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.17e}")
    }
}
