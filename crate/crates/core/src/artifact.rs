//! Versioned JSON envelopes for trained artifacts.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    version: u32,
    body: T,
}

pub fn save<T: Serialize>(
    format: &str,
    version: u32,
    body: &T,
    path: impl AsRef<Path>,
) -> Result<()> {
    let env = Envelope {
        format: format.to_string(),
        version,
        body,
    };
    std::fs::write(path, serde_json::to_vec(&env)?)?;
    Ok(())
}

pub fn load<T: DeserializeOwned>(format: &str, version: u32, path: impl AsRef<Path>) -> Result<T> {
    let env: Envelope<T> = serde_json::from_slice(&std::fs::read(path)?)?;
    if env.format != format || env.version != version {
        return Err(Error::Format(format!(
            "expected {format} v{version}, found {} v{}",
            env.format, env.version
        )));
    }
    Ok(env.body)
}

/// Hex SHA-256 of a file's bytes.
pub fn file_checksum(path: impl AsRef<Path>) -> Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}
