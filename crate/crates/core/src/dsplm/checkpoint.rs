use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::model::{tensor_layout, ModelConfig, PrefixLm, TensorSpec};
use super::vocab::Vocab;
use crate::artifact;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const CHECKPOINT_FORMAT: &str = "combocopy-prefix-lm";
pub const CHECKPOINT_VERSION: u32 = 1;

/// On-disk model: config, vocabulary tokens in id order, tensor layout and
/// the flat weight vector, guarded by a SHA-256 over the weights as
/// little-endian f64 values.
#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct Checkpoint<T> {
    scalar: String,
    config: ModelConfig,
    vocab: Vocab,
    layout: Vec<TensorSpec>,
    checksum: String,
    weights: Vec<T>,
}

pub fn weights_checksum<T: Scalar>(weights: &[T]) -> String {
    let mut h = Sha256::new();
    for w in weights {
        h.update(w.as_f64().to_le_bytes());
    }
    hex::encode(h.finalize())
}

pub fn save_checkpoint<T: Scalar>(model: &PrefixLm<T>, path: impl AsRef<Path>) -> Result<()> {
    let ckpt = Checkpoint {
        scalar: T::NAME.to_string(),
        config: model.config().clone(),
        vocab: model.vocab().clone(),
        layout: model.tensors().to_vec(),
        checksum: weights_checksum(model.weights()),
        weights: model.weights().to_vec(),
    };
    artifact::save(CHECKPOINT_FORMAT, CHECKPOINT_VERSION, &ckpt, path)
}

pub fn load_checkpoint<T: Scalar>(path: impl AsRef<Path>) -> Result<PrefixLm<T>> {
    let ckpt: Checkpoint<T> = artifact::load(CHECKPOINT_FORMAT, CHECKPOINT_VERSION, path)?;
    if ckpt.scalar != T::NAME {
        return Err(Error::Format(format!(
            "checkpoint stores {} weights, expected {}",
            ckpt.scalar,
            T::NAME
        )));
    }
    if ckpt.layout != tensor_layout(&ckpt.config, ckpt.vocab.len()) {
        return Err(Error::Format(
            "tensor layout does not match the model config".into(),
        ));
    }
    let found = weights_checksum(&ckpt.weights);
    if found != ckpt.checksum {
        return Err(Error::Checksum {
            expected: ckpt.checksum,
            found,
        });
    }
    PrefixLm::from_weights(ckpt.config, ckpt.vocab, ckpt.weights)
}
