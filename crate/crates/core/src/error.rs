use std::path::PathBuf;

/// Errors produced by every stage of the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate product id `{0}`")]
    DuplicateProduct(String),

    #[error("unknown product `{0}`")]
    UnknownProduct(String),

    #[error("combination #{index}: unknown product `{id}`")]
    UnknownProductInCombination { index: usize, id: String },

    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("not enough data: {0}")]
    Insufficient(String),

    #[error("sequence of length {len} exceeds the model limit of {limit}")]
    TooLong { len: usize, limit: usize },

    #[error("token id {0} is outside the vocabulary")]
    OutOfVocabulary(u32),

    #[error("character {0:?} is not in the vocabulary")]
    UnknownCharacter(char),

    #[error("loss became non-finite at step {step}")]
    Diverged { step: usize },

    #[error("artifact checksum mismatch: expected {expected}, found {found}")]
    Checksum { expected: String, found: String },

    #[error("unsupported artifact: {0}")]
    Format(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }

    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
