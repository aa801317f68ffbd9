use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// `h_prime` landed outside `[0, 2^{2k})`. Happens with negligible
    /// probability and is treated as a protocol failure.
    #[error("hashed prime overflows {bits} bits")]
    OverflowNegligible { bits: u32 },

    #[error("operation unsupported: {0}")]
    Unsupported(&'static str),

    #[error("malformed proof: {0}")]
    MalformedProof(String),

    #[error("checkpoint integrity failure: {0}")]
    Integrity(String),

    #[error("malformed transaction: {0}")]
    MalformedTransaction(String),

    #[error("an issue by this identity is already in flight")]
    Sequencing,

    #[error("node is not permitted to issue: {0}")]
    NotPermitted(String),

    #[error("nonce space exhausted")]
    NonceExhausted,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
