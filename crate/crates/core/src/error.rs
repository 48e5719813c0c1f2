use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: missing or invalid field `{field}`: {message}")]
    Field {
        line: usize,
        field: &'static str,
        message: String,
    },

    #[error("line {line}: duplicate tweet id `{id}` (first seen on line {first_line})")]
    DuplicateTweetId {
        line: usize,
        first_line: usize,
        id: String,
    },

    #[error("invalid seed `{hashtag}`: valence must be +1 or -1, got {valence}")]
    InvalidSeedValence { hashtag: String, valence: f64 },

    #[error("unknown hashtag `{0}`")]
    UnknownHashtag(String),

    #[error("propagation needs at least one seed hashtag")]
    NoSeeds,

    #[error("gamma must be >= 1, got {0}")]
    InvalidGamma(u64),

    #[error("lexicon: {location}: {message}")]
    Lexicon { location: String, message: String },

    #[error("statistics: {0}")]
    Stats(String),

    #[error("network: {0}")]
    Network(String),

    #[error("synthetic parameters: {0}")]
    SynthParams(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
