use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is outside [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("state is not normalized: squared norm {0}")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("effect eigenvalues ({0}, {1}) fall outside [0, 1]")]
    NotAnEffect(f64, f64),

    #[error("Born probability has imaginary part {0:e}")]
    ComplexProbability(f64),

    #[error("invalid action index (theta {theta_idx}, phi {phi_idx})")]
    InvalidAction { theta_idx: usize, phi_idx: usize },

    #[error("prior is not normalized: total weight {0}")]
    Unnormalized(f64),

    #[error("prior has negative or non-finite weight at index {0}")]
    InvalidWeight(usize),

    #[error("posterior has zero total weight")]
    ZeroPosterior,

    #[error("bit value {0} is not 0 or 1")]
    InvalidBit(u8),

    #[error("reduction check failed ({check}) at {coords}: violation {violation:e}")]
    ReductionCounterexample {
        check: &'static str,
        coords: String,
        violation: f64,
    },

    #[error("unknown {kind} '{name}' (expected one of: {expected})")]
    UnknownName {
        kind: &'static str,
        name: String,
        expected: String,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot read config file {path}: {source}")]
    ReadConfig {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot parse config file {path}: {source}")]
    ParseConfig {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            lo,
            hi,
        })
    }
}

pub(crate) fn check_bit(bit: u8) -> Result<()> {
    if bit <= 1 {
        Ok(())
    } else {
        Err(Error::InvalidBit(bit))
    }
}
