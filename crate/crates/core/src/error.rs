use thiserror::Error;

use crate::chain::Variant;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("operation needs a {expected} chain, got {found}")]
    WrongVariant { expected: &'static str, found: Variant },

    #[error("momentum must be positive and finite, got {0}")]
    BadMomentum(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{variant} chain produced {found} negative bands, at most {cap} are possible")]
    NegativeBandCap {
        variant: Variant,
        found: usize,
        cap: usize,
    },

    #[error("cross-check failed: {0}")]
    CrossCheck(String),
}

impl ChainError {
    /// Errors that indicate a numerical inconsistency rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            ChainError::NegativeBandCap { .. } | ChainError::CrossCheck(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, ChainError>;
