//! Spectral analysis of a periodic chain of magnetic rings with a
//! time-reversal-violating vertex coupling.

pub mod bands;
pub mod chain;
pub mod error;
pub mod model;
pub mod oracle;
pub mod probability;
mod parallel;
pub mod rational;
pub mod roots;

pub use chain::{Branch, ChainSpec, SpectralPoint, Variant};
pub use error::{ChainError, Result};
