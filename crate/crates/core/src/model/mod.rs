//! Spectral-condition coefficients and the auxiliary functions built on them.

pub mod coefficients;
pub mod dispersion;
mod hyperbolic;
pub mod special;

pub use coefficients::{
    coefficients, coefficients_loose, coefficients_merged, coefficients_raw, coefficients_tight,
    coefficients_unscaled, discriminant, negative_at, positive_at, SpectralCoefficients, FLAT_EPS,
};
pub use dispersion::{dispersion_theta, ThetaSolutions};
pub use special::{special_functions, SpecialFunctions};

/// Tolerance for recognizing integer and half-integer flux values.
pub const FLUX_TOL: f64 = 1e-12;

pub fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() <= FLUX_TOL * x.abs().max(1.0)
}

pub fn is_half_integer(x: f64) -> bool {
    is_integer(x - 0.5)
}
