//! Probability that a randomly chosen energy lies in the spectrum.
//!
//! Four routes are available: a direct band scan of `[0, K]`, the leading
//! high-energy indicator on one exact period (commensurate lengths), the
//! area fraction on the torus the indicator's phases equidistribute over
//! (incommensurate lengths), and closed forms where they exist.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainSpec, Variant};
use crate::error::{ChainError, Result};

pub mod periodic;
pub mod routes;
pub mod torus;

pub use periodic::{periodic_fraction, periodic_probability, symmetric_period_probability, PeriodicFraction};
pub use routes::{
    scan_convergence, scan_probability, universality_check, RouteDisagreement, UniversalityReport, UniversalityRow,
    DEFAULT_SCAN_POINTS_PER_UNIT,
};
pub use torus::{merged_octant_area, torus_indicator, torus_probability, OctantArea, TorusOptions, DEFAULT_SEED};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Scan,
    Periodic,
    Torus,
    ClosedForm,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Scan => "scan",
            Method::Periodic => "periodic",
            Method::Torus => "torus",
            Method::ClosedForm => "closed-form",
        })
    }
}

/// What an estimate was computed from. Fields not used by a route are `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimateInputs {
    pub variant: Option<Variant>,
    pub flux: f64,
    pub ell: Option<f64>,
    pub l1: Option<f64>,
    pub l3: Option<f64>,
    pub k_max: Option<f64>,
    pub resolution: Option<usize>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    /// Length of the exact period, for the periodic route.
    pub period: Option<f64>,
    /// Independent value computed alongside the main one (Monte Carlo for
    /// the torus, the half-range coverage for the scan).
    pub cross_check: Option<f64>,
}

impl EstimateInputs {
    pub fn for_spec(spec: &ChainSpec) -> Self {
        Self {
            variant: Some(spec.variant()),
            flux: spec.flux(),
            ell: Some(spec.ell()),
            l1: Some(spec.l1()),
            l3: Some(spec.l3()),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub value: f64,
    pub method: Method,
    pub error_bound: f64,
    pub inputs: EstimateInputs,
}

impl ProbabilityEstimate {
    pub(crate) fn new(value: f64, method: Method, error_bound: f64, inputs: EstimateInputs) -> Self {
        Self {
            value: value.clamp(0.0, 1.0),
            method,
            error_bound: error_bound.max(0.0),
            inputs,
        }
    }
}

/// Leading-order band indicator at large `k`, with positive prefactors
/// dropped: only its sign carries meaning, and `k` is in the spectrum at
/// leading order iff the value is `≥ 0`.
///
/// For the loose chain it is minus a product of squares, so membership at
/// leading order holds only on its zero set.
pub fn asymptotic_indicator(spec: &ChainSpec, k: f64) -> f64 {
    let a = spec.flux();
    let (l1, l2, l3) = (spec.l1(), spec.l2(), spec.l3());
    match spec.variant() {
        Variant::Loose => {
            let s = (k * l1).sin() * (k * l2).sin() * (k * l3).sin();
            -(s * s)
        }
        Variant::Tight => ((k - a) * PI).sin() * ((k + a) * PI).sin() * (k * l3).sin() * (k * l2).sin(),
        Variant::Merged => {
            let s = (2.0 * k * PI).sin();
            let u = (k * (l1 + 2.0 * PI)).sin() - (2.0 * PI * a).cos() * (k * l1).sin();
            s * s - u * u
        }
    }
}

/// `½ + 2A − 4A²` with `A` reduced into `[0, ½)`.
pub fn tight_asymmetric_closed_form(flux: f64) -> f64 {
    let a = flux.rem_euclid(0.5);
    0.5 + 2.0 * a - 4.0 * a * a
}

/// `1 − arccos(cos 2πA)/π`.
pub fn tight_symmetric_closed_form(flux: f64) -> f64 {
    1.0 - (2.0 * PI * flux).cos().clamp(-1.0, 1.0).acos() / PI
}

/// Closed-form probability for incommensurate lengths. `symmetric` selects
/// the `ℓ₃ = π` tight chain and is ignored otherwise.
pub fn closed_form_probability(variant: Variant, flux: f64, symmetric: bool) -> Result<ProbabilityEstimate> {
    if !flux.is_finite() {
        return Err(ChainError::Precondition("flux must be finite".into()));
    }
    let value = match variant {
        Variant::Tight if symmetric => tight_symmetric_closed_form(flux),
        Variant::Tight => tight_asymmetric_closed_form(flux),
        Variant::Merged => 0.5,
        Variant::Loose => 0.0,
    };
    let inputs = EstimateInputs {
        variant: Some(variant),
        flux,
        l3: (variant == Variant::Tight && symmetric).then_some(PI),
        ..EstimateInputs::default()
    };
    Ok(ProbabilityEstimate::new(value, Method::ClosedForm, 0.0, inputs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let v = |a, s| closed_form_probability(Variant::Tight, a, s).unwrap().value;
        assert!((v(0.25, false) - 0.75).abs() < 1e-15);
        assert!((v(0.0, false) - 0.5).abs() < 1e-15);
        assert!((v(0.5, false) - 0.5).abs() < 1e-15);
        assert!((v(0.1, false) - 0.66).abs() < 1e-12);
        assert!((v(0.0, true) - 1.0).abs() < 1e-15);
        assert!(v(0.5, true).abs() < 1e-15);
        assert_eq!(closed_form_probability(Variant::Merged, 0.3, false).unwrap().value, 0.5);
        assert_eq!(closed_form_probability(Variant::Loose, 0.3, false).unwrap().value, 0.0);
    }

    #[test]
    fn indicator_signs() {
        let loose = ChainSpec::loose(1.0, 1.3, 2.1, 0.37).unwrap();
        let sym = ChainSpec::tight(1.0, PI, 0.0).unwrap();
        let half = ChainSpec::tight(1.0, PI, 0.5).unwrap();
        for i in 1..2000 {
            let k = 0.013 * i as f64;
            assert!(asymptotic_indicator(&loose, k) <= 0.0);
            assert!(asymptotic_indicator(&sym, k) >= 0.0);
            // At half-integer flux only the neighborhoods of integers survive.
            let frac = k - k.round();
            if frac.abs() > 0.02 {
                assert!(asymptotic_indicator(&half, k) <= 0.0, "{k}");
            }
        }
    }
}
