use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::coefficients::SpectralCoefficients;
use crate::chain::wrap_angle;

/// Quasimomenta solving `a cos θ + b sin θ = c` on `[−π, π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "theta", rename_all = "lowercase")]
pub enum ThetaSolutions {
    /// `a = b = c = 0`: an infinitely degenerate eigenvalue.
    All,
    Empty,
    One(f64),
    Two(f64, f64),
}

impl ThetaSolutions {
    pub fn count(&self) -> Option<usize> {
        match self {
            ThetaSolutions::All => None,
            ThetaSolutions::Empty => Some(0),
            ThetaSolutions::One(_) => Some(1),
            ThetaSolutions::Two(..) => Some(2),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match *self {
            ThetaSolutions::One(t) => vec![t],
            ThetaSolutions::Two(s, t) => vec![s, t],
            _ => Vec::new(),
        }
    }
}

/// Two roots closer than this (in θ) are reported as a single tangential root.
const MERGE_TOL: f64 = 1e-12;

pub fn dispersion_theta(coeffs: &SpectralCoefficients) -> ThetaSolutions {
    if coeffs.is_flat() {
        return ThetaSolutions::All;
    }
    let r = coeffs.amplitude();
    if r == 0.0 || coeffs.discriminant() < 0.0 {
        return ThetaSolutions::Empty;
    }
    // sin(ϑ + θ) = c / r with ϑ = atan2(a, b).
    let vartheta = coeffs.a.atan2(coeffs.b);
    let s = (coeffs.c / r).clamp(-1.0, 1.0);
    let base = s.asin();
    let t1 = wrap_angle(base - vartheta);
    let t2 = wrap_angle(PI - base - vartheta);
    let gap = wrap_angle(t2 - t1).abs();
    if gap < MERGE_TOL {
        ThetaSolutions::One(t1)
    } else if t1 <= t2 {
        ThetaSolutions::Two(t1, t2)
    } else {
        ThetaSolutions::Two(t2, t1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cosine_only() {
        let sol = dispersion_theta(&SpectralCoefficients::new(1.0, 0.0, 0.0));
        match sol {
            ThetaSolutions::Two(s, t) => {
                assert!((s + PI / 2.0).abs() < 1e-15);
                assert!((t - PI / 2.0).abs() < 1e-15);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_classes() {
        assert_eq!(
            dispersion_theta(&SpectralCoefficients::new(0.0, 0.0, 0.0)),
            ThetaSolutions::All
        );
        assert_eq!(
            dispersion_theta(&SpectralCoefficients::new(0.5, 0.0, 2.0)),
            ThetaSolutions::Empty
        );
        assert_eq!(
            dispersion_theta(&SpectralCoefficients::new(0.0, 0.0, 2.0)),
            ThetaSolutions::Empty
        );
    }

    #[test]
    fn tangent_root_is_single() {
        let sol = dispersion_theta(&SpectralCoefficients::new(3.0, 4.0, 5.0));
        let ThetaSolutions::One(t) = sol else {
            panic!("{sol:?}")
        };
        assert!((3.0 * t.cos() + 4.0 * t.sin() - 5.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn roots_satisfy_equation(a in -50.0..50.0f64, b in -50.0..50.0f64, frac in -1.0..1.0f64) {
            let c = frac * a.hypot(b);
            let coeffs = SpectralCoefficients::new(a, b, c);
            let sol = dispersion_theta(&coeffs);
            let tol = 1e-9 * (a.abs() + b.abs() + c.abs()).max(1.0);
            for t in sol.values() {
                prop_assert!((-PI..PI).contains(&t));
                prop_assert!(coeffs.residual(t).abs() < tol);
            }
            if a.hypot(b) > 1e-6 {
                prop_assert!(sol.count().unwrap() >= 1);
            }
        }
    }
}
