//! Probability for commensurate lengths: the leading indicator is periodic
//! in `k`, so its non-negative fraction over one exact period is the answer.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{asymptotic_indicator, EstimateInputs, Method, ProbabilityEstimate};
use crate::chain::{ChainSpec, Variant};
use crate::error::{ChainError, Result};
use crate::model::special::h_function;
use crate::parallel::{map_range, map_slice};
use crate::rational::Ratio;
use crate::roots::{bisect_root, golden_min};

/// Longest period handled. Longer periods should go through the scan route.
pub const MAX_PERIOD: u64 = 1_000_000;

/// Bisection tolerance for indicator roots, relative to the period.
const ROOT_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicFraction {
    /// Fraction of the period on which `f ≥ 0`.
    pub fraction: f64,
    /// Sign changes found in one period.
    pub roots: usize,
    pub error_bound: f64,
}

/// Fraction of `[0, period)` on which `f ≥ 0`, from the sign changes of
/// `f` on a grid of `samples` points, refined by bisection. Between grid
/// points where `f` turns back toward zero without crossing, the extremum
/// is searched for a hidden pair of roots.
pub fn periodic_fraction<F>(f: F, period: f64, samples: usize) -> PeriodicFraction
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let n = samples.max(8);
    let h = period / n as f64;
    let tol = ROOT_TOL * period.max(1.0);
    let values: Vec<f64> = map_range(n + 1, |i| f(h * i as f64));
    let nonneg = |v: f64| v >= 0.0;
    let sign = |x: f64| if nonneg(f(x)) { 1.0 } else { -1.0 };

    let mut cuts: Vec<f64> = map_slice(&(0..n).collect::<Vec<_>>(), |&i| {
        let mut out = Vec::new();
        if nonneg(values[i]) != nonneg(values[i + 1]) {
            let lo = h * i as f64;
            out.push(bisect_root(sign, lo, lo + h, tol, 200).unwrap_or(lo + 0.5 * h));
        } else if i > 0 && nonneg(values[i - 1]) == nonneg(values[i]) {
            // Turning point of |f| between same-sign samples: look for a dip
            // through zero.
            let (a, b, c) = (values[i - 1].abs(), values[i].abs(), values[i + 1].abs());
            if b <= a && b <= c {
                let s = if nonneg(values[i]) { 1.0 } else { -1.0 };
                let lo = h * (i as f64 - 1.0);
                let (x, v) = golden_min(|x| s * f(x), lo, lo + 2.0 * h, tol, 200);
                if nonneg(s * v) != nonneg(values[i]) {
                    if let (Some(r1), Some(r2)) = (
                        bisect_root(sign, lo, x, tol, 200),
                        bisect_root(sign, x, lo + 2.0 * h, tol, 200),
                    ) {
                        out.push(r1);
                        out.push(r2);
                    }
                }
            }
        }
        out
    })
    .into_iter()
    .flatten()
    .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= tol);

    let mut bounds = Vec::with_capacity(cuts.len() + 2);
    bounds.push(0.0);
    bounds.extend(cuts.iter().copied().filter(|&x| x > 0.0 && x < period));
    bounds.push(period);
    let covered: f64 = bounds
        .windows(2)
        .filter(|w| nonneg(f(0.5 * (w[0] + w[1]))))
        .map(|w| w[1] - w[0])
        .sum();
    PeriodicFraction {
        fraction: covered / period,
        roots: cuts.len(),
        error_bound: cuts.len() as f64 * tol / period,
    }
}

/// Fraction of one period of the symmetric tight chain's indicator
/// `h(k) = sin(k − A)π sin(k + A)π` that is non-negative; `h` has period 1.
pub fn symmetric_period_probability(flux: f64) -> Result<ProbabilityEstimate> {
    if !flux.is_finite() {
        return Err(ChainError::Precondition("flux must be finite".into()));
    }
    let pf = periodic_fraction(|k| h_function(k, flux), 1.0, 4096);
    let inputs = EstimateInputs {
        variant: Some(Variant::Tight),
        flux,
        l3: Some(PI),
        period: Some(1.0),
        ..EstimateInputs::default()
    };
    Ok(ProbabilityEstimate::new(pf.fraction, Method::Periodic, pf.error_bound, inputs))
}

/// Exact-period probability.
///
/// * Tight chain: `ratio = ℓ₂/ℓ₃ = p/q`, so `ℓ₃ = 2πq/(p+q)` and the period
///   is `p + q`. The indicator is a product of four sines, so its roots are
///   written down directly.
/// * Merged chain: `ratio = ℓ₁/π = p/q`, period `q`; roots are isolated
///   numerically.
///
/// `ell` does not enter the leading indicator; it is only recorded.
pub fn periodic_probability(variant: Variant, flux: f64, ratio: Ratio, ell: f64) -> Result<ProbabilityEstimate> {
    if ratio.num <= 0 {
        return Err(ChainError::Precondition(format!("ratio {ratio} must be positive")));
    }
    let (p, q) = (ratio.num as u64, ratio.den);
    let period = match variant {
        Variant::Tight => p + q,
        Variant::Merged => q,
        Variant::Loose => {
            return Err(ChainError::WrongVariant {
                expected: "tight or merged",
                found: Variant::Loose,
            })
        }
    };
    if period > MAX_PERIOD {
        return Err(ChainError::Precondition(format!(
            "period {period} of ratio {ratio} exceeds {MAX_PERIOD}; use the scan route instead"
        )));
    }
    let t = period as f64;
    let (spec, pf) = match variant {
        Variant::Tight => {
            let spec = ChainSpec::tight(ell, 2.0 * PI * q as f64 / t, flux)?;
            (spec, tight_fraction(&spec, p, q))
        }
        _ => {
            let spec = ChainSpec::merged(ell, PI * ratio.value(), flux)?;
            let omega = 2.0 * (spec.l1() + 2.0 * PI);
            let per_unit = (64.0 * omega / (2.0 * PI)).ceil().max(256.0);
            let s = spec;
            let pf = periodic_fraction(move |k| asymptotic_indicator(&s, k), t, (per_unit * t) as usize);
            (spec, pf)
        }
    };
    let mut inputs = EstimateInputs::for_spec(&spec);
    inputs.period = Some(t);
    Ok(ProbabilityEstimate::new(pf.fraction, Method::Periodic, pf.error_bound, inputs))
}

/// Tight chain with `ℓ₂/ℓ₃ = p/q`: the zeros of the four sine factors over
/// the period `T = p + q` are `k ≡ ±A (mod 1)`, `k = nT/(2q)` and `k = nT/(2p)`.
fn tight_fraction(spec: &ChainSpec, p: u64, q: u64) -> PeriodicFraction {
    let t = (p + q) as f64;
    let a = spec.flux().rem_euclid(1.0);
    let mut roots = Vec::with_capacity(4 * (p + q) as usize + 8);
    for n in 0..=(p + q) {
        for r in [n as f64 + a, n as f64 - a, n as f64 + 1.0 - a] {
            if r > 0.0 && r < t {
                roots.push(r);
            }
        }
    }
    for n in 1..(2 * q) {
        roots.push(n as f64 * t / (2 * q) as f64);
    }
    for n in 1..(2 * p) {
        roots.push(n as f64 * t / (2 * p) as f64);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    let mut bounds = Vec::with_capacity(roots.len() + 2);
    bounds.push(0.0);
    bounds.extend(&roots);
    bounds.push(t);
    let covered: f64 = bounds
        .windows(2)
        .filter(|w| asymptotic_indicator(spec, 0.5 * (w[0] + w[1])) >= 0.0)
        .map(|w| w[1] - w[0])
        .sum();
    PeriodicFraction {
        fraction: covered / t,
        roots: roots.len(),
        // Each root is placed to a few ulps of the period.
        error_bound: roots.len() as f64 * 4.0 * f64::EPSILON,
    }
}
