//! Parameter values at which two neighboring bands touch.

use std::fmt;

use serde::{Deserialize, Serialize};

use std::f64::consts::PI;

use super::scan::{flat_norm, scan_bands_between, BandKind, ScanOptions};
use crate::chain::{wrap_angle, ChainSpec};
use crate::error::{ChainError, Result};
use crate::model::{dispersion_theta, positive_at, SpectralCoefficients, ThetaSolutions};
use crate::parallel::{map_range, map_slice};
use crate::roots::golden_min;

/// Gap widths below this after refinement are reported as touching.
pub const TOUCH_WIDTH: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    L1,
    L3,
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepParam::L1 => "l1",
            SweepParam::L3 => "l3",
        })
    }
}

impl SweepParam {
    pub fn apply(self, spec: &ChainSpec, value: f64) -> Result<ChainSpec> {
        match self {
            SweepParam::L1 => spec.with_l1(value),
            SweepParam::L3 => spec.with_l3(value),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ClosingOptions {
    pub param_samples: usize,
    pub grid_points: usize,
}

impl Default for ClosingOptions {
    fn default() -> Self {
        Self {
            param_samples: 200,
            grid_points: 4000,
        }
    }
}

/// A local minimum of a gap width along the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapClosing {
    pub param: f64,
    pub k: f64,
    /// Quasimomentum at which the derivatives below were taken.
    pub theta: f64,
    /// Smallest gap width reached by the refinement.
    pub gap_width: f64,
    /// Width of the momentum interval around `k` on which the sign of the
    /// discriminant is below floating-point resolution.
    pub resolution: f64,
    /// `gap_width < TOUCH_WIDTH`, or the gap is narrower than `resolution`.
    /// Both the width and the resolution are reported, since a tiny open
    /// gap cannot be told apart from a touch below them.
    pub touching: bool,
    /// Scaled finite-difference derivatives of `a cos θ + b sin θ − c` at the
    /// touching point; all three vanish at a genuine crossing.
    pub d_theta: f64,
    pub d_k: f64,
    pub d_param: f64,
}

/// Searches `window` of the swept length for gaps inside `k_window` whose
/// width drops to zero.
pub fn gap_closing_search(
    spec: &ChainSpec,
    param: SweepParam,
    window: (f64, f64),
    k_window: (f64, f64),
    opts: &ClosingOptions,
) -> Result<Vec<GapClosing>> {
    let (p0, p1) = window;
    let (k0, k1) = k_window;
    if !(p1 > p0) || !(k1 > k0) || opts.param_samples < 3 {
        return Err(ChainError::Precondition("empty sweep or momentum window".into()));
    }
    let scan_opts = ScanOptions::for_range(k1 - k0).with_grid(opts.grid_points);
    let step = (p1 - p0) / (opts.param_samples - 1) as f64;
    let params: Vec<f64> = (0..opts.param_samples).map(|i| p0 + step * i as f64).collect();
    let gap_lists: Vec<Vec<Gap>> = map_range(params.len(), |i| {
        param
            .apply(spec, params[i])
            .and_then(|s| inner_gaps(&s, k0, k1, &scan_opts))
            .unwrap_or_default()
    });

    let mut candidates = Vec::new();
    for j in 1..params.len() - 1 {
        for g in &gap_lists[j] {
            let before = nearest(&gap_lists[j - 1], g);
            let after = nearest(&gap_lists[j + 1], g);
            let local_min = match (before, after) {
                (Some(b), Some(a)) => g.width <= b.width && g.width <= a.width,
                _ => true,
            };
            if local_min {
                candidates.push((j, *g));
            }
        }
    }

    let refined: Vec<Option<GapClosing>> = map_slice(&candidates, |&(j, g)| {
        let radius = (4.0 * g.width).max(0.05 * (k1 - k0)).max(1e-3);
        let local = ScanOptions::for_range(2.0 * radius).with_grid(400);
        let width_at = |p: f64| -> f64 {
            let Ok(s) = param.apply(spec, p) else {
                return f64::INFINITY;
            };
            match inner_gaps(&s, (g.center - radius).max(k0 * 0.5), g.center + radius, &local) {
                Ok(gaps) => nearest(&gaps, &g).map_or(0.0, |x| x.width),
                Err(_) => f64::INFINITY,
            }
        };
        let (p_star, w_star) = golden_min(width_at, params[j - 1], params[j + 1], 1e-13, 200);
        let s = param.apply(spec, p_star).ok()?;
        let k_star = touch_momentum(&s, g.center, radius);
        let resolution = sign_resolution(&s, k_star);
        let touching = w_star < TOUCH_WIDTH || w_star <= resolution;
        if !touching {
            return None;
        }
        let (theta, d_theta, d_k, d_param) = derivatives(spec, param, p_star, k_star);
        Some(GapClosing {
            param: p_star,
            k: k_star,
            theta,
            gap_width: w_star,
            resolution,
            touching,
            d_theta,
            d_k,
            d_param,
        })
    });
    let mut out: Vec<GapClosing> = refined.into_iter().flatten().collect();
    out.sort_by(|a, b| a.param.total_cmp(&b.param).then(a.k.total_cmp(&b.k)));
    out.dedup_by(|a, b| (a.param - b.param).abs() < 1e-6 && (a.k - b.k).abs() < 1e-6);
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
struct Gap {
    center: f64,
    width: f64,
}

fn inner_gaps(spec: &ChainSpec, k0: f64, k1: f64, opts: &ScanOptions) -> Result<Vec<Gap>> {
    let scan = scan_bands_between(spec, k0, k1, opts)?;
    let bands: Vec<_> = scan.bands.iter().filter(|b| b.kind == BandKind::Continuous).collect();
    Ok(bands
        .windows(2)
        .map(|w| Gap {
            center: 0.5 * (w[0].hi + w[1].lo),
            width: w[1].lo - w[0].hi,
        })
        .collect())
}

fn nearest(gaps: &[Gap], target: &Gap) -> Option<Gap> {
    let reach = (3.0 * target.width).max(0.02);
    gaps.iter()
        .filter(|g| (g.center - target.center).abs() < reach)
        .min_by(|a, b| {
            (a.center - target.center)
                .abs()
                .total_cmp(&(b.center - target.center).abs())
        })
        .copied()
}

/// The touching momentum: the flat point when there is one nearby,
/// otherwise the smallest `|a² + b² − c²|`.
fn touch_momentum(spec: &ChainSpec, center: f64, radius: f64) -> f64 {
    let (lo, hi) = ((center - radius).max(1e-9), center + radius);
    let (kf, nf) = golden_min(|k| flat_norm(&positive_at(spec, k)), lo, hi, 1e-15, 300);
    if nf < 1e-6 {
        return kf;
    }
    let f = |k: f64| positive_at(spec, k).normalized_discriminant().abs();
    golden_min(f, lo, hi, 1e-14, 300).0
}

/// Relative rounding error assumed for each coefficient.
const COEFF_ROUNDING: f64 = 32.0 * f64::EPSILON;

/// Extent of the interval around `k` where `|a² + b² − c²|` does not exceed
/// its own rounding error, so its sign carries no information.
fn sign_resolution(spec: &ChainSpec, k: f64) -> f64 {
    let unresolved = |x: f64| {
        let c = positive_at(spec, x);
        let noise = 2.0 * COEFF_ROUNDING * (c.a.abs() + c.b.abs() + c.c.abs()) / c.scale;
        c.normalized_discriminant().abs() <= noise
    };
    let reach = |dir: f64| {
        let mut step = 1e-13 * k.max(1.0);
        let mut last = 0.0;
        while step < 1e-2 {
            if !unresolved(k + dir * step) {
                break;
            }
            last = step;
            step *= 1.5;
        }
        last
    };
    reach(-1.0) + reach(1.0)
}

fn residual(c: &SpectralCoefficients, theta: f64) -> f64 {
    c.residual(theta) / c.scale
}

/// Quasimomentum and scaled derivatives of `a cos θ + b sin θ − c` in θ, k
/// and the swept length at a touching point.
fn derivatives(spec: &ChainSpec, param: SweepParam, p: f64, k: f64) -> (f64, f64, f64, f64) {
    let Ok(s) = param.apply(spec, p) else {
        return (f64::NAN, f64::NAN, f64::NAN, f64::NAN);
    };
    let h = |x: f64| 1e-6 * x.abs().max(1.0);
    let coeffs = positive_at(&s, k);
    let (up, down) = (positive_at(&s, k + h(k)), positive_at(&s, k - h(k)));
    let theta = match dispersion_theta(&coeffs) {
        ThetaSolutions::One(t) => t,
        ThetaSolutions::Two(t1, t2) => {
            // A double root splits under rounding; take the midpoint on the circle.
            t1 + 0.5 * wrap_angle(t2 - t1)
        }
        // On a flat point every θ solves the equation; pick the one making
        // the k-derivative smallest.
        _ => {
            let (da, db, dc) = (up.a - down.a, up.b - down.b, up.c - down.c);
            let phase = db.atan2(da);
            if dc >= 0.0 {
                phase
            } else {
                wrap_angle(phase + PI)
            }
        }
    };
    let scale = coeffs.scale;
    let at = |pp: f64, kk: f64| -> f64 {
        param
            .apply(spec, pp)
            .map(|s| positive_at(&s, kk).residual(theta) / scale)
            .unwrap_or(f64::NAN)
    };
    let d_theta = (residual(&coeffs, theta + h(theta)) - residual(&coeffs, theta - h(theta))) / (2.0 * h(theta));
    let d_k = (up.residual(theta) - down.residual(theta)) / scale / (2.0 * h(k));
    let d_param = (at(p + h(p), k) - at(p - h(p), k)) / (2.0 * h(p));
    (theta, d_theta, d_k, d_param)
}
