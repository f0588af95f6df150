//! Area fraction of the torus `[0, 2π)²` on which the leading indicator is
//! non-negative. For incommensurate lengths the phases `(x, y)` of the
//! indicator equidistribute, so this fraction is the probability.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EstimateInputs, Method, ProbabilityEstimate};
use crate::chain::Variant;
use crate::error::{ChainError, Result};
use crate::parallel::map_range;
use crate::roots::bisect_root;

/// Seed of the Monte Carlo cross-check unless the caller gives another.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Number of independent random substreams the samples are split over.
const STREAMS: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusOptions {
    /// Midpoint cells per axis.
    pub resolution: usize,
    /// Monte Carlo samples; zero skips the cross-check.
    pub mc_samples: u64,
    pub seed: u64,
}

impl Default for TorusOptions {
    fn default() -> Self {
        Self {
            resolution: 4000,
            mc_samples: 10_000_000,
            seed: DEFAULT_SEED,
        }
    }
}

/// Torus form of the indicator: for the tight chain `x = kℓ₃`, `y = kπ`;
/// for the merged chain `x = kℓ₁`, `y = kπ`.
pub fn torus_indicator(variant: Variant, flux: f64, x: f64, y: f64) -> Result<f64> {
    let t = Trig::new(x, y);
    Indicator::new(variant, flux).map(|ind| ind.eval(&t))
}

#[derive(Clone, Copy)]
struct Trig {
    sx: f64,
    cx: f64,
    s2: f64,
    c2: f64,
    y: f64,
}

impl Trig {
    fn new(x: f64, y: f64) -> Self {
        let (sx, cx) = x.sin_cos();
        let (s2, c2) = (2.0 * y).sin_cos();
        Self { sx, cx, s2, c2, y }
    }
}

#[derive(Clone, Copy)]
enum Indicator {
    /// `sin(y − Aπ) sin(y + Aπ) sin x sin(2y − x)`
    Tight { shift: f64 },
    /// `sin²2y − (sin(x + 2y) − 𝒜 sin x)²`
    Merged { cal_a: f64 },
}

impl Indicator {
    fn new(variant: Variant, flux: f64) -> Result<Self> {
        match variant {
            Variant::Tight => Ok(Indicator::Tight { shift: flux * PI }),
            Variant::Merged => Ok(Indicator::Merged {
                cal_a: (TAU * flux).cos(),
            }),
            Variant::Loose => Err(ChainError::WrongVariant {
                expected: "tight or merged",
                found: Variant::Loose,
            }),
        }
    }

    fn eval(&self, t: &Trig) -> f64 {
        match *self {
            Indicator::Tight { shift } => {
                let row = (t.y - shift).sin() * (t.y + shift).sin();
                row * t.sx * (t.s2 * t.cx - t.c2 * t.sx)
            }
            Indicator::Merged { cal_a } => {
                let u = t.sx * t.c2 + t.cx * t.s2 - cal_a * t.sx;
                t.s2 * t.s2 - u * u
            }
        }
    }
}

/// Fraction of cell midpoints of an `n × n` grid where the indicator is `≥ 0`.
fn midpoint_fraction(ind: Indicator, n: usize) -> f64 {
    let h = TAU / n as f64;
    let xs: Vec<(f64, f64)> = (0..n).map(|i| (h * (i as f64 + 0.5)).sin_cos()).collect();
    let counts = map_range(n, |j| {
        let y = h * (j as f64 + 0.5);
        let (s2, c2) = (2.0 * y).sin_cos();
        let mut row = Trig { sx: 0.0, cx: 0.0, s2, c2, y };
        // The y-only factor of the tight indicator is hoisted out of the row.
        let (ind, scale) = match ind {
            Indicator::Tight { shift } => (Indicator::Tight { shift: 0.0 }, (y - shift).sin() * (y + shift).sin()),
            m => (m, 1.0),
        };
        let mut count = 0u64;
        for &(sx, cx) in &xs {
            row.sx = sx;
            row.cx = cx;
            let v = match ind {
                Indicator::Tight { .. } => scale * sx * (s2 * cx - c2 * sx),
                m => m.eval(&row),
            };
            if v >= 0.0 {
                count += 1;
            }
        }
        count
    });
    counts.iter().sum::<u64>() as f64 / (n as f64 * n as f64)
}

/// Monte Carlo fraction with samples spread over independent substreams of
/// one seed, so the result does not depend on the thread count.
fn monte_carlo_fraction(ind: Indicator, samples: u64, seed: u64) -> f64 {
    let per = samples / STREAMS;
    let extra = samples % STREAMS;
    let hits = map_range(STREAMS as usize, |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(s as u64);
        let count = per + u64::from((s as u64) < extra);
        let mut hit = 0u64;
        for _ in 0..count {
            let x = rng.gen::<f64>() * TAU;
            let y = rng.gen::<f64>() * TAU;
            if ind.eval(&Trig::new(x, y)) >= 0.0 {
                hit += 1;
            }
        }
        hit
    });
    hits.iter().sum::<u64>() as f64 / samples as f64
}

/// Torus-measure probability for the tight or merged chain. The value is the
/// midpoint quadrature; the error bound is the larger of the change against
/// the half-resolution quadrature and three Monte Carlo standard errors.
pub fn torus_probability(variant: Variant, flux: f64, opts: &TorusOptions) -> Result<ProbabilityEstimate> {
    let ind = Indicator::new(variant, flux)?;
    if opts.resolution < 100 {
        return Err(ChainError::Precondition("torus resolution must be at least 100 per axis".into()));
    }
    let fine = midpoint_fraction(ind, opts.resolution);
    let coarse = midpoint_fraction(ind, opts.resolution / 2);
    let mut error = (fine - coarse).abs();
    let mut cross_check = None;
    if opts.mc_samples > 0 {
        let mc = monte_carlo_fraction(ind, opts.mc_samples, opts.seed);
        let sigma = (mc * (1.0 - mc) / opts.mc_samples as f64).sqrt();
        error = error.max(3.0 * sigma).max((mc - fine).abs());
        cross_check = Some(mc);
    }
    let inputs = EstimateInputs {
        variant: Some(variant),
        flux,
        resolution: Some(opts.resolution),
        samples: (opts.mc_samples > 0).then_some(opts.mc_samples),
        seed: (opts.mc_samples > 0).then_some(opts.seed),
        cross_check,
        ..EstimateInputs::default()
    };
    Ok(ProbabilityEstimate::new(fine, Method::Torus, error, inputs))
}

/// Area of the merged chain's admissible region inside the first octant
/// `x ∈ [0, π)`, `y ∈ [0, π/2)`, computed two ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OctantArea {
    /// Integral of the gap between the two bounding curves in closed form.
    pub curves: f64,
    /// Integral over `x` of the admissible `y`-length of each column, the
    /// lengths found by root isolation of the indicator itself.
    pub columns: f64,
}

/// Bounding curves of the merged chain's admissible region in the first
/// octant, `(lower, upper)`.
fn octant_curves(cal_a: f64, x: f64) -> (f64, f64) {
    let (s, c) = (0.5 * x).sin_cos();
    let upper = 0.25 * PI - 0.25 * x + 0.5 * (cal_a * s).clamp(-1.0, 1.0).acos();
    let lower = -0.25 * x + 0.5 * (cal_a * c).clamp(-1.0, 1.0).acos();
    (lower, upper)
}

/// Admissible `y`-length of one column of the first octant.
fn column_length(ind: Indicator, x: f64, samples: usize) -> f64 {
    let f = |y: f64| ind.eval(&Trig::new(x, y));
    let h = FRAC_PI_2 / samples as f64;
    let mut cuts = vec![0.0];
    let mut prev = f(0.0);
    for i in 1..=samples {
        let y = h * i as f64;
        let v = f(y);
        if (v >= 0.0) != (prev >= 0.0) {
            let g = |t: f64| if f(t) >= 0.0 { 1.0 } else { -1.0 };
            cuts.push(bisect_root(g, y - h, y, 1e-15, 200).unwrap_or(y - 0.5 * h));
        }
        prev = v;
    }
    cuts.push(FRAC_PI_2);
    cuts.windows(2)
        .filter(|w| f(0.5 * (w[0] + w[1])) >= 0.0)
        .map(|w| w[1] - w[0])
        .sum()
}

pub fn merged_octant_area(flux: f64) -> OctantArea {
    let cal_a = (TAU * flux).cos();
    let width = |x: f64| {
        let (lo, hi) = octant_curves(cal_a, x);
        (hi.min(FRAC_PI_2) - lo.max(0.0)).max(0.0)
    };
    let curves = quadrature::integrate(width, 0.0, PI, 1e-12).integral;
    let ind = Indicator::Merged { cal_a };
    let n = 4000;
    let h = PI / n as f64;
    let lengths = map_range(n, |i| column_length(ind, h * (i as f64 + 0.5), 2000));
    let columns = h * lengths.iter().sum::<f64>();
    OctantArea { curves, columns }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> TorusOptions {
        TorusOptions {
            resolution: 800,
            mc_samples: 200_000,
            seed: 7,
        }
    }

    #[test]
    fn tight_torus_tracks_parabola() {
        for a in [0.0, 0.1, 0.25, 0.4] {
            let est = torus_probability(Variant::Tight, a, &quick()).unwrap();
            let expected = 0.5 + 2.0 * a - 4.0 * a * a;
            assert!((est.value - expected).abs() < 5e-3, "{a}: {est:?}");
        }
    }

    #[test]
    fn merged_torus_is_half() {
        let est = torus_probability(Variant::Merged, 0.3, &quick()).unwrap();
        assert!((est.value - 0.5).abs() < 5e-3, "{est:?}");
    }

    #[test]
    fn loose_has_no_torus_form() {
        assert!(torus_probability(Variant::Loose, 0.3, &quick()).is_err());
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let ind = Indicator::new(Variant::Tight, 0.2).unwrap();
        assert_eq!(monte_carlo_fraction(ind, 10_001, 3), monte_carlo_fraction(ind, 10_001, 3));
    }

    #[test]
    fn octant_area_at_zero_flux() {
        let area = merged_octant_area(0.0);
        let exact = PI * PI / 4.0;
        assert!((area.curves - exact).abs() < 1e-8, "{area:?}");
        assert!((area.columns - exact).abs() < 1e-4, "{area:?}");
    }

    #[test]
    fn octant_area_does_not_depend_on_flux() {
        let exact = PI * PI / 4.0;
        for a in [0.1, 0.2, 0.35] {
            let area = merged_octant_area(a);
            assert!((area.curves - exact).abs() < 1e-6, "{a}: {area:?}");
            assert!((area.columns - exact).abs() < 1e-4, "{a}: {area:?}");
        }
    }
}
