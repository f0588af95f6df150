//! Flat bands: numerical detection, and prediction from the parameter
//! relations that force `a = b = c = 0`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::scan::flat_norm;
use crate::chain::{ChainSpec, Variant};
use crate::error::{ChainError, Result};
use crate::model::{is_half_integer, is_integer, positive_at, FLUX_TOL};
use crate::parallel::{map_range, map_slice};
use crate::rational::recognize_over_two_pi;
use crate::roots::{golden_min, grid_roots};

/// Grid density of the flat-point search.
const POINTS_PER_UNIT: f64 = 2e4;
/// Two flat points closer than this are the same one.
pub const SAME_POINT: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlatMechanism {
    /// Integer flux: every integer `k`.
    IntegerLadder,
    /// Half-integer flux on the tight and merged chains: every `k = n − ½`.
    HalfIntegerLadder,
    /// Half-integer flux with an edge `ℓᵢ = 2πp/q`, `q` odd: `k = q(n − ½)`.
    RationalEdge,
    /// `A + 1/ℓ ∈ ℤ`: `k = 1/ℓ`.
    EllInverse,
    /// Loose chain at an exceptional flux where `a = b = 0`, with `c`
    /// vanishing for the given link length.
    ExceptionalFlux,
}

impl fmt::Display for FlatMechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FlatMechanism::IntegerLadder => "integer-ladder",
            FlatMechanism::HalfIntegerLadder => "half-integer-ladder",
            FlatMechanism::RationalEdge => "rational-edge",
            FlatMechanism::EllInverse => "ell-inverse",
            FlatMechanism::ExceptionalFlux => "exceptional-flux",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatBandPrediction {
    pub k_value: f64,
    pub mechanism: FlatMechanism,
    /// The parameter relation behind the prediction.
    pub provenance: String,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FlatPredictions {
    pub predictions: Vec<FlatBandPrediction>,
    pub notices: Vec<String>,
}

impl FlatPredictions {
    pub fn k_values(&self) -> Vec<f64> {
        self.predictions.iter().map(|p| p.k_value).collect()
    }
}

/// A numerically confirmed flat point with its coefficient sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatHit {
    pub k: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub scale: f64,
}

impl FlatHit {
    /// Largest of `|a|, |b|, |c|` relative to the coefficient scale.
    pub fn scaled_max(&self) -> f64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()) / self.scale
    }
}

/// Every `k ∈ (0, k_max]` passing the flat-point test, found by refining the
/// local minima of `‖(a, b, c)‖ / scale` on a fine grid.
pub fn detect_flat_bands(spec: &ChainSpec, k_max: f64) -> Result<Vec<FlatHit>> {
    if !(k_max > 0.0) {
        return Err(ChainError::Precondition("k_max must be positive".into()));
    }
    let n = ((k_max * POINTS_PER_UNIT).ceil() as usize).max(64);
    let h = k_max / n as f64;
    let norm = |k: f64| flat_norm(&positive_at(spec, k));
    let values: Vec<f64> = map_range(n + 2, |i| norm(h * i.max(1) as f64));
    let minima: Vec<usize> = (1..=n)
        .filter(|&i| values[i] <= values[i - 1] && values[i] <= values[i + 1])
        .collect();
    let refined: Vec<Option<FlatHit>> = map_slice(&minima, |&i| {
        let lo = h * (i - 1).max(1) as f64 * if i == 1 { 0.5 } else { 1.0 };
        let (k, _) = golden_min(norm, lo, h * (i + 1) as f64, 1e-15, 300);
        let c = positive_at(spec, k);
        (c.is_flat() && k <= k_max * (1.0 + 1e-12)).then_some(FlatHit {
            k,
            a: c.a,
            b: c.b,
            c: c.c,
            scale: c.scale,
        })
    });
    let mut hits: Vec<FlatHit> = refined.into_iter().flatten().collect();
    hits.sort_by(|x, y| x.k.total_cmp(&y.k));
    hits.dedup_by(|x, y| (x.k - y.k).abs() < SAME_POINT);
    Ok(hits)
}

/// All flat points implied by the parameter relations, up to `k_max`.
pub fn predict_flat_bands(spec: &ChainSpec, k_max: f64) -> Result<FlatPredictions> {
    if !(k_max > 0.0) {
        return Err(ChainError::Precondition("k_max must be positive".into()));
    }
    let flux = spec.reduced_flux();
    let mut out = FlatPredictions::default();
    let mut push = |k: f64, mechanism: FlatMechanism, provenance: String| {
        if k > 0.0 && k <= k_max {
            out.predictions.push(FlatBandPrediction {
                k_value: k,
                mechanism,
                provenance,
            });
        }
    };
    let ladder = |step: f64, offset: f64| -> Vec<f64> {
        (1..)
            .map(|n| step * (n as f64 - offset))
            .take_while(|&k| k <= k_max)
            .collect()
    };

    if is_integer(flux) {
        for k in ladder(1.0, 0.0) {
            push(k, FlatMechanism::IntegerLadder, "A ∈ ℤ, k = n".into());
        }
    } else if is_half_integer(flux) {
        match spec.variant() {
            Variant::Tight | Variant::Merged => {
                for k in ladder(1.0, 0.5) {
                    push(k, FlatMechanism::HalfIntegerLadder, "A − ½ ∈ ℤ, k = n − ½".into());
                }
            }
            Variant::Loose => {
                let mut notices = Vec::new();
                for (name, len) in [("ℓ₁", spec.l1()), ("ℓ₃", spec.l3())] {
                    match recognize_over_two_pi(len) {
                        Some(r) if r.den % 2 == 1 => {
                            for k in ladder(r.den as f64, 0.5) {
                                push(
                                    k,
                                    FlatMechanism::RationalEdge,
                                    format!("A − ½ ∈ ℤ, {name} = 2π·{r}, k = {}(n − ½)", r.den),
                                );
                            }
                        }
                        Some(r) => notices.push(format!(
                            "{name} = 2π·{r} has an even denominator; no rational-edge flat bands"
                        )),
                        None => notices.push(format!(
                            "{name}/2π not recognized as a rational with denominator ≤ 10⁶; \
                             rational-edge mechanism skipped for it"
                        )),
                    }
                }
                out.notices.extend(notices);
            }
        }
    }

    let k_ell = 1.0 / spec.ell();
    if is_integer(flux + k_ell) {
        push(k_ell, FlatMechanism::EllInverse, "A + 1/ℓ ∈ ℤ, k = 1/ℓ".into());
    }

    if spec.variant() == Variant::Loose && !is_integer(2.0 * flux) {
        for site in exceptional_sites(spec, k_max) {
            let c = positive_at(spec, site.k);
            if c.is_flat() {
                push(
                    site.k,
                    FlatMechanism::ExceptionalFlux,
                    format!("a = b = 0 at exceptional flux ({}), c = 0 for ℓ₁ = {}", site.relation, spec.l1()),
                );
            } else {
                out.notices.push(format!(
                    "a = b = 0 at k = {:.12} ({}) but c ≠ 0 for this ℓ₁; the point lies in a gap",
                    site.k, site.relation
                ));
            }
        }
    }

    out.predictions.sort_by(|x, y| x.k_value.total_cmp(&y.k_value));
    out.predictions.dedup_by(|x, y| (x.k_value - y.k_value).abs() < SAME_POINT);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    OddM,
    EvenM,
}

impl Parity {
    pub fn of(m: i64) -> Self {
        if m.rem_euclid(2) == 1 {
            Parity::OddM
        } else {
            Parity::EvenM
        }
    }
}

/// The unique flux in `[0, 1)` for which `Λ⁺` (odd `m`) or `Λ⁻` (even `m`)
/// vanishes at momentum `k`.
pub fn exceptional_flux(k: f64, ell: f64, parity: Parity) -> Result<f64> {
    if !(k > 0.0) || !(ell > 0.0) {
        return Err(ChainError::Domain(format!("need k > 0 and ℓ > 0, got k = {k}, ℓ = {ell}")));
    }
    if is_integer(2.0 * k) {
        return Err(ChainError::Domain(format!("tan kπ is not finite for 2k ∈ ℤ (k = {k})")));
    }
    let q = k * k * ell * ell + 1.0;
    let ratio = match parity {
        Parity::OddM => 2.0 * k * ell / q,
        Parity::EvenM => q / (2.0 * k * ell),
    };
    let a = (-(ratio * (k * PI).tan()).atan() / PI).rem_euclid(1.0);
    Ok(if a >= 1.0 { 0.0 } else { a })
}

/// A momentum at which `a = b = 0` for the spec's flux.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalSite {
    pub k: f64,
    pub relation: String,
}

/// Momenta in `(0, k_max]` where both `a` and `b` vanish on a loose chain
/// whose flux is at an exceptional value.
pub fn exceptional_sites(spec: &ChainSpec, k_max: f64) -> Vec<ExceptionalSite> {
    let flux = spec.reduced_flux();
    let same_flux = |a: f64| {
        let d = (a - flux).rem_euclid(1.0);
        d.min(1.0 - d) < 1e3 * FLUX_TOL
    };
    let mut sites = Vec::new();
    if spec.is_symmetric() {
        // b vanishes identically; a is proportional to this function.
        let (ell, s, c) = (spec.ell(), (flux * PI).sin(), (flux * PI).cos());
        let a = |k: f64| (k * k * ell * ell + 1.0) * (k * PI).sin() * c + 2.0 * k * ell * s * (k * PI).cos();
        let n = ((k_max * POINTS_PER_UNIT) as usize).max(64);
        for k in grid_roots(a, 1e-9, k_max, n, 1e-15) {
            if !is_integer(2.0 * k) {
                sites.push(ExceptionalSite {
                    k,
                    relation: "symmetric chain, a = 0".into(),
                });
            }
        }
        return sites;
    }
    let step = PI / (2.0 * (PI - spec.l3()));
    for m in 1i64.. {
        let k = (m as f64 * step).abs();
        if k > k_max {
            break;
        }
        if is_integer(2.0 * k) {
            continue;
        }
        let parity = Parity::of(m);
        if let Ok(a) = exceptional_flux(k, spec.ell(), parity) {
            if same_flux(a) {
                sites.push(ExceptionalSite {
                    k,
                    relation: format!("k = mπ/(2(π − ℓ₃)), m = {m}"),
                });
            }
        }
    }
    sites
}

/// Link lengths in `(0, l1_max]` at which `c` also vanishes at the
/// exceptional point `(k, A)` of an asymmetric loose chain, so that a band
/// shrinks to the point `k`. `ℓ₃` is fixed by `k = mπ/(2(π − ℓ₃))`.
pub fn shrinking_link_lengths(ell: f64, k: f64, m: i64, l1_max: f64) -> Result<Vec<f64>> {
    let l3 = PI - m as f64 * PI / (2.0 * k);
    if !(l3 > 0.0 && l3 < TAU) {
        return Err(ChainError::Domain(format!("k = {k}, m = {m} gives ℓ₃ = {l3} outside (0, 2π)")));
    }
    let flux = exceptional_flux(k, ell, Parity::of(m))?;
    let c_of = |l1: f64| {
        let spec = ChainSpec::loose(ell, l1, l3, flux).expect("positive link length");
        let c = positive_at(&spec, k);
        c.c / c.scale
    };
    let n = ((l1_max * 2000.0) as usize).max(200);
    Ok(grid_roots(c_of, 1e-6, l1_max, n, 1e-14))
}
