//! Chain geometry and spectral sample points.
//!
//! A cell of the chain is a ring of circumference 2π split by its two contact
//! vertices into an upper arc of length `ℓ₂ = 2π − ℓ₃` and a lower arc of
//! length `ℓ₃`, plus a connecting link of length `ℓ₁` to the next ring. Two
//! degenerate chains are distinguished explicitly: rings touching directly
//! (`ℓ₁ = 0`, [`Variant::Tight`]) and rings whose two contacts coincide
//! (`ℓ₂ = 0`, [`Variant::Merged`]).

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{ChainError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Degree-three vertices, `ℓ₁ > 0` and `ℓ₃ < 2π`.
    Loose,
    /// Rings touching directly, `ℓ₁ = 0`.
    Tight,
    /// Both ring contacts merged into one vertex, `ℓ₃ = 2π`.
    Merged,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Loose => "loose",
            Variant::Tight => "tight",
            Variant::Merged => "merged",
        }
    }

    /// Upper bound on the number of negative bands.
    pub fn negative_band_cap(self) -> usize {
        match self {
            Variant::Loose => 2,
            Variant::Tight | Variant::Merged => 1,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = ChainError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "loose" => Ok(Variant::Loose),
            "tight" => Ok(Variant::Tight),
            "merged" => Ok(Variant::Merged),
            other => Err(ChainError::Precondition(format!(
                "unknown variant {other:?} (expected loose, tight or merged)"
            ))),
        }
    }
}

/// Geometry and flux of one chain.
///
/// `flux` is the raw magnetic potential `A = Φ/2π` as given by the caller.
/// Evaluation uses [`ChainSpec::reduced_flux`], which is legitimate because
/// band membership is 1-periodic in `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    ell: f64,
    l1: f64,
    l3: f64,
    flux: f64,
    variant: Variant,
}

impl ChainSpec {
    pub fn new(variant: Variant, ell: f64, l1: f64, l3: f64, flux: f64) -> Result<Self> {
        let bad = |msg: String| Err(ChainError::InvalidGeometry(msg));
        if !(ell.is_finite() && ell > 0.0) {
            return bad(format!("coupling length ell must be positive, got {ell}"));
        }
        if !flux.is_finite() {
            return bad(format!("flux must be finite, got {flux}"));
        }
        if !(l1.is_finite() && l1 >= 0.0) {
            return bad(format!("link length l1 must be nonnegative, got {l1}"));
        }
        if !(l3.is_finite() && l3 > 0.0 && l3 <= TAU) {
            return bad(format!("arc length l3 must lie in (0, 2pi], got {l3}"));
        }
        match variant {
            Variant::Loose => {
                if l1 == 0.0 {
                    return bad("loose chain needs l1 > 0; use the tight variant".into());
                }
                if l3 == TAU {
                    return bad("loose chain needs l3 < 2pi; use the merged variant".into());
                }
            }
            Variant::Tight => {
                if l1 != 0.0 {
                    return bad(format!("tight chain has l1 = 0, got {l1}"));
                }
                if l3 == TAU {
                    return bad("tight chain needs l3 < 2pi".into());
                }
            }
            Variant::Merged => {
                if l3 != TAU {
                    return bad(format!("merged chain has l3 = 2pi, got {l3}"));
                }
                if l1 == 0.0 {
                    return bad("merged chain needs l1 > 0".into());
                }
            }
        }
        Ok(Self {
            ell,
            l1,
            l3,
            flux,
            variant,
        })
    }

    pub fn loose(ell: f64, l1: f64, l3: f64, flux: f64) -> Result<Self> {
        Self::new(Variant::Loose, ell, l1, l3, flux)
    }

    pub fn tight(ell: f64, l3: f64, flux: f64) -> Result<Self> {
        Self::new(Variant::Tight, ell, 0.0, l3, flux)
    }

    pub fn merged(ell: f64, l1: f64, flux: f64) -> Result<Self> {
        Self::new(Variant::Merged, ell, l1, TAU, flux)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn l3(&self) -> f64 {
        self.l3
    }

    /// Upper arc length, always `2π − ℓ₃`.
    pub fn l2(&self) -> f64 {
        TAU - self.l3
    }

    pub fn flux(&self) -> f64 {
        self.flux
    }

    /// Flux folded into `[0, 1)`.
    pub fn reduced_flux(&self) -> f64 {
        reduce_unit(self.flux)
    }

    pub fn is_symmetric(&self) -> bool {
        self.variant != Variant::Merged && (self.l3 - PI).abs() <= 1e-14
    }

    pub fn with_flux(&self, flux: f64) -> Result<Self> {
        Self::new(self.variant, self.ell, self.l1, self.l3, flux)
    }

    pub fn with_l1(&self, l1: f64) -> Result<Self> {
        Self::new(self.variant, self.ell, l1, self.l3, self.flux)
    }

    pub fn with_l3(&self, l3: f64) -> Result<Self> {
        Self::new(self.variant, self.ell, self.l1, l3, self.flux)
    }

    pub fn with_ell(&self, ell: f64) -> Result<Self> {
        Self::new(self.variant, ell, self.l1, self.l3, self.flux)
    }

    /// The same chain with the arcs swapped, `ℓ₃ → 2π − ℓ₃`.
    pub fn swapped_arcs(&self) -> Result<Self> {
        if self.variant == Variant::Merged {
            return Err(ChainError::WrongVariant {
                expected: "loose or tight",
                found: self.variant,
            });
        }
        self.with_l3(self.l2())
    }
}

impl fmt::Display for ChainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} chain (ell={}, l1={}, l3={}, A={})",
            self.variant, self.ell, self.l1, self.l3, self.flux
        )
    }
}

/// `x mod 1` in `[0, 1)`.
pub fn reduce_unit(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `E = k²`.
    Positive,
    /// `E = −κ²`.
    Negative,
}

/// A point on one energy branch, optionally with a quasimomentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPoint {
    momentum: f64,
    branch: Branch,
    theta: Option<f64>,
}

impl SpectralPoint {
    pub fn new(momentum: f64, branch: Branch) -> Result<Self> {
        if !(momentum.is_finite() && momentum > 0.0) {
            return Err(ChainError::BadMomentum(momentum));
        }
        Ok(Self {
            momentum,
            branch,
            theta: None,
        })
    }

    pub fn positive(k: f64) -> Result<Self> {
        Self::new(k, Branch::Positive)
    }

    pub fn negative(kappa: f64) -> Result<Self> {
        Self::new(kappa, Branch::Negative)
    }

    /// Attach a quasimomentum, wrapped into `[−π, π)`.
    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = Some(wrap_angle(theta));
        self
    }

    pub fn momentum(&self) -> f64 {
        self.momentum
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    pub fn theta(&self) -> Option<f64> {
        self.theta
    }

    pub fn energy(&self) -> f64 {
        match self.branch {
            Branch::Positive => self.momentum * self.momentum,
            Branch::Negative => -self.momentum * self.momentum,
        }
    }
}

/// Wrap an angle into `[−π, π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let w = (theta + PI).rem_euclid(TAU) - PI;
    if w >= PI {
        -PI
    } else {
        w
    }
}
