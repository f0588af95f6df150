//! The spectral condition `a cos θ + b sin θ = c` for the three chain variants.
//!
//! Positive energies `E = k²` use the trigonometric forms directly. Negative
//! energies `E = −κ²` use the continuation `k = iκ`, with every hyperbolic
//! term multiplied by a common `e^{−shift}`; the overall positive factor does
//! not change the sign of `a² + b² − c²` nor the θ-solutions.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::hyperbolic::{cosh_s, product, sinh_s, Hyp};
use crate::chain::{Branch, ChainSpec, SpectralPoint, Variant};
use crate::error::{ChainError, Result};

/// Relative tolerance of the flat-point test.
pub const FLAT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Size of the formulas' polynomial prefactors at this point; the
    /// coefficients themselves are bounded by a small multiple of it.
    pub scale: f64,
}

impl SpectralCoefficients {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        let scale = (a.abs() + b.abs() + c.abs()).max(1.0);
        Self { a, b, c, scale }
    }

    pub fn with_scale(a: f64, b: f64, c: f64, scale: f64) -> Self {
        Self { a, b, c, scale }
    }

    /// `a² + b² − c²`; nonnegative inside bands.
    pub fn discriminant(&self) -> f64 {
        discriminant(self)
    }

    /// `a² + b² − c²` divided by `scale²`.
    pub fn normalized_discriminant(&self) -> f64 {
        let (a, b, c) = (self.a / self.scale, self.b / self.scale, self.c / self.scale);
        a * a + b * b - c * c
    }

    pub fn amplitude(&self) -> f64 {
        self.a.hypot(self.b)
    }

    /// Phase ϑ with `sin ϑ = a/√(a²+b²)` and `cos ϑ = b/√(a²+b²)`.
    pub fn phase(&self) -> Option<f64> {
        if self.a == 0.0 && self.b == 0.0 {
            None
        } else {
            Some(self.a.atan2(self.b))
        }
    }

    /// `a cos θ + b sin θ − c`.
    pub fn residual(&self, theta: f64) -> f64 {
        self.a * theta.cos() + self.b * theta.sin() - self.c
    }

    /// All three coefficients vanish relative to `scale`.
    pub fn is_flat(&self) -> bool {
        self.is_flat_within(FLAT_EPS)
    }

    pub fn is_flat_within(&self, eps: f64) -> bool {
        let s = self.scale;
        self.a * self.a + self.b * self.b < eps * eps * s * s && self.c.abs() < eps * s
    }

    /// Inside a band (closed condition) or at a flat point.
    pub fn in_spectrum(&self) -> bool {
        self.normalized_discriminant() >= 0.0 || self.is_flat()
    }

    /// Multiply all three coefficients by a positive factor.
    pub fn rescaled(&self, factor: f64) -> Self {
        Self {
            a: self.a * factor,
            b: self.b * factor,
            c: self.c * factor,
            scale: self.scale * factor,
        }
    }
}

pub fn discriminant(coeffs: &SpectralCoefficients) -> f64 {
    coeffs.a * coeffs.a + coeffs.b * coeffs.b - coeffs.c * coeffs.c
}

/// Coefficients at `point` with the flux folded into `[0, 1)`.
pub fn coefficients(spec: &ChainSpec, point: &SpectralPoint) -> SpectralCoefficients {
    evaluate(spec, spec.reduced_flux(), point, true)
}

/// Coefficients using the caller's raw flux, without folding.
pub fn coefficients_raw(spec: &ChainSpec, point: &SpectralPoint) -> SpectralCoefficients {
    evaluate(spec, spec.flux(), point, true)
}

/// Negative-branch coefficients without the overflow scaling. Overflows for
/// large `κℓ₁`; meant for checking the scaled path.
pub fn coefficients_unscaled(spec: &ChainSpec, point: &SpectralPoint) -> SpectralCoefficients {
    evaluate(spec, spec.reduced_flux(), point, false)
}

pub fn coefficients_loose(spec: &ChainSpec, point: &SpectralPoint) -> Result<SpectralCoefficients> {
    require(spec, Variant::Loose)?;
    Ok(coefficients(spec, point))
}

pub fn coefficients_tight(spec: &ChainSpec, point: &SpectralPoint) -> Result<SpectralCoefficients> {
    require(spec, Variant::Tight)?;
    Ok(coefficients(spec, point))
}

pub fn coefficients_merged(
    spec: &ChainSpec,
    point: &SpectralPoint,
) -> Result<SpectralCoefficients> {
    require(spec, Variant::Merged)?;
    Ok(coefficients(spec, point))
}

fn require(spec: &ChainSpec, variant: Variant) -> Result<()> {
    if spec.variant() == variant {
        Ok(())
    } else {
        Err(ChainError::WrongVariant {
            expected: variant.name(),
            found: spec.variant(),
        })
    }
}

/// Positive-branch coefficients at momentum `k` (fast path for scans).
pub fn positive_at(spec: &ChainSpec, k: f64) -> SpectralCoefficients {
    let flux = spec.reduced_flux();
    match spec.variant() {
        Variant::Loose => loose_positive(spec.ell(), spec.l1(), spec.l3(), flux, k),
        Variant::Tight => tight_positive(spec.ell(), spec.l3(), flux, k),
        Variant::Merged => merged_positive(spec.ell(), spec.l1(), flux, k),
    }
}

/// Scaled negative-branch coefficients at `κ` (fast path for scans).
pub fn negative_at(spec: &ChainSpec, kappa: f64) -> SpectralCoefficients {
    let flux = spec.reduced_flux();
    let shift = overflow_shift(spec, kappa);
    match spec.variant() {
        Variant::Loose => loose_negative(spec.ell(), spec.l1(), spec.l3(), flux, kappa, shift),
        Variant::Tight => tight_negative(spec.ell(), spec.l3(), flux, kappa, shift),
        Variant::Merged => merged_negative(spec.ell(), spec.l1(), flux, kappa, shift),
    }
}

/// Exponent of the common factor `e^{−shift}` applied on the negative branch.
pub fn overflow_shift(spec: &ChainSpec, kappa: f64) -> f64 {
    match spec.variant() {
        Variant::Loose | Variant::Merged => kappa * (TAU + spec.l1()),
        Variant::Tight => kappa * TAU,
    }
}

fn evaluate(spec: &ChainSpec, flux: f64, point: &SpectralPoint, scaled: bool) -> SpectralCoefficients {
    let m = point.momentum();
    match point.branch() {
        Branch::Positive => match spec.variant() {
            Variant::Loose => loose_positive(spec.ell(), spec.l1(), spec.l3(), flux, m),
            Variant::Tight => tight_positive(spec.ell(), spec.l3(), flux, m),
            Variant::Merged => merged_positive(spec.ell(), spec.l1(), flux, m),
        },
        Branch::Negative => {
            let shift = if scaled { overflow_shift(spec, m) } else { 0.0 };
            match spec.variant() {
                Variant::Loose => loose_negative(spec.ell(), spec.l1(), spec.l3(), flux, m, shift),
                Variant::Tight => tight_negative(spec.ell(), spec.l3(), flux, m, shift),
                Variant::Merged => merged_negative(spec.ell(), spec.l1(), flux, m, shift),
            }
        }
    }
}

pub(crate) fn loose_positive(ell: f64, l1: f64, l3: f64, flux: f64, k: f64) -> SpectralCoefficients {
    let kl = k * ell;
    let kp = (kl + 1.0) * (kl + 1.0);
    let km = (kl - 1.0) * (kl - 1.0);
    let q = kl * kl;
    let s = PI - l3;
    let sp = ((flux + k) * PI).sin();
    let sm = ((flux - k) * PI).sin();
    let a = 8.0 * (kp * sp * ((flux - k) * s).cos() - km * sm * ((flux + k) * s).cos());
    let b = 8.0 * (km * sm * ((flux + k) * s).sin() - kp * sp * ((flux - k) * s).sin());
    let c = -km
        * (4.0 * (TAU * flux + k * l1).sin()
            + kp * ((k * (TAU - l1)).sin() + 2.0 * (k * l1).sin() * (2.0 * k * s).cos()))
        + 4.0 * kp * (TAU * flux - k * l1).sin()
        + (q + 3.0) * (q + 3.0) * (k * (l1 + TAU)).sin();
    let scale = 16.0 * (kp + km) + km * (4.0 + 3.0 * kp) + 4.0 * kp + (q + 3.0) * (q + 3.0);
    SpectralCoefficients::with_scale(a, b, c, scale.max(1.0))
}

pub(crate) fn tight_positive(ell: f64, l3: f64, flux: f64, k: f64) -> SpectralCoefficients {
    let kl = k * ell;
    let kp = (kl + 1.0) * (kl + 1.0);
    let km = (kl - 1.0) * (kl - 1.0);
    let s = PI - l3;
    let sp = ((flux + k) * PI).sin();
    let sm = ((flux - k) * PI).sin();
    let a = kp * sp * ((flux - k) * s).cos() - km * sm * ((flux + k) * s).cos();
    let b = km * sm * ((flux + k) * s).sin() - kp * sp * ((flux - k) * s).sin();
    let c = 2.0 * kl * (TAU * flux).sin() + (kl * kl + 1.0) * (TAU * k).sin();
    let scale = 2.0 * (kp + km) + 2.0 * kl + kl * kl + 1.0;
    SpectralCoefficients::with_scale(a, b, c, scale.max(1.0))
}

pub(crate) fn merged_positive(ell: f64, l1: f64, flux: f64, k: f64) -> SpectralCoefficients {
    let kl = k * ell;
    let q1 = kl * kl + 1.0;
    let s2a = (TAU * flux).sin();
    let c2a = (TAU * flux).cos();
    let a = 2.0 * kl * s2a + q1 * (TAU * k).sin();
    let b = 2.0 * kl * (c2a - (TAU * k).cos());
    let c = 2.0 * kl * s2a * (k * l1).cos() - q1 * (c2a * (k * l1).sin() - (k * (l1 + TAU)).sin());
    let scale = 8.0 * kl + 3.0 * q1;
    SpectralCoefficients::with_scale(a, b, c, scale.max(1.0))
}

pub(crate) fn loose_negative(
    ell: f64,
    l1: f64,
    l3: f64,
    flux: f64,
    kappa: f64,
    shift: f64,
) -> SpectralCoefficients {
    let kl = kappa * ell;
    let q = kl * kl;
    let qm1 = (kl - 1.0) * (kl + 1.0);
    let l2 = TAU - l3;
    let (sa3, ca3) = (flux * l3).sin_cos();
    let (sa2, ca2) = (flux * l2).sin_cos();
    let (s2a, c2a) = (TAU * flux).sin_cos();

    let a = -4.0 * qm1 * (ca3 * sinh_s(kappa * l2, shift) + ca2 * sinh_s(kappa * l3, shift))
        + 8.0 * kl * (sa2 * cosh_s(kappa * l3, shift) + sa3 * cosh_s(kappa * l2, shift));
    let b = 4.0 * qm1 * (sa2 * sinh_s(kappa * l3, shift) - sa3 * sinh_s(kappa * l2, shift))
        + 8.0 * kl * (ca2 * cosh_s(kappa * l3, shift) - ca3 * cosh_s(kappa * l2, shift));

    let sh1 = (Hyp::Sinh, kappa * l1);
    let ch1 = (Hyp::Cosh, kappa * l1);
    let c = 4.0 * qm1 * c2a * product(&[sh1], shift)
        + (q * q + 3.0)
            * (product(&[(Hyp::Cosh, 2.0 * kappa * PI), sh1], shift)
                - product(&[(Hyp::Cosh, 2.0 * kappa * (PI - l3)), sh1], shift))
        + 8.0 * kl * s2a * product(&[ch1], shift)
        - 2.0
            * qm1
            * (product(&[(Hyp::Sinh, 2.0 * kappa * (PI - l3)), ch1], shift)
                + product(&[(Hyp::Sinh, 2.0 * kappa * PI), ch1], shift))
        - 4.0 * qm1 * product(&[(Hyp::Cosh, kappa * l2), (Hyp::Sinh, kappa * (l1 + l3))], shift);

    let unit = (kappa * (TAU + l1) - shift).exp();
    let poly = 32.0 * qm1.abs() + 80.0 * kl + 2.0 * (q * q + 3.0);
    let scale = poly.max(1.0) * unit;
    SpectralCoefficients::with_scale(a, b, c, scale)
}

pub(crate) fn tight_negative(
    ell: f64,
    l3: f64,
    flux: f64,
    kappa: f64,
    shift: f64,
) -> SpectralCoefficients {
    let kl = kappa * ell;
    let qm1 = (kl - 1.0) * (kl + 1.0);
    let l2 = TAU - l3;
    let (sa3, ca3) = (flux * l3).sin_cos();
    let (sa2, ca2) = (flux * l2).sin_cos();
    let a = -qm1 * (ca3 * sinh_s(kappa * l2, shift) + ca2 * sinh_s(kappa * l3, shift))
        + 2.0 * kl * (sa2 * cosh_s(kappa * l3, shift) + sa3 * cosh_s(kappa * l2, shift));
    let b = qm1 * (sa2 * sinh_s(kappa * l3, shift) - sa3 * sinh_s(kappa * l2, shift))
        + 2.0 * kl * (ca2 * cosh_s(kappa * l3, shift) - ca3 * cosh_s(kappa * l2, shift));
    let c = 2.0 * kl * (TAU * flux).sin() * (-shift).exp() - qm1 * sinh_s(TAU * kappa, shift);
    let unit = (TAU * kappa - shift).exp();
    let scale = (5.0 * qm1.abs() + 10.0 * kl).max(1.0) * unit;
    SpectralCoefficients::with_scale(a, b, c, scale)
}

pub(crate) fn merged_negative(
    ell: f64,
    l1: f64,
    flux: f64,
    kappa: f64,
    shift: f64,
) -> SpectralCoefficients {
    let kl = kappa * ell;
    let qm1 = (kl - 1.0) * (kl + 1.0);
    let (s2a, c2a) = (TAU * flux).sin_cos();
    let damp = (-shift).exp();
    let a = 2.0 * kl * s2a * damp - qm1 * sinh_s(TAU * kappa, shift);
    let b = 2.0 * kl * (c2a * damp - cosh_s(TAU * kappa, shift));
    let c = qm1 * (c2a * sinh_s(kappa * l1, shift) - sinh_s(kappa * (l1 + TAU), shift))
        + 2.0 * kl * s2a * cosh_s(kappa * l1, shift);
    let unit = (kappa * (TAU + l1) - shift).exp();
    let scale = (3.0 * qm1.abs() + 8.0 * kl).max(1.0) * unit;
    SpectralCoefficients::with_scale(a, b, c, scale)
}
