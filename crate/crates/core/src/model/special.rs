//! Auxiliary functions that appear in the flat-band and asymptotic analyses.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::hyperbolic::{cosh_s, sinh_s};
use crate::chain::{Branch, ChainSpec, SpectralPoint, Variant};
use crate::model::{is_half_integer, is_integer};

/// Values of the auxiliary functions at one point; `None` where a function
/// is not defined for the given chain, branch or flux.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SpecialFunctions {
    pub lambda_plus: Option<f64>,
    pub lambda_minus: Option<f64>,
    pub tau: Option<f64>,
    pub rho: Option<f64>,
    pub f_value: Option<f64>,
    pub g_value: Option<f64>,
    pub h_value: Option<f64>,
    pub cal_a: Option<f64>,
}

pub fn special_functions(spec: &ChainSpec, point: &SpectralPoint) -> SpecialFunctions {
    let flux = spec.flux();
    let m = point.momentum();
    let mut out = SpecialFunctions::default();
    match point.branch() {
        Branch::Positive => {
            if spec.variant() != Variant::Merged {
                let (lp, lm) = lambda_pm(m, spec.ell(), flux);
                out.lambda_plus = Some(lp);
                out.lambda_minus = Some(lm);
            }
            if spec.variant() == Variant::Loose && is_half_integer(flux) {
                let (t, r) = tau_rho(spec.ell(), spec.l1(), spec.l3(), m);
                out.tau = Some(t);
                out.rho = Some(r);
            }
            if spec.variant() == Variant::Tight {
                out.h_value = Some(h_function(m, flux));
            }
        }
        Branch::Negative => match spec.variant() {
            Variant::Loose => {
                out.f_value = Some(large_link_f(spec.ell(), spec.l3(), flux, m));
                if spec.is_symmetric() && is_half_integer(flux) {
                    out.g_value = g_function(spec.ell(), spec.l1(), flux, m);
                }
            }
            Variant::Merged => out.f_value = Some(merged_f(spec.ell(), flux, m)),
            Variant::Tight => {}
        },
    }
    if spec.variant() == Variant::Merged {
        out.cal_a = Some((TAU * flux).cos());
    }
    out
}

/// `Λ± = 4(kℓ+1)² sin(A+k)π ± 4(kℓ−1)² sin(A−k)π`.
pub fn lambda_pm(k: f64, ell: f64, flux: f64) -> (f64, f64) {
    let kl = k * ell;
    let p = 4.0 * (kl + 1.0) * (kl + 1.0) * ((flux + k) * PI).sin();
    let q = 4.0 * (kl - 1.0) * (kl - 1.0) * ((flux - k) * PI).sin();
    (p + q, p - q)
}

/// τ and ρ of the half-integer-flux band condition, which reads
/// `128 cos²kπ (k⁴ℓ⁴ − (k²ℓ²−1)² cos 2k(π−ℓ₃) + 6k²ℓ² + 1) − (τ+ρ)² ≥ 0`.
pub fn tau_rho(ell: f64, l1: f64, l3: f64, k: f64) -> (f64, f64) {
    let q = k * k * ell * ell;
    let qm = (q - 1.0) * (q - 1.0);
    let tau = 2.0 * (qm * (2.0 * k * (PI - l3)).cos() - 4.0 * (q + 1.0)) * (k * l1).sin();
    let rho = qm * (k * (TAU - l1)).sin() - (q + 3.0) * (q + 3.0) * (k * (l1 + TAU)).sin();
    (tau, rho)
}

/// Left side of the half-integer-flux band condition built from τ and ρ.
pub fn half_flux_band_function(ell: f64, l1: f64, l3: f64, k: f64) -> f64 {
    let q = k * k * ell * ell;
    let (tau, rho) = tau_rho(ell, l1, l3, k);
    let ck = (k * PI).cos();
    128.0 * ck * ck * (q * q - (q - 1.0) * (q - 1.0) * (2.0 * k * (PI - l3)).cos() + 6.0 * q + 1.0)
        - (tau + rho) * (tau + rho)
}

/// `h(k) = sin(k−A)π · sin(A+k)π`.
pub fn h_function(k: f64, flux: f64) -> f64 {
    ((k - flux) * PI).sin() * ((flux + k) * PI).sin()
}

/// Large-link limit function `f(ℓ, ℓ₃, A; κ)` multiplied by `e^{−2κπ}`.
pub fn large_link_f_scaled(ell: f64, l3: f64, flux: f64, kappa: f64) -> f64 {
    let kl = kappa * ell;
    let q = kl * kl;
    let shift = TAU * kappa;
    let damp = (-shift).exp();
    4.0 * (q - 1.0) * ((TAU * flux).cos() * damp - sinh_s(TAU * kappa, shift))
        + (q * q - 2.0 * q + 5.0) * cosh_s(TAU * kappa, shift)
        + 8.0 * kl * (TAU * flux).sin() * damp
        - (q + 1.0) * (q + 1.0) * cosh_s(2.0 * kappa * (PI - l3), shift)
}

/// `f(ℓ, ℓ₃, A; κ)`; bands of the loose chain shrink onto its roots as ℓ₁ → ∞.
pub fn large_link_f(ell: f64, l3: f64, flux: f64, kappa: f64) -> f64 {
    large_link_f_scaled(ell, l3, flux, kappa) * (TAU * kappa).exp()
}

/// `f(ℓ, 2π, A; κ) = 4(κ²ℓ²−1)(cos 2Aπ − e^{2κπ}) + 8κℓ sin 2Aπ`, times `e^{−2κπ}`.
pub fn merged_f_scaled(ell: f64, flux: f64, kappa: f64) -> f64 {
    let kl = kappa * ell;
    let damp = (-TAU * kappa).exp();
    4.0 * (kl - 1.0) * (kl + 1.0) * ((TAU * flux).cos() * damp - 1.0)
        + 8.0 * kl * (TAU * flux).sin() * damp
}

pub fn merged_f(ell: f64, flux: f64, kappa: f64) -> f64 {
    merged_f_scaled(ell, flux, kappa) * (TAU * kappa).exp()
}

/// `g(κ)` of the symmetric loose chain (ℓ₃ = π) at flux `A = m − ½`, where
/// the negative spectral condition becomes `cos θ = g(κ)`. `None` off
/// half-integer flux.
pub fn g_function(ell: f64, l1: f64, flux: f64, kappa: f64) -> Option<f64> {
    let sign = half_integer_sign(flux)?;
    let kl = kappa * ell;
    let q = kl * kl;
    // Ratio of hyperbolics, evaluated with a common e^{-κ(2π+ℓ₁)} factor.
    let shift = kappa * (TAU + l1);
    let num = (q - 3.0) * (q - 3.0) * sinh_s(kappa * (TAU + l1), shift)
        - (q + 1.0) * (q + 1.0) * sinh_s(kappa * (TAU - l1), shift)
        - 2.0 * (q * q + 6.0 * q - 3.0) * sinh_s(kappa * l1, shift);
    let den = 32.0 * sign * kl * cosh_s(kappa * PI, shift);
    Some(num / den)
}

/// Closed form of `g(1/(2ℓ))` for `A = m − ½`.
pub fn g_at_half_inverse_ell(ell: f64, l1: f64, flux: f64) -> Option<f64> {
    let sign = half_integer_sign(flux)?;
    let x = PI / ell;
    let y = l1 / (2.0 * ell);
    Some(
        sign / 8.0 / (PI / (2.0 * ell)).cosh()
            * (3.0 * x.sinh() * y.cosh() + (73.0 / 16.0 * x.cosh() + 23.0 / 16.0) * y.sinh()),
    )
}

/// `(−1)^m` for `A = m − ½`.
fn half_integer_sign(flux: f64) -> Option<f64> {
    if !is_half_integer(flux) {
        return None;
    }
    let m = (flux + 0.5).round() as i64;
    Some(if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 })
}

/// `𝒜 = cos 2Aπ`; integer flux gives 1, half-integer −1.
pub fn cal_a(flux: f64) -> f64 {
    if is_integer(flux) {
        1.0
    } else if is_half_integer(flux) {
        -1.0
    } else {
        (TAU * flux).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::coefficients::{coefficients, positive_at};

    #[test]
    fn lambda_minus_vanishes_at_exceptional_flux() {
        let k: f64 = 2.3;
        let q = k * k;
        let a = (-(((q + 1.0) / (2.0 * k)) * (k * PI).tan()).atan() / PI).rem_euclid(1.0);
        assert!((a - 0.6555).abs() < 1e-4);
        let (_, lm) = lambda_pm(k, 1.0, a);
        assert!(lm.abs() < 1e-6);
    }

    #[test]
    fn g_matches_sech_form() {
        for &flux in &[-0.5, 0.5, 1.5] {
            let (ell, l1) = (2.0, 1.0);
            let direct = g_function(ell, l1, flux, 1.0 / (2.0 * ell)).unwrap();
            let closed = g_at_half_inverse_ell(ell, l1, flux).unwrap();
            assert!((direct - closed).abs() < 1e-10 * closed.abs().max(1.0), "{direct} {closed}");
        }
        assert!(g_function(2.0, 1.0, 0.3, 0.2).is_none());
    }

    #[test]
    fn g_is_the_cosine_condition() {
        let spec = ChainSpec::loose(2.0, 1.0, PI, 0.5).unwrap();
        for &kappa in &[0.1, 0.25, 0.7, 1.3] {
            let p = SpectralPoint::negative(kappa).unwrap();
            let c = coefficients(&spec, &p);
            assert!(c.b.abs() < 1e-13 * c.scale);
            let g = special_functions(&spec, &p).g_value.unwrap();
            // cos θ = g(κ) is the condition with θ shifted by π relative to a cos θ = c.
            assert!((g + c.c / c.a).abs() < 1e-10 * g.abs().max(1.0));
        }
    }

    #[test]
    fn h_at_zero_flux_is_square() {
        for i in 1..50 {
            let k = 0.173 * i as f64;
            let h = h_function(k, 0.0);
            assert!(h >= 0.0);
            assert!((h - (k * PI).sin().powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn tau_rho_reproduce_discriminant() {
        let (ell, l1, l3) = (0.9, 1.3, 2.2);
        let spec = ChainSpec::loose(ell, l1, l3, 0.5).unwrap();
        for &k in &[0.37, 1.91, 3.3] {
            let c = positive_at(&spec, k);
            let d = c.discriminant();
            let via = half_flux_band_function(ell, l1, l3, k);
            assert!((via - d).abs() < 1e-10 * d.abs());
            let (t, r) = tau_rho(ell, l1, l3, k);
            assert!((c.c + t + r).abs() < 1e-10 * c.scale);
        }
    }

    #[test]
    fn merged_f_is_general_f_at_full_arc() {
        for &(ell, flux, kappa) in &[(1.0, 0.2, 0.7), (0.6, 0.45, 2.1), (2.0, 0.9, 0.3)] {
            let g = large_link_f_scaled(ell, TAU, flux, kappa);
            let m = merged_f_scaled(ell, flux, kappa);
            assert!((g - m).abs() < 1e-12 * g.abs().max(1.0));
        }
    }

    #[test]
    fn definedness_follows_context() {
        let t = ChainSpec::tight(1.0, 2.0, 0.3).unwrap();
        let p = SpectralPoint::positive(0.8).unwrap();
        let sf = special_functions(&t, &p);
        assert!(sf.h_value.is_some() && sf.lambda_plus.is_some());
        assert!(sf.tau.is_none() && sf.g_value.is_none() && sf.f_value.is_none());
        let m = ChainSpec::merged(1.0, 2.0, 0.3).unwrap();
        let n = SpectralPoint::negative(0.8).unwrap();
        let sf = special_functions(&m, &n);
        assert!(sf.f_value.is_some() && sf.cal_a.is_some() && sf.lambda_plus.is_none());
    }
}
