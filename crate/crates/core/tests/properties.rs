//! Property tests for the symmetries and reductions of the spectral
//! condition, the dispersion solver, the closed-form probabilities and the
//! torus indicator.

use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use ringchain::model::{
    coefficients, coefficients_raw, coefficients_unscaled, dispersion_theta, negative_at, positive_at,
};
use ringchain::probability::{
    tight_asymmetric_closed_form, tight_symmetric_closed_form, torus_indicator,
};
use ringchain::{ChainSpec, SpectralPoint, Variant};

mod common;
use common::{half_flux_reference, integer_flux_amplitude, integer_flux_reference};

fn close(x: f64, y: f64, scale: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * scale.max(1.0)
}

fn spec_strategy(variant: Variant) -> impl Strategy<Value = ChainSpec> {
    (0.3f64..2.5, 0.2f64..5.0, 0.2f64..(TAU - 0.2), -1.0f64..2.0).prop_map(move |(ell, l1, l3, a)| match variant {
        Variant::Loose => ChainSpec::loose(ell, l1, l3, a).unwrap(),
        Variant::Tight => ChainSpec::tight(ell, l3, a).unwrap(),
        Variant::Merged => ChainSpec::merged(ell, l1, a).unwrap(),
    })
}

fn any_spec() -> impl Strategy<Value = ChainSpec> {
    prop_oneof![
        spec_strategy(Variant::Loose),
        spec_strategy(Variant::Tight),
        spec_strategy(Variant::Merged)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn swapping_the_arcs_keeps_the_discriminant(
        spec in prop_oneof![spec_strategy(Variant::Loose), spec_strategy(Variant::Tight)],
        k in 0.01f64..20.0,
        kappa in 0.01f64..6.0,
    ) {
        let swapped = spec.swapped_arcs().unwrap();
        for (c, d) in [(positive_at(&spec, k), positive_at(&swapped, k)), (negative_at(&spec, kappa), negative_at(&swapped, kappa))] {
            let s2 = c.scale * c.scale;
            prop_assert!(close(c.discriminant(), d.discriminant(), s2, 1e-9), "{c:?} {d:?}");
        }
    }

    #[test]
    fn whole_flux_quanta_keep_the_discriminant(spec in any_spec(), k in 0.01f64..20.0, kappa in 0.01f64..5.0) {
        for point in [SpectralPoint::positive(k).unwrap(), SpectralPoint::negative(kappa).unwrap()] {
            let base = coefficients_raw(&spec, &point);
            for shift in [1.0, 2.0, -1.0] {
                let moved = coefficients_raw(&spec.with_flux(spec.flux() + shift).unwrap(), &point);
                let s2 = base.scale * base.scale;
                prop_assert!(close(base.discriminant(), moved.discriminant(), s2, 1e-9), "{shift}: {base:?} {moved:?}");
                prop_assert_eq!(base.in_spectrum() || base.normalized_discriminant().abs() < 1e-9,
                                moved.in_spectrum() || moved.normalized_discriminant().abs() < 1e-9);
            }
        }
    }

    #[test]
    fn integer_flux_reduces(
        ell in 0.3f64..2.5, l1 in 0.2f64..5.0, l3 in 0.2f64..(TAU - 0.2), n in -2i32..3, k in 0.01f64..15.0,
    ) {
        let a = n as f64;
        let spec = ChainSpec::loose(ell, l1, l3, a).unwrap();
        let c = coefficients_raw(&spec, &SpectralPoint::positive(k).unwrap());
        let (ra, rb, rc) = integer_flux_reference(k, ell, l1, l3, a);
        prop_assert!(close(c.a, ra, c.scale, 1e-10) && close(c.b, rb, c.scale, 1e-10) && close(c.c, rc, c.scale, 1e-10),
            "{c:?} vs {ra} {rb} {rc}");
        let amp = integer_flux_amplitude(k, ell, l3);
        prop_assert!(close(c.a * c.a + c.b * c.b, amp, c.scale * c.scale, 1e-10));
    }

    #[test]
    fn half_integer_flux_reduces(
        ell in 0.3f64..2.5, l1 in 0.2f64..5.0, l3 in 0.2f64..(TAU - 0.2), n in -2i32..3, k in 0.01f64..15.0,
    ) {
        let a = n as f64 + 0.5;
        let spec = ChainSpec::loose(ell, l1, l3, a).unwrap();
        let c = coefficients_raw(&spec, &SpectralPoint::positive(k).unwrap());
        let (ra, rb) = half_flux_reference(k, ell, l3, a);
        prop_assert!(close(c.a, ra, c.scale, 1e-10) && close(c.b, rb, c.scale, 1e-10), "{c:?} vs {ra} {rb}");
    }

    #[test]
    fn overflow_scaling_keeps_the_sign(spec in any_spec(), kappa in 0.01f64..6.0) {
        prop_assume!(kappa * spec.l1() <= 30.0);
        let point = SpectralPoint::negative(kappa).unwrap();
        let scaled = coefficients(&spec, &point);
        let plain = coefficients_unscaled(&spec, &point);
        let margin = scaled.normalized_discriminant();
        prop_assume!(margin.abs() > 1e-9);
        prop_assert_eq!(scaled.discriminant() >= 0.0, plain.discriminant() >= 0.0, "{:?} {:?}", scaled, plain);
    }

    #[test]
    fn dispersion_solutions_satisfy_the_condition(spec in any_spec(), k in 0.01f64..20.0) {
        let c = positive_at(&spec, k);
        for theta in dispersion_theta(&c).values() {
            let bound = 1e-9 * (c.a.abs() + c.b.abs() + c.c.abs()).max(1.0);
            prop_assert!(c.residual(theta).abs() < bound, "{c:?} θ={theta}");
        }
    }

    #[test]
    fn asymmetric_closed_form_symmetries(a in -3.0f64..3.0) {
        let p = tight_asymmetric_closed_form(a);
        prop_assert!((p - tight_asymmetric_closed_form(a + 0.5)).abs() < 1e-12);
        // The fold at multiples of ½ is exact only away from them.
        let edge = (2.0 * a - (2.0 * a).round()).abs();
        prop_assume!(edge > 1e-9);
        prop_assert!((p - tight_asymmetric_closed_form(-a)).abs() < 1e-12);
    }

    #[test]
    fn symmetric_closed_form_symmetries(a in -3.0f64..3.0) {
        let p = tight_symmetric_closed_form(a);
        prop_assert!((p - tight_symmetric_closed_form(a + 1.0)).abs() < 1e-7);
        prop_assert!((p - tight_symmetric_closed_form(-a)).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn asymmetric_closed_form_is_concave(a in 0.001f64..0.499, h in 1e-4f64..0.2) {
        prop_assume!(a - h > 0.0 && a + h < 0.5);
        let f = tight_asymmetric_closed_form;
        prop_assert!(f(a - h) - 2.0 * f(a) + f(a + h) < 0.0);
    }

    #[test]
    fn tight_torus_indicator_symmetries(x in 0.0f64..TAU, y in 0.0f64..TAU, a in -2.0f64..2.0, n in -2i32..3) {
        let f = |x: f64, y: f64, a: f64| torus_indicator(Variant::Tight, a, x, y).unwrap();
        let v = f(x, y, a);
        let n = n as f64;
        for w in [f(x - TAU, y, a), f(x, y - PI, a), f(x, y, 2.0 * n - a), f(x, y, 2.0 * (n - 0.5) - a)] {
            prop_assert!((v - w).abs() < 1e-9, "{v} {w}");
        }
    }

    #[test]
    fn merged_torus_indicator_symmetries(x in 0.0f64..TAU, y in 0.0f64..TAU, a in -2.0f64..2.0) {
        let f = |x: f64, y: f64| torus_indicator(Variant::Merged, a, x, y).unwrap();
        let v = f(x, y);
        prop_assert!((v - f(x - TAU, y)).abs() < 1e-9);
        prop_assert!((v - f(x, y - PI)).abs() < 1e-9);
    }
}
