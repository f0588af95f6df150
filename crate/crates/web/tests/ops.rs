use std::f64::consts::{PI, TAU};

use ringchain::model::positive_at;
use ringchain::probability::tight_asymmetric_closed_form;
use ringchain_web::ops::{band_map, dispersion_curve, flat_points, probability_curve, Params, DEFAULT_POINTS_PER_UNIT};

fn triples(v: &[f64]) -> Vec<(f64, f64, f64)> {
    v.chunks_exact(3).map(|c| (c[0], c[1], c[2])).collect()
}

#[test]
fn band_map_is_symmetric_under_the_arc_swap() {
    let p = Params::new("tight", 1.0, 0.0, 2.0, 0.2).unwrap();
    let steps = 40;
    let map = triples(&band_map(&p, "l3", steps, 3.0, 4000.0).unwrap());
    let values: Vec<f64> = {
        let mut v: Vec<f64> = map.iter().map(|t| t.0).collect();
        v.dedup();
        v
    };
    assert_eq!(values.len(), steps);
    let bands_at = |x: f64| -> Vec<(f64, f64)> { map.iter().filter(|t| t.0 == x).map(|t| (t.1, t.2)).collect() };
    for i in 0..steps / 2 {
        let (x, y) = (values[i], values[steps - 1 - i]);
        assert!((x + y - TAU).abs() < 1e-12);
        let (a, b) = (bands_at(x), bands_at(y));
        assert_eq!(a.len(), b.len(), "ℓ₃ = {x}");
        for (u, v) in a.iter().zip(&b) {
            assert!((u.0 - v.0).abs() < 1e-8 && (u.1 - v.1).abs() < 1e-8, "{u:?} {v:?}");
        }
    }
}

#[test]
fn band_map_rejects_axes_the_variant_lacks() {
    let p = Params::new("merged", 1.0, 2.0, 0.0, 0.3).unwrap();
    assert!(band_map(&p, "l3", 10, 2.0, DEFAULT_POINTS_PER_UNIT).is_err());
    assert!(band_map(&p, "width", 10, 2.0, DEFAULT_POINTS_PER_UNIT).is_err());
    assert!(band_map(&p, "l1", 0, 2.0, DEFAULT_POINTS_PER_UNIT).is_err());
    assert!(band_map(&p, "l1", 10, 1e3, DEFAULT_POINTS_PER_UNIT).is_err());
    assert!(!band_map(&p, "l1", 10, 2.0, DEFAULT_POINTS_PER_UNIT).unwrap().is_empty());
}

#[test]
fn probability_curve_follows_the_closed_form() {
    let curve = triples(&probability_curve("tight", 11, 800).unwrap());
    assert_eq!(curve.len(), 11);
    for (a, torus, closed) in curve {
        assert_eq!(closed, tight_asymmetric_closed_form(a));
        assert!((torus - closed).abs() < 1e-3, "A = {a}: {torus} vs {closed}");
    }
    for (_, torus, closed) in triples(&probability_curve("merged", 5, 800).unwrap()) {
        assert_eq!(closed, 0.5);
        assert!((torus - 0.5).abs() < 2e-3);
    }
    assert!(probability_curve("loose", 5, 400).is_err());
    assert!(probability_curve("tight", 1, 400).is_err());
}

#[test]
fn dispersion_solutions_satisfy_the_condition() {
    let p = Params::new("loose", 1.0, 1.3, 2.2, 0.3).unwrap();
    let spec = p.spec().unwrap();
    let data = dispersion_curve(&p, 4.0, 500).unwrap();
    assert_eq!(data.len(), 2000);
    let mut solved = 0;
    for row in data.chunks_exact(4) {
        let c = positive_at(&spec, row[0]);
        for &t in &row[1..3] {
            if t.is_nan() {
                continue;
            }
            assert!((-PI..=PI).contains(&t));
            assert!(c.residual(t).abs() < 1e-9 * c.amplitude().max(1.0), "{row:?}");
            solved += 1;
        }
    }
    assert!(solved > 0);
}

#[test]
fn flat_points_of_the_half_flux_tight_chain() {
    let p = Params::new("tight", 1.0, 0.0, 2.0, 0.5).unwrap();
    let flats = flat_points(&p, 3.0).unwrap();
    for k in [0.5, 1.5, 2.5] {
        assert!(flats.iter().any(|f| (f - k).abs() < 1e-7), "{k} in {flats:?}");
    }
}

#[test]
fn invalid_parameters_are_reported() {
    assert!(Params::new("square", 1.0, 1.0, 1.0, 0.0).is_err());
    assert!(Params::new("loose", -1.0, 1.0, 1.0, 0.0).is_err());
    assert!(Params::new("loose", 1.0, 1.0, 7.0, 0.0).is_err());
}
