//! Probability routes against each other and against known values.

use std::f64::consts::{E, PI};

use ringchain::probability::{
    closed_form_probability, periodic_probability, scan_convergence, scan_probability, torus_probability,
    universality_check, TorusOptions,
};
use ringchain::rational::Ratio;
use ringchain::{ChainSpec, Variant};

fn light_torus() -> TorusOptions {
    TorusOptions {
        resolution: 2000,
        mc_samples: 1_000_000,
        ..TorusOptions::default()
    }
}

#[test]
fn scan_values_at_long_range() {
    let tight = ChainSpec::tight(1.0, 2f64.sqrt(), 0.25).unwrap();
    assert!((scan_probability(&tight, 1e4, None).unwrap().value - 0.75).abs() < 0.01);
    let merged = ChainSpec::merged(1.0, 3f64.sqrt(), 0.3).unwrap();
    assert!((scan_probability(&merged, 1e4, None).unwrap().value - 0.5).abs() < 0.01);
    let loose = ChainSpec::loose(1.0, 2f64.sqrt(), E - 1.0, 0.3).unwrap();
    assert!(scan_probability(&loose, 500.0, None).unwrap().value < 0.05);
}

#[test]
fn scan_changes_shrink_on_doubling() {
    for spec in [
        ChainSpec::tight(1.0, 2f64.sqrt(), 0.25).unwrap(),
        ChainSpec::merged(1.0, 3f64.sqrt(), 0.3).unwrap(),
    ] {
        let values: Vec<f64> = scan_convergence(&spec, 1250.0, 3).unwrap().iter().map(|e| e.value).collect();
        let steps: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        assert!(steps[0] > steps[1] && steps[1] > steps[2], "{spec:?}: {values:?}");
    }
}

#[test]
fn merged_torus_ignores_the_flux() {
    let a = torus_probability(Variant::Merged, 0.1, &light_torus()).unwrap().value;
    let b = torus_probability(Variant::Merged, 0.35, &light_torus()).unwrap().value;
    assert!((a - b).abs() < 2e-3, "{a} {b}");
}

#[test]
fn merged_periodic_matches_scan() {
    for (p, q) in [(1, 5), (2, 5), (3, 7)] {
        let per = periodic_probability(Variant::Merged, 0.2, Ratio::new(p, q), 1.0).unwrap();
        let spec = ChainSpec::merged(1.0, PI * p as f64 / q as f64, 0.2).unwrap();
        let scan = scan_probability(&spec, 1e4, None).unwrap();
        assert!((per.value - scan.value).abs() < 0.01, "{p}/{q}: {} vs {}", per.value, scan.value);
    }
}

#[test]
fn tight_universality() {
    let geometries: Vec<_> = [(1.0, 2f64.sqrt()), (1.0, E - 1.0), (2.0, 2f64.sqrt()), (2.0, E - 1.0)]
        .iter()
        .map(|&(ell, l3)| ChainSpec::tight(ell, l3, 0.25).unwrap())
        .collect();
    let report = universality_check(0.25, &geometries, 1e4, &TorusOptions::default()).unwrap();
    assert!(report.passed(), "{:?}", report.failures);
    assert!((report.closed_form.value - 0.75).abs() < 1e-15);
}

#[test]
fn merged_universality() {
    for a in [0.1, 0.4] {
        let geometries: Vec<_> = [3f64.sqrt(), 5f64.sqrt()]
            .iter()
            .map(|&l1| ChainSpec::merged(1.0, l1, a).unwrap())
            .collect();
        let report = universality_check(a, &geometries, 1e4, &TorusOptions::default()).unwrap();
        assert!(report.passed(), "{a}: {:?}", report.failures);
    }
}

#[test]
fn universality_needs_two_geometries() {
    let one = [ChainSpec::tight(1.0, 2f64.sqrt(), 0.25).unwrap()];
    assert!(universality_check(0.25, &one, 100.0, &light_torus()).is_err());
}

#[test]
fn closed_forms_bound_the_tight_range() {
    for i in 0..=40 {
        let a = i as f64 / 80.0;
        let v = closed_form_probability(Variant::Tight, a, false).unwrap().value;
        assert!((0.5..=0.75).contains(&v));
    }
}
