//! Band, flat-band and negative-band behavior across variants.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ringchain::bands::{
    detect_flat_bands, find_negative_bands, predict_flat_bands, scan_bands, scan_bands_between, BandKind, ScanOptions,
};
use ringchain::{ChainError, ChainSpec, Variant};

fn random_spec(rng: &mut ChaCha8Rng, variant: Variant) -> ChainSpec {
    let ell = rng.gen_range(0.3..2.5);
    let l1 = rng.gen_range(0.2..6.0);
    let l3 = rng.gen_range(0.2..TAU - 0.2);
    let a = rng.gen_range(-1.0..2.0);
    match variant {
        Variant::Loose => ChainSpec::loose(ell, l1, l3, a),
        Variant::Tight => ChainSpec::tight(ell, l3, a),
        Variant::Merged => ChainSpec::merged(ell, l1, a),
    }
    .unwrap()
}

#[test]
fn isolated_flat_points_are_detected_and_predicted() {
    let cases = [
        ChainSpec::loose(1.0, TAU / 3.0, 2.0, 0.5).unwrap(),
        ChainSpec::tight(1.0, 2.0, 0.5).unwrap(),
        ChainSpec::merged(1.0, 2.7, 0.5).unwrap(),
        ChainSpec::merged(10.0 / 3.0, 1.9, 0.7).unwrap(),
        ChainSpec::loose(1.0, 1.3, 2.2, 0.0).unwrap(),
    ];
    for spec in cases {
        let k_max = 4.0;
        let scan = scan_bands(&spec, k_max, &ScanOptions::for_range(k_max)).unwrap();
        let hits = detect_flat_bands(&spec, k_max).unwrap();
        let predicted = predict_flat_bands(&spec, k_max).unwrap().k_values();
        for band in scan.bands.iter().filter(|b| b.kind == BandKind::FlatPoint) {
            let k = band.center();
            assert!(hits.iter().any(|h| (h.k - k).abs() < 1e-6), "{spec:?}: {k} not detected");
            assert!(predicted.iter().any(|p| (p - k).abs() < 1e-6), "{spec:?}: {k} not predicted");
        }
    }
}

#[test]
fn fig2_parameters_have_an_isolated_flat_point_at_three_halves() {
    let spec = ChainSpec::loose(1.0, TAU / 3.0, 2.0, 0.5).unwrap();
    let scan = scan_bands(&spec, 3.0, &ScanOptions::for_range(3.0)).unwrap();
    let flat: Vec<_> = scan.bands.iter().filter(|b| b.kind == BandKind::FlatPoint).collect();
    assert!(flat.iter().any(|b| (b.center() - 1.5).abs() < 1e-9), "{:?}", scan.bands);
}

#[test]
fn negative_band_caps_hold_on_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for variant in [Variant::Loose, Variant::Tight, Variant::Merged] {
        for _ in 0..100 {
            let spec = random_spec(&mut rng, variant);
            match find_negative_bands(&spec, 6.0, &ScanOptions::for_range(6.0).with_grid(6000)) {
                Ok(scan) => assert!(scan.bands.len() <= variant.negative_band_cap()),
                Err(e @ ChainError::NegativeBandCap { .. }) => panic!("{spec:?}: {e}"),
                Err(e) => panic!("{spec:?}: unexpected {e}"),
            }
        }
    }
}

/// Leading `k²` coefficient of `a² + b² − c²` near `k = 0` for the loose
/// chain, up to a positive factor.
fn low_energy_coefficient(spec: &ChainSpec) -> f64 {
    let (a, ell, l1, l3) = (spec.flux(), spec.ell(), spec.l1(), spec.l3());
    -8.0 * (a * PI).sin().powi(2)
        * (l1 * l1 + 4.0 * PI * (l1 + l3) + (TAU * a).cos() * (4.0 * ell * ell - l1 * l1) + 4.0 * l1 * ell * (TAU * a).sin()
            - 2.0 * l3 * l3
            - 4.0 * ell * ell)
}

/// Leading `κ²` coefficient at half-integer flux, up to a positive factor.
fn low_negative_coefficient(spec: &ChainSpec) -> f64 {
    let (ell, l1, l3) = (spec.ell(), spec.l1(), spec.l3());
    -(-4.0 * ell * ell + (l1 * l1 - l3 * l3) + TAU * (l1 + l3))
}

#[test]
fn low_energy_membership_follows_the_leading_coefficient() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut checked = 0;
    while checked < 50 {
        let mut spec = random_spec(&mut rng, Variant::Loose);
        spec = spec.with_flux(rng.gen_range(0.05..0.95)).unwrap();
        let lead = low_energy_coefficient(&spec);
        if lead.abs() < 1e-2 {
            continue;
        }
        let scan = scan_bands(&spec, 0.01, &ScanOptions::for_range(0.01).with_grid(200)).unwrap();
        assert_eq!(scan.contains(1e-3), lead > 0.0, "{spec:?} lead {lead}");
        checked += 1;
    }
    checked = 0;
    while checked < 50 {
        let spec = random_spec(&mut rng, Variant::Loose).with_flux(0.5).unwrap();
        let lead = low_negative_coefficient(&spec);
        if lead.abs() < 1e-2 {
            continue;
        }
        let scan = find_negative_bands(&spec, 0.01, &ScanOptions::for_range(0.01).with_grid(200)).unwrap();
        assert_eq!(scan.contains(1e-3), lead > 0.0, "{spec:?} lead {lead}");
        checked += 1;
    }
}

#[test]
fn loose_band_fraction_decays_at_high_energy() {
    let spec = ChainSpec::loose(1.0, 2f64.sqrt(), std::f64::consts::E - 1.0, 0.3).unwrap();
    let fraction = |lo: f64, hi: f64| {
        let opts = ScanOptions::for_range(hi - lo).with_grid(((hi - lo) * 2000.0) as usize);
        scan_bands_between(&spec, lo, hi, &opts).unwrap().covered_length(lo, hi) / (hi - lo)
    };
    let f = [fraction(100.0, 200.0), fraction(200.0, 400.0), fraction(400.0, 800.0)];
    assert!(f[1] < 0.05);
    assert!(f[0] > f[1] && f[1] > f[2], "{f:?}");
}

#[test]
fn tight_half_flux_ladder_does_not_depend_on_free_length() {
    for l3 in [0.7, 2.0, PI, 4.4] {
        let spec = ChainSpec::tight(1.0, l3, 0.5).unwrap();
        let hits = detect_flat_bands(&spec, 5.0).unwrap();
        for n in 1..=5 {
            let k = n as f64 - 0.5;
            assert!(hits.iter().any(|h| (h.k - k).abs() < 1e-7), "l3={l3}: {k} missing");
        }
    }
}
