//! Reduced forms of the loose-chain coefficients, written out
//! independently of the library for comparison.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

/// Integer-flux form of the loose coefficients, written out independently.
pub fn integer_flux_reference(k: f64, ell: f64, l1: f64, l3: f64, a: f64) -> (f64, f64, f64) {
    let q = k * k * ell * ell;
    let s = PI - l3;
    let sk = (k * PI).sin();
    let ca = 8.0 * sk * (2.0 * (q + 1.0) * (a * l3).cos() * (k * s).cos() - 4.0 * k * ell * (a * l3).sin() * (k * s).sin());
    let cb = 8.0 * sk * (2.0 * (q + 1.0) * (a * l3).sin() * (k * s).cos() + 4.0 * k * ell * (a * l3).cos() * (k * s).sin());
    let cc = -(q - 1.0).powi(2) * (2.0 * (k * l1).sin() * (2.0 * k * s).cos() + (k * (TAU - l1)).sin())
        - 8.0 * (q + 1.0) * (k * l1).sin()
        + (q + 3.0).powi(2) * (k * (l1 + TAU)).sin();
    (ca, cb, cc)
}

/// `a² + b²` at integer flux, which does not depend on the flux.
pub fn integer_flux_amplitude(k: f64, ell: f64, l3: f64) -> f64 {
    let q = k * k * ell * ell;
    128.0 * (k * PI).sin().powi(2) * (4.0 * q + (q + 1.0).powi(2) + (q - 1.0).powi(2) * (2.0 * k * (PI - l3)).cos())
}

/// Half-integer-flux form of the loose `a` and `b`.
pub fn half_flux_reference(k: f64, ell: f64, l3: f64, a: f64) -> (f64, f64) {
    let (kp, km) = ((k * ell + 1.0).powi(2), (k * ell - 1.0).powi(2));
    let ph = k * (PI - l3);
    let ck = (k * PI).cos();
    let ca = 8.0 * ck * (km * (ph - a * l3).sin() + kp * (ph + a * l3).sin());
    let cb = 8.0 * ck * (km * (ph - a * l3).cos() - kp * (ph + a * l3).cos());
    (ca, cb)
}

