//! WebAssembly bindings for the static demo in `www/`. The computations live
//! in [`ops`] and are plain Rust; the exported functions only convert
//! errors into JavaScript exceptions.

use wasm_bindgen::prelude::*;

pub mod ops;

fn js(e: String) -> JsError {
    JsError::new(&e)
}

/// Band map along `axis` (`"l1"`, `"l3"`, `"ell"` or `"A"`): flat triples
/// `[param, k_lo, k_hi, …]`.
#[wasm_bindgen(js_name = bandMap)]
#[allow(clippy::too_many_arguments)]
pub fn band_map(
    variant: &str,
    ell: f64,
    l1: f64,
    l3: f64,
    flux: f64,
    axis: &str,
    steps: usize,
    kmax: f64,
) -> Result<Vec<f64>, JsError> {
    let p = ops::Params::new(variant, ell, l1, l3, flux).map_err(js)?;
    ops::band_map(&p, axis, steps, kmax, ops::DEFAULT_POINTS_PER_UNIT).map_err(js)
}

/// Probability against the flux on `[0, 1]`: flat triples
/// `[A, torus value, closed form, …]`.
#[wasm_bindgen(js_name = probabilityCurve)]
pub fn probability_curve(variant: &str, points: usize, resolution: usize) -> Result<Vec<f64>, JsError> {
    ops::probability_curve(variant, points, resolution).map_err(js)
}

/// Quasimomenta solving the spectral condition: flat quadruples
/// `[k, θ₁, θ₂, flat]`, with `NaN` for missing solutions and `flat = 1` where
/// every θ solves it.
#[wasm_bindgen]
pub fn dispersion(variant: &str, ell: f64, l1: f64, l3: f64, flux: f64, kmax: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    let p = ops::Params::new(variant, ell, l1, l3, flux).map_err(js)?;
    ops::dispersion_curve(&p, kmax, samples).map_err(js)
}

/// Flat-point momenta up to `kmax`.
#[wasm_bindgen(js_name = flatPoints)]
pub fn flat_points(variant: &str, ell: f64, l1: f64, l3: f64, flux: f64, kmax: f64) -> Result<Vec<f64>, JsError> {
    let p = ops::Params::new(variant, ell, l1, l3, flux).map_err(js)?;
    ops::flat_points(&p, kmax).map_err(js)
}
