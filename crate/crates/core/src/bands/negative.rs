//! Bands of the negative spectrum, `E = −κ²`.

use crate::chain::{ChainSpec, Variant};
use crate::error::{ChainError, Result};
use crate::model::{is_half_integer, is_integer, negative_at};
use crate::model::special::{large_link_f_scaled, merged_f_scaled};
use crate::roots::grid_roots;

use super::scan::{scan_with, BandScan, ScanOptions};

/// Negative bands for `κ ∈ (0, kappa_max]`. More bands than the variant's
/// cap (two for the loose chain, one otherwise) is a numerical failure.
pub fn find_negative_bands(spec: &ChainSpec, kappa_max: f64, opts: &ScanOptions) -> Result<BandScan> {
    if !(kappa_max > 0.0) {
        return Err(ChainError::Precondition("kappa_max must be positive".into()));
    }
    let s = *spec;
    let scan = scan_with(move |kappa| negative_at(&s, kappa), 0.0, kappa_max, opts, &[])?;
    let cap = spec.variant().negative_band_cap();
    if scan.bands.len() > cap {
        return Err(ChainError::NegativeBandCap {
            variant: spec.variant(),
            found: scan.bands.len(),
            cap,
        });
    }
    Ok(scan)
}

/// Grid density of the root search for the large-link limit function.
const ROOT_POINTS_PER_UNIT: f64 = 2e4;

/// Points `κ*` the negative bands shrink to as `ℓ₁ → ∞`: the roots of the
/// limit function on `(0, kappa_max]`. For the merged chain at integer or
/// half-integer flux this is exactly `1/ℓ`.
pub fn asymptotic_negative_point(spec: &ChainSpec, kappa_max: f64) -> Result<Vec<f64>> {
    if !(kappa_max > 0.0) {
        return Err(ChainError::Precondition("kappa_max must be positive".into()));
    }
    let flux = spec.reduced_flux();
    let (ell, l3) = (spec.ell(), spec.l3());
    let n = ((kappa_max * ROOT_POINTS_PER_UNIT) as usize).max(200);
    let roots = match spec.variant() {
        Variant::Tight => {
            return Err(ChainError::WrongVariant {
                expected: "loose or merged",
                found: Variant::Tight,
            })
        }
        Variant::Merged if is_integer(flux) || is_half_integer(flux) => {
            let k = 1.0 / ell;
            if k <= kappa_max {
                vec![k]
            } else {
                Vec::new()
            }
        }
        Variant::Merged => grid_roots(|k| merged_f_scaled(ell, flux, k), 1e-9, kappa_max, n, 1e-15),
        Variant::Loose => grid_roots(|k| large_link_f_scaled(ell, l3, flux, k), 1e-9, kappa_max, n, 1e-15),
    };
    if roots.is_empty() {
        return Err(ChainError::Domain(format!(
            "no negative band in the asymptotic regime below κ = {kappa_max}"
        )));
    }
    Ok(roots)
}
