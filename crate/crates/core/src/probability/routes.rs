//! The direct band-scan route and the cross-route universality check.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::torus::{torus_probability, TorusOptions};
use super::{closed_form_probability, EstimateInputs, Method, ProbabilityEstimate};
use crate::bands::{scan_bands, ScanOptions};
use crate::chain::{ChainSpec, Variant};
use crate::error::{ChainError, Result};

/// Grid density of the probability scan. Coarser than band reports: bands
/// narrower than a grid step are still found by the scan's probes, and the
/// measure they carry is small.
pub const DEFAULT_SCAN_POINTS_PER_UNIT: f64 = 400.0;

/// Fraction of `[0, k_max]` covered by bands of the full spectral condition.
///
/// The error bound extrapolates the finite-range bias from the coverage of
/// the prefixes `[0, m]`, `m ∈ {K/4, K/2, 3K/4}`, of the same scan: for a
/// bias `c/m` the value `|P(m) − P(K)|·m/(K − m)` equals `c/K`. The largest
/// of the three, doubled, plus the bisection tolerance of every band edge
/// is reported. Bands running past `k_max` are clipped.
pub fn scan_probability(spec: &ChainSpec, k_max: f64, opts: Option<&ScanOptions>) -> Result<ProbabilityEstimate> {
    if !(k_max > 0.0) || !k_max.is_finite() {
        return Err(ChainError::Precondition("k_max must be positive".into()));
    }
    let default = ScanOptions::for_range(k_max).with_grid((k_max * DEFAULT_SCAN_POINTS_PER_UNIT).ceil() as usize);
    let opts = opts.copied().unwrap_or(default);
    let scan = scan_bands(spec, k_max, &opts)?;
    let full = scan.covered_length(0.0, k_max) / k_max;
    let prefix = |m: f64| scan.covered_length(0.0, m) / m;
    let half = prefix(0.5 * k_max);
    let bias = [0.25, 0.5, 0.75]
        .iter()
        .map(|&f| (prefix(f * k_max) - full).abs() * f / (1.0 - f))
        .fold(0.0, f64::max);
    let edges = 2.0 * scan.bands.len() as f64 * opts.edge_tol / k_max;
    let mut inputs = EstimateInputs::for_spec(spec);
    inputs.k_max = Some(k_max);
    inputs.resolution = Some(opts.grid_points);
    inputs.cross_check = Some(half);
    Ok(ProbabilityEstimate::new(full, Method::Scan, 2.0 * bias + edges, inputs))
}

/// Scan estimates at `k0, 2k0, 4k0, …` (`doublings + 1` values).
pub fn scan_convergence(spec: &ChainSpec, k0: f64, doublings: usize) -> Result<Vec<ProbabilityEstimate>> {
    (0..=doublings)
        .map(|i| scan_probability(spec, k0 * f64::powi(2.0, i as i32), None))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalityRow {
    pub spec: ChainSpec,
    pub scan: ProbabilityEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteDisagreement {
    pub first: String,
    pub second: String,
    pub difference: f64,
    pub allowed: f64,
}

impl fmt::Display for RouteDisagreement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} vs {}: differ by {:.3e}, allowed {:.3e}",
            self.first, self.second, self.difference, self.allowed
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniversalityReport {
    pub variant: Variant,
    pub flux: f64,
    pub rows: Vec<UniversalityRow>,
    pub torus: ProbabilityEstimate,
    pub closed_form: ProbabilityEstimate,
    pub failures: Vec<RouteDisagreement>,
}

impl UniversalityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares the scan route on every geometry with the torus route and the
/// closed form. All geometries must be of one variant (tight asymmetric or
/// merged), share the given flux, and be declared incommensurate by the
/// caller. Two routes agree when they differ by at most the sum of their
/// error bounds.
pub fn universality_check(
    flux: f64,
    geometries: &[ChainSpec],
    k_max: f64,
    torus: &TorusOptions,
) -> Result<UniversalityReport> {
    if geometries.len() < 2 {
        return Err(ChainError::Precondition("universality needs at least two geometries".into()));
    }
    let variant = geometries[0].variant();
    if variant == Variant::Loose {
        return Err(ChainError::WrongVariant {
            expected: "tight or merged",
            found: Variant::Loose,
        });
    }
    for g in geometries {
        if g.variant() != variant || (g.flux() - flux).abs() > 1e-12 {
            return Err(ChainError::Precondition(
                "all geometries must share the variant and the flux".into(),
            ));
        }
        if variant == Variant::Tight && g.is_symmetric() {
            return Err(ChainError::Precondition("the symmetric tight chain is not universal".into()));
        }
    }
    let torus_est = torus_probability(variant, flux, torus)?;
    let closed = closed_form_probability(variant, flux, false)?;
    let rows = geometries
        .iter()
        .map(|g| {
            scan_probability(g, k_max, None).map(|scan| UniversalityRow { spec: *g, scan })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut failures = Vec::new();
    let mut compare = |first: String, a: &ProbabilityEstimate, second: String, b: &ProbabilityEstimate| {
        let difference = (a.value - b.value).abs();
        let allowed = a.error_bound + b.error_bound;
        if difference > allowed {
            failures.push(RouteDisagreement {
                first,
                second,
                difference,
                allowed,
            });
        }
    };
    compare("torus".into(), &torus_est, "closed-form".into(), &closed);
    for (i, row) in rows.iter().enumerate() {
        let name = format!("scan[{i}] {}", describe(&row.spec));
        compare(name.clone(), &row.scan, "torus".into(), &torus_est);
        compare(name, &row.scan, "closed-form".into(), &closed);
    }
    Ok(UniversalityReport {
        variant,
        flux,
        rows,
        torus: torus_est,
        closed_form: closed,
        failures,
    })
}

fn describe(spec: &ChainSpec) -> String {
    match spec.variant() {
        Variant::Tight => format!("ell={} l3={}", spec.ell(), spec.l3()),
        _ => format!("ell={} l1={}", spec.ell(), spec.l1()),
    }
}
