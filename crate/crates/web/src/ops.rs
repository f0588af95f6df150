//! The demo's computations, independent of the JavaScript bindings.

use std::f64::consts::TAU;

use ringchain::bands::{detect_flat_bands, scan_bands, ScanOptions};
use ringchain::model::{dispersion_theta, positive_at, ThetaSolutions};
use ringchain::probability::{closed_form_probability, torus_probability, TorusOptions};
use ringchain::{ChainSpec, Variant};

/// Coarse enough for an interactive redraw.
pub const DEFAULT_POINTS_PER_UNIT: f64 = 600.0;

/// Bounds on request sizes, so a slider cannot freeze the page.
pub const MAX_STEPS: usize = 2000;
pub const MAX_KMAX: f64 = 40.0;
pub const MAX_RESOLUTION: usize = 2000;

/// Chain parameters as the page sends them: all five numbers, of which the
/// variant uses its own.
#[derive(Debug, Clone, Copy)]
pub struct Params {
    pub variant: Variant,
    pub ell: f64,
    pub l1: f64,
    pub l3: f64,
    pub flux: f64,
}

impl Params {
    pub fn new(variant: &str, ell: f64, l1: f64, l3: f64, flux: f64) -> Result<Self, String> {
        let variant: Variant = variant.parse().map_err(|e: ringchain::ChainError| e.to_string())?;
        let p = Self { variant, ell, l1, l3, flux };
        p.spec()?;
        Ok(p)
    }

    pub fn spec(&self) -> Result<ChainSpec, String> {
        match self.variant {
            Variant::Loose => ChainSpec::loose(self.ell, self.l1, self.l3, self.flux),
            Variant::Tight => ChainSpec::tight(self.ell, self.l3, self.flux),
            Variant::Merged => ChainSpec::merged(self.ell, self.l1, self.flux),
        }
        .map_err(|e| e.to_string())
    }

    fn with(&self, axis: &str, v: f64) -> Result<Self, String> {
        let mut p = *self;
        match (axis, self.variant) {
            ("l1", Variant::Tight) => return Err("the tight chain has no link to sweep".into()),
            ("l3", Variant::Merged) => return Err("the merged chain has no free arc to sweep".into()),
            _ => {}
        }
        match axis {
            "l1" => p.l1 = v,
            "l3" => p.l3 = v,
            "ell" => p.ell = v,
            "A" => p.flux = v,
            other => return Err(format!("unknown axis {other:?}")),
        }
        Ok(p)
    }
}

/// Swept range of each axis: open at ends where the geometry degenerates.
fn axis_range(axis: &str, steps: usize) -> Result<Vec<f64>, String> {
    let (lo, hi) = match axis {
        "l1" => (0.0, 2.0 * TAU),
        "l3" => (0.0, TAU),
        "ell" => (0.0, 3.0),
        "A" => (0.0, 1.0),
        other => return Err(format!("unknown axis {other:?}")),
    };
    // Cell midpoints keep the degenerate endpoints out.
    let h = (hi - lo) / steps as f64;
    Ok((0..steps).map(|i| lo + h * (i as f64 + 0.5)).collect())
}

fn check_kmax(kmax: f64) -> Result<(), String> {
    if kmax > 0.0 && kmax <= MAX_KMAX {
        Ok(())
    } else {
        Err(format!("kmax must lie in (0, {MAX_KMAX}]"))
    }
}

pub fn band_map(p: &Params, axis: &str, steps: usize, kmax: f64, points_per_unit: f64) -> Result<Vec<f64>, String> {
    if steps == 0 || steps > MAX_STEPS {
        return Err(format!("steps must lie in [1, {MAX_STEPS}]"));
    }
    check_kmax(kmax)?;
    let opts = ScanOptions::for_range(kmax).with_grid((kmax * points_per_unit).ceil() as usize);
    let mut out = Vec::new();
    for v in axis_range(axis, steps)? {
        let spec = p.with(axis, v)?.spec()?;
        for b in scan_bands(&spec, kmax, &opts).map_err(|e| e.to_string())?.bands {
            out.extend([v, b.lo, b.hi]);
        }
    }
    Ok(out)
}

pub fn probability_curve(variant: &str, points: usize, resolution: usize) -> Result<Vec<f64>, String> {
    let variant: Variant = variant.parse().map_err(|e: ringchain::ChainError| e.to_string())?;
    if !(2..=401).contains(&points) {
        return Err("points must lie in [2, 401]".into());
    }
    if resolution > MAX_RESOLUTION {
        return Err(format!("resolution must be at most {MAX_RESOLUTION}"));
    }
    let opts = TorusOptions {
        resolution,
        mc_samples: 0,
        ..TorusOptions::default()
    };
    let mut out = Vec::with_capacity(3 * points);
    for i in 0..points {
        let a = i as f64 / (points - 1) as f64;
        let torus = torus_probability(variant, a, &opts).map_err(|e| e.to_string())?;
        let closed = closed_form_probability(variant, a, false).map_err(|e| e.to_string())?;
        out.extend([a, torus.value, closed.value]);
    }
    Ok(out)
}

pub fn dispersion_curve(p: &Params, kmax: f64, samples: usize) -> Result<Vec<f64>, String> {
    check_kmax(kmax)?;
    if samples < 2 || samples > 200_000 {
        return Err("samples must lie in [2, 200000]".into());
    }
    let spec = p.spec()?;
    let mut out = Vec::with_capacity(4 * samples);
    for i in 0..samples {
        let k = kmax * (i as f64 + 0.5) / samples as f64;
        let row = match dispersion_theta(&positive_at(&spec, k)) {
            ThetaSolutions::All => [k, f64::NAN, f64::NAN, 1.0],
            sol => {
                let v = sol.values();
                [k, v.first().copied().unwrap_or(f64::NAN), v.get(1).copied().unwrap_or(f64::NAN), 0.0]
            }
        };
        out.extend(row);
    }
    Ok(out)
}

pub fn flat_points(p: &Params, kmax: f64) -> Result<Vec<f64>, String> {
    check_kmax(kmax)?;
    let hits = detect_flat_bands(&p.spec()?, kmax).map_err(|e| e.to_string())?;
    Ok(hits.into_iter().map(|h| h.k).collect())
}
