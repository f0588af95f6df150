//! Grid scan of the band condition with bisection refinement of every edge.

use serde::{Deserialize, Serialize};

use crate::chain::ChainSpec;
use crate::error::{ChainError, Result};
use crate::model::{positive_at, SpectralCoefficients};
use crate::parallel::{map_range, map_slice};
use crate::roots::{bisect_predicate, bisect_root, golden_min};

/// Grid density used when the caller does not choose one.
pub const DEFAULT_POINTS_PER_UNIT: f64 = 2e4;
pub const DEFAULT_EDGE_TOL: f64 = 1e-10;
pub const MAX_BISECTIONS: usize = 80;
/// Bands narrower than this multiple of the edge tolerance that contain a
/// flat point are reported as that flat point.
const FLAT_WIDTH_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandKind {
    Continuous,
    FlatPoint,
}

/// A closed interval of momenta (`k`, or `κ` on the negative branch).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
    pub kind: BandKind,
    /// Largest bracket width left around either edge.
    pub edge_tol: f64,
    /// The band runs into the upper end of the scanned range.
    pub truncated: bool,
}

impl Band {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    fn flat(k: f64) -> Self {
        Band {
            lo: k,
            hi: k,
            kind: BandKind::FlatPoint,
            edge_tol: 0.0,
            truncated: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ScanOptions {
    pub grid_points: usize,
    pub edge_tol: f64,
    pub max_iter: usize,
}

impl ScanOptions {
    /// Default density over a range of the given length.
    pub fn for_range(length: f64) -> Self {
        Self {
            grid_points: ((length * DEFAULT_POINTS_PER_UNIT).ceil() as usize).max(64),
            edge_tol: DEFAULT_EDGE_TOL,
            max_iter: MAX_BISECTIONS,
        }
    }

    pub fn with_grid(mut self, grid_points: usize) -> Self {
        self.grid_points = grid_points;
        self
    }

    pub fn with_edge_tol(mut self, edge_tol: f64) -> Self {
        self.edge_tol = edge_tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.grid_points < 2 {
            return Err(ChainError::Precondition("grid_points must be at least 2".into()));
        }
        if !(self.edge_tol > 0.0) {
            return Err(ChainError::Precondition("edge_tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct BandScan {
    pub bands: Vec<Band>,
    pub warnings: Vec<String>,
    pub grid_step: f64,
}

impl BandScan {
    pub fn contains(&self, x: f64) -> bool {
        self.bands.iter().any(|b| b.contains(x))
    }

    /// Total length of the bands clipped to `[lo, hi]`.
    pub fn covered_length(&self, lo: f64, hi: f64) -> f64 {
        self.bands
            .iter()
            .map(|b| (b.hi.min(hi) - b.lo.max(lo)).max(0.0))
            .sum()
    }
}

/// Bands of the positive spectrum for `k ∈ (0, k_max]`.
pub fn scan_bands(spec: &ChainSpec, k_max: f64, opts: &ScanOptions) -> Result<BandScan> {
    scan_bands_between(spec, 0.0, k_max, opts)
}

/// Bands of the positive spectrum for `k ∈ [k_lo, k_hi]` (`k_lo = 0` means
/// the open end at zero).
pub fn scan_bands_between(spec: &ChainSpec, k_lo: f64, k_hi: f64, opts: &ScanOptions) -> Result<BandScan> {
    if !(k_hi > k_lo) || k_lo < 0.0 {
        return Err(ChainError::Precondition(format!("empty momentum range [{k_lo}, {k_hi}]")));
    }
    let spec = *spec;
    scan_with(move |k| positive_at(&spec, k), k_lo, k_hi, opts, &[])
}

/// Scans an arbitrary coefficient function. `probes` are extra momenta
/// checked directly for flat points.
pub fn scan_with<F>(eval: F, lo: f64, hi: f64, opts: &ScanOptions, probes: &[f64]) -> Result<BandScan>
where
    F: Fn(f64) -> SpectralCoefficients + Sync + Send,
{
    opts.validate()?;
    let n = opts.grid_points;
    let h = (hi - lo) / n as f64;
    let node = |i: usize| -> f64 {
        if i == 0 {
            if lo == 0.0 {
                h * 1e-3
            } else {
                lo
            }
        } else if i == n {
            hi
        } else {
            lo + h * i as f64
        }
    };
    let samples: Vec<(f64, f64, f64)> = map_range(n + 1, |i| {
        let c = eval(node(i));
        (c.normalized_discriminant(), gap_margin(&c), c.c)
    });
    // Same test as the grid samples, so a bracket never has both ends inside.
    let inside = |x: f64| eval(x).normalized_discriminant() >= 0.0;
    let tol = opts.edge_tol;
    let iters = opts.max_iter;

    // Membership changes between neighboring nodes.
    let changes: Vec<usize> = (0..n)
        .filter(|&i| (samples[i].0 >= 0.0) != (samples[i + 1].0 >= 0.0))
        .collect();
    let mut transitions: Vec<Transition> = map_slice(&changes, |&i| {
        let (x0, x1) = (node(i), node(i + 1));
        let rising = samples[i + 1].0 >= 0.0;
        let (a, b) = bisect_predicate(&inside, x0, x1, tol, iters);
        Transition::new(a, b, rising)
    });

    // Features narrower than the grid step: local extrema of the margin
    // `|c| − √(a²+b²)` pointing the wrong way, and sign changes of c in gaps.
    let suspects: Vec<usize> = (1..n)
        .filter(|&i| {
            let (d0, d1, d2) = (samples[i - 1].0, samples[i].0, samples[i + 1].0);
            let (m0, m1, m2) = (samples[i - 1].1, samples[i].1, samples[i + 1].1);
            let all_out = d0 < 0.0 && d1 < 0.0 && d2 < 0.0;
            let all_in = d0 >= 0.0 && d1 >= 0.0 && d2 >= 0.0;
            (all_out && m1 <= m0 && m1 <= m2) || (all_in && m1 >= m0 && m1 >= m2)
        })
        .collect();
    let gap_c_changes: Vec<usize> = (0..n)
        .filter(|&i| samples[i].0 < 0.0 && samples[i + 1].0 < 0.0)
        .filter(|&i| {
            let (c0, c1) = (samples[i].2, samples[i + 1].2);
            c0 != 0.0 && c1 != 0.0 && c0.signum() != c1.signum()
        })
        .collect();
    let margin = |x: f64| gap_margin(&eval(x));
    let hidden: Vec<Hidden> = map_slice(&suspects, |&i| {
        let (x0, x2) = (node(i - 1), node(i + 1));
        if samples[i].0 < 0.0 {
            let (xm, _) = golden_min(&margin, x0, x2, tol * 1e-3, 200);
            let (xf, _) = golden_min(|x| flat_norm(&eval(x)), x0, x2, tol * 1e-3, 200);
            hidden_band(&inside, &eval, xm, xf, x0, x2, tol, iters)
        } else {
            let (xm, _) = golden_min(|x| -margin(x), x0, x2, tol * 1e-3, 200);
            if inside(xm) {
                Hidden::None
            } else {
                let (a0, a1) = bisect_predicate(&inside, x0, xm, tol, iters);
                let (b0, b1) = bisect_predicate(&inside, xm, x2, tol, iters);
                Hidden::Gap(Transition::new(a0, a1, false), Transition::new(b0, b1, true))
            }
        }
    });
    let from_c: Vec<Hidden> = map_slice(&gap_c_changes, |&i| {
        let (x0, x1) = (node(i), node(i + 1));
        match bisect_root(|x| eval(x).c, x0, x1, tol * 1e-3, 200) {
            Some(xc) => {
                let (xf, _) = golden_min(|x| flat_norm(&eval(x)), x0, x1, tol * 1e-3, 200);
                hidden_band(&inside, &eval, xc, xf, x0, x1, tol, iters)
            }
            None => Hidden::None,
        }
    });

    let mut flats: Vec<f64> = Vec::new();
    let mut warnings = Vec::new();
    let mut hidden_sites = Vec::new();
    for item in hidden.into_iter().chain(from_c) {
        match item {
            Hidden::None => {}
            Hidden::Flat(x) => flats.push(x),
            Hidden::Band(l, r) => {
                hidden_sites.push(l.at());
                transitions.push(l);
                transitions.push(r);
            }
            Hidden::Gap(l, r) => {
                hidden_sites.push(l.at());
                transitions.push(l);
                transitions.push(r);
            }
        }
    }
    for &p in probes {
        if p > lo && p <= hi && eval(p).is_flat() {
            flats.push(p);
        }
    }
    if !hidden_sites.is_empty() {
        hidden_sites.sort_by(f64::total_cmp);
        warnings.push(format!(
            "{} feature(s) narrower than the grid step {h:.3e} were resolved by local refinement \
             (first near {:.6}); rerun with more grid points to rule out others",
            hidden_sites.len(),
            hidden_sites[0]
        ));
    }

    let mut bands = assemble(transitions, samples[0].0 >= 0.0, samples[n].0 >= 0.0, node(0), lo, hi);
    bands = absorb_flats(bands, flats, &eval, tol);
    check_overlaps(&bands, &mut warnings);
    Ok(BandScan {
        bands,
        warnings,
        grid_step: h,
    })
}

/// `(|c| − √(a²+b²)) / scale`; negative inside bands.
pub fn gap_margin(c: &SpectralCoefficients) -> f64 {
    (c.c.abs() - c.amplitude()) / c.scale
}

/// `‖(a, b, c)‖ / scale`; zero exactly at flat points.
pub fn flat_norm(c: &SpectralCoefficients) -> f64 {
    (c.a.hypot(c.b)).hypot(c.c) / c.scale
}

#[derive(Debug, Clone, Copy)]
struct Transition {
    lo: f64,
    hi: f64,
    rising: bool,
}

impl Transition {
    fn new(a: f64, b: f64, rising: bool) -> Self {
        Self {
            lo: a.min(b),
            hi: a.max(b),
            rising,
        }
    }

    fn at(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

enum Hidden {
    None,
    Flat(f64),
    Band(Transition, Transition),
    Gap(Transition, Transition),
}

#[allow(clippy::too_many_arguments)]
fn hidden_band<P, F>(inside: &P, eval: &F, x_in: f64, x_flat: f64, lo: f64, hi: f64, tol: f64, iters: usize) -> Hidden
where
    P: Fn(f64) -> bool,
    F: Fn(f64) -> SpectralCoefficients,
{
    if eval(x_flat).is_flat() {
        return Hidden::Flat(x_flat);
    }
    if !inside(x_in) || inside(lo) || inside(hi) {
        return Hidden::None;
    }
    let (a0, a1) = bisect_predicate(inside, lo, x_in, tol, iters);
    let (b0, b1) = bisect_predicate(inside, x_in, hi, tol, iters);
    Hidden::Band(Transition::new(a0, a1, true), Transition::new(b0, b1, false))
}

fn assemble(mut transitions: Vec<Transition>, start_in: bool, end_in: bool, first: f64, lo: f64, hi: f64) -> Vec<Band> {
    transitions.sort_by(|a, b| a.at().total_cmp(&b.at()));
    let mut bands = Vec::new();
    let mut open: Option<(f64, f64)> = if start_in { Some((if lo == 0.0 { 0.0 } else { first }, 0.0)) } else { None };
    for t in transitions {
        match (t.rising, open) {
            (true, None) => open = Some((t.at(), t.width())),
            (false, Some((start, w))) => {
                bands.push(Band {
                    lo: start,
                    hi: t.at(),
                    kind: BandKind::Continuous,
                    edge_tol: w.max(t.width()),
                    truncated: false,
                });
                open = None;
            }
            // Duplicate detections of the same edge.
            _ => {}
        }
    }
    if let Some((start, w)) = open {
        bands.push(Band {
            lo: start,
            hi,
            kind: BandKind::Continuous,
            edge_tol: w,
            truncated: end_in,
        });
    }
    bands
}

fn absorb_flats<F>(bands: Vec<Band>, flats: Vec<f64>, eval: &F, tol: f64) -> Vec<Band>
where
    F: Fn(f64) -> SpectralCoefficients,
{
    let mut out: Vec<Band> = Vec::with_capacity(bands.len() + flats.len());
    for b in bands {
        let tiny = b.width() <= FLAT_WIDTH_FACTOR * tol.max(b.edge_tol);
        if tiny {
            let (x, _) = golden_min(|x| flat_norm(&eval(x)), b.lo - tol, b.hi + tol, tol * 1e-3, 200);
            if eval(x).is_flat() {
                out.push(Band::flat(x));
                continue;
            }
        }
        out.push(b);
    }
    for f in flats {
        let covered = out
            .iter()
            .any(|b| b.lo - 1e-9 <= f && f <= b.hi + 1e-9);
        if !covered {
            out.push(Band::flat(f));
        }
    }
    out.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    out.dedup_by(|b, a| b.kind == BandKind::FlatPoint && a.kind == BandKind::FlatPoint && (b.lo - a.lo).abs() < 1e-9);
    out
}

fn check_overlaps(bands: &[Band], warnings: &mut Vec<String>) {
    for w in bands.windows(2) {
        if w[1].lo < w[0].hi {
            warnings.push(format!(
                "edges near {:.6} could not be separated at this resolution; refine the grid",
                w[1].lo
            ));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn bands_are_sorted_disjoint_and_in_spectrum() {
        let spec = ChainSpec::loose(1.0, 2.0, 1.3, 0.2).unwrap();
        let scan = scan_bands(&spec, 6.0, &ScanOptions::for_range(6.0)).unwrap();
        assert!(!scan.bands.is_empty());
        for w in scan.bands.windows(2) {
            assert!(w[0].hi < w[1].lo);
        }
        for b in &scan.bands {
            assert!(b.lo <= b.hi && b.edge_tol <= DEFAULT_EDGE_TOL);
            if b.width() > 1e-6 {
                assert!(positive_at(&spec, b.center()).discriminant() >= 0.0);
            }
        }
    }

    #[test]
    fn short_range_below_first_band_is_empty() {
        let spec = ChainSpec::tight(1.0, 2.0, 0.5).unwrap();
        // For half-integer flux the tight chain has a gap right above zero.
        let scan = scan_bands(&spec, 0.05, &ScanOptions::for_range(0.05)).unwrap();
        assert!(positive_at(&spec, 0.01).discriminant() < 0.0);
        assert!(scan.bands.is_empty(), "{:?}", scan.bands);
    }

    #[test]
    fn edge_on_a_grid_node() {
        // k = 3 − A is a band edge and lands exactly on node 11200, where
        // the raw and normalized discriminants round to opposite signs.
        let spec = ChainSpec::tight(1.0, TAU / 80.0, 0.2).unwrap();
        let scan = scan_bands(&spec, 3.0, &ScanOptions::for_range(3.0).with_grid(12000)).unwrap();
        let last = scan.bands.last().unwrap();
        assert!((last.lo - 2.8).abs() < 1e-9, "{last:?}");
    }

    #[test]
    fn finds_fig2_flat_point() {
        let spec = ChainSpec::loose(1.0, TAU / 3.0, 2.0, 0.5).unwrap();
        let scan = scan_bands(&spec, 2.0, &ScanOptions::for_range(2.0)).unwrap();
        let flat: Vec<_> = scan.bands.iter().filter(|b| b.kind == BandKind::FlatPoint).collect();
        assert_eq!(flat.len(), 1, "{:?}", scan.bands);
        assert!((flat[0].lo - 1.5).abs() < 1e-9);
    }

    #[test]
    fn coarse_grid_still_catches_narrow_bands() {
        let spec = ChainSpec::loose(1.0, 1.9, PI / 3.0, 0.2).unwrap();
        let fine = scan_bands(&spec, 5.0, &ScanOptions::for_range(5.0)).unwrap();
        let coarse = scan_bands(&spec, 5.0, &ScanOptions::for_range(5.0).with_grid(400)).unwrap();
        let count = |s: &BandScan| s.bands.iter().filter(|b| b.width() > 1e-9).count();
        assert_eq!(count(&fine), count(&coarse));
        for (f, c) in fine.bands.iter().zip(&coarse.bands) {
            assert!((f.lo - c.lo).abs() < 1e-8 && (f.hi - c.hi).abs() < 1e-8);
        }
    }
}
