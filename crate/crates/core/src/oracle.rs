//! Independent check of the closed-form coefficients: the 12×12 linear
//! system for the wavefunction amplitudes on one period of the loose chain.
//!
//! Unknowns are ordered `(a₁⁺, a₁⁻, a₂⁺, a₂⁻, a₃⁺, a₃⁻, b₁⁺, …, b₃⁻)`, where
//! `a` lives on the left half of the cell and `b` on the right half. Index 1
//! is the connecting link, 2 the upper arc (potential `−A`), 3 the lower arc
//! (potential `+A`). The determinant is a polynomial of degree at most four
//! in `z = e^{iθ}`, which makes its θ-roots exactly computable.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chain::{wrap_angle, Branch, ChainSpec, SpectralPoint, Variant};
use crate::error::{ChainError, Result};
use crate::model::{coefficients_raw, dispersion_theta, ThetaSolutions};

pub const DIM: usize = 12;
type Row = [Complex64; DIM];
type Matrix = [Row; DIM];

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone)]
pub struct CellSystem {
    pub matrix: Matrix,
    pub spec: ChainSpec,
    /// Complex momentum: `k` on the positive branch, `iκ` on the negative one.
    pub momentum: Complex64,
    pub theta: f64,
}

/// Determinant together with the product of the row norms, so that
/// `value / scale` is a scale-free quantity bounded by 1 in modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledDeterminant {
    pub value: Complex64,
    pub scale: f64,
}

impl ScaledDeterminant {
    pub fn relative(&self) -> Complex64 {
        if self.scale == 0.0 {
            ZERO
        } else {
            self.value / self.scale
        }
    }
}

#[derive(Clone, Copy)]
enum Half {
    A,
    B,
}

#[derive(Clone, Copy)]
enum Edge {
    Link = 0,
    Upper = 1,
    Lower = 2,
}

struct Builder {
    k: Complex64,
    flux: f64,
}

impl Builder {
    fn column(half: Half, edge: Edge, plus: bool) -> usize {
        let base = match half {
            Half::A => 0,
            Half::B => 6,
        };
        base + 2 * edge as usize + usize::from(!plus)
    }

    fn gauge(&self, edge: Edge, x: f64) -> Complex64 {
        let phase = match edge {
            Edge::Link => 0.0,
            Edge::Upper => -self.flux * x,
            Edge::Lower => self.flux * x,
        };
        Complex64::from_polar(1.0, phase)
    }

    /// Row vector of the function value at `x`.
    fn value(&self, half: Half, edge: Edge, x: f64) -> Row {
        let mut r = [ZERO; DIM];
        let g = self.gauge(edge, x);
        r[Self::column(half, edge, true)] = (I * self.k * x).exp() * g;
        r[Self::column(half, edge, false)] = (-I * self.k * x).exp() * g;
        r
    }

    /// Row vector of the covariant derivative at `x`; the gauge factor's own
    /// derivative cancels against the potential term.
    fn derivative(&self, half: Half, edge: Edge, x: f64) -> Row {
        let mut r = [ZERO; DIM];
        let g = self.gauge(edge, x);
        r[Self::column(half, edge, true)] = I * self.k * (I * self.k * x).exp() * g;
        r[Self::column(half, edge, false)] = -I * self.k * (-I * self.k * x).exp() * g;
        r
    }
}

fn combine(terms: &[(Complex64, Row)]) -> Row {
    let mut out = [ZERO; DIM];
    for (w, row) in terms {
        for (o, v) in out.iter_mut().zip(row.iter()) {
            *o += w * v;
        }
    }
    out
}

/// Builds the system at `point` and quasimomentum `theta` for a loose chain,
/// using the raw (unfolded) flux.
pub fn build_cell_system(spec: &ChainSpec, point: &SpectralPoint, theta: f64) -> Result<CellSystem> {
    if spec.variant() != Variant::Loose {
        return Err(ChainError::WrongVariant {
            expected: "loose",
            found: spec.variant(),
        });
    }
    let momentum = match point.branch() {
        Branch::Positive => Complex64::new(point.momentum(), 0.0),
        Branch::Negative => Complex64::new(0.0, point.momentum()),
    };
    let bld = Builder {
        k: momentum,
        flux: spec.flux(),
    };
    let (l1, l2, l3) = (spec.l1(), spec.l2(), spec.l3());
    let h = 0.5 * l1;
    let il = I * spec.ell();
    let one = Complex64::new(1.0, 0.0);
    let e = Complex64::from_polar(1.0, theta);
    use Edge::*;
    use Half::*;
    let (v, d) = (|hf, ed, x| bld.value(hf, ed, x), |hf, ed, x| bld.derivative(hf, ed, x));

    let rows: Matrix = [
        // Floquet matching of the arcs across the cell boundary.
        combine(&[(one, v(A, Upper, l2 / 2.0)), (-e, v(B, Upper, -l2 / 2.0))]),
        combine(&[(one, d(A, Upper, l2 / 2.0)), (-e, d(B, Upper, -l2 / 2.0))]),
        combine(&[(one, v(A, Lower, l3 / 2.0)), (-e, v(B, Lower, -l3 / 2.0))]),
        combine(&[(one, d(A, Lower, l3 / 2.0)), (-e, d(B, Lower, -l3 / 2.0))]),
        // Smooth continuation at the link midpoint.
        combine(&[(one, v(A, Link, 0.0)), (-one, v(B, Link, 0.0))]),
        combine(&[(one, d(A, Link, 0.0)), (-one, d(B, Link, 0.0))]),
        // Left vertex: link end at x = ℓ₁/2, arcs at x = 0.
        combine(&[
            (one, v(A, Lower, 0.0)),
            (-one, v(A, Link, h)),
            (il, d(A, Lower, 0.0)),
            (-il, d(A, Link, h)),
        ]),
        combine(&[
            (one, v(A, Upper, 0.0)),
            (-one, v(A, Lower, 0.0)),
            (il, d(A, Upper, 0.0)),
            (il, d(A, Lower, 0.0)),
        ]),
        combine(&[
            (one, v(A, Link, h)),
            (-one, v(A, Upper, 0.0)),
            (il, d(A, Upper, 0.0)),
            (-il, d(A, Link, h)),
        ]),
        // Right vertex: link end at x = −ℓ₁/2, arcs at x = 0.
        combine(&[
            (one, v(B, Upper, 0.0)),
            (-one, v(B, Link, -h)),
            (il, d(B, Link, -h)),
            (-il, d(B, Upper, 0.0)),
        ]),
        combine(&[
            (one, v(B, Lower, 0.0)),
            (-one, v(B, Upper, 0.0)),
            (-il, d(B, Upper, 0.0)),
            (-il, d(B, Lower, 0.0)),
        ]),
        combine(&[
            (one, v(B, Link, -h)),
            (-one, v(B, Lower, 0.0)),
            (il, d(B, Link, -h)),
            (-il, d(B, Lower, 0.0)),
        ]),
    ];
    Ok(CellSystem {
        matrix: rows,
        spec: *spec,
        momentum,
        theta,
    })
}

/// Determinant by LU factorization with partial pivoting.
pub fn determinant(system: &CellSystem) -> ScaledDeterminant {
    let scale = system
        .matrix
        .iter()
        .map(|row| row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .product();
    ScaledDeterminant {
        value: lu_determinant(system.matrix),
        scale,
    }
}

pub fn lu_determinant<const N: usize>(mut m: [[Complex64; N]; N]) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap_or(col);
        if m[pivot][col].norm() == 0.0 {
            return ZERO;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for r in col + 1..N {
            let f = m[r][col] / p;
            if f == ZERO {
                continue;
            }
            for c in col..N {
                let s = m[col][c];
                m[r][c] -= f * s;
            }
        }
    }
    det
}

/// Highest power of `e^{iθ}` that can appear: four Floquet rows are affine in it.
const DEGREE: usize = 4;
/// Number of θ samples used to recover the polynomial coefficients.
const SAMPLES: usize = 16;

/// Coefficients `p₀..p₄` of `det/scale` as a polynomial in `z = e^{iθ}`.
pub fn theta_polynomial(spec: &ChainSpec, point: &SpectralPoint) -> Result<[Complex64; DEGREE + 1]> {
    let values: Vec<Complex64> = (0..SAMPLES)
        .map(|j| {
            let theta = TAU * j as f64 / SAMPLES as f64;
            build_cell_system(spec, point, theta).map(|s| determinant(&s).relative())
        })
        .collect::<Result<_>>()?;
    let mut p = [ZERO; DEGREE + 1];
    for (m, pm) in p.iter_mut().enumerate() {
        let mut acc = ZERO;
        for (j, v) in values.iter().enumerate() {
            acc += v * Complex64::from_polar(1.0, -TAU * (m * j) as f64 / SAMPLES as f64);
        }
        *pm = acc / SAMPLES as f64;
    }
    Ok(p)
}

/// Tolerances of the θ-root extraction.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RootTolerances {
    /// A polynomial whose coefficients all fall below this (relative to the
    /// row-norm scale) is treated as identically zero.
    pub vanishing: f64,
    /// Coefficients below this fraction of the largest one are dropped.
    pub negligible: f64,
    /// Roots with `| |z| − 1 |` below this are on the unit circle.
    pub unit_circle: f64,
    /// Roots closer than this (in θ) merge into one.
    pub merge: f64,
}

impl Default for RootTolerances {
    fn default() -> Self {
        Self {
            vanishing: 1e-9,
            negligible: 1e-11,
            unit_circle: 1e-6,
            merge: 1e-6,
        }
    }
}

/// θ-solutions of `det = 0`, classified like [`dispersion_theta`].
pub fn determinant_theta_roots(
    spec: &ChainSpec,
    point: &SpectralPoint,
    tol: &RootTolerances,
) -> Result<ThetaSolutions> {
    let p = theta_polynomial(spec, point)?;
    let biggest = p.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if biggest < tol.vanishing {
        return Ok(ThetaSolutions::All);
    }
    let cut = tol.negligible * biggest;
    let lo = p.iter().position(|z| z.norm() > cut).unwrap_or(0);
    let hi = p.iter().rposition(|z| z.norm() > cut).unwrap_or(0);
    let roots = polynomial_roots(&p[lo..=hi]);
    let mut thetas: Vec<f64> = roots
        .iter()
        .filter(|z| (z.norm() - 1.0).abs() < tol.unit_circle)
        .map(|z| wrap_angle(z.arg()))
        .collect();
    thetas.sort_by(f64::total_cmp);
    let mut merged: Vec<f64> = Vec::new();
    for t in thetas {
        match merged.last() {
            Some(&prev) if wrap_angle(t - prev).abs() < tol.merge => {}
            _ => merged.push(t),
        }
    }
    if merged.len() >= 2 {
        let (first, last) = (merged[0], *merged.last().unwrap());
        if wrap_angle(last - first).abs() < tol.merge {
            merged.pop();
        }
    }
    Ok(match merged.as_slice() {
        [] => ThetaSolutions::Empty,
        [t] => ThetaSolutions::One(*t),
        [s, t] => ThetaSolutions::Two(*s, *t),
        _ => {
            return Err(ChainError::CrossCheck(format!(
                "determinant has {} unit-circle roots in θ",
                merged.len()
            )))
        }
    })
}

/// Roots of `Σ cᵢ zⁱ` by Durand–Kerner iteration followed by Newton polishing.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = coeffs[n];
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(ZERO, |acc, c| acc * z + c);
    let deriv = |z: Complex64| {
        (1..=n)
            .rev()
            .fold(ZERO, |acc, i| acc * z + monic[i] * i as f64)
    };
    let radius = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = Complex64::from_polar(0.9 * radius.min(4.0), 0.4);
    let mut z: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32 + 1)).collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den == ZERO {
                den = Complex64::new(1e-300, 0.0);
            }
            let step = eval(z[i]) / den;
            z[i] -= step;
            moved = moved.max(step.norm() / z[i].norm().max(1.0));
        }
        if moved < 1e-16 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let d = deriv(*r);
            if d.norm() == 0.0 {
                break;
            }
            let next = *r - eval(*r) / d;
            if !next.re.is_finite() || !next.im.is_finite() {
                break;
            }
            if eval(next).norm() >= eval(*r).norm() {
                break;
            }
            *r = next;
        }
    }
    z
}

/// One random sample of the equivalence sweep.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OracleSample {
    pub spec: ChainSpec,
    pub point: SpectralPoint,
}

/// Seeded random loose-chain samples on the positive branch.
pub fn random_samples(count: usize, seed: u64) -> Vec<OracleSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let ell = rng.gen_range(0.3..2.0);
            let l1 = rng.gen_range(0.2..5.0);
            let l3 = rng.gen_range(0.2..TAU - 0.2);
            let flux = rng.gen_range(-1.0..2.0);
            let k = rng.gen_range(0.05..6.0);
            OracleSample {
                spec: ChainSpec::loose(ell, l1, l3, flux).expect("sampled geometry is valid"),
                point: SpectralPoint::positive(k).expect("sampled momentum is positive"),
            }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Disagreement {
    pub sample: OracleSample,
    pub oracle: ThetaSolutions,
    pub formula: ThetaSolutions,
    pub location_error: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub samples: usize,
    pub roots_compared: usize,
    pub all_theta_samples: usize,
    pub max_location_error: f64,
    /// Largest relative spread, over random θ at one sample, of
    /// `det / (e^{2iθ}(a cos θ + b sin θ − c))`; zero when the two sides are
    /// proportional with a θ-independent factor.
    pub max_ratio_spread: f64,
    pub failures: Vec<Disagreement>,
    pub tolerance: f64,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Compares the determinant's θ-roots with [`dispersion_theta`] on each
/// sample, and estimates the proportionality between the two sides at
/// `theta_samples` random quasimomenta per sample.
pub fn equivalence_report(
    samples: &[OracleSample],
    theta_samples: usize,
    tolerance: f64,
    seed: u64,
) -> Result<EquivalenceReport> {
    let mut report = EquivalenceReport {
        tolerance,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_7e7a);
    let roots_tol = RootTolerances::default();
    for sample in samples {
        report.samples += 1;
        let coeffs = coefficients_raw(&sample.spec, &sample.point);
        let formula = dispersion_theta(&coeffs);
        let oracle = determinant_theta_roots(&sample.spec, &sample.point, &roots_tol)?;
        let location_error = match (&oracle, &formula) {
            (ThetaSolutions::All, ThetaSolutions::All) => {
                report.all_theta_samples += 1;
                Some(0.0)
            }
            (ThetaSolutions::Empty, ThetaSolutions::Empty) => Some(0.0),
            (o, f) if o.count() == f.count() => Some(
                o.values()
                    .iter()
                    .zip(f.values())
                    .map(|(x, y)| wrap_angle(x - y).abs())
                    .fold(0.0, f64::max),
            ),
            _ => None,
        };
        report.roots_compared += formula.values().len();
        match location_error {
            Some(err) if err <= tolerance => {
                report.max_location_error = report.max_location_error.max(err);
            }
            other => report.failures.push(Disagreement {
                sample: *sample,
                oracle,
                formula,
                location_error: other.unwrap_or(f64::INFINITY),
            }),
        }
        if theta_samples > 0 && !coeffs.is_flat() {
            let ratios: Vec<Complex64> = (0..theta_samples)
                .filter_map(|_| {
                    let theta = rng.gen_range(-PI..PI);
                    let delta = coeffs.residual(theta);
                    if delta.abs() < 1e-6 * coeffs.scale {
                        return None;
                    }
                    let sys = build_cell_system(&sample.spec, &sample.point, theta).ok()?;
                    let det = determinant(&sys).value;
                    Some(det / (Complex64::from_polar(1.0, 2.0 * theta) * delta))
                })
                .collect();
            if let Some(first) = ratios.first() {
                let spread = ratios
                    .iter()
                    .map(|r| (r - first).norm() / first.norm().max(f64::MIN_POSITIVE))
                    .fold(0.0, f64::max);
                report.max_ratio_spread = report.max_ratio_spread.max(spread);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2_flat() -> (ChainSpec, SpectralPoint) {
        let spec = ChainSpec::loose(1.0, TAU / 3.0, 2.0, 0.5).unwrap();
        (spec, SpectralPoint::positive(1.5).unwrap())
    }

    #[test]
    fn lu_of_small_matrices() {
        let m = [
            [Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0)],
            [Complex64::new(4.0, 0.0), Complex64::new(3.0, 0.0)],
        ];
        assert!((lu_determinant(m) - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        assert_eq!(lu_determinant([[ZERO; 3]; 3]), ZERO);
    }

    #[test]
    fn flat_point_annihilates_determinant() {
        let (spec, point) = fig2_flat();
        for theta in [0.0, 1.0, 2.5] {
            let sys = build_cell_system(&spec, &point, theta).unwrap();
            assert!(sys.matrix.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite()));
            let d = determinant(&sys);
            assert!(d.relative().norm() < 1e-8, "{:?}", d.relative());
        }
        let roots = determinant_theta_roots(&spec, &point, &RootTolerances::default()).unwrap();
        assert_eq!(roots, ThetaSolutions::All);
    }

    #[test]
    fn determinant_vanishes_at_dispersion_roots() {
        let spec = ChainSpec::loose(0.8, 1.7, 2.4, 0.31).unwrap();
        let mut checked = 0;
        for i in 1..200 {
            let point = SpectralPoint::positive(0.03 * i as f64).unwrap();
            let coeffs = coefficients_raw(&spec, &point);
            for t in dispersion_theta(&coeffs).values() {
                let on = determinant(&build_cell_system(&spec, &point, t).unwrap()).relative();
                let off = determinant(&build_cell_system(&spec, &point, t + 0.3).unwrap()).relative();
                assert!(on.norm() < 1e-9 * off.norm().max(1e-3), "{on} {off}");
                checked += 1;
            }
        }
        assert!(checked > 20);
    }

    #[test]
    fn polynomial_roots_of_known_quadratic() {
        // (z − 2)(z + i) = z² + (i − 2) z − 2i
        let c = [Complex64::new(0.0, -2.0), Complex64::new(-2.0, 1.0), Complex64::new(1.0, 0.0)];
        let mut r = polynomial_roots(&c);
        r.sort_by(|x, y| x.re.total_cmp(&y.re));
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn flux_shift_moves_roots_by_the_upper_arc() {
        let spec = ChainSpec::loose(1.1, 0.9, 2.2, 0.27).unwrap();
        let shifted = spec.with_flux(1.27).unwrap();
        for i in 1..60 {
            let point = SpectralPoint::positive(0.1 * i as f64).unwrap();
            for theta in [-2.0, 0.4, 1.9] {
                let d0 = determinant(&build_cell_system(&spec, &point, theta).unwrap());
                let d1 = determinant(&build_cell_system(&shifted, &point, theta - spec.l2()).unwrap());
                let (m0, m1) = (d0.relative().norm(), d1.relative().norm());
                assert!((m0 - m1).abs() <= 1e-8 * m0.max(1e-12), "{m0} {m1}");
            }
        }
    }

    #[test]
    fn rejects_degenerate_variants() {
        let spec = ChainSpec::tight(1.0, 2.0, 0.3).unwrap();
        assert!(build_cell_system(&spec, &SpectralPoint::positive(1.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn negative_branch_roots_agree() {
        let spec = ChainSpec::loose(1.0, 1.2, 1.3, 0.5).unwrap();
        for i in 1..40 {
            let point = SpectralPoint::negative(0.05 * i as f64).unwrap();
            let f = dispersion_theta(&coefficients_raw(&spec, &point));
            let o = determinant_theta_roots(&spec, &point, &RootTolerances::default()).unwrap();
            assert_eq!(f.count(), o.count(), "κ = {}", point.momentum());
        }
    }

    #[test]
    fn small_equivalence_sweep() {
        let samples = random_samples(50, 7);
        let r = equivalence_report(&samples, 4, 1e-7, 7).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        assert!(r.max_ratio_spread < 1e-6, "{}", r.max_ratio_spread);
        assert!(equivalence_report(&[], 4, 1e-7, 7).unwrap().passed());
    }
}
