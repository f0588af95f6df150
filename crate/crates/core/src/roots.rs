//! Bracketing root and minimum searches used throughout the crate.

/// Golden-section ratio `(√5 − 1)/2`.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Narrow `[lo, hi]` around the point where `inside` flips, given
/// `inside(lo) != inside(hi)`. Stops when the bracket is shorter than `tol`
/// or after `max_iter` halvings. Returns the final bracket.
pub fn bisect_predicate<F>(inside: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> (f64, f64)
where
    F: Fn(f64) -> bool,
{
    let at_lo = inside(lo);
    for _ in 0..max_iter {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        if inside(mid) == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Bisection for a sign change of `f` on `[lo, hi]`. Returns `None` when the
/// endpoints do not bracket a root.
pub fn bisect_root<F>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Option<f64>
where
    F: Fn(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return None;
    }
    for _ in 0..max_iter {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`.
pub fn golden_min<F>(f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..max_iter {
        if (hi - lo).abs() <= tol {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Sign changes of `f` on a uniform grid of `samples` cells over `[lo, hi)`,
/// each refined by bisection to `tol`. Exact zeros at grid nodes count once.
pub fn grid_roots<F>(f: F, lo: f64, hi: f64, samples: usize, tol: f64) -> Vec<f64>
where
    F: Fn(f64) -> f64,
{
    let h = (hi - lo) / samples as f64;
    let mut roots = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(x0);
    if f0 == 0.0 {
        roots.push(x0);
    }
    for i in 1..=samples {
        let x1 = if i == samples { hi } else { lo + h * i as f64 };
        let f1 = f(x1);
        if f1 == 0.0 {
            if i < samples {
                roots.push(x1);
            }
        } else if f0 != 0.0 && f0.signum() != f1.signum() {
            if let Some(r) = bisect_root(&f, x0, x1, tol, 200) {
                roots.push(r);
            }
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predicate_bisection_finds_threshold() {
        let (lo, hi) = bisect_predicate(|x| x > 0.3, 0.0, 1.0, 1e-12, 100);
        assert!(lo <= 0.3 && hi >= 0.3 && hi - lo <= 1e-12);
    }

    #[test]
    fn root_bisection() {
        let r = bisect_root(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).is_none());
    }

    #[test]
    fn golden_section_on_v_shape() {
        let (x, fx) = golden_min(|x| (x - 0.123_456_789).abs(), 0.0, 1.0, 1e-15, 200);
        assert!((x - 0.123_456_789).abs() < 1e-14, "{x}");
        assert!(fx < 1e-14);
    }

    #[test]
    fn grid_roots_of_sine() {
        let r = grid_roots(|x| (std::f64::consts::PI * x).sin(), 0.5, 4.5, 400, 1e-14);
        assert_eq!(r.len(), 4);
        for (i, x) in r.iter().enumerate() {
            assert!((x - (i + 1) as f64).abs() < 1e-12);
        }
    }
}
