//! Products of hyperbolic functions multiplied by `e^{−shift}`.
//!
//! Negative-energy coefficients contain terms like `cosh κℓ₂ · sinh κ(ℓ₁+ℓ₃)`
//! which overflow long before the discriminant's sign becomes uninteresting.
//! Every product is expanded into exponentials and the common factor
//! `e^{−shift}` is folded into each exponent, so nothing larger than the
//! largest exponent ever gets materialized.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Hyp {
    Sinh,
    Cosh,
}

/// `sinh(x) · e^{−shift}`.
pub(crate) fn sinh_s(x: f64, shift: f64) -> f64 {
    product(&[(Hyp::Sinh, x)], shift)
}

/// `cosh(x) · e^{−shift}`.
pub(crate) fn cosh_s(x: f64, shift: f64) -> f64 {
    product(&[(Hyp::Cosh, x)], shift)
}

/// `Π fᵢ(xᵢ) · e^{−shift}` evaluated as a signed sum of single exponentials.
pub(crate) fn product(factors: &[(Hyp, f64)], shift: f64) -> f64 {
    let n = factors.len();
    debug_assert!(n <= 4);
    let mut sum = 0.0;
    for mask in 0..(1u32 << n) {
        let mut exponent = -shift;
        let mut sign = 1.0;
        for (i, &(kind, x)) in factors.iter().enumerate() {
            if mask & (1 << i) == 0 {
                exponent += x;
            } else {
                exponent -= x;
                if kind == Hyp::Sinh {
                    sign = -sign;
                }
            }
        }
        sum += sign * exponent.exp();
    }
    sum / f64::from(1u32 << n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_evaluation() {
        let (x, y) = (1.3, -0.7);
        assert!((sinh_s(x, 0.0) - x.sinh()).abs() < 1e-15);
        assert!((cosh_s(y, 0.0) - y.cosh()).abs() < 1e-15);
        let p = product(&[(Hyp::Sinh, x), (Hyp::Cosh, y)], 0.5);
        assert!((p - x.sinh() * y.cosh() * (-0.5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn survives_huge_arguments() {
        // cosh(800) overflows, cosh(800)·e^{-800} does not.
        let v = cosh_s(800.0, 800.0);
        assert!((v - 0.5).abs() < 1e-15);
        let p = product(&[(Hyp::Cosh, 500.0), (Hyp::Sinh, 400.0)], 900.0);
        assert!((p - 0.25).abs() < 1e-15);
    }
}
