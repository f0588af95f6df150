//! Continued fractions, rational recognition, and lengths written as
//! rational multiples of π.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ChainError;

/// Largest denominator accepted when recognizing a float as a rational.
pub const MAX_DENOMINATOR: u64 = 1_000_000;
/// Match tolerance of the recognition.
pub const MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ratio {
    pub num: i64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let g = gcd(num.unsigned_abs(), den).max(1);
        Self {
            num: num / g as i64,
            den: den / g,
        }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Partial quotients of `x`, at most `max_terms` of them.
pub fn continued_fraction(x: f64, max_terms: usize) -> Vec<i64> {
    let mut terms = Vec::new();
    let mut y = x;
    for _ in 0..max_terms {
        if !y.is_finite() || y.abs() > 1e15 {
            break;
        }
        let a = y.floor();
        terms.push(a as i64);
        let frac = y - a;
        if frac.abs() < 1e-15 {
            break;
        }
        y = 1.0 / frac;
    }
    terms
}

/// Convergents `p/q` of the partial quotients.
pub fn convergents(terms: &[i64]) -> Vec<Ratio> {
    let (mut p0, mut q0, mut p1, mut q1) = (1i128, 0i128, 0i128, 1i128);
    let mut out = Vec::new();
    for &a in terms {
        let a = i128::from(a);
        let p = a * p0 + p1;
        let q = a * q0 + q1;
        if q > i128::from(i64::MAX) || p.abs() > i128::from(i64::MAX) {
            break;
        }
        p1 = p0;
        q1 = q0;
        p0 = p;
        q0 = q;
        out.push(Ratio::new(p as i64, q as u64));
    }
    out
}

/// The first convergent of `x` with denominator at most `max_den` that
/// matches `x` within `tol` (relative to `max(1, |x|)`).
pub fn recognize(x: f64, max_den: u64, tol: f64) -> Option<Ratio> {
    let bound = tol * x.abs().max(1.0);
    convergents(&continued_fraction(x, 64))
        .into_iter()
        .take_while(|r| r.den <= max_den)
        .find(|r| (r.value() - x).abs() <= bound)
}

/// Recognize `x/(2π)` as a rational with the default bounds.
pub fn recognize_over_two_pi(x: f64) -> Option<Ratio> {
    recognize(x / (2.0 * PI), MAX_DENOMINATOR, MATCH_TOL)
}

/// A length given either as a plain decimal or as `(p/q)·π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Length {
    pub value: f64,
    /// Exact coefficient of π when the input was written that way.
    pub pi_multiple: Option<Ratio>,
}

impl Length {
    pub fn plain(value: f64) -> Self {
        Self {
            value,
            pi_multiple: None,
        }
    }

    pub fn pi_times(r: Ratio) -> Self {
        Self {
            value: r.num as f64 * PI / r.den as f64,
            pi_multiple: Some(r),
        }
    }
}

impl FromStr for Length {
    type Err = ChainError;

    /// Accepts `1.25`, `pi`, `2pi/3`, `2*pi/3`, `-pi/5`, `3pi`, `sqrt2`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ChainError::Precondition(format!("cannot parse length {s:?}"));
        let t: String = s.trim().to_ascii_lowercase().chars().filter(|c| *c != ' ').collect();
        if let Some(rest) = t.strip_prefix("sqrt") {
            let v: f64 = rest.parse().map_err(|_| bad())?;
            return Ok(Length::plain(v.sqrt()));
        }
        let Some(pos) = t.find("pi") else {
            return t.parse::<f64>().map(Length::plain).map_err(|_| bad());
        };
        let head = t[..pos].trim_end_matches('*');
        let tail = &t[pos + 2..];
        let num: i64 = match head {
            "" | "+" => 1,
            "-" => -1,
            h => h.parse().map_err(|_| bad())?,
        };
        let den: u64 = match tail {
            "" => 1,
            d => d.strip_prefix('/').ok_or_else(bad)?.parse().map_err(|_| bad())?,
        };
        if den == 0 {
            return Err(bad());
        }
        Ok(Length::pi_times(Ratio::new(num, den)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_of_sqrt2() {
        let cf = continued_fraction(2f64.sqrt(), 8);
        assert_eq!(cf[..6], [1, 2, 2, 2, 2, 2]);
        let conv = convergents(&cf);
        assert_eq!(conv[2], Ratio::new(7, 5));
        assert_eq!(conv[4], Ratio::new(41, 29));
    }

    #[test]
    fn recognizes_thirds_of_two_pi() {
        let l = 2.0 * PI / 3.0;
        assert_eq!(recognize_over_two_pi(l), Some(Ratio::new(1, 3)));
        assert_eq!(recognize_over_two_pi(4.0 * PI), Some(Ratio::new(2, 1)));
        assert_eq!(recognize_over_two_pi(2f64.sqrt()), None);
    }

    #[test]
    fn parses_pi_multiples() {
        let l: Length = "2pi/3".parse().unwrap();
        assert_eq!(l.pi_multiple, Some(Ratio::new(2, 3)));
        assert!((l.value - 2.0 * PI / 3.0).abs() < 1e-15);
        let l: Length = "2*pi/6".parse().unwrap();
        assert_eq!(l.pi_multiple, Some(Ratio::new(1, 3)));
        let l: Length = "-pi".parse().unwrap();
        assert_eq!(l.value, -PI);
        let l: Length = "1.0472".parse().unwrap();
        assert_eq!(l.pi_multiple, None);
        assert!("pi/0".parse::<Length>().is_err());
        assert!("x".parse::<Length>().is_err());
        let l: Length = "sqrt2".parse().unwrap();
        assert_eq!(l.value, 2f64.sqrt());
    }
}
