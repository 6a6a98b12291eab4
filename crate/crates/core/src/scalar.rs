//! Scalar fields used throughout the crate.
//!
//! Everything that can stay real stays in exact rational arithmetic. Complex
//! floats only appear for irreducible characters whose values are not `±1`.

use std::fmt;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

use crate::linalg::{self, Matrix};

pub type Rational = BigRational;

/// Builds a rational from an integer.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `"p"` or `"p/q"`.
pub fn rational_to_string(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"p"`, `"-p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => BigInt::from_str(s).ok().map(Rational::from_integer),
    }
}

/// The root of unity `exp(2πi · num / den)`, kept in lowest terms with
/// `0 <= num < den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "root of unity with zero denominator");
        let num = num.rem_euclid(den as i64) as u64;
        let g = num.gcd(&den);
        if num == 0 {
            Self { num: 0, den: 1 }
        } else {
            Self {
                num: num / g,
                den: den / g,
            }
        }
    }

    pub fn one() -> Self {
        Self { num: 0, den: 1 }
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn inverse(&self) -> Self {
        Self::new(-(self.num as i64), self.den)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let den = self.den.lcm(&other.den);
        let num = self.num * (den / self.den) + other.num * (den / other.den);
        Self::new(num as i64, den)
    }

    /// `Some(±1)` when the value is real.
    pub fn sign(&self) -> Option<i32> {
        match self.den {
            1 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn is_real(&self) -> bool {
        self.sign().is_some()
    }

    pub fn to_complex(&self) -> Complex64 {
        let theta = 2.0 * std::f64::consts::PI * self.num as f64 / self.den as f64;
        // exact values on the axes avoid spurious 1e-17 residues
        match (self.num * 4) % self.den {
            0 => {
                let quarter = self.num * 4 / self.den;
                match quarter {
                    0 => Complex64::new(1.0, 0.0),
                    1 => Complex64::new(0.0, 1.0),
                    2 => Complex64::new(-1.0, 0.0),
                    _ => Complex64::new(0.0, -1.0),
                }
            }
            _ => Complex64::from_polar(1.0, theta),
        }
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign() {
            Some(s) => write!(f, "{s}"),
            None => write!(f, "exp(2πi·{}/{})", self.num, self.den),
        }
    }
}

/// Absolute tolerance for treating a complex float as zero outside of rank
/// decisions (which use a relative singular-value threshold instead).
pub const COMPLEX_ZERO_TOL: f64 = 1e-9;

/// A field in which orbit rigidity matrices can be assembled and ranked.
pub trait Field: Num + Clone + Neg<Output = Self> + fmt::Debug + Send + Sync + 'static {
    const NAME: &'static str;

    fn from_rational(q: &Rational) -> Self;

    /// `None` if the root of unity does not live in this field.
    fn from_root(r: RootOfUnity) -> Option<Self>;

    fn conj(&self) -> Self;

    /// Zero test: exact for rationals, tolerance based for floats.
    fn is_negligible(&self) -> bool;

    fn rank(m: &Matrix<Self>) -> usize;

    /// A basis of the right kernel `{x : m x = 0}`.
    fn nullspace(m: &Matrix<Self>) -> Vec<Vec<Self>>;

    fn to_json(&self) -> serde_json::Value;
}

impl Field for Rational {
    const NAME: &'static str = "rational";

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn from_root(r: RootOfUnity) -> Option<Self> {
        r.sign().map(|s| int(s as i64))
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn rank(m: &Matrix<Self>) -> usize {
        linalg::rational_rank(m)
    }

    fn nullspace(m: &Matrix<Self>) -> Vec<Vec<Self>> {
        linalg::rational_nullspace(m)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(rational_to_string(self))
    }
}

impl Field for Complex64 {
    const NAME: &'static str = "complex";

    fn from_rational(q: &Rational) -> Self {
        Complex64::new(rational_to_f64(q), 0.0)
    }

    fn from_root(r: RootOfUnity) -> Option<Self> {
        Some(r.to_complex())
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn is_negligible(&self) -> bool {
        self.norm() <= COMPLEX_ZERO_TOL
    }

    fn rank(m: &Matrix<Self>) -> usize {
        linalg::complex_rank(m)
    }

    fn nullspace(m: &Matrix<Self>) -> Vec<Vec<Self>> {
        linalg::complex_nullspace(m)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!([self.re, self.im])
    }
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // huge numerators: scale both sides down before converting
        let n = q.numer();
        let d = q.denom();
        let shift = n.bits().max(d.bits()).saturating_sub(900);
        let n = (n.abs() >> shift).to_f64().unwrap_or(f64::MAX);
        let d = (d >> shift).to_f64().unwrap_or(f64::MAX);
        let v = n / d;
        if q.is_negative() {
            -v
        } else {
            v
        }
    })
}

pub fn is_one(q: &Rational) -> bool {
    q.is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_strings_round_trip() {
        for s in ["0", "-3", "7/2", "-5/12"] {
            let q = parse_rational(s).unwrap();
            assert_eq!(rational_to_string(&q), s);
        }
        assert_eq!(parse_rational("4/2"), Some(int(2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn roots_of_unity_reduce() {
        let r = RootOfUnity::new(2, 4);
        assert_eq!(r.sign(), Some(-1));
        let r = RootOfUnity::new(1, 4);
        assert_eq!(r.sign(), None);
        assert_eq!(r.to_complex(), Complex64::new(0.0, 1.0));
        assert_eq!(r.inverse().to_complex(), Complex64::new(0.0, -1.0));
        assert_eq!(r.mul(&r), RootOfUnity::new(1, 2));
        assert_eq!(RootOfUnity::new(6, 3), RootOfUnity::one());
    }
}
