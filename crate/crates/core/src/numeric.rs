//! Exact-rational and tolerant-float numerics.
//!
//! Every quantity in a game lives in one of two backends, fixed game-wide:
//! arbitrary-precision rationals, where equality and comparison are exact,
//! or binary floats, where all *decisions* (argmin, strict improvement,
//! equality) go through a single tolerance. Mixing backends in arithmetic
//! is a programming error and panics.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{GameError, Result};

/// Game-wide numeric backend selector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NumericMode {
    /// Exact rationals; comparisons are decidable with no tolerance.
    Rational,
    /// Binary floats; `a < b` means `a < b - tol`, equality means
    /// `|a - b| <= tol`.
    Float { tol: f64 },
}

impl NumericMode {
    pub const DEFAULT_TOL: f64 = 1e-9;

    pub fn float_default() -> Self {
        NumericMode::Float { tol: Self::DEFAULT_TOL }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, NumericMode::Rational)
    }

    pub fn zero(&self) -> Numeric {
        self.int(0)
    }

    pub fn one(&self) -> Numeric {
        self.int(1)
    }

    pub fn int(&self, v: i64) -> Numeric {
        match self {
            NumericMode::Rational => Numeric::int(v),
            NumericMode::Float { .. } => Numeric::Float(v as f64),
        }
    }

    pub fn ratio(&self, p: i64, q: i64) -> Numeric {
        match self {
            NumericMode::Rational => Numeric::ratio(p, q),
            NumericMode::Float { .. } => Numeric::Float(p as f64 / q as f64),
        }
    }

    /// Decision comparison: exact in rational mode, tolerant in float mode.
    pub fn cmp(&self, a: &Numeric, b: &Numeric) -> Ordering {
        match self {
            NumericMode::Rational => a.total_cmp(b),
            NumericMode::Float { tol } => {
                let (x, y) = (a.as_f64(), b.as_f64());
                if (x - y).abs() <= *tol {
                    Ordering::Equal
                } else if x < y {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
        }
    }

    pub fn lt(&self, a: &Numeric, b: &Numeric) -> bool {
        self.cmp(a, b) == Ordering::Less
    }

    pub fn le(&self, a: &Numeric, b: &Numeric) -> bool {
        self.cmp(a, b) != Ordering::Greater
    }

    pub fn eq(&self, a: &Numeric, b: &Numeric) -> bool {
        self.cmp(a, b) == Ordering::Equal
    }

    pub fn gt(&self, a: &Numeric, b: &Numeric) -> bool {
        self.cmp(a, b) == Ordering::Greater
    }
}

/// A number in one of the two backends.
#[derive(Clone, Debug)]
pub enum Numeric {
    Rational(BigRational),
    Float(f64),
}

impl Numeric {
    pub fn int(v: i64) -> Self {
        Numeric::Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Numeric::Rational(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn float(v: f64) -> Self {
        Numeric::Float(v)
    }

    pub fn rational(r: BigRational) -> Self {
        Numeric::Rational(r)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Numeric::Rational(r) => r.is_zero(),
            Numeric::Float(f) => *f == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Numeric::Rational(r) => r.is_negative(),
            Numeric::Float(f) => *f < 0.0,
        }
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Numeric::Rational(r) => r.to_f64().unwrap_or_else(|| {
                // Fall back to a quotient of lossy conversions for values
                // whose numerator/denominator overflow f64 individually.
                let n = r.numer().to_f64().unwrap_or(f64::INFINITY);
                let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
                n / d
            }),
            Numeric::Float(f) => *f,
        }
    }

    /// Total order independent of any tolerance; used for sorting and for
    /// deterministic reductions.
    pub fn total_cmp(&self, other: &Numeric) -> Ordering {
        match (self, other) {
            (Numeric::Rational(a), Numeric::Rational(b)) => a.cmp(b),
            (Numeric::Float(a), Numeric::Float(b)) => a.total_cmp(b),
            _ => panic!("numeric mode mismatch in comparison"),
        }
    }

    pub fn abs(&self) -> Numeric {
        match self {
            Numeric::Rational(r) => Numeric::Rational(r.abs()),
            Numeric::Float(f) => Numeric::Float(f.abs()),
        }
    }

    /// Non-negative integer power by repeated multiplication.
    pub fn pow_u(&self, e: u32) -> Numeric {
        let mut acc = match self {
            Numeric::Rational(_) => Numeric::int(1),
            Numeric::Float(_) => Numeric::Float(1.0),
        };
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_mode(&self, mode: NumericMode) -> Numeric {
        match (self, mode) {
            (Numeric::Rational(r), NumericMode::Float { .. }) => {
                Numeric::Float(Numeric::Rational(r.clone()).as_f64())
            }
            (Numeric::Float(f), NumericMode::Rational) => Numeric::Rational(
                BigRational::from_float(*f)
                    .expect("cannot convert non-finite float to rational"),
            ),
            _ => self.clone(),
        }
    }

    /// Parses `"p/q"`, an integer, or a plain decimal such as `"1.5"` into
    /// an exact rational.
    pub fn parse_rational(s: &str) -> Result<Numeric> {
        let s = s.trim();
        let bad = || GameError::Domain(format!("cannot parse rational from {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let num: BigInt = p.trim().parse().map_err(|_| bad())?;
            let den: BigInt = q.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            return Ok(Numeric::Rational(BigRational::new(num, den)));
        }
        if let Some((whole, frac)) = s.split_once('.') {
            let neg = whole.trim_start().starts_with('-');
            let whole_part: BigInt = if whole.is_empty() || whole == "-" {
                BigInt::from(0)
            } else {
                whole.parse().map_err(|_| bad())?
            };
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let frac_num: BigInt = frac.parse().map_err(|_| bad())?;
            let den = BigInt::from(10u8).pow(frac.len() as u32);
            let mag = whole_part.abs() * &den + frac_num;
            let signed = if neg { -mag } else { mag };
            return Ok(Numeric::Rational(BigRational::new(signed, den)));
        }
        let num: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Numeric::Rational(BigRational::from_integer(num)))
    }
}

impl PartialEq for Numeric {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Numeric::Rational(a), Numeric::Rational(b)) => a == b,
            (Numeric::Float(a), Numeric::Float(b)) => a == b,
            _ => false,
        }
    }
}

impl fmt::Display for Numeric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Numeric::Rational(r) => {
                if r.denom() == &BigInt::from(1) {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Numeric::Float(x) => write!(f, "{x}"),
        }
    }
}

macro_rules! numeric_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Numeric {
            type Output = Numeric;
            fn $method(self, rhs: &Numeric) -> Numeric {
                match (self, rhs) {
                    (Numeric::Rational(a), Numeric::Rational(b)) => {
                        Numeric::Rational(a $op b)
                    }
                    (Numeric::Float(a), Numeric::Float(b)) => Numeric::Float(a $op b),
                    _ => panic!("numeric mode mismatch in arithmetic"),
                }
            }
        }

        impl $trait for Numeric {
            type Output = Numeric;
            fn $method(self, rhs: Numeric) -> Numeric {
                (&self).$method(&rhs)
            }
        }
    };
}

numeric_binop!(Add, add, +);
numeric_binop!(Sub, sub, -);
numeric_binop!(Mul, mul, *);
numeric_binop!(Div, div, /);

impl Neg for &Numeric {
    type Output = Numeric;
    fn neg(self) -> Numeric {
        match self {
            Numeric::Rational(r) => Numeric::Rational(-r),
            Numeric::Float(f) => Numeric::Float(-f),
        }
    }
}

impl Neg for Numeric {
    type Output = Numeric;
    fn neg(self) -> Numeric {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_comparisons_are_exact() {
        let mode = NumericMode::Rational;
        let a = Numeric::ratio(1, 3);
        let b = &(&Numeric::ratio(1, 6) + &Numeric::ratio(1, 6));
        assert!(mode.eq(&a, b));
        let tiny = &a + &Numeric::ratio(1, 1_000_000_000_000);
        assert!(mode.lt(&a, &tiny));
    }

    #[test]
    fn float_comparisons_use_tolerance() {
        let mode = NumericMode::Float { tol: 1e-9 };
        let a = Numeric::float(1.0);
        let b = Numeric::float(1.0 + 5e-10);
        let c = Numeric::float(1.0 + 5e-9);
        assert!(mode.eq(&a, &b));
        assert!(mode.lt(&a, &c));
        assert!(!mode.lt(&a, &b));
    }

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(Numeric::parse_rational("3/2").unwrap(), Numeric::ratio(3, 2));
        assert_eq!(Numeric::parse_rational("24").unwrap(), Numeric::int(24));
        assert_eq!(Numeric::parse_rational("1.5").unwrap(), Numeric::ratio(3, 2));
        assert_eq!(
            Numeric::parse_rational("0.009").unwrap(),
            Numeric::ratio(9, 1000)
        );
        assert_eq!(Numeric::parse_rational("-2.25").unwrap(), Numeric::ratio(-9, 4));
        assert!(Numeric::parse_rational("1/0").is_err());
        assert!(Numeric::parse_rational("abc").is_err());
    }

    #[test]
    fn display_round_trips_fractions() {
        let x = Numeric::ratio(32, 7);
        assert_eq!(x.to_string(), "32/7");
        assert_eq!(Numeric::parse_rational(&x.to_string()).unwrap(), x);
        assert_eq!(Numeric::int(5).to_string(), "5");
    }

    #[test]
    fn pow_matches_repeated_multiplication() {
        let x = Numeric::ratio(3, 2);
        assert_eq!(x.pow_u(4), Numeric::ratio(81, 16));
        assert_eq!(x.pow_u(0), Numeric::int(1));
    }

    #[test]
    #[should_panic(expected = "mode mismatch")]
    fn mixing_modes_panics() {
        let _ = &Numeric::int(1) + &Numeric::float(1.0);
    }
}
