//! Exact fractions over 128-bit integers.
//!
//! Every operation is overflow-checked; a result that does not fit is a
//! [`Error::Range`], never a wrapped value.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{domain, range, Error, Result};

/// A normalized fraction `numerator / denominator`.
///
/// The denominator is always positive and coprime to the numerator; zero is
/// stored as `0/1`. Serializes as the string `"p/q"` (or `"p"`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Rational {
    num: i128,
    den: i128,
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    /// Builds `num / den` in lowest terms.
    pub fn new(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(domain("rational with zero denominator"));
        }
        if num == i128::MIN || den == i128::MIN {
            return Err(range("rational component at i128::MIN"));
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g == 0 { (0, 1) } else { (num / g, den / g) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        Ok(Rational { num: n, den: d })
    }

    pub fn from_integer(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn denominator(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    /// Greatest integer not exceeding the value.
    pub fn floor(&self) -> i128 {
        self.num.div_euclid(self.den)
    }

    pub fn checked_add(self, rhs: Rational) -> Result<Rational> {
        // Work over lcm(den) to keep intermediates small.
        let g = self.den.gcd(&rhs.den);
        let l = self.den / g;
        let r = rhs.den / g;
        let a = self.num.checked_mul(r).ok_or_else(overflow)?;
        let b = rhs.num.checked_mul(l).ok_or_else(overflow)?;
        let num = a.checked_add(b).ok_or_else(overflow)?;
        let den = self.den.checked_mul(r).ok_or_else(overflow)?;
        Rational::new(num, den)
    }

    pub fn checked_neg(self) -> Result<Rational> {
        Ok(Rational {
            num: self.num.checked_neg().ok_or_else(overflow)?,
            den: self.den,
        })
    }

    pub fn checked_sub(self, rhs: Rational) -> Result<Rational> {
        self.checked_add(rhs.checked_neg()?)
    }

    pub fn checked_mul(self, rhs: Rational) -> Result<Rational> {
        let g1 = self.num.gcd(&rhs.den).max(1);
        let g2 = rhs.num.gcd(&self.den).max(1);
        let num = (self.num / g1)
            .checked_mul(rhs.num / g2)
            .ok_or_else(overflow)?;
        let den = (self.den / g2)
            .checked_mul(rhs.den / g1)
            .ok_or_else(overflow)?;
        Rational::new(num, den)
    }

    pub fn checked_div(self, rhs: Rational) -> Result<Rational> {
        if rhs.is_zero() {
            return Err(domain("division by zero rational"));
        }
        self.checked_mul(Rational::new(rhs.den, rhs.num)?)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn overflow() -> crate::error::Error {
    range("rational arithmetic exceeds 128-bit capacity")
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        // Cross-multiplication in 256 bits would be exact; i128 products of
        // the magnitudes that occur here stay well inside range, and the
        // fallback keeps ordering correct when they do not.
        match (
            self.num.checked_mul(other.den),
            other.num.checked_mul(self.den),
        ) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => {
                let a = num_bigint::BigInt::from(self.num) * other.den;
                let b = num_bigint::BigInt::from(other.num) * self.den;
                a.cmp(&b)
            }
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl std::str::FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim()
                .parse::<i128>()
                .map_err(|e| domain(format!("bad rational {s:?}: {e}")))
        };
        match s.split_once('/') {
            Some((n, d)) => Rational::new(parse(n)?, parse(d)?),
            None => Rational::new(parse(s)?, 1),
        }
    }
}

impl From<Rational> for String {
    fn from(r: Rational) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for Rational {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n as i128)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn normalizes_sign_and_gcd() {
        assert_eq!(q(4, -6), q(-2, 3));
        assert_eq!(q(-4, -6).numerator(), 2);
        assert_eq!(q(0, -7), Rational::ZERO);
        assert_eq!(q(0, 5).denominator(), 1);
    }

    #[test]
    fn zero_denominator_is_domain_error() {
        assert!(matches!(Rational::new(1, 0), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn arithmetic() {
        assert_eq!(q(1, 6).checked_add(q(1, 3)).unwrap(), q(1, 2));
        assert_eq!(q(1, 6).checked_sub(q(1, 3)).unwrap(), q(-1, 6));
        assert_eq!(q(2, 3).checked_mul(q(9, 4)).unwrap(), q(3, 2));
        assert_eq!(q(2, 3).checked_div(q(4, 9)).unwrap(), q(3, 2));
        assert_eq!(q(-7, 2).floor(), -4);
        assert_eq!(q(7, 2).floor(), 3);
    }

    #[test]
    fn overflow_is_reported() {
        let big = Rational::from_integer(i128::MAX / 2);
        assert!(matches!(
            big.checked_mul(Rational::from_integer(3)),
            Err(crate::Error::Range(_))
        ));
    }

    #[test]
    fn ordering() {
        assert!(q(-1, 18) < q(1, 18));
        assert!(q(1, 3) > q(1, 4));
        assert_eq!(q(2, 4).cmp(&q(1, 2)), Ordering::Equal);
    }

    #[test]
    fn string_round_trip() {
        let r = Rational::new(-6, 4).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert_eq!(json, "\"-3/2\"");
        assert_eq!(serde_json::from_str::<Rational>(&json).unwrap(), r);
        assert_eq!("4/2".parse::<Rational>().unwrap(), Rational::from(2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x".parse::<Rational>().is_err());
    }
}
