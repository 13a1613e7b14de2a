//! Reference implementations by direct enumeration.
//!
//! Everything here follows the defining sums term by term and is used as
//! the ground truth for the faster kernels. No floating point is involved.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, range, Result};
use crate::rational::Rational;

/// Largest modulus accepted anywhere in the toolkit (`2^31`).
pub const MAX_MODULUS: u64 = 1 << 31;

/// How a [`SumValue`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Naive,
    Fast,
    ClosedForm,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Naive => "naive",
            Method::Fast => "fast",
            Method::ClosedForm => "closed-form",
        })
    }
}

/// Exact value of an S or T sum, tagged with the evaluation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SumValue {
    pub value: i64,
    pub method: Method,
}

impl SumValue {
    pub fn new(value: i64, method: Method) -> Self {
        SumValue { value, method }
    }
}

/// `[p/q]`: the unique integer `n` with `n <= p/q < n + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GreatestIntegerValue(pub i128);

/// Greatest integer function of the fraction `p/q`, rounding toward minus
/// infinity for every sign combination.
pub fn greatest_integer(p: i128, q: i128) -> Result<GreatestIntegerValue> {
    if q == 0 {
        return Err(domain("greatest integer of p/0"));
    }
    let (p, q) = if q < 0 {
        (
            p.checked_neg().ok_or_else(|| range("negating numerator"))?,
            -q,
        )
    } else {
        (p, q)
    };
    Ok(GreatestIntegerValue(p.div_euclid(q)))
}

pub(crate) fn check_modulus(k: u64) -> Result<()> {
    if k == 0 {
        return Err(domain("modulus k must be >= 1"));
    }
    if k > MAX_MODULUS {
        return Err(domain(format!("modulus {k} exceeds 2^31")));
    }
    Ok(())
}

pub(crate) fn check_upper(h: u64) -> Result<()> {
    if h == 0 {
        return Err(domain("argument h must be >= 1"));
    }
    Ok(())
}

/// `sum_{j=1}^{terms} (-1)^(j+1+[hj/k])`, the common body of S and T.
fn alternating_sum(h: u64, k: u64, terms: u64) -> Result<i64> {
    let mut acc: i64 = 0;
    for j in 1..=terms {
        let prod = h
            .checked_mul(j)
            .ok_or_else(|| range(format!("h*j overflows for h={h}, j={j}")))?;
        let e = (j + 1 + prod / k) & 1;
        acc += if e == 0 { 1 } else { -1 };
    }
    Ok(acc)
}

/// `S(h,k) = sum_{j=1}^{k-1} (-1)^(j+1+[hj/k])` by enumeration.
pub fn s_hk_naive(h: u64, k: u64) -> Result<SumValue> {
    check_upper(h)?;
    check_modulus(k)?;
    Ok(SumValue::new(alternating_sum(h, k, k - 1)?, Method::Naive))
}

/// `S(k) = sum_{h=1}^{k-1} S(h,k)`; quadratic time.
pub fn s_k_naive(k: u64) -> Result<SumValue> {
    check_modulus(k)?;
    let mut acc = 0i64;
    for h in 1..k {
        acc += alternating_sum(h, k, k - 1)?;
    }
    Ok(SumValue::new(acc, Method::Naive))
}

/// `T(h,k) = sum_{j=1}^{2k-1} (-1)^(j+1+[hj/k])` by enumeration.
pub fn t_hk_naive(h: u64, k: u64) -> Result<SumValue> {
    check_upper(h)?;
    check_modulus(k)?;
    Ok(SumValue::new(
        alternating_sum(h, k, 2 * k - 1)?,
        Method::Naive,
    ))
}

/// `T(k) = sum_{h=1}^{2k-1} T(h,k)`; quadratic time.
pub fn t_k_naive(k: u64) -> Result<SumValue> {
    check_modulus(k)?;
    let mut acc = 0i64;
    for h in 1..2 * k {
        acc += alternating_sum(h, k, 2 * k - 1)?;
    }
    Ok(SumValue::new(acc, Method::Naive))
}

/// The sawtooth `((p/q))`: zero at integers, otherwise `x - [x] - 1/2`.
pub fn sawtooth(p: i128, q: i128) -> Result<Rational> {
    if q <= 0 {
        return Err(domain("sawtooth denominator must be >= 1"));
    }
    let r = p.rem_euclid(q);
    if r == 0 {
        return Ok(Rational::ZERO);
    }
    let num = 2 * r - q;
    let den = q
        .checked_mul(2)
        .ok_or_else(|| range("sawtooth denominator"))?;
    Rational::new(num, den)
}

/// Dedekind sum `s(d,c) = sum_{j=1}^{c-1} ((dj/c)) ((j/c))`, exact.
///
/// Terms are accumulated as integers over the common denominator `4c^2`.
pub fn dedekind_s(d: i64, c: u64) -> Result<Rational> {
    if c == 0 {
        return Err(domain("Dedekind sum needs c >= 1"));
    }
    let c = c as i128;
    let d = d as i128;
    let mut acc: i128 = 0;
    for j in 1..c {
        let r = (d * j).rem_euclid(c);
        if r == 0 {
            continue;
        }
        let term = (2 * r - c) * (2 * j - c);
        acc = acc
            .checked_add(term)
            .ok_or_else(|| range("Dedekind sum accumulator"))?;
    }
    let den = c
        .checked_mul(c)
        .and_then(|x| x.checked_mul(4))
        .ok_or_else(|| range("Dedekind sum denominator"))?;
    Rational::new(acc, den)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128, d: i128) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn s_hk_examples() {
        assert_eq!(s_hk_naive(1, 3).unwrap().value, 0);
        assert_eq!(s_hk_naive(9, 10).unwrap().value, 9);
        assert_eq!(s_hk_naive(2, 3).unwrap().value, 2);
        assert_eq!(s_hk_naive(3, 2).unwrap().value, -1);
        assert_eq!(s_hk_naive(5, 1).unwrap().value, 0);
        assert_eq!(s_hk_naive(2, 3).unwrap().method, Method::Naive);
    }

    #[test]
    fn s_k_examples() {
        assert_eq!(s_k_naive(1).unwrap().value, 0);
        assert_eq!(s_k_naive(4).unwrap().value, 5);
        assert_eq!(s_k_naive(8).unwrap().value, 11);
        assert_eq!(s_k_naive(9).unwrap().value, 8);
    }

    #[test]
    fn t_examples() {
        assert_eq!(t_hk_naive(2, 5).unwrap().value, 1);
        assert_eq!(t_hk_naive(3, 9).unwrap().value, -5);
        assert_eq!(t_hk_naive(1, 1).unwrap().value, -1);
        assert_eq!(t_k_naive(5).unwrap().value, -9);
        assert_eq!(t_k_naive(15).unwrap().value, -61);
        assert_eq!(t_k_naive(16).unwrap().value, -1);
    }

    #[test]
    fn overflow_is_range_error() {
        let h = u64::MAX / 2 + 1;
        assert!(matches!(s_hk_naive(h, 3), Err(crate::Error::Range(_))));
    }

    #[test]
    fn bad_arguments() {
        assert!(matches!(s_hk_naive(0, 3), Err(crate::Error::Domain(_))));
        assert!(matches!(s_hk_naive(1, 0), Err(crate::Error::Domain(_))));
        assert!(matches!(
            s_k_naive(MAX_MODULUS + 1),
            Err(crate::Error::Domain(_))
        ));
    }

    #[test]
    fn greatest_integer_floors_negatives() {
        assert_eq!(greatest_integer(7, 2).unwrap().0, 3);
        assert_eq!(greatest_integer(-7, 2).unwrap().0, -4);
        assert_eq!(greatest_integer(7, -2).unwrap().0, -4);
        assert_eq!(greatest_integer(-6, 3).unwrap().0, -2);
        assert!(greatest_integer(1, 0).is_err());
    }

    #[test]
    fn sawtooth_examples() {
        assert_eq!(sawtooth(3, 1).unwrap(), Rational::ZERO);
        assert_eq!(sawtooth(1, 2).unwrap(), Rational::ZERO);
        assert_eq!(sawtooth(2, 3).unwrap(), q(1, 6));
        assert_eq!(sawtooth(-1, 3).unwrap(), q(1, 6));
        assert!(matches!(sawtooth(1, 0), Err(crate::Error::Domain(_))));
    }

    #[test]
    fn dedekind_examples() {
        assert_eq!(dedekind_s(1, 1).unwrap(), Rational::ZERO);
        assert_eq!(dedekind_s(2, 3).unwrap(), q(-1, 18));
        assert_eq!(dedekind_s(1, 3).unwrap(), q(1, 18));
        // s(-d,c) = -s(d,c)
        assert_eq!(dedekind_s(-2, 3).unwrap(), q(1, 18));
    }

    #[test]
    fn dedekind_denominator_divides_4c2() {
        for c in 1..60u64 {
            for d in 1..c as i64 + 3 {
                let s = dedekind_s(d, c).unwrap();
                assert_eq!((4 * (c as i128) * (c as i128)) % s.denominator(), 0);
            }
        }
    }

    #[test]
    fn s_hk_parity_and_h_minus_one() {
        for k in 2..200u64 {
            for h in 1..k {
                let v = s_hk_naive(h, k).unwrap().value;
                assert_eq!((v - (k as i64 - 1)).rem_euclid(2), 0, "h={h} k={k}");
            }
            assert_eq!(s_hk_naive(k - 1, k).unwrap().value, k as i64 - 1);
        }
    }
}
