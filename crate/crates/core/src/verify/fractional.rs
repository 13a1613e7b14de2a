//! The fractional-part double sum for `S(k)` at odd primes and the integer
//! pairing of its columns.
//!
//! Fractional parts are held as integers over the common denominator `2k`:
//! `{a/k}` is `2 (a mod k)` and `{b/k - 1/2}` is `(2b - k) mod 2k`. For odd
//! `k` neither ever sits on a boundary.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{is_prime_u64, odd_primes_upto, par_tally, Tally, VerificationReport};
use crate::error::{domain, Result};
use crate::fast::s_k_fast;
use crate::rational::Rational;

/// `f(l,h) * 2k = 2 (2hl mod k) + ((2h(2l-1) - k) mod 2k)`.
#[inline]
fn f_scaled(k: i64, l: i64, h: i64) -> i64 {
    2 * (2 * h * l).rem_euclid(k) + (2 * h * (2 * l - 1) - k).rem_euclid(2 * k)
}

/// `m(j,k) = #{ 1 <= h <= (k-1)/2 : [(2h+k)j/k] odd }`, counted directly.
pub fn m_jk(j: u64, k: u64) -> u64 {
    (1..=(k - 1) / 2)
        .filter(|h| ((2 * h + k) * j / k) % 2 == 1)
        .count() as u64
}

/// All intermediate quantities of the fractional-part representation of
/// `S(k)` at one odd prime.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FractionalPartWitness {
    pub k: u64,
    /// `sum_{l,h} f(l,h)`, scaled by `2k`.
    pub frac_sum_scaled: i64,
    /// `sum_{l,h} ([2hl/k] + [h(2l-1)/k - 1/2])`.
    pub floor_sum: i64,
    /// `sum_{j=1}^{k-1} m(j,k)`.
    pub m_total: i64,
    /// `-(k-1)^2 + 4 sum f`, which must be an integer.
    pub value: Rational,
}

/// Evaluates the double sum for odd prime `k`.
pub fn fractional_part_witness(k: u64) -> Result<FractionalPartWitness> {
    if k < 3 || !is_prime_u64(k) {
        return Err(domain(format!(
            "fractional-part identity needs an odd prime, got {k}"
        )));
    }
    let ki = k as i64;
    let half = (ki - 1) / 2;
    let mut frac = 0i64;
    let mut floors = 0i64;
    for l in 1..=half {
        for h in 1..=half {
            frac += f_scaled(ki, l, h);
            floors += (2 * h * l).div_euclid(ki) + (2 * h * (2 * l - 1) - ki).div_euclid(2 * ki);
        }
    }
    let m_total: i64 = (1..k).map(|j| m_jk(j, k) as i64).sum();
    // -(k-1)^2 + 4 frac / (2k)
    let value = Rational::new(
        -((ki - 1) * (ki - 1)) as i128 * ki as i128 + 2 * frac as i128,
        ki as i128,
    )?;
    Ok(FractionalPartWitness {
        k,
        frac_sum_scaled: frac,
        floor_sum: floors,
        m_total,
        value,
    })
}

/// `S(k) = -(k-1)^2 + 4 sum f(l,h)` for every odd prime `k <= prime_limit`,
/// together with each step of the derivation through `m(j,k)`.
pub fn verify_fractional_part(prime_limit: u64) -> Result<VerificationReport> {
    if prime_limit < 3 {
        return Err(domain("fractional-part identity needs prime_limit >= 3"));
    }
    let started = Instant::now();
    let primes = odd_primes_upto(prime_limit)?;
    let tally = par_tally(primes, |&k, t: &mut Tally| {
        let (w, s) = match (fractional_part_witness(k), s_k_fast(k)) {
            (Ok(w), Ok(s)) => (w, s.value),
            (w, s) => {
                t.check(
                    false,
                    || format!("k={k}"),
                    "evaluation",
                    format!("{w:?} {s:?}"),
                );
                return;
            }
        };
        let ki = k as i64;
        t.check_eq(
            || format!("frac-sum identity k={k}"),
            Rational::from(s),
            w.value,
        );
        t.check_eq(
            || format!("S via m(j,k) k={k}"),
            s,
            2 * w.m_total - (ki - 1) * (ki - 1) / 2,
        );
        t.check_eq(
            || format!("m-sum via floors k={k}"),
            w.m_total,
            (ki - 1) * (ki - 1) * (ki - 3) / 8 - 2 * w.floor_sum,
        );
        // floors = (k-1)^3/16 - frac/(2k), cleared of denominators
        t.check_eq(
            || format!("floors via fractions k={k}"),
            32 * ki * w.floor_sum,
            2 * ki * (ki - 1).pow(3) - 16 * w.frac_sum_scaled,
        );
    });
    Ok(tally.into_report(
        "fractional-part-identity",
        format!("odd primes k<={prime_limit}"),
        started,
    ))
}

/// Sub-case of the column pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PairCase {
    A1,
    A2,
    A3,
    B,
}

impl PairCase {
    /// Integer value `g(m,h)` predicted for this case.
    pub fn predicted(self) -> i64 {
        match self {
            PairCase::A1 | PairCase::A3 => 2,
            PairCase::A2 => 3,
            PairCase::B => 1,
        }
    }
}

/// Classifies `(m, h)` by comparing `{h/k}` with `{2mh/k}`.
pub fn classify_pair(k: u64, m: u64, h: u64) -> PairCase {
    let fh = (h % k) as i64;
    let f2 = ((2 * m * h) % k) as i64;
    let k = k as i64;
    if fh <= f2 {
        if 2 * (f2 - fh) >= k {
            PairCase::A1
        } else if 2 * f2 > k {
            PairCase::A2
        } else {
            PairCase::A3
        }
    } else {
        PairCase::B
    }
}

/// `f(m,h)`, its mirror `f((k-1)/2 - m + 1, h)`, and their sum `g(m,h)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingWitness {
    pub k: u64,
    pub m: u64,
    pub h: u64,
    pub f_m: Rational,
    pub f_mirror: Rational,
    pub g: Rational,
    pub case: PairCase,
}

pub fn pairing_witness(k: u64, m: u64, h: u64) -> Result<PairingWitness> {
    if k < 3 || k.is_multiple_of(2) {
        return Err(domain("pairing needs odd k >= 3"));
    }
    if m == 0 || 4 * m > k || h == 0 || h > (k - 1) / 2 {
        return Err(domain(format!(
            "pairing indices out of range: m={m}, h={h}, k={k}"
        )));
    }
    let ki = k as i64;
    let mirror = (ki - 1) / 2 - m as i64 + 1;
    let den = 2 * k as i128;
    let f_m = Rational::new(f_scaled(ki, m as i64, h as i64) as i128, den)?;
    let f_mirror = Rational::new(f_scaled(ki, mirror, h as i64) as i128, den)?;
    Ok(PairingWitness {
        k,
        m,
        h,
        f_m,
        f_mirror,
        g: f_m.checked_add(f_mirror)?,
        case: classify_pair(k, m, h),
    })
}

/// Column pairing at odd primes: each `g(m,h)` is an integer in `{1,2,3}`
/// matching its sub-case, the unpaired column for `k = 3 (mod 4)` equals
/// `2{h/2} + 1/2`, and the pairs plus the unpaired column reassemble the
/// full double sum.
pub fn verify_column_pairing(prime_limit: u64) -> Result<VerificationReport> {
    if prime_limit < 3 {
        return Err(domain("pairing suite needs prime_limit >= 3"));
    }
    let started = Instant::now();
    let primes = odd_primes_upto(prime_limit)?;
    let tally = par_tally(primes, |&k, t: &mut Tally| {
        let ki = k as i64;
        let half = (ki - 1) / 2;
        let pairs = (1..).take_while(|m| 4 * m < ki + 1).count() as i64;
        let unpaired = if k % 4 == 3 { 1 } else { 0 };
        t.check_eq(
            || format!("column partition k={k}"),
            half,
            2 * pairs + unpaired,
        );
        let mut reassembled = 0i64;
        for m in 1..=pairs {
            for h in 1..=half {
                let w = match pairing_witness(k, m as u64, h as u64) {
                    Ok(w) => w,
                    Err(e) => {
                        t.check(false, || format!("k={k} m={m} h={h}"), "witness", e);
                        continue;
                    }
                };
                let g_ok = w.g.is_integer() && (1..=3).contains(&w.g.numerator());
                t.check(
                    g_ok,
                    || format!("g integer k={k} m={m} h={h}"),
                    "integer in {1,2,3}",
                    w.g,
                );
                t.check_eq(
                    || format!("g sub-case {:?} k={k} m={m} h={h}", w.case),
                    Rational::from(w.case.predicted()),
                    w.g,
                );
                reassembled += 2 * ki * w.g.numerator() as i64;
            }
        }
        if unpaired == 1 {
            let l = (ki + 1) / 4;
            for h in 1..=half {
                let expected = if h % 2 == 1 { 3 * ki } else { ki };
                let got = f_scaled(ki, l, h);
                t.check_eq(|| format!("unpaired column k={k} h={h}"), expected, got);
                reassembled += got;
            }
        }
        let full: i64 = (1..=half)
            .flat_map(|l| (1..=half).map(move |h| f_scaled(ki, l, h)))
            .sum();
        t.check_eq(
            || format!("pairing reassembles sum k={k}"),
            full,
            reassembled,
        );
    });
    Ok(tally.into_report(
        "column-pairing",
        format!("odd primes k<={prime_limit}"),
        started,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k3_single_term() {
        let w = fractional_part_witness(3).unwrap();
        // f(1,1) = 2/3 + 5/6 = 9/6
        assert_eq!(w.frac_sum_scaled, 9);
        assert_eq!(w.value, Rational::from(2));
        assert_eq!(w.floor_sum, -1);
        assert_eq!(w.m_total, 2);
    }

    #[test]
    fn k5_matches_table() {
        assert_eq!(fractional_part_witness(5).unwrap().value, Rational::from(4));
    }

    #[test]
    fn composite_is_domain_error() {
        assert!(matches!(
            fractional_part_witness(9),
            Err(crate::Error::Domain(_))
        ));
        assert!(matches!(
            fractional_part_witness(2),
            Err(crate::Error::Domain(_))
        ));
    }

    #[test]
    fn pairing_example_k11() {
        let w = pairing_witness(11, 1, 1).unwrap();
        assert_eq!(w.f_m, Rational::new(17, 22).unwrap());
        assert_eq!(w.f_mirror, Rational::new(27, 22).unwrap());
        assert_eq!(w.g, Rational::from(2));
        assert_eq!(w.case, PairCase::A3);
    }

    #[test]
    fn unpaired_column_k7() {
        // l = 2, h = 1: 2 * (1/2) + 1/2
        assert_eq!(f_scaled(7, 2, 1), 3 * 7);
    }

    #[test]
    fn suites_pass_small() {
        let r = verify_fractional_part(200).unwrap();
        assert!(r.passed(), "{r}");
        let r = verify_column_pairing(200).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn every_pair_gets_one_case() {
        use std::collections::HashMap;
        let k = 101u64;
        let mut counts: HashMap<PairCase, usize> = HashMap::new();
        let mut total = 0;
        for m in (1..).take_while(|m| 4 * m < k + 1) {
            for h in 1..=(k - 1) / 2 {
                *counts.entry(classify_pair(k, m, h)).or_default() += 1;
                total += 1;
            }
        }
        assert_eq!(counts.values().sum::<usize>(), total);
    }
}
