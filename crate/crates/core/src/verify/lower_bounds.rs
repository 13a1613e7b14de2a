use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use super::fractional::m_jk;
use super::{odd_primes_upto, par_tally, Tally, VerificationReport};
use crate::asymptotics::compute_constants;
use crate::error::{domain, Result};
use crate::fast::{r_jk, s_k_fast};
use crate::rational::Rational;

/// Smallest `k` at which the `H(k)` asymptotic tolerance `1/k` is checked.
pub const HARMONIC_CHECK_FROM: u64 = 10;

/// Running `sum_{j odd <= n} 1/j` kept as `num / den` with `den` the lcm of
/// the odd numbers seen so far, so no gcd is ever taken.
#[derive(Debug, Clone)]
struct OddHarmonic {
    next_j: u64,
    num: BigInt,
    den: BigInt,
    approx: f64,
}

impl OddHarmonic {
    fn new() -> Self {
        OddHarmonic {
            next_j: 1,
            num: BigInt::from(0),
            den: BigInt::from(1),
            approx: 0.0,
        }
    }

    /// Extends the sum through every odd `j <= n`.
    fn advance_to(&mut self, n: u64) {
        while self.next_j <= n {
            let j = self.next_j;
            if let Some(p) = odd_prime_power_base(j) {
                self.den *= p;
                self.num *= p;
            }
            self.num += &self.den / j;
            self.approx += 1.0 / j as f64;
            self.next_j += 2;
        }
    }
}

/// `Some(p)` when `j = p^e` for an odd prime `p`, `e >= 1`.
fn odd_prime_power_base(j: u64) -> Option<u64> {
    if j < 3 {
        return None;
    }
    let mut p = 3;
    while p * p <= j && !j.is_multiple_of(p) {
        p += 2;
    }
    if !j.is_multiple_of(p) {
        p = j;
    }
    let mut m = j;
    while m.is_multiple_of(p) {
        m /= p;
    }
    (m == 1).then_some(p)
}

/// `H(k) = sum_{j odd, j <= k-1} 1/j`, exact.
pub fn odd_harmonic(k: u64) -> BigRational {
    let mut h = OddHarmonic::new();
    h.advance_to(k.saturating_sub(1));
    BigRational::new(h.num, h.den)
}

/// Quantities entering the lower-bound argument for one `(j, k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundWitness {
    pub k: u64,
    pub j: u64,
    pub r: u64,
    pub m: u64,
    /// `r(j,k)/k - (j-1)/(2j)`.
    pub eps: Rational,
    /// `H(k)` rendered as `num/den`.
    pub harmonic: String,
}

pub fn bound_witness(j: u64, k: u64) -> Result<BoundWitness> {
    let r = r_jk(j, k)?;
    let eps = Rational::new(r as i128, k as i128)?
        .checked_sub(Rational::new(j as i128 - 1, 2 * j as i128)?)?;
    Ok(BoundWitness {
        k,
        j,
        r,
        m: m_jk(j, k),
        eps,
        harmonic: odd_harmonic(k).to_string(),
    })
}

/// Lower and trivial bounds for `S(k)` and the upper bound on `r(j,k)`.
///
/// For odd primes `k`: `S(k) >= -(k-1)/2 + k H(k) - (k-1)(k+1)/4` with
/// `H(k)` exact, and `r(j,k) <= k/2 - k/(2j) + (j-1)/2` for odd `j`. For
/// all `k`: `|S(k)| <= (k-1)^2/2`. Numerically, for primes `k >= 10`,
/// `|H(k) - log(2k)/2 - gamma/2| <= 1/k`.
pub fn verify_lower_bounds(prime_limit: u64) -> Result<VerificationReport> {
    if prime_limit < 3 {
        return Err(domain("lower-bound suite needs prime_limit >= 3"));
    }
    let started = Instant::now();
    let gamma = compute_constants().gamma;
    let primes = odd_primes_upto(prime_limit)?;

    let mut tally = Tally::default();
    let mut harmonic = OddHarmonic::new();
    for &k in &primes {
        harmonic.advance_to(k - 1);
        let s = match s_k_fast(k) {
            Ok(v) => v.value,
            Err(e) => {
                tally.check(false, || format!("S({k})"), "value", e);
                continue;
            }
        };
        let ki = BigInt::from(k);
        let d = &harmonic.den;
        let lhs = BigInt::from(4 * s) * d;
        let rhs = BigInt::from(-2 * (k as i64 - 1)) * d + BigInt::from(4) * &ki * &harmonic.num
            - BigInt::from((k * k - 1) as i64) * d;
        tally.check(
            lhs >= rhs,
            || format!("harmonic lower bound k={k}"),
            "S(k) >= bound",
            s,
        );
        if k >= HARMONIC_CHECK_FROM {
            let kf = k as f64;
            let dev = (harmonic.approx - 0.5 * (2.0 * kf).ln() - 0.5 * gamma).abs();
            tally.check(
                dev <= 1.0 / kf,
                || format!("H(k) asymptotic k={k}"),
                format!("<= {}", 1.0 / kf),
                dev,
            );
        }
    }

    let r_bounds = par_tally(primes, |&k, t: &mut Tally| {
        for j in (1..k).step_by(2) {
            match r_jk(j, k) {
                Ok(r) => {
                    // 2j r <= kj - k + j(j-1)
                    let lhs = 2 * j as i128 * r as i128;
                    let rhs = (k * j) as i128 - k as i128 + (j * (j - 1)) as i128;
                    t.check(
                        lhs <= rhs,
                        || format!("r(j,k) bound j={j} k={k}"),
                        format!("<= {}", rhs as f64 / (2 * j) as f64),
                        r,
                    );
                }
                Err(e) => t.check(false, || format!("r({j},{k})"), "value", e),
            }
        }
    });

    let trivial = par_tally(
        (1..=prime_limit).collect(),
        |&k, t: &mut Tally| match s_k_fast(k) {
            Ok(s) => {
                let bound = ((k - 1) * (k - 1)) as i128;
                let abs = (s.value as i128).abs();
                t.check(
                    abs <= bound,
                    || format!("coarse bound k={k}"),
                    format!("|S| <= {bound}"),
                    s.value,
                );
                if k % 2 == 1 {
                    t.check(
                        2 * abs <= bound,
                        || format!("trivial bound k={k}"),
                        format!("|S| <= {bound}/2"),
                        s.value,
                    );
                }
            }
            Err(e) => t.check(false, || format!("S({k})"), "value", e),
        },
    );

    let tally = tally.merge(r_bounds).merge(trivial);
    Ok(tally.into_report("lower-bounds", format!("k<={prime_limit}"), started))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn harmonic_values() {
        assert_eq!(odd_harmonic(7).to_string(), "23/15");
        assert_eq!(odd_harmonic(3).to_string(), "1");
        assert_eq!(odd_harmonic(1).to_string(), "0");
        // lcm-tracked accumulation agrees with plain rational addition
        let mut plain = BigRational::from_integer(0.into());
        for j in (1..200u64).step_by(2) {
            plain += BigRational::new(1.into(), j.into());
        }
        assert_eq!(odd_harmonic(200), plain);
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(odd_prime_power_base(9), Some(3));
        assert_eq!(odd_prime_power_base(27), Some(3));
        assert_eq!(odd_prime_power_base(7), Some(7));
        assert_eq!(odd_prime_power_base(15), None);
        assert_eq!(odd_prime_power_base(1), None);
    }

    #[test]
    fn lower_bound_examples() {
        // k=7: -3 + 7*23/15 - 12 = -64/15
        let h = odd_harmonic(7);
        let b = BigRational::from_integer((-3).into()) + h * BigRational::from_integer(7.into())
            - BigRational::from_integer(12.into());
        assert_eq!(b, BigRational::new((-64).into(), 15.into()));
        assert_eq!(s_k_fast(7).unwrap().value, 10);
        // k=3: H(3) = 1, so -1 + 3 - 2 = 0 <= S(3) = 2
        let b3 = BigRational::from_integer((-1).into())
            + odd_harmonic(3) * BigRational::from_integer(3.into())
            - BigRational::from_integer(2.into());
        assert_eq!(b3, BigRational::from_integer(0.into()));
        assert!(b3.to_f64().unwrap() <= s_k_fast(3).unwrap().value as f64);
    }

    #[test]
    fn harmonic_tolerance_holds_empirically() {
        // Confirms the 1/k constant over odd k in [10, 10^6]; the observed
        // deviation is about 1/(2k).
        let gamma = compute_constants().gamma;
        let mut h = 0.0f64;
        let mut worst = 0.0f64;
        let mut j = 1u64;
        for k in (11..=1_000_001u64).step_by(2) {
            while j < k {
                h += 1.0 / j as f64;
                j += 2;
            }
            let kf = k as f64;
            let dev = (h - 0.5 * (2.0 * kf).ln() - 0.5 * gamma).abs();
            worst = worst.max(dev * kf);
        }
        assert!(worst <= 1.0, "max k*|dev| = {worst}");
        assert!(worst < 0.6);
    }

    #[test]
    fn witness_fields() {
        let w = bound_witness(3, 7).unwrap();
        assert_eq!(w.r, 2);
        // 2/7 - 1/3
        assert_eq!(w.eps, Rational::new(-1, 21).unwrap());
        assert_eq!(w.harmonic, "23/15");
    }

    #[test]
    fn half_bound_exceptions_are_two_and_four() {
        let over: Vec<u64> = (1..=512u64)
            .filter(|&k| {
                let s = crate::exact::s_k_naive(k).unwrap().value;
                2 * s.unsigned_abs() > (k - 1) * (k - 1)
            })
            .collect();
        assert_eq!(over, vec![2, 4]);
        for k in 1..=512u64 {
            let s = crate::exact::s_k_naive(k).unwrap().value;
            assert!(s.unsigned_abs() <= (k - 1) * (k - 1));
        }
    }

    #[test]
    fn suite_passes_small() {
        let r = verify_lower_bounds(500).unwrap();
        assert!(r.passed(), "{r}");
    }
}
