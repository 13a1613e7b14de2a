use std::time::Instant;

use num_integer::Integer;

use super::{is_prime_u64, odd_primes_upto, par_tally, Tally, VerificationReport};
use crate::error::{domain, Result};
use crate::exact::{s_hk_naive, t_hk_naive, t_k_naive};
use crate::fast::{a_n_single, gcd_sum_odd, r_jk, s_hk_fast, s_k_fast, t_k_closed};

/// Largest `k` for which the T-propositions enumerate `T(h,k)` pairwise.
const PAIRWISE_T_CAP: u64 = 128;
/// Largest modulus for the `S(qh, qk)` scaling theorem sweep.
const SCALING_CAP: u64 = 64;
const SCALING_Q_MAX: u64 = 8;
/// Beyond this `T(k)` comes from the closed form instead of enumeration.
const NAIVE_T_K_CAP: u64 = 512;

fn sign(e: u64) -> i64 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn t_k_reference(k: u64) -> Result<i64> {
    if k <= NAIVE_T_K_CAP {
        Ok(t_k_naive(k)?.value)
    } else {
        Ok(t_k_closed(k)?.value)
    }
}

/// The elementary propositions on `S` and `T`, each over its own
/// hypothesis set up to `limit`.
pub fn verify_elementary(limit: u64) -> Result<VerificationReport> {
    if limit < 2 {
        return Err(domain("elementary suite needs limit >= 2"));
    }
    let started = Instant::now();
    let ks: Vec<u64> = (1..=limit).collect();

    // Statements indexed by a single k.
    let single = par_tally(ks.clone(), |&k, t: &mut Tally| {
        let s_k = s_k_fast(k).map(|v| v.value);
        if let Ok(s) = s_k {
            t.check(
                (s - k as i64).rem_euclid(2) == 1,
                || format!("parity k={k}"),
                "S(k) and k of opposite parity",
                s,
            );
        } else {
            t.check_result(|| format!("parity k={k}"), 0, s_k);
        }
        if k >= 2 {
            t.check_result(
                || format!("h=k-1 k={k}"),
                k as i64 - 1,
                s_hk_naive(k - 1, k).map(|v| v.value),
            );
        }
        if is_prime_u64(k) && k > 2 {
            if let Ok(s) = s_k_fast(k).map(|v| v.value) {
                let both_prime = s > 0 && is_prime_u64(s as u64);
                t.check(
                    !both_prime || (k, s) == (3, 2),
                    || format!("prime pair k={k}"),
                    "only (3,2)",
                    format!("({k},{s})"),
                );
            }
            t.check_result(|| format!("T(p) p={k}"), 1 - 2 * k as i64, t_k_reference(k));
            if let Ok(s) = s_k_fast(k).map(|v| v.value) {
                t.check(
                    s.rem_euclid(4) == 0 || s.rem_euclid(4) == 2,
                    || format!("S(p) mod 4 p={k}"),
                    "0 or 2",
                    s.rem_euclid(4),
                );
            }
        }
        if k.is_power_of_two() {
            t.check_result(|| format!("T(2^n) k={k}"), -1, t_k_reference(k));
        }
        if k % 2 == 0 && k <= NAIVE_T_K_CAP {
            let s: u64 = (2..2 * k).step_by(4).map(|h| h.gcd(&k)).sum();
            t.check_result(
                || format!("even T(k) k={k}"),
                2 * k as i64 - 1 - 2 * s as i64,
                t_k_naive(k).map(|v| v.value),
            );
        }
        if k % 2 == 1 {
            if let Ok(a) = a_n_single(k) {
                t.check_result(
                    || format!("odd T(k) k={k}"),
                    2 * k as i64 - 1 - 2 * a as i64,
                    t_k_reference(k),
                );
            }
        }
    });

    // T(pq) for distinct odd primes with pq <= limit.
    let primes = odd_primes_upto(limit)?;
    let mut tpq = Tally::default();
    for (i, &p) in primes.iter().enumerate() {
        for &q in &primes[i + 1..] {
            if p * q > limit {
                break;
            }
            let (pi, qi) = (p as i64, q as i64);
            tpq.check_result(
                || format!("T(pq) p={p} q={q}"),
                4 * (pi + qi) - 6 * pi * qi - 3,
                t_k_reference(p * q),
            );
        }
    }

    // Statements over pairs (h, k).
    let pairs = par_tally(ks, |&k, t: &mut Tally| {
        for h in 1..=limit {
            let g = h.gcd(&k);
            let odd_pair = h % 2 == 1 && k % 2 == 1;
            if g == 1 && odd_pair {
                t.check_result(
                    || format!("odd coprime S(h,k)=0 h={h} k={k}"),
                    0,
                    s_hk_naive(h, k).map(|v| v.value),
                );
            }
            if g == 1 {
                let s = s_hk_naive(h, k).map(|v| v.value);
                let tv = t_hk_naive(h, k).map(|v| v.value);
                if let (Ok(s), Ok(tv)) = (s, tv) {
                    let e = h + k;
                    let expected = (1 + sign(e)) * s + sign(e + 1);
                    t.check_eq(|| format!("T-S relation h={h} k={k}"), expected, tv);
                    if e % 2 == 1 {
                        t.check_eq(|| format!("T(h,k)=1 opposite parity h={h} k={k}"), 1, tv);
                    }
                }
            }
            if k <= PAIRWISE_T_CAP && h < 2 * k {
                let g = g as i64;
                let expected = match (h % 2, k % 2) {
                    (1, 1) => Some(1 - 2 * g),
                    (1, 0) => Some(1),
                    (0, 0) => match (k % 4, h % 4) {
                        (2, 0) => Some(1),
                        (2, 2) => Some(1 - 2 * g),
                        // holds only when h and k share their power of two
                        (0, 0) if h.trailing_zeros() == k.trailing_zeros() => Some(1 - 2 * g),
                        (0, 0) => Some(1),
                        _ => None,
                    },
                    _ => None,
                };
                if let Some(e) = expected {
                    t.check_result(
                        || format!("T(h,k) parity class h={h} k={k}"),
                        e,
                        t_hk_naive(h, k).map(|v| v.value),
                    );
                }
            }
        }
    });

    // S(qh, qk) for coprime h < k.
    let mut scaling = Tally::default();
    let cap = limit.min(SCALING_CAP);
    for k in 2..=cap {
        for h in (1..k).filter(|h| h.gcd(&k) == 1) {
            let base = s_hk_naive(h, k)?.value;
            for q in 1..=SCALING_Q_MAX {
                let expected = if (h + k) % 2 == 1 {
                    if q % 2 == 1 {
                        base
                    } else {
                        1
                    }
                } else {
                    -(q as i64 - 1)
                };
                scaling.check_result(
                    || format!("S(qh,qk) h={h} k={k} q={q}"),
                    expected,
                    s_hk_naive(q * h, q * k).map(|v| v.value),
                );
            }
        }
    }

    let tally = single.merge(tpq).merge(pairs).merge(scaling);
    Ok(tally.into_report("elementary", format!("h,k<={limit}"), started))
}

/// Identities behind the fast kernels: the odd-h gcd sum equals the
/// divisor-totient convolution, and for odd primes
/// `S(k) = (k-1)^2/2 - 2 sum_{j odd} r(j,k)`.
pub fn verify_kernel_identities(limit: u64) -> Result<VerificationReport> {
    if limit < 1 {
        return Err(domain("kernel identity suite needs limit >= 1"));
    }
    let started = Instant::now();
    let mut tally = Tally::default();
    for k in (1..=limit).step_by(2) {
        tally.check_result(|| format!("gcd sum k={k}"), a_n_single(k)?, gcd_sum_odd(k));
    }
    for k in odd_primes_upto(limit)? {
        let r_sum: Result<u64> = (1..k).step_by(2).map(|j| r_jk(j, k)).sum();
        let expected = r_sum.map(|r| ((k - 1) * (k - 1) / 2) as i64 - 2 * r as i64);
        match expected {
            Ok(e) => tally.check_result(
                || format!("S(k) via r(j,k) k={k}"),
                e,
                s_k_fast(k).map(|v| v.value),
            ),
            Err(err) => tally.check(false, || format!("r(j,k) k={k}"), "value", err),
        }
    }
    // spot-check the pairwise fast kernel against the odd-coprime vanishing
    for k in (3..=limit.min(2000)).step_by(2) {
        tally.check_result(
            || format!("S(1,k)=0 k={k}"),
            0,
            s_hk_fast(1, k).map(|v| v.value),
        );
    }
    Ok(tally.into_report("kernel-identities", format!("k<={limit}"), started))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elementary_small_range_passes() {
        let r = verify_elementary(60).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.cases > 1000);
    }

    #[test]
    fn scaling_examples() {
        assert_eq!(s_hk_naive(2, 4).unwrap().value, 1);
        assert_eq!(s_hk_naive(3, 9).unwrap().value, -2);
    }

    #[test]
    fn kernel_identities_pass() {
        let r = verify_kernel_identities(400).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn deterministic() {
        let a = verify_elementary(30).unwrap();
        let b = verify_elementary(30).unwrap();
        assert!(a.same_outcome(&b));
    }
}
