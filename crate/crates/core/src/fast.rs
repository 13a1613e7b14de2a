//! Sub-quadratic evaluation of the S and T sums.

use num_integer::Integer;

use crate::error::{domain, range, Result};
use crate::exact::{check_modulus, check_upper, t_hk_naive, Method, SumValue};
use crate::floor_sum::{floor_sum, floor_sum_u64, FloorSumArgs};

/// Floor sum with nonnegative arguments, trying the 64-bit kernel first.
#[inline]
fn fs(n: u64, m: u64, a: u64, b: u64) -> Result<i128> {
    match floor_sum_u64(n, m, a, b) {
        Some(v) => Ok(v as i128),
        None => {
            let a = i64::try_from(a).map_err(|_| range("floor_sum slope"))?;
            let b = i64::try_from(b).map_err(|_| range("floor_sum offset"))?;
            floor_sum(FloorSumArgs::new(n, m, a, b))
        }
    }
}

fn to_i64(v: i128) -> Result<i64> {
    i64::try_from(v).map_err(|_| range("sum does not fit 64 bits"))
}

/// `S(h,k)` in `O(log(h + k))`.
///
/// Writes `(-1)^[x] = 1 - 2([x] - 2[x/2])` and splits `j` into odd and even
/// progressions, each of which is a pair of floor sums. `h` only matters
/// modulo `2k`.
pub fn s_hk_fast(h: u64, k: u64) -> Result<SumValue> {
    check_upper(h)?;
    check_modulus(k)?;
    let hr = h % (2 * k);
    let n_odd = k / 2; // j = 2i+1, i in 0..n_odd
    let n_even = (k - 1) / 2; // j = 2i, i in 1..=n_even

    let odd = fs(n_odd, k, 2 * hr, hr)? - 2 * fs(n_odd, 2 * k, 2 * hr, hr)?;
    let even = fs(n_even + 1, k, 2 * hr, 0)? - 2 * fs(n_even + 1, 2 * k, 2 * hr, 0)?;
    let base = ((k - 1) % 2) as i128;
    Ok(SumValue::new(
        to_i64(base - 2 * (odd - even))?,
        Method::Fast,
    ))
}

/// `r(j,k)` without argument checks; `1 <= j < k`.
#[inline]
fn r_jk_unchecked(j: u64, k: u64) -> Result<i128> {
    // sum_{h=1}^{k-1} [hj/k] = ((j-1)(k-1) + gcd(j,k) - 1) / 2
    let g = j.gcd(&k);
    let first = ((j as i128 - 1) * (k as i128 - 1) + g as i128 - 1) / 2;
    let second = fs(k, 2 * k, j, 0)?;
    Ok(first - 2 * second)
}

/// `r(j,k) = #{ 1 <= h <= k-1 : [hj/k] odd }`.
pub fn r_jk(j: u64, k: u64) -> Result<u64> {
    check_modulus(k)?;
    if j == 0 || j >= k {
        return Err(domain(format!(
            "r(j,k) needs 1 <= j <= k-1, got j={j}, k={k}"
        )));
    }
    Ok(r_jk_unchecked(j, k)? as u64)
}

/// `S(k)` in `O(k log k)` for every `k`.
///
/// Exchanges the order of summation:
/// `S(k) = sum_j (-1)^(j+1) (k - 1 - 2 r(j,k))`, with each `r(j,k)` from the
/// floor-sum kernel.
pub fn s_k_fast(k: u64) -> Result<SumValue> {
    check_modulus(k)?;
    let mut acc: i128 = 0;
    let km1 = k as i128 - 1;
    for j in 1..k {
        let inner = km1 - 2 * r_jk_unchecked(j, k)?;
        if j % 2 == 1 {
            acc += inner;
        } else {
            acc -= inner;
        }
    }
    Ok(SumValue::new(to_i64(acc)?, Method::Fast))
}

/// `sum_{h odd, 1 <= h <= 2k-1} gcd(k, h)` for odd `k`.
pub fn gcd_sum_odd(k: u64) -> Result<u64> {
    check_modulus(k)?;
    if k.is_multiple_of(2) {
        return Err(domain(format!("gcd_sum_odd needs odd k, got {k}")));
    }
    Ok((1..2 * k).step_by(2).map(|h| h.gcd(&k)).sum())
}

/// Euler's totient by trial division.
pub fn totient(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut m = n;
    let mut result = n;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// `a_n`: zero for even `n`, `sum_{d|n} d * phi(n/d)` for odd `n`.
pub fn a_n_single(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(domain("a_n needs n >= 1"));
    }
    if n.is_multiple_of(2) {
        return Ok(0);
    }
    let mut acc: u64 = 0;
    let mut add = |d: u64| -> Result<()> {
        let term = d
            .checked_mul(totient(n / d))
            .ok_or_else(|| range("a_n term"))?;
        acc = acc.checked_add(term).ok_or_else(|| range("a_n sum"))?;
        Ok(())
    };
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            add(d)?;
            if d * d != n {
                add(n / d)?;
            }
        }
        d += 1;
    }
    Ok(acc)
}

/// `T(k)` from the gcd/totient identities.
///
/// Odd `k`: `2k - 1 - 2 sum_{d|k} d phi(k/d)`. Even `k`:
/// `2k - 1 - sum_{h = 2 mod 4, h < 2k} 2 gcd(h, k)`.
pub fn t_k_closed(k: u64) -> Result<SumValue> {
    check_modulus(k)?;
    let base = 2 * k as i128 - 1;
    let value = if k % 2 == 1 {
        base - 2 * a_n_single(k)? as i128
    } else {
        let s: u64 = (2..2 * k).step_by(4).map(|h| h.gcd(&k)).sum();
        base - 2 * s as i128
    };
    Ok(SumValue::new(to_i64(value)?, Method::ClosedForm))
}

/// `T(k)` from the definition, keeping only the `j` with `hj/k` integral.
///
/// Every other term of `T(h,k)` cancels against its partner `2k - j`, so
/// `T(h,k) = sum_{n=1}^{2g-1} (-1)^(1 + n(h/g + k/g))` with `g = gcd(h,k)`.
/// Costs `O(sum_h gcd(h,k))` and uses no divisor-sum identity.
pub fn t_k_reduced(k: u64) -> Result<SumValue> {
    check_modulus(k)?;
    let mut total: i64 = 0;
    for h in 1..2 * k {
        let g = h.gcd(&k);
        let step = (h / g + k / g) % 2;
        for n in 1..2 * g {
            total += if (1 + n * step).is_multiple_of(2) { 1 } else { -1 };
        }
    }
    Ok(SumValue::new(total, Method::ClosedForm))
}

/// `T(h,k)` by closed form where one is known, otherwise by enumeration.
///
/// Covered: both odd; coprime of opposite parity; `k` even with `h` odd;
/// `k = 2 (mod 4)` with `h = 0` or `2 (mod 4)`; `k = 0 (mod 4)` with
/// `h = 0 (mod 4)`. Anything else is enumerated and tagged [`Method::Naive`].
///
/// Only the `j` with `hj/k` integral survive the pairing `j <-> 2k - j`, and
/// their signs alternate unless `h/g` and `k/g` are both odd. So for
/// `h = k = 0 (mod 4)` the value is `1 - 2 gcd(h,k)` exactly when `h` and `k`
/// carry the same power of two, and `1` otherwise (e.g. `T(4,8) = 1`).
pub fn t_hk_closed(h: u64, k: u64) -> Result<SumValue> {
    check_upper(h)?;
    check_modulus(k)?;
    let g = h.gcd(&k) as i64;
    let one_minus_2g = SumValue::new(1 - 2 * g, Method::ClosedForm);
    let one = SumValue::new(1, Method::ClosedForm);
    let closed = match (h % 2 == 1, k % 2 == 1) {
        (true, true) => Some(one_minus_2g),
        _ if g == 1 => Some(one),
        (true, false) => Some(one),
        (false, false) => match (k % 4, h % 4) {
            (2, 0) => Some(one),
            (2, 2) => Some(one_minus_2g),
            (0, 0) if h.trailing_zeros() == k.trailing_zeros() => Some(one_minus_2g),
            (0, 0) => Some(one),
            _ => None,
        },
        (false, true) => None,
    };
    match closed {
        Some(v) => Ok(v),
        None => t_hk_naive(h, k),
    }
}
