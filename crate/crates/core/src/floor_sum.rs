//! Euclidean floor-sum kernel: `sum_{i=0}^{n-1} [(a*i + b) / m]`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, range, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FloorSumArgs {
    /// Number of terms.
    pub n: u64,
    /// Modulus, at least 1.
    pub m: u64,
    /// Slope; any sign.
    pub a: i64,
    /// Offset; any sign.
    pub b: i64,
}

impl FloorSumArgs {
    pub fn new(n: u64, m: u64, a: i64, b: i64) -> Self {
        FloorSumArgs { n, m, a, b }
    }
}

/// Exact `sum_{i=0}^{n-1} [(a*i+b)/m]` in `O(log max(a, m))` steps.
///
/// Negative slope and offset are first reduced modulo `m` with floor
/// semantics, the stripped quotients contributing an arithmetic series.
pub fn floor_sum(args: FloorSumArgs) -> Result<i128> {
    let FloorSumArgs { n, m, a, b } = args;
    if m == 0 {
        return Err(domain("floor_sum modulus must be >= 1"));
    }
    if n == 0 {
        return Ok(0);
    }
    let mi = m as i128;
    let (qa, ra) = ((a as i128).div_euclid(mi), (a as i128).rem_euclid(mi));
    let (qb, rb) = ((b as i128).div_euclid(mi), (b as i128).rem_euclid(mi));
    let n128 = n as i128;

    let tri = n128
        .checked_mul(n128 - 1)
        .map(|x| x / 2)
        .ok_or_else(overflow)?;
    let shift = qa
        .checked_mul(tri)
        .and_then(|x| qb.checked_mul(n128).and_then(|y| x.checked_add(y)))
        .ok_or_else(overflow)?;

    let core = match floor_sum_u64(n, m, ra as u64, rb as u64) {
        Some(v) => v as i128,
        None => {
            let v = floor_sum_u128(n as u128, m as u128, ra as u128, rb as u128)
                .ok_or_else(overflow)?;
            i128::try_from(v).map_err(|_| overflow())?
        }
    };
    core.checked_add(shift).ok_or_else(overflow)
}

fn overflow() -> crate::error::Error {
    range("floor_sum result exceeds 128-bit accumulator")
}

/// Nonnegative kernel in 64-bit arithmetic; `None` on any overflow.
#[inline]
pub(crate) fn floor_sum_u64(mut n: u64, mut m: u64, mut a: u64, mut b: u64) -> Option<u64> {
    let mut acc: u64 = 0;
    loop {
        if a >= m {
            let tri = if n.is_multiple_of(2) {
                (n / 2).checked_mul(n.wrapping_sub(1))?
            } else {
                n.checked_mul((n - 1) / 2)?
            };
            acc = acc.checked_add(tri.checked_mul(a / m)?)?;
            a %= m;
        }
        if b >= m {
            acc = acc.checked_add(n.checked_mul(b / m)?)?;
            b %= m;
        }
        let y_max = a.checked_mul(n)?.checked_add(b)?;
        if y_max < m {
            return Some(acc);
        }
        n = y_max / m;
        b = y_max % m;
        std::mem::swap(&mut m, &mut a);
    }
}

fn floor_sum_u128(mut n: u128, mut m: u128, mut a: u128, mut b: u128) -> Option<u128> {
    let mut acc: u128 = 0;
    loop {
        if a >= m {
            let tri = if n.is_multiple_of(2) {
                (n / 2).checked_mul(n.wrapping_sub(1))?
            } else {
                n.checked_mul((n - 1) / 2)?
            };
            acc = acc.checked_add(tri.checked_mul(a / m)?)?;
            a %= m;
        }
        if b >= m {
            acc = acc.checked_add(n.checked_mul(b / m)?)?;
            b %= m;
        }
        let y_max = a.checked_mul(n)?.checked_add(b)?;
        if y_max < m {
            return Some(acc);
        }
        n = y_max / m;
        b = y_max % m;
        std::mem::swap(&mut m, &mut a);
    }
}
