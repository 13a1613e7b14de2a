//! Linear sieve producing totient, smallest prime factor, `a_n` and
//! primality tables in one pass.

use bitvec::prelude::*;

use crate::error::{domain, Error, Result};

/// Largest sieve limit supported.
pub const MAX_SIEVE_LIMIT: u64 = 100_000_000;

/// Immutable arithmetic tables for `1..=limit`, indexed by `n` directly.
#[derive(Debug, Clone)]
pub struct SieveTables {
    limit: u64,
    phi: Vec<u32>,
    spf: Vec<u32>,
    a: Vec<u64>,
    prime_flags: BitVec,
}

impl SieveTables {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn phi(&self, n: u64) -> u32 {
        self.phi[n as usize]
    }

    /// Smallest prime factor; `spf(1) = 1`.
    pub fn spf(&self, n: u64) -> u32 {
        self.spf[n as usize]
    }

    pub fn a(&self, n: u64) -> u64 {
        self.a[n as usize]
    }

    pub fn is_prime(&self, n: u64) -> bool {
        self.prime_flags[n as usize]
    }

    /// `phi(1..=limit)`.
    pub fn phi_values(&self) -> &[u32] {
        &self.phi[1..]
    }

    /// `a_1..=a_limit`.
    pub fn a_values(&self) -> &[u64] {
        &self.a[1..]
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.prime_flags.iter_ones().map(|i| i as u64)
    }

    pub fn prime_count(&self) -> usize {
        self.prime_flags.count_ones()
    }

    /// `sum_{d|n} d phi(n/d)` for any `n <= limit`, even or odd, from the
    /// factorization held in `spf`.
    pub fn gcd_sum(&self, n: u64) -> u64 {
        let mut m = n;
        let mut acc = 1u64;
        while m > 1 {
            let p = self.spf(m) as u64;
            let mut e = 0u32;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            acc *= prime_power_gcd_sum(p, e);
        }
        acc
    }
}

/// `sum_{d | p^e} d phi(p^e / d) = p^e + e p^(e-1) (p - 1)`.
fn prime_power_gcd_sum(p: u64, e: u32) -> u64 {
    let pe1 = p.pow(e - 1);
    pe1 * p + e as u64 * pe1 * (p - 1)
}

fn alloc<T: Clone>(len: usize, fill: T) -> Result<Vec<T>> {
    let mut v = Vec::new();
    v.try_reserve_exact(len)
        .map_err(|e| Error::Resource(format!("cannot allocate {len} table entries: {e}")))?;
    v.resize(len, fill);
    Ok(v)
}

/// Builds all tables up to `limit` in linear time.
///
/// `a_n` is filled through multiplicativity with `a(2^e) = 0` and
/// `a(p^e) = p^e + e p^(e-1)(p-1)` for odd `p`.
pub fn build_sieves(limit: u64) -> Result<SieveTables> {
    if limit == 0 {
        return Err(domain("sieve limit must be >= 1"));
    }
    if limit > MAX_SIEVE_LIMIT {
        return Err(domain(format!(
            "sieve limit {limit} exceeds {MAX_SIEVE_LIMIT}"
        )));
    }
    let len = limit as usize + 1;
    let mut phi = alloc(len, 0u32)?;
    let mut spf = alloc(len, 0u32)?;
    let mut a = alloc(len, 0u64)?;
    // largest power of spf(n) dividing n
    let mut ppow = alloc(len, 0u32)?;
    let mut prime_flags = bitvec![0; len];
    let mut primes: Vec<u32> = Vec::new();

    phi[1] = 1;
    spf[1] = 1;
    a[1] = 1;
    ppow[1] = 1;

    let prime_power_a = |p: u64, pe: u64| -> u64 {
        if p == 2 {
            return 0;
        }
        let mut e = 0;
        let mut m = pe;
        while m > 1 {
            m /= p;
            e += 1;
        }
        prime_power_gcd_sum(p, e)
    };

    for i in 2..len {
        if spf[i] == 0 {
            spf[i] = i as u32;
            ppow[i] = i as u32;
            phi[i] = i as u32 - 1;
            a[i] = prime_power_a(i as u64, i as u64);
            prime_flags.set(i, true);
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            let n = i * p as usize;
            if p > si || n >= len {
                break;
            }
            spf[n] = p;
            if p == si {
                ppow[n] = ppow[i] * p;
                phi[n] = phi[i] * p;
                let pp = ppow[n] as usize;
                a[n] = if pp == n {
                    prime_power_a(p as u64, n as u64)
                } else {
                    a[n / pp] * a[pp]
                };
            } else {
                ppow[n] = p;
                phi[n] = phi[i] * (p - 1);
                a[n] = a[i] * a[p as usize];
            }
        }
    }

    Ok(SieveTables {
        limit,
        phi,
        spf,
        a,
        prime_flags,
    })
}
