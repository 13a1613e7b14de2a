use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{run_chunks, ScanKind};
use crate::error::{domain, Result};
use crate::fast::s_k_fast;
use crate::verify::is_prime_u64;

/// Negative values of `S(k)` for `k <= limit`, by divisibility of `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegativeCensus {
    pub limit: u64,
    pub total: u64,
    pub div3_not5: u64,
    pub div5_not3: u64,
    pub div15: u64,
    pub other: u64,
    /// `(k, S(k))` with `S(k) < -k`.
    pub extremes: Vec<(u64, i64)>,
    /// Every `(k, S(k))` with `S(k) < 0`.
    #[serde(skip)]
    pub negatives: Vec<(u64, i64)>,
}

impl NegativeCensus {
    pub fn from_values(limit: u64, values: impl IntoIterator<Item = (u64, i64)>) -> Self {
        let mut c = NegativeCensus {
            limit,
            total: 0,
            div3_not5: 0,
            div5_not3: 0,
            div15: 0,
            other: 0,
            extremes: Vec::new(),
            negatives: Vec::new(),
        };
        for (k, s) in values.into_iter().filter(|&(_, s)| s < 0) {
            c.total += 1;
            match (k % 3 == 0, k % 5 == 0) {
                (true, true) => c.div15 += 1,
                (true, false) => c.div3_not5 += 1,
                (false, true) => c.div5_not3 += 1,
                (false, false) => c.other += 1,
            }
            if (s as i128) < -(k as i128) {
                c.extremes.push((k, s));
            }
            c.negatives.push((k, s));
        }
        c.negatives.sort_unstable();
        c.extremes.sort_unstable();
        c
    }

    /// `{limit, total, div3_not5, div5_not3, div15, other, extremes}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("census serializes")
    }

    pub fn value_of(&self, k: u64) -> Option<i64> {
        self.negatives
            .binary_search_by_key(&k, |e| e.0)
            .ok()
            .map(|i| self.negatives[i].1)
    }
}

/// Counts `k <= limit` with `S(k) < 0`.
pub fn negative_census(limit: u64) -> Result<NegativeCensus> {
    negative_census_with(limit, rayon::current_num_threads(), None)
}

/// [`negative_census`] with an explicit worker count and optional
/// checkpoint file.
pub fn negative_census_with(
    limit: u64,
    workers: usize,
    checkpoint: Option<&Path>,
) -> Result<NegativeCensus> {
    if limit < 1 {
        return Err(domain("census limit must be >= 1"));
    }
    let (_, state) = run_chunks(ScanKind::Census, limit, false, workers, checkpoint, None)?;
    Ok(NegativeCensus::from_values(
        limit,
        state.chunks.iter().flat_map(|c| c.values.iter().copied()),
    ))
}

/// `S(p) mod 4` over odd primes `p`, split by `p mod 4`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mod4Distribution {
    pub prime_limit: u64,
    pub total: u64,
    pub count0: u64,
    pub count2: u64,
    /// `by_class[a][b]`: primes with `p = 2a+1 (mod 4)` and `S(p) = 2b (mod 4)`.
    pub by_class: [[u64; 2]; 2],
    /// Odd primes with `S(p)` odd, which the dichotomy rules out.
    pub violations: Vec<(u64, i64)>,
}

impl Mod4Distribution {
    /// `|count0 - count2| / total`.
    pub fn imbalance(&self) -> f64 {
        (self.count0 as f64 - self.count2 as f64).abs() / self.total as f64
    }
}

pub fn mod4_distribution(prime_limit: u64) -> Result<Mod4Distribution> {
    if prime_limit < 5 {
        return Err(domain("mod-4 distribution needs prime_limit >= 5"));
    }
    let mut d = Mod4Distribution {
        prime_limit,
        total: 0,
        count0: 0,
        count2: 0,
        by_class: [[0; 2]; 2],
        violations: Vec::new(),
    };
    for p in (3..=prime_limit).step_by(2).filter(|&p| is_prime_u64(p)) {
        let s = s_k_fast(p)?.value;
        d.total += 1;
        match s.rem_euclid(4) {
            0 => d.count0 += 1,
            2 => d.count2 += 1,
            _ => {
                d.violations.push((p, s));
                continue;
            }
        }
        d.by_class[((p % 4) / 2) as usize][(s.rem_euclid(4) / 2) as usize] += 1;
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nothing_negative_to_900() {
        let c = negative_census(900).unwrap();
        assert_eq!(c.total, 0);
        assert!(c.extremes.is_empty());
    }

    #[test]
    fn partition_is_exhaustive() {
        let c = NegativeCensus::from_values(20, vec![(3, -1), (5, -1), (15, -40), (7, -2), (9, 4)]);
        assert_eq!(c.total, 4);
        assert_eq!((c.div3_not5, c.div5_not3, c.div15, c.other), (1, 1, 1, 1));
        assert_eq!(c.extremes, vec![(15, -40)]);
        assert_eq!(c.value_of(15), Some(-40));
        assert_eq!(c.value_of(9), None);
        let v: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), 7);
        assert_eq!(v["extremes"], serde_json::json!([[15, -40]]));
    }

    #[test]
    fn first_negative_is_945() {
        let c = negative_census(1000).unwrap();
        assert_eq!(c.negatives, vec![(945, -296)]);
        assert_eq!(c.div15, 1);
    }

    #[test]
    fn mod4_small() {
        let d = mod4_distribution(7).unwrap();
        // S(3)=2, S(5)=4, S(7)=10
        assert_eq!((d.count0, d.count2), (1, 2));
        assert!(d.violations.is_empty());
        assert!(mod4_distribution(4).is_err());
    }
}
