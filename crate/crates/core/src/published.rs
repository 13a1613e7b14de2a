//! Previously published values of S(k), T(k) and the scan results built on
//! them, together with comparison helpers that name every disagreement.

use serde::{Deserialize, Serialize};

use crate::scan::{NegativeCensus, ScanReport, Threshold};

/// Published `S(k)` for `k = 1..=20`.
pub const TABLE_S: [i64; 20] = [
    0, 1, 2, 5, 4, 7, 10, 11, 11, 8, 17, 14, 21, 20, 15, 18, 39, 24, 21, 38,
];

/// Published `T(k)` for `k = 1..=20`.
pub const TABLE_T: [i64; 20] = [
    -1, -1, -5, -1, -9, -9, -13, -1, -25, -17, -21, -17, -25, -25, -61, -1, -33, -49, -37, -33,
];

/// Primes below 10^4 with `S(k) < 2k`.
pub const BELOW_2K: [u64; 17] = [
    2, 3, 5, 7, 11, 13, 17, 23, 29, 41, 53, 59, 83, 113, 149, 179, 233,
];

/// Primes below 10^4 with `S(k) < 3k`.
pub const BELOW_3K: [u64; 87] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 131, 137, 139, 149, 163, 167, 173, 179, 193, 197, 233, 239, 251, 257,
    263, 269, 293, 317, 347, 349, 359, 383, 389, 419, 439, 443, 449, 479, 503, 509, 557, 563, 569,
    593, 599, 683, 719, 743, 797, 809, 827, 839, 863, 1013, 1019, 1049, 1103, 1229, 1259, 1409,
    1733, 1889, 1913, 2339, 2459, 2969, 3119,
];

/// Published `(k, S(k))` pairs for primes `k <= 50000` failing `S(k) > 4k`.
pub const FAIL_4K: [(u64, i64); 8] = [
    (32603, 126466),
    (33149, 126068),
    (34649, 134104),
    (34913, 137712),
    (35573, 137420),
    (41579, 165026),
    (44909, 175916),
    (49139, 189522),
];

/// Published negative-value census for `k <= 10^4`: total, 3 not 5,
/// 5 not 3, 15.
pub const CENSUS_10K: (u64, u64, u64, u64) = (151, 39, 8, 104);

/// Individually published values of `S(k)`.
pub const SPOT_VALUES: [(u64, i64); 10] = [
    (945, -296),
    (2079, -1390),
    (3465, -7800),
    (5005, -1332),
    (8855, -7950),
    (9933, -448),
    (9975, -22450),
    (10395, -40726),
    (17017, -2364),
    (19019, -20578),
];

/// One published number that the recomputation does not reproduce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub item: String,
    pub published: String,
    pub recomputed: String,
    pub note: String,
}

/// Compares recomputed `S(1..)` against [`TABLE_S`].
///
/// `recomputed[i]` is `S(i + 1)`; only the overlapping prefix is compared.
/// A published value whose parity equals that of `k` is flagged as
/// contradicting the opposite-parity rule.
pub fn compare_table_s(recomputed: &[i64]) -> Vec<Discrepancy> {
    TABLE_S
        .iter()
        .zip(recomputed)
        .enumerate()
        .filter(|(_, (p, r))| p != r)
        .map(|(i, (&p, &r))| {
            let k = i as i64 + 1;
            let note = if (p - k).rem_euclid(2) == 0 {
                "parity-inconsistent: published S(k) has the parity of k".to_string()
            } else {
                "value differs".to_string()
            };
            Discrepancy {
                item: format!("S({k})"),
                published: p.to_string(),
                recomputed: r.to_string(),
                note,
            }
        })
        .collect()
}

pub fn compare_table_t(recomputed: &[i64]) -> Vec<Discrepancy> {
    TABLE_T
        .iter()
        .zip(recomputed)
        .enumerate()
        .filter(|(_, (p, r))| p != r)
        .map(|(i, (&p, &r))| Discrepancy {
            item: format!("T({})", i + 1),
            published: p.to_string(),
            recomputed: r.to_string(),
            note: "value differs".to_string(),
        })
        .collect()
}

/// Symmetric difference of a published and a recomputed list of `k`.
pub fn compare_k_lists(label: &str, published: &[u64], recomputed: &[u64]) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    for k in published.iter().filter(|k| !recomputed.contains(k)) {
        out.push(Discrepancy {
            item: format!("{label}: k={k}"),
            published: "listed".into(),
            recomputed: "absent".into(),
            note: "published exception not reproduced".into(),
        });
    }
    for k in recomputed.iter().filter(|k| !published.contains(k)) {
        out.push(Discrepancy {
            item: format!("{label}: k={k}"),
            published: "absent".into(),
            recomputed: "listed".into(),
            note: "recomputed exception missing from published list".into(),
        });
    }
    out
}

/// Like [`compare_k_lists`] but also compares the attached `S(k)` values.
pub fn compare_pairs(
    label: &str,
    published: &[(u64, i64)],
    recomputed: &[(u64, i64)],
) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    for &(k, s) in published {
        match recomputed.iter().find(|(rk, _)| *rk == k) {
            None => out.push(Discrepancy {
                item: format!("{label}: k={k}"),
                published: s.to_string(),
                recomputed: "absent".into(),
                note: "published exception not reproduced".into(),
            }),
            Some(&(_, rs)) if rs != s => out.push(Discrepancy {
                item: format!("{label}: k={k}"),
                published: s.to_string(),
                recomputed: rs.to_string(),
                note: "S(k) differs".into(),
            }),
            _ => {}
        }
    }
    for &(k, s) in recomputed {
        if !published.iter().any(|(pk, _)| *pk == k) {
            out.push(Discrepancy {
                item: format!("{label}: k={k}"),
                published: "absent".into(),
                recomputed: s.to_string(),
                note: "recomputed exception missing from published list".into(),
            });
        }
    }
    out
}

/// Largest `k` covered by the published 2k and 3k exception lists.
pub const LIST_COVERAGE: u64 = 10_000;
/// Largest prime `k` covered by the published 4k pairs.
pub const PAIRS_COVERAGE: u64 = 50_000;
/// Beyond these primes the 0, 2k and 3k bounds are conjectured to hold.
pub const CONJECTURE_FROM: [(Threshold, u64); 3] = [
    (Threshold::Zero, 5),
    (Threshold::TwoK, 233),
    (Threshold::ThreeK, 3119),
];

/// Exceptions from a prime scan that contradict the published lists or
/// one of the conjectured bounds.
pub fn compare_scan(report: &ScanReport, threshold: Threshold) -> Vec<Discrepancy> {
    let list = report.list(threshold);
    let mut out = Vec::new();
    if !report.primes_only {
        return out;
    }
    let within = |cap: u64| move |k: &u64| *k <= cap.min(report.limit);
    match threshold {
        Threshold::TwoK | Threshold::ThreeK => {
            let published: &[u64] = if threshold == Threshold::TwoK {
                &BELOW_2K
            } else {
                &BELOW_3K
            };
            let published: Vec<u64> = published
                .iter()
                .copied()
                .filter(within(LIST_COVERAGE))
                .collect();
            let recomputed: Vec<u64> = list
                .exception_ks()
                .into_iter()
                .filter(within(LIST_COVERAGE))
                .collect();
            out.extend(compare_k_lists(
                &format!("S(k) < {threshold}"),
                &published,
                &recomputed,
            ));
        }
        Threshold::FourK => {
            let published: Vec<(u64, i64)> = FAIL_4K
                .iter()
                .copied()
                .filter(|(k, _)| within(PAIRS_COVERAGE)(k))
                .collect();
            let recomputed: Vec<(u64, i64)> = list
                .exceptions
                .iter()
                .copied()
                .filter(|(k, _)| within(PAIRS_COVERAGE)(k))
                .collect();
            out.extend(compare_pairs("S(k) < 4k", &published, &recomputed));
        }
        Threshold::Zero => {}
    }
    if let Some(&(_, from)) = CONJECTURE_FROM.iter().find(|(t, _)| *t == threshold) {
        let coverage = match threshold {
            Threshold::Zero => 0,
            _ => LIST_COVERAGE,
        };
        for &(k, s) in list.exceptions.iter().chain(&list.equalities) {
            if k > from && k > coverage {
                out.push(Discrepancy {
                    item: format!("S(k) > {threshold}: k={k}"),
                    published: format!("S(k) > {threshold} conjectured for primes k > {from}"),
                    recomputed: s.to_string(),
                    note: "counterexample to the conjectured bound".into(),
                });
            }
        }
    }
    out
}

/// Census counts and published spot values the census does not reproduce.
/// Counts are compared when the census covers `k <= 10^4`; a spot value is
/// compared when its `k` lies within the census.
pub fn compare_census(census: &NegativeCensus) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    if census.limit >= LIST_COVERAGE {
        let sub = NegativeCensus::from_values(
            LIST_COVERAGE,
            census
                .negatives
                .iter()
                .copied()
                .filter(|(k, _)| *k <= LIST_COVERAGE),
        );
        let (total, d3, d5, d15) = CENSUS_10K;
        for (name, p, r) in [
            ("negatives k<=10000", total, sub.total),
            ("divisible by 3 not 5", d3, sub.div3_not5),
            ("divisible by 5 not 3", d5, sub.div5_not3),
            ("divisible by 15", d15, sub.div15),
            ("divisible by neither", 0, sub.other),
        ] {
            if p != r {
                out.push(Discrepancy {
                    item: format!("census {name}"),
                    published: p.to_string(),
                    recomputed: r.to_string(),
                    note: "count differs".into(),
                });
            }
        }
    }
    for &(k, s) in SPOT_VALUES.iter().filter(|(k, _)| *k <= census.limit) {
        let got = census.value_of(k);
        if got != Some(s) {
            out.push(Discrepancy {
                item: format!("S({k})"),
                published: s.to_string(),
                recomputed: got.map_or("non-negative".into(), |v| v.to_string()),
                note: "spot value differs".into(),
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_have_expected_shape() {
        assert_eq!(BELOW_3K.last(), Some(&3119));
        assert!(BELOW_2K.iter().all(|k| BELOW_3K.contains(k)));
        assert!(BELOW_3K.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn table_s_parity_flags() {
        // a recomputation identical to the table up to k = 8, then shifted
        let mut rec: Vec<i64> = TABLE_S[..8].to_vec();
        rec.extend_from_slice(&[8, 17, 14]);
        let d = compare_table_s(&rec);
        assert_eq!(d.len(), 3);
        assert_eq!(d[0].item, "S(9)");
        assert!(d.iter().all(|x| x.note.starts_with("parity-inconsistent")));
    }

    #[test]
    fn list_diffs_name_both_directions() {
        let d = compare_k_lists("2k", &[2, 3, 5], &[2, 5, 7]);
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].item, "2k: k=3");
        assert_eq!(d[1].item, "2k: k=7");
        let d = compare_pairs("4k", &[(5, 4), (7, 10)], &[(5, 6), (7, 10), (11, 2)]);
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].note, "S(k) differs");
        assert_eq!(d[1].item, "4k: k=11");
    }
}
