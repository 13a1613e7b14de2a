use std::time::Instant;

use num_integer::Integer;

use super::{par_tally, Tally, VerificationReport};
use crate::error::{domain, Result};
use crate::exact::{dedekind_s, s_hk_naive};
use crate::rational::Rational;

/// `S(d,c) + S(c,d) = 1` for coprime `c, d <= limit` of opposite parity.
pub fn verify_reciprocity_theta(limit: u64) -> Result<VerificationReport> {
    if limit < 2 {
        return Err(domain("theta reciprocity needs limit >= 2"));
    }
    let started = Instant::now();
    let rows: Vec<u64> = (1..=limit).collect();
    let tally = par_tally(rows, |&c, t: &mut Tally| {
        for d in (c + 1..=limit).filter(|d| (c + d) % 2 == 1 && c.gcd(d) == 1) {
            let sum = s_hk_naive(d, c).and_then(|a| Ok(a.value + s_hk_naive(c, d)?.value));
            t.check_result(|| format!("(c,d)=({c},{d})"), 1, sum);
        }
    });
    Ok(tally.into_report(
        "reciprocity-theta",
        format!("coprime opposite-parity c<d<={limit}"),
        started,
    ))
}

/// `s(c,d) + s(d,c) = -1/4 + (c/d + 1/(cd) + d/c)/12` for coprime
/// `c, d <= limit`, in exact rationals.
pub fn verify_reciprocity_dedekind(limit: u64) -> Result<VerificationReport> {
    if limit < 1 {
        return Err(domain("Dedekind reciprocity needs limit >= 1"));
    }
    let started = Instant::now();
    let rows: Vec<u64> = (1..=limit).collect();
    let tally = par_tally(rows, |&c, t: &mut Tally| {
        for d in (c..=limit).filter(|d| c.gcd(d) == 1) {
            let lhs = dedekind_s(c as i64, d).and_then(|a| a.checked_add(dedekind_s(d as i64, c)?));
            let (ci, di) = (c as i128, d as i128);
            let rhs = Rational::new(-1, 4)
                .and_then(|q| q.checked_add(Rational::new(ci * ci + 1 + di * di, 12 * ci * di)?));
            match (lhs, rhs) {
                (Ok(l), Ok(r)) => t.check_eq(|| format!("(c,d)=({c},{d})"), r, l),
                (l, r) => t.check(
                    false,
                    || format!("(c,d)=({c},{d})"),
                    format!("{r:?}"),
                    format!("{l:?}"),
                ),
            }
        }
    });
    Ok(tally.into_report(
        "reciprocity-dedekind",
        format!("coprime c<=d<={limit}"),
        started,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::s_hk_naive;

    #[test]
    fn theta_pairs() {
        assert_eq!(
            s_hk_naive(2, 3).unwrap().value + s_hk_naive(3, 2).unwrap().value,
            1
        );
        assert_eq!(s_hk_naive(1, 2).unwrap().value, 1);
        assert_eq!(s_hk_naive(2, 1).unwrap().value, 0);
        let r = verify_reciprocity_theta(60).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.cases > 0);
    }

    #[test]
    fn dedekind_pairs() {
        let r = verify_reciprocity_dedekind(40).unwrap();
        assert!(r.passed(), "{r}");
        // (1,1): 0 = -1/4 + 3/12
        let s = dedekind_s(1, 1).unwrap();
        assert_eq!(s, Rational::ZERO);
        // (2,3): -1/18 + 1/18? s(2,3) + s(3,2) = -1/18 + 0
        let lhs = dedekind_s(2, 3)
            .unwrap()
            .checked_add(dedekind_s(3, 2).unwrap())
            .unwrap();
        let rhs = Rational::new(-1, 4)
            .unwrap()
            .checked_add(Rational::new(7, 36).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, Rational::new(-1, 18).unwrap());
    }

    #[test]
    fn rejects_small_limits() {
        assert!(verify_reciprocity_theta(1).is_err());
        assert!(verify_reciprocity_dedekind(0).is_err());
    }
}
