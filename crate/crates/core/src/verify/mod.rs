//! Exact property suites for the identities, bounds and propositions
//! satisfied by the S and T sums.
//!
//! Every suite returns a [`VerificationReport`] listing each counterexample
//! it met. Reports built over disjoint chunks of a range merge in input
//! order, so a parallel run yields the same report as a sequential one.

mod elementary;
mod equivalence;
mod fractional;
mod lower_bounds;
mod reciprocity;

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use elementary::{verify_elementary, verify_kernel_identities};
pub use equivalence::{verify_fast_equivalence, verify_floor_sum_random, verify_random_pairs};
pub use fractional::{
    classify_pair, fractional_part_witness, m_jk, pairing_witness, verify_column_pairing,
    verify_fractional_part, FractionalPartWitness, PairCase, PairingWitness,
};
pub use lower_bounds::{bound_witness, odd_harmonic, verify_lower_bounds, BoundWitness};
pub use reciprocity::{verify_reciprocity_dedekind, verify_reciprocity_theta};

/// A single counterexample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub inputs: String,
    pub expected: String,
    pub actual: String,
}

/// Outcome of one suite over one range.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub range: String,
    pub cases: u64,
    pub failures: Vec<Failure>,
    #[serde(rename = "elapsed_ms", with = "millis")]
    pub elapsed: Duration,
}

mod millis {
    use serde::{Deserialize, Deserializer, Serializer};
    use std::time::Duration;

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_millis(u64::deserialize(d)?))
    }
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Same suite, range, case count and failures; timing ignored.
    pub fn same_outcome(&self, other: &VerificationReport) -> bool {
        self.suite == other.suite
            && self.range == other.range
            && self.cases == other.cases
            && self.failures == other.failures
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(
            f,
            "[{status}] {} ({}) cases={} failures={} elapsed={}ms",
            self.suite,
            self.range,
            self.cases,
            self.failures.len(),
            self.elapsed.as_millis()
        )?;
        for fl in self.failures.iter().take(20) {
            writeln!(
                f,
                "    {}: expected {}, got {}",
                fl.inputs, fl.expected, fl.actual
            )?;
        }
        if self.failures.len() > 20 {
            writeln!(f, "    ... {} more", self.failures.len() - 20)?;
        }
        Ok(())
    }
}

/// Case counter and failure list for one chunk of a range.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub(crate) struct Tally {
    pub cases: u64,
    pub failures: Vec<Failure>,
}

impl Tally {
    pub fn check(
        &mut self,
        ok: bool,
        inputs: impl FnOnce() -> String,
        expected: impl fmt::Display,
        actual: impl fmt::Display,
    ) {
        self.cases += 1;
        if !ok {
            self.failures.push(Failure {
                inputs: inputs(),
                expected: expected.to_string(),
                actual: actual.to_string(),
            });
        }
    }

    pub fn check_eq<T: PartialEq + fmt::Display>(
        &mut self,
        inputs: impl FnOnce() -> String,
        expected: T,
        actual: T,
    ) {
        let ok = expected == actual;
        self.check(ok, inputs, expected, actual);
    }

    /// Records an evaluation error as a failure.
    pub fn check_result<T: PartialEq + fmt::Display>(
        &mut self,
        inputs: impl FnOnce() -> String,
        expected: T,
        actual: crate::Result<T>,
    ) {
        match actual {
            Ok(v) => self.check_eq(inputs, expected, v),
            Err(e) => self.check(false, inputs, expected, format!("error: {e}")),
        }
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.cases += other.cases;
        self.failures.extend(other.failures);
        self
    }

    pub fn into_report(self, suite: &str, range: String, started: Instant) -> VerificationReport {
        VerificationReport {
            suite: suite.to_string(),
            range,
            cases: self.cases,
            failures: self.failures,
            elapsed: started.elapsed(),
        }
    }
}

/// Runs `per_item` over `items` in parallel and merges tallies in order.
pub(crate) fn par_tally<I, F>(items: Vec<I>, per_item: F) -> Tally
where
    I: Send + Sync,
    F: Fn(&I, &mut Tally) + Send + Sync,
{
    use rayon::prelude::*;
    items
        .par_iter()
        .map(|it| {
            let mut t = Tally::default();
            per_item(it, &mut t);
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Tally::default(), Tally::merge)
}

/// Odd primes `<= limit` by trial-free sieve.
pub(crate) fn odd_primes_upto(limit: u64) -> crate::Result<Vec<u64>> {
    if limit < 3 {
        return Ok(Vec::new());
    }
    let t = crate::sieve::build_sieves(limit)?;
    Ok(t.primes().filter(|&p| p > 2).collect())
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Runs every suite at sizes scaled from `max`.
pub fn verify_all(max: u64) -> crate::Result<Vec<VerificationReport>> {
    let max = max.max(7);
    Ok(vec![
        verify_reciprocity_theta(max)?,
        verify_reciprocity_dedekind(max.min(100))?,
        verify_elementary(max)?,
        verify_kernel_identities(max)?,
        verify_fractional_part(max)?,
        verify_column_pairing(max)?,
        verify_lower_bounds(max)?,
        verify_fast_equivalence(max.min(512), max.min(512))?,
    ])
}
