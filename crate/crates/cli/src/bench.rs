use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use theta_sums::asymptotics::fit_exponent;
use theta_sums::exact::s_k_naive;
use theta_sums::fast::s_k_fast;
use theta_sums::sieve::build_sieves;
use theta_sums::{Error, Result};

/// Upper end of the naive timing sample; enumeration is quadratic.
pub const NAIVE_SAMPLE_CAP: u64 = 8_000;
/// Measurements are repeated until a batch takes at least this long.
const MIN_BATCH: Duration = Duration::from_millis(20);
/// Best of this many batches is kept.
const BATCHES: usize = 3;
const SAMPLE_POINTS: usize = 6;
pub const FAST_EXPONENT_MAX: f64 = 1.5;
pub const NAIVE_EXPONENT_RANGE: (f64, f64) = (1.7, 2.3);

/// Seconds per call of one kernel at one `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub method: String,
    pub k: u64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub limit: u64,
    pub timings: Vec<Timing>,
    pub fast_exponent: Option<f64>,
    pub naive_exponent: Option<f64>,
    /// `k` where the two kernels disagree on the sample.
    pub mismatches: Vec<u64>,
    /// Wall time of the fast kernel over every prime up to the limit.
    pub fast_all_primes_seconds: f64,
    /// Naive wall time over primes up to a tenth of the limit, scaled by
    /// `sum p^2` to the full range.
    pub naive_extrapolated_seconds: f64,
}

impl BenchReport {
    pub fn speedup(&self) -> f64 {
        self.naive_extrapolated_seconds / self.fast_all_primes_seconds
    }

    pub fn passed(&self) -> bool {
        let fast_ok = self.fast_exponent.is_some_and(|e| e < FAST_EXPONENT_MAX);
        let (lo, hi) = NAIVE_EXPONENT_RANGE;
        let naive_ok = self.naive_exponent.is_some_and(|e| (lo..=hi).contains(&e));
        fast_ok && naive_ok && self.mismatches.is_empty()
    }
}

/// Seconds per call, best of several batches.
fn time_per_call(mut f: impl FnMut() -> Result<i64>) -> Result<f64> {
    let mut best = f64::INFINITY;
    for _ in 0..BATCHES {
        let started = Instant::now();
        let mut calls = 0u32;
        while started.elapsed() < MIN_BATCH || calls == 0 {
            std::hint::black_box(f()?);
            calls += 1;
        }
        best = best.min(started.elapsed().as_secs_f64() / calls as f64);
    }
    Ok(best)
}

/// Primes nearest to `SAMPLE_POINTS` geometric points in `[lo, hi]`.
fn prime_sample(lo: u64, hi: u64) -> Result<Vec<u64>> {
    let tables = build_sieves(hi)?;
    let primes: Vec<u64> = tables.primes().filter(|&p| p >= lo).collect();
    let ratio = (hi as f64 / lo as f64).powf(1.0 / (SAMPLE_POINTS - 1) as f64);
    let mut out: Vec<u64> = (0..SAMPLE_POINTS)
        .filter_map(|i| {
            let target = lo as f64 * ratio.powi(i as i32);
            primes.iter().copied().min_by(|a, b| {
                (*a as f64 - target)
                    .abs()
                    .total_cmp(&(*b as f64 - target).abs())
            })
        })
        .collect();
    out.dedup();
    Ok(out)
}

/// Times naive and fast `S(k)` on prime samples, fits growth exponents and
/// rechecks agreement.
pub fn bench(limit: u64) -> Result<BenchReport> {
    if limit < 100 {
        return Err(Error::Domain("bench limit must be >= 100".into()));
    }
    let mut timings = Vec::new();
    let mut mismatches = Vec::new();

    let fast_sample = prime_sample((limit / 32).max(50), limit)?;
    for &k in &fast_sample {
        let seconds = time_per_call(|| Ok(s_k_fast(k)?.value))?;
        timings.push(Timing {
            method: "fast".into(),
            k,
            seconds,
        });
    }
    let naive_hi = (limit / 2).clamp(100, NAIVE_SAMPLE_CAP);
    let naive_sample = prime_sample((naive_hi / 16).max(50), naive_hi)?;
    for &k in &naive_sample {
        let seconds = time_per_call(|| Ok(s_k_naive(k)?.value))?;
        timings.push(Timing {
            method: "naive".into(),
            k,
            seconds,
        });
        if s_k_naive(k)?.value != s_k_fast(k)?.value {
            mismatches.push(k);
        }
    }
    let fit = |m: &str| {
        let pts: Vec<(f64, f64)> = timings
            .iter()
            .filter(|t| t.method == m)
            .map(|t| (t.k as f64, t.seconds))
            .collect();
        fit_exponent(&pts)
    };

    let tables = build_sieves(limit)?;
    let started = Instant::now();
    for p in tables.primes() {
        std::hint::black_box(s_k_fast(p)?);
    }
    let fast_all = started.elapsed().as_secs_f64();
    let tenth = (limit / 10).max(2);
    let started = Instant::now();
    for p in tables.primes().take_while(|&p| p <= tenth) {
        std::hint::black_box(s_k_naive(p)?);
    }
    let naive_tenth = started.elapsed().as_secs_f64();
    let sq = |cap: u64| -> f64 {
        tables
            .primes()
            .take_while(|&p| p <= cap)
            .map(|p| (p as f64).powi(2))
            .sum()
    };
    let naive_extrapolated = naive_tenth * sq(limit) / sq(tenth);

    Ok(BenchReport {
        limit,
        fast_exponent: fit("fast"),
        naive_exponent: fit("naive"),
        timings,
        mismatches,
        fast_all_primes_seconds: fast_all,
        naive_extrapolated_seconds: naive_extrapolated,
    })
}
