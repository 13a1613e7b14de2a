//! Partial sums of the odd divisor–totient convolution `a_n` against the
//! residue main term `x^2 log x / pi^2 + c x^2`.
//!
//! Partial sums are exact integers; floats enter only in the main term,
//! the constants, and the comparison between the two.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::sieve::{build_sieves, SieveTables};

/// `B_2, B_4, ..., B_16`.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Cut-off at which the Euler–Maclaurin tails take over.
const EM_CUTOFF: u64 = 64;

/// Constants of the main term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants {
    /// Euler's constant.
    pub gamma: f64,
    /// `zeta'(2)`.
    pub zeta_prime_2: f64,
    /// `A = 12 gamma - 3 + 10 log 2`, obtained from the Laurent expansion
    /// of the generating series at `s = 2`.
    #[serde(rename = "A")]
    pub a: f64,
    /// Coefficient `1/pi^2` of `x^2 log x`.
    pub c_log: f64,
    /// Coefficient `(A - 36 zeta'(2)/pi^2) / (6 pi^2)` of `x^2`.
    pub c_quad: f64,
}

fn sum_descending(terms: impl DoubleEndedIterator<Item = f64>) -> f64 {
    terms.rev().fold(0.0, |acc, t| acc + t)
}

/// Euler's constant from `H_N - log N - 1/(2N) + sum B_2k / (2k N^2k)`.
fn euler_gamma() -> f64 {
    let n = EM_CUTOFF as f64;
    let harmonic = sum_descending((1..=EM_CUTOFF).map(|j| 1.0 / j as f64));
    let tail: f64 = BERNOULLI
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let two_k = 2 * (i as i32 + 1);
            b / (two_k as f64 * n.powi(two_k))
        })
        .sum();
    harmonic - n.ln() - 0.5 / n + tail
}

/// `zeta'(2) = -sum log n / n^2`, with the tail from `N` on by
/// Euler–Maclaurin. For `f(x) = log x / x^2`,
/// `f^(m)(N) = (-1)^(m+1) (m+1)! N^(-2-m) (H_(m+1) - 1 - log N)`.
fn zeta_prime_two() -> f64 {
    let n = EM_CUTOFF as f64;
    let ln_n = n.ln();
    let head = sum_descending((1..EM_CUTOFF).map(|j| (j as f64).ln() / (j as f64).powi(2)));
    let integral = (ln_n + 1.0) / n;
    let half = ln_n / (n * n) / 2.0;
    let mut correction = 0.0;
    let mut factorial_2k = 1.0; // (2k)!
    for (i, b) in BERNOULLI.iter().enumerate() {
        let two_k = 2 * (i + 1);
        factorial_2k *= ((two_k - 1) * two_k) as f64;
        let m = two_k - 1; // derivative order, odd
        let m_plus_1_fact = factorial_2k; // (m+1)! = (2k)!
        let h_m1: f64 = (1..=m + 1).map(|t| 1.0 / t as f64).sum();
        let deriv = m_plus_1_fact * n.powi(-(2 + m as i32)) * (h_m1 - 1.0 - ln_n); // sign (+) for odd m
        correction += b / factorial_2k * deriv;
    }
    -(head + integral + half - correction)
}

/// Logarithmic derivative of `E(s) = (1 - 2^(1-s))^2 / (1 - 2^(-s))`.
fn log_derivative_e(s: f64) -> f64 {
    let u = 2f64.powf(1.0 - s);
    let v = 2f64.powf(-s);
    2.0 * u * LN_2 / (1.0 - u) - v * LN_2 / (1.0 - v)
}

/// Computes `gamma`, `zeta'(2)` and the main-term coefficients.
///
/// `A` comes from the residue at `s = 2`: `A = 6 (2 gamma + E'(2)/E(2) - 1/2)`,
/// which is independent of the closed form `12 gamma - 3 + 10 log 2`.
pub fn compute_constants() -> AsymptoticConstants {
    let gamma = euler_gamma();
    let zeta_prime_2 = zeta_prime_two();
    let a = 6.0 * (2.0 * gamma + log_derivative_e(2.0) - 0.5);
    let pi2 = PI * PI;
    AsymptoticConstants {
        gamma,
        zeta_prime_2,
        a,
        c_log: 1.0 / pi2,
        c_quad: (a - 36.0 * zeta_prime_2 / pi2) / (6.0 * pi2),
    }
}

/// `A - (12 gamma - 3 + 10 log 2)`.
pub fn constants_identity_residual(c: &AsymptoticConstants) -> f64 {
    c.a - (12.0 * c.gamma - 3.0 + 10.0 * LN_2)
}

/// `c_log x^2 log x + c_quad x^2`.
pub fn main_term(x: u64, consts: &AsymptoticConstants) -> f64 {
    let xf = x as f64;
    consts.c_log * xf * xf * xf.ln() + consts.c_quad * xf * xf
}

/// One comparison of the half-last-term partial sum with the main term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticSample {
    pub x: u64,
    /// `2 sum_{n<x} a_n + a_x`.
    pub twice_partial: i128,
    pub main: f64,
    pub abs_err: f64,
    pub rel_err: f64,
}

impl AsymptoticSample {
    pub const CSV_HEADER: [&'static str; 5] = [
        "x",
        "partial_sum_times_two",
        "main_term",
        "abs_err",
        "rel_err",
    ];

    fn new(x: u64, twice_partial: i128, consts: &AsymptoticConstants) -> Self {
        let main = main_term(x, consts);
        let abs_err = (twice_partial as f64 / 2.0 - main).abs();
        AsymptoticSample {
            x,
            twice_partial,
            main,
            abs_err,
            rel_err: abs_err / main.abs(),
        }
    }

    /// Row in the CSV column order; floats carry 15 significant digits.
    pub fn csv_record(&self) -> [String; 5] {
        [
            self.x.to_string(),
            self.twice_partial.to_string(),
            format!("{:.14e}", self.main),
            format!("{:.14e}", self.abs_err),
            format!("{:.14e}", self.rel_err),
        ]
    }
}

/// `Σ'_{n<=x} a_n` (last term halved), doubled, compared with the main term.
pub fn partial_sum_a(
    x: u64,
    tables: &SieveTables,
    consts: &AsymptoticConstants,
) -> Result<AsymptoticSample> {
    Ok(partial_sums_at(&[x], tables, consts)?.remove(0))
}

/// Samples at every `x` in `xs` (ascending) in one pass over the table.
pub fn partial_sums_at(
    xs: &[u64],
    tables: &SieveTables,
    consts: &AsymptoticConstants,
) -> Result<Vec<AsymptoticSample>> {
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(domain("sample points must be strictly ascending"));
    }
    if let Some(&x) = xs.first() {
        if x == 0 {
            return Err(domain("sample points must be >= 1"));
        }
    }
    if let Some(&x) = xs.last() {
        if x > tables.limit() {
            return Err(domain(format!(
                "x = {x} exceeds sieve limit {}",
                tables.limit()
            )));
        }
    }
    let a = tables.a_values();
    let mut out = Vec::with_capacity(xs.len());
    let mut below: i128 = 0; // sum_{n < next} a_n
    let mut next = 1u64;
    for &x in xs {
        while next < x {
            below += a[(next - 1) as usize] as i128;
            next += 1;
        }
        let ax = a[(x - 1) as usize] as i128;
        out.push(AsymptoticSample::new(x, 2 * below + ax, consts));
    }
    Ok(out)
}

/// Truncated Dirichlet series against their zeta closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletCheck {
    pub s: f64,
    pub truncation: u64,
    /// `sum_{n<=N} P(n)/n^s` over all `n`, `P` the gcd-sum function.
    pub g_series: f64,
    /// `zeta(s-1)^2 / zeta(s)`.
    pub g_closed: f64,
    /// `sum_{n<=N} a_n/n^s` (odd `n` only).
    pub f_series: f64,
    /// `(1 - 2^(1-s))^2 / (1 - 2^(-s)) * zeta(s-1)^2 / zeta(s)`.
    pub f_closed: f64,
}

/// Riemann zeta for real `s > 1` by Euler–Maclaurin.
pub fn zeta(s: f64) -> Result<f64> {
    // Written negated so that NaN is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(s > 1.0) {
        return Err(domain(format!("zeta needs s > 1, got {s}")));
    }
    let n = EM_CUTOFF as f64;
    let head = sum_descending((1..EM_CUTOFF).map(|j| (j as f64).powf(-s)));
    let mut tail = n.powf(1.0 - s) / (s - 1.0) + n.powf(-s) / 2.0;
    let mut rising = s; // (s)_(2k-1)
    let mut factorial_2k = 1.0;
    for (i, b) in BERNOULLI.iter().enumerate() {
        let two_k = 2 * (i + 1);
        factorial_2k *= ((two_k - 1) * two_k) as f64;
        if i > 0 {
            rising *= (s + two_k as f64 - 3.0) * (s + two_k as f64 - 2.0);
        }
        tail += b / factorial_2k * rising * n.powf(-s - two_k as f64 + 1.0);
    }
    Ok(head + tail)
}

/// Compares the generating series of `a_n` with their closed forms.
pub fn dirichlet_spot_check(s: f64, truncation: u64) -> Result<DirichletCheck> {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(s >= 3.0) {
        return Err(domain(format!(
            "Dirichlet spot check needs s >= 3, got {s}"
        )));
    }
    if truncation < 1000 {
        return Err(domain("Dirichlet spot check needs truncation >= 1000"));
    }
    let tables = build_sieves(truncation)?;
    let term = |n: u64, v: u64| v as f64 * (n as f64).powf(-s);
    let g_series = sum_descending((1..=truncation).map(|n| term(n, tables.gcd_sum(n))));
    let f_series = sum_descending((1..=truncation).map(|n| term(n, tables.a(n))));
    let g_closed = zeta(s - 1.0)?.powi(2) / zeta(s)?;
    let e = (1.0 - 2f64.powf(1.0 - s)).powi(2) / (1.0 - 2f64.powf(-s));
    Ok(DirichletCheck {
        s,
        truncation,
        g_series,
        g_closed,
        f_series,
        f_closed: e * g_closed,
    })
}

/// Samples plus the least-squares exponent of `abs_err` against `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorScan {
    pub samples: Vec<AsymptoticSample>,
    /// `None` when fewer than two samples have a nonzero error.
    pub slope: Option<f64>,
}

/// Least-squares slope of `log y` against `log x` over the points with
/// `y > 0`; `None` for a degenerate fit.
pub fn fit_exponent(points: &[(f64, f64)]) -> Option<f64> {
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0 && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if logs.len() < 2 {
        return None;
    }
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Samples at `xs` and the fitted error exponent. Needs at least four
/// ascending points spanning two decades.
pub fn error_scan(
    xs: &[u64],
    tables: &SieveTables,
    consts: &AsymptoticConstants,
) -> Result<ErrorScan> {
    if xs.len() < 4 {
        return Err(domain("error scan needs at least 4 sample points"));
    }
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    if lo == 0 || (hi as f64) < 100.0 * lo as f64 {
        return Err(domain("error scan points must span at least two decades"));
    }
    let samples = partial_sums_at(xs, tables, consts)?;
    let points: Vec<(f64, f64)> = samples.iter().map(|s| (s.x as f64, s.abs_err)).collect();
    Ok(ErrorScan {
        slope: fit_exponent(&points),
        samples,
    })
}

/// `1, 2, 5 x 10^d` for `10^3 <= x <= max`, followed by `max` itself.
pub fn sample_points(max: u64) -> Vec<u64> {
    let mut xs = Vec::new();
    let mut decade = 1000u64;
    while decade <= max {
        for m in [1, 2, 5] {
            if let Some(x) = decade.checked_mul(m).filter(|&x| x <= max) {
                xs.push(x);
            }
        }
        decade = match decade.checked_mul(10) {
            Some(d) => d,
            None => break,
        };
    }
    if xs.last() != Some(&max) && max >= 1000 {
        xs.push(max);
    }
    xs
}

/// Odd `k <= limit` where `T(k) != 2k - 1 - 2 a_k`, with `T(k)` from the
/// surviving terms of its definition and `a_k` from the sieve.
pub fn odd_t_mismatches(limit: u64, tables: &SieveTables) -> Result<Vec<u64>> {
    use rayon::prelude::*;
    if limit > tables.limit() {
        return Err(domain("limit exceeds sieve"));
    }
    let ks: Vec<u64> = (1..=limit).step_by(2).collect();
    let bad: Result<Vec<Option<u64>>> = ks
        .par_iter()
        .map(|&k| {
            let t = crate::fast::t_k_reduced(k)?.value as i128;
            let expected = 2 * k as i128 - 1 - 2 * tables.a(k) as i128;
            Ok((t != expected).then_some(k))
        })
        .collect();
    Ok(bad?.into_iter().flatten().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values to 21 digits.
    const GAMMA: f64 = 0.577_215_664_901_532_9;
    const ZETA_PRIME_2: f64 = -0.937_548_254_315_843_8;

    #[test]
    fn constants_to_twelve_digits() {
        let c = compute_constants();
        assert!((c.gamma - GAMMA).abs() < 1e-13, "{}", c.gamma);
        assert!(
            (c.zeta_prime_2 - ZETA_PRIME_2).abs() < 1e-13,
            "{}",
            c.zeta_prime_2
        );
        assert!(constants_identity_residual(&c).abs() < 1e-12);
        assert!((c.c_log - 0.101_321_183_642_337_78).abs() < 1e-15);
    }

    #[test]
    fn main_term_examples() {
        let c = compute_constants();
        assert_eq!(main_term(1, &c), c.c_quad);
        // Sigma'(10) = 49
        assert!(
            (main_term(10, &c) - 47.44).abs() < 0.01,
            "{}",
            main_term(10, &c)
        );
        let r = main_term(2_000_000, &c) / main_term(1_000_000, &c);
        assert!((r - 4.0).abs() < 0.25);
    }

    #[test]
    fn partial_sum_examples() {
        let t = build_sieves(100).unwrap();
        let c = compute_constants();
        assert_eq!(partial_sum_a(1, &t, &c).unwrap().twice_partial, 1);
        assert_eq!(partial_sum_a(10, &t, &c).unwrap().twice_partial, 98);
        assert_eq!(partial_sum_a(9, &t, &c).unwrap().twice_partial, 77);
        assert!(partial_sum_a(101, &t, &c).is_err());
        let s = partial_sum_a(10, &t, &c).unwrap();
        assert!((s.abs_err - (49.0 - s.main).abs()).abs() < 1e-12);
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta(4.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!((zeta(3.0).unwrap() - 1.202_056_903_159_594_2).abs() < 1e-14);
        assert!(zeta(1.0).is_err());
    }

    #[test]
    fn dirichlet_examples() {
        let d = dirichlet_spot_check(4.0, 100_000).unwrap();
        assert!((d.g_closed - 1.335_036_293_621_019_4).abs() < 1e-12);
        assert!((d.g_series - d.g_closed).abs() < 1e-3);
        assert!((d.f_closed - 1.090_279_639_790_499_2).abs() < 1e-12);
        assert!((d.f_series - d.f_closed).abs() < 1e-3);
        let d = dirichlet_spot_check(20.0, 1000).unwrap();
        assert!((d.f_series - 1.0).abs() < 1e-5);
        assert!(dirichlet_spot_check(2.0, 1000).is_err());
        assert!(dirichlet_spot_check(4.0, 999).is_err());
    }

    #[test]
    fn synthetic_exponent() {
        let pts: Vec<(f64, f64)> = [1e3, 1e4, 1e5, 1e6]
            .iter()
            .map(|&x: &f64| (x, x.powf(1.2)))
            .collect();
        assert!((fit_exponent(&pts).unwrap() - 1.2).abs() < 1e-6);
        assert_eq!(fit_exponent(&[(10.0, 0.0), (100.0, 0.0)]), None);
    }

    #[test]
    fn error_scan_preconditions() {
        let t = build_sieves(10_000).unwrap();
        let c = compute_constants();
        assert!(error_scan(&[10, 100, 1000], &t, &c).is_err());
        assert!(error_scan(&[100, 200, 300, 400], &t, &c).is_err());
        assert!(error_scan(&[100, 50, 1000, 10_000], &t, &c).is_err());
        let e = error_scan(&[100, 1000, 5000, 10_000], &t, &c).unwrap();
        assert_eq!(e.samples.len(), 4);
        assert!(e.slope.is_some());
    }

    #[test]
    fn sample_point_grid() {
        assert_eq!(sample_points(10_000), vec![1000, 2000, 5000, 10_000]);
        assert_eq!(
            sample_points(30_000),
            vec![1000, 2000, 5000, 10_000, 20_000, 30_000]
        );
        assert!(sample_points(999).is_empty());
    }

    #[test]
    fn odd_t_agrees_with_sieve() {
        let t = build_sieves(2000).unwrap();
        assert!(odd_t_mismatches(2000, &t).unwrap().is_empty());
    }

    #[test]
    fn monotone_partial_sums() {
        let t = build_sieves(2000).unwrap();
        let c = compute_constants();
        let xs: Vec<u64> = (1..=2000).collect();
        let s = partial_sums_at(&xs, &t, &c).unwrap();
        assert!(s
            .windows(2)
            .all(|w| w[0].twice_partial <= w[1].twice_partial));
    }
}
