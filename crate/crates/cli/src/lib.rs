//! `thetasum`: tables, identity suites, conjecture scans, asymptotic runs
//! and benchmarks for the theta sums `S(h,k)`, `S(k)`, `T(h,k)`, `T(k)`.
//!
//! Exit codes: 0 success, 1 identity failure or disagreement with a
//! published value, 2 usage error, 3 I/O or integrity error.

pub mod bench;
pub mod table;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use theta_sums::asymptotics::{
    compute_constants, constants_identity_residual, dirichlet_spot_check, error_scan,
    odd_t_mismatches, sample_points, AsymptoticSample,
};
use theta_sums::published::{compare_census, compare_scan, Discrepancy};
use theta_sums::scan::{negative_census_with, scan_with, ScanConfig, ScanRecord, Threshold};
use theta_sums::sieve::build_sieves;
use theta_sums::verify::{self, Failure, VerificationReport};
use theta_sums::{Error, Result};

pub use bench::{bench, BenchReport};
pub use table::{compute_table, emit_table, TableOutcome, TableRow};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Largest slope accepted for the partial-sum error exponent.
pub const ERROR_EXPONENT_MAX: f64 = 1.7;
/// Largest relative error accepted at `x = 10^6`.
pub const REL_ERR_AT_MILLION_MAX: f64 = 0.05;
/// Tolerance for the truncated Dirichlet series at `s = 4`.
pub const DIRICHLET_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    ReciprocityTheta,
    ReciprocityDedekind,
    Elementary,
    Kernel,
    FractionalPart,
    Pairing,
    LowerBounds,
    Equivalence,
    FloorSum,
    RandomPairs,
}

#[derive(Debug, Parser)]
#[command(
    name = "thetasum",
    version,
    about = "Theta-function arithmetic sums S(k), T(k)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads for parallel work.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
    /// Write the main output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Suppress progress and summary lines on standard error.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// S(k) and T(k) for k = 1..=max, checked against the published tables.
    Table {
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        max: u64,
    },
    /// Run identity suites.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 300, value_parser = clap::value_parser!(u64).range(1..))]
        max: u64,
        /// Seed for the randomized suites.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Scan S(k) against the thresholds 0, 2k, 3k, 4k.
    Scan {
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(2..))]
        max: u64,
        /// Emit only the exceptions S(k) < t(k) for this threshold.
        #[arg(long, value_parser = parse_threshold)]
        threshold: Option<Threshold>,
        /// Scan primes only.
        #[arg(long)]
        primes: bool,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Count negative S(k) for k <= max by divisibility class.
    Census {
        #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
        max: u64,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Partial sums of a_n against the main term.
    Asympt {
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(100_000..))]
        max: u64,
    },
    /// Time naive and fast S(k).
    Bench {
        #[arg(long, default_value_t = 20_000, value_parser = clap::value_parser!(u64).range(100..))]
        max: u64,
    },
}

fn parse_threshold(s: &str) -> std::result::Result<Threshold, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Parses `argv` (program name first), runs the command, and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build()
        {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Error::Resource(format!("thread pool: {e}"))),
        },
        None => dispatch(&cli),
    };
    match outcome {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILURE,
        Err(e) => {
            eprintln!("thetasum: {e}");
            match e {
                Error::Domain(_) => EXIT_USAGE,
                Error::Range(_) => EXIT_FAILURE,
                Error::Integrity { .. } | Error::Io(_) | Error::Resource(_) => EXIT_IO,
            }
        }
    }
}

/// Runs the parsed command; `Ok(false)` means a check failed or a
/// published value was not reproduced.
fn dispatch(cli: &Cli) -> Result<bool> {
    let ctx = Context { cli };
    match &cli.command {
        Command::Table { max } => ctx.table(*max),
        Command::Verify { suite, max, seed } => ctx.verify(*suite, *max, *seed),
        Command::Scan {
            max,
            threshold,
            primes,
            checkpoint,
        } => ctx.scan(*max, *threshold, *primes, checkpoint.clone()),
        Command::Census { max, checkpoint } => ctx.census(*max, checkpoint.clone()),
        Command::Asympt { max } => ctx.asympt(*max),
        Command::Bench { max } => ctx.bench(*max),
    }
}

struct Context<'a> {
    cli: &'a Cli,
}

impl Context<'_> {
    fn format(&self, default: Format) -> Format {
        self.cli.format.unwrap_or(default)
    }

    fn workers(&self) -> usize {
        self.cli
            .threads
            .map_or_else(rayon::current_num_threads, |t| t as usize)
    }

    fn note(&self, msg: impl AsRef<str>) {
        if !self.cli.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    /// Discrepancies are reported even with `--quiet`.
    fn report_discrepancies(&self, list: &[Discrepancy]) {
        if list.is_empty() {
            return;
        }
        eprintln!("discrepancies against published values: {}", list.len());
        for d in list {
            eprintln!(
                "  {}: published {}, recomputed {} ({})",
                d.item, d.published, d.recomputed, d.note
            );
        }
    }

    fn with_sink<R>(&self, f: impl FnOnce(&mut dyn Write) -> Result<R>) -> Result<R> {
        match &self.cli.out {
            Some(path) => {
                let mut w = BufWriter::new(File::create(path)?);
                let r = f(&mut w)?;
                w.flush()?;
                Ok(r)
            }
            None => {
                let stdout = io::stdout();
                let mut w = stdout.lock();
                let r = f(&mut w)?;
                w.flush()?;
                Ok(r)
            }
        }
    }

    fn table(&self, max: u64) -> Result<bool> {
        let outcome = self.with_sink(|w| emit_table(max, w, self.format(Format::Csv)))?;
        self.note(format!("{} rows", outcome.rows.len()));
        for m in &outcome.mismatches {
            eprintln!("kernel mismatch: {m}");
        }
        self.report_discrepancies(&outcome.discrepancies);
        Ok(outcome.mismatches.is_empty() && outcome.discrepancies.is_empty())
    }

    fn verify(&self, suite: Suite, max: u64, seed: u64) -> Result<bool> {
        let reports = match suite {
            Suite::All => verify::verify_all(max)?,
            Suite::ReciprocityTheta => vec![verify::verify_reciprocity_theta(max)?],
            Suite::ReciprocityDedekind => vec![verify::verify_reciprocity_dedekind(max)?],
            Suite::Elementary => vec![verify::verify_elementary(max)?],
            Suite::Kernel => vec![verify::verify_kernel_identities(max)?],
            Suite::FractionalPart => vec![verify::verify_fractional_part(max)?],
            Suite::Pairing => vec![verify::verify_column_pairing(max)?],
            Suite::LowerBounds => vec![verify::verify_lower_bounds(max)?],
            Suite::Equivalence => vec![verify::verify_fast_equivalence(max, max)?],
            Suite::FloorSum => vec![verify::verify_floor_sum_random(max, seed)?],
            Suite::RandomPairs => vec![verify::verify_random_pairs(max, 1 << 20, seed)?],
        };
        if self.cli.out.is_some() {
            for r in &reports {
                self.note(r.to_string().trim_end());
            }
        }
        self.with_sink(|w| write_reports(w, &reports, self.format(Format::Text)))?;
        Ok(reports.iter().all(VerificationReport::passed))
    }

    fn scan(
        &self,
        max: u64,
        threshold: Option<Threshold>,
        primes: bool,
        checkpoint: Option<PathBuf>,
    ) -> Result<bool> {
        let config = ScanConfig {
            limit: max,
            primes_only: primes,
            workers: self.workers(),
            checkpoint,
            stop_after_chunks: None,
        };
        let report = scan_with(&config)?;
        let thresholds: Vec<Threshold> = threshold.map_or(Threshold::ALL.to_vec(), |t| vec![t]);
        let discrepancies: Vec<Discrepancy> = thresholds
            .iter()
            .flat_map(|&t| compare_scan(&report, t))
            .collect();
        let inconsistent: Vec<&ScanRecord> = report
            .records
            .iter()
            .filter(|r| !r.self_consistent())
            .collect();
        let rows: Vec<&ScanRecord> = match threshold {
            Some(t) => report
                .records
                .iter()
                .filter(|r| (r.s_k as i128) < t.bound(r.k))
                .collect(),
            None => report.records.iter().collect(),
        };
        self.with_sink(|w| match self.format(Format::Csv) {
            Format::Csv => {
                let mut out = csv::Writer::from_writer(w);
                for r in &rows {
                    out.serialize(r).map_err(table::csv_error)?;
                }
                out.flush()?;
                Ok(())
            }
            Format::Json => {
                #[derive(Serialize)]
                struct ScanJson<'a> {
                    limit: u64,
                    primes_only: bool,
                    lists: Vec<&'a theta_sums::scan::ThresholdList>,
                    discrepancies: &'a [Discrepancy],
                }
                let lists = thresholds.iter().map(|&t| report.list(t)).collect();
                let body = ScanJson {
                    limit: report.limit,
                    primes_only: report.primes_only,
                    lists,
                    discrepancies: &discrepancies,
                };
                serde_json::to_writer_pretty(&mut *w, &body).map_err(|e| Error::Io(e.into()))?;
                writeln!(w)?;
                Ok(())
            }
            Format::Text => {
                for &t in &thresholds {
                    let l = report.list(t);
                    writeln!(w, "S(k) < {t}: {} values", l.exceptions.len())?;
                    for (k, s) in &l.exceptions {
                        writeln!(w, "  k={k} S(k)={s}")?;
                    }
                    writeln!(w, "S(k) = {t}: {} values", l.equalities.len())?;
                    for (k, s) in &l.equalities {
                        writeln!(w, "  k={k} S(k)={s}")?;
                    }
                }
                Ok(())
            }
        })?;
        let kind = if primes { "primes" } else { "values of k" };
        self.note(format!(
            "scanned {} {kind} <= {max}; {} rows written",
            report.records.len(),
            rows.len()
        ));
        for r in &inconsistent {
            eprintln!("self-consistency failure: k={} S(k)={}", r.k, r.s_k);
        }
        self.report_discrepancies(&discrepancies);
        Ok(discrepancies.is_empty() && inconsistent.is_empty())
    }

    fn census(&self, max: u64, checkpoint: Option<PathBuf>) -> Result<bool> {
        let census = negative_census_with(max, self.workers(), checkpoint.as_deref())?;
        let discrepancies = compare_census(&census);
        self.with_sink(|w| match self.format(Format::Json) {
            Format::Json => {
                writeln!(w, "{}", census.to_json())?;
                Ok(())
            }
            Format::Csv => {
                let mut out = csv::Writer::from_writer(w);
                out.write_record(["k", "s_k", "class"])
                    .map_err(table::csv_error)?;
                for &(k, s) in &census.negatives {
                    let class = match (k % 3 == 0, k % 5 == 0) {
                        (true, true) => "div15",
                        (true, false) => "div3_not5",
                        (false, true) => "div5_not3",
                        (false, false) => "other",
                    };
                    out.write_record([k.to_string(), s.to_string(), class.to_string()])
                        .map_err(table::csv_error)?;
                }
                out.flush()?;
                Ok(())
            }
            Format::Text => {
                writeln!(
                    w,
                    "negative S(k) for k <= {}: {}",
                    census.limit, census.total
                )?;
                writeln!(w, "  divisible by 3, not 5: {}", census.div3_not5)?;
                writeln!(w, "  divisible by 5, not 3: {}", census.div5_not3)?;
                writeln!(w, "  divisible by 15:       {}", census.div15)?;
                writeln!(w, "  divisible by neither:  {}", census.other)?;
                writeln!(w, "  S(k) < -k: {:?}", census.extremes)?;
                Ok(())
            }
        })?;
        self.note(format!("{} negative values for k <= {max}", census.total));
        self.report_discrepancies(&discrepancies);
        Ok(discrepancies.is_empty())
    }

    fn asympt(&self, max: u64) -> Result<bool> {
        let consts = compute_constants();
        let residual = constants_identity_residual(&consts);
        let tables = build_sieves(max)?;
        let xs = sample_points(max);
        let scan = error_scan(&xs, &tables, &consts)?;
        let dirichlet = dirichlet_spot_check(4.0, max.min(100_000))?;
        let odd_t = odd_t_mismatches(max.min(10_000), &tables)?;

        let decades: Vec<&AsymptoticSample> = scan
            .samples
            .iter()
            .filter(|s| is_power_of_ten(s.x))
            .collect();
        let decreasing = decades.windows(2).all(|w| w[1].rel_err < w[0].rel_err);
        let at_million = scan.samples.iter().find(|s| s.x == 1_000_000);
        let mut failures = Vec::new();
        if residual.abs() >= 1e-12 {
            failures.push(format!("constants identity residual {residual:e}"));
        }
        if (dirichlet.g_series - dirichlet.g_closed).abs() > DIRICHLET_TOLERANCE {
            failures.push(format!(
                "G(4) series {} vs {}",
                dirichlet.g_series, dirichlet.g_closed
            ));
        }
        if (dirichlet.f_series - dirichlet.f_closed).abs() > DIRICHLET_TOLERANCE {
            failures.push(format!(
                "F(4) series {} vs {}",
                dirichlet.f_series, dirichlet.f_closed
            ));
        }
        if !decreasing {
            failures.push("rel_err not decreasing across decades".into());
        }
        if let Some(s) = at_million {
            if s.rel_err >= REL_ERR_AT_MILLION_MAX {
                failures.push(format!("rel_err at 10^6 is {}", s.rel_err));
            }
        }
        match scan.slope {
            Some(e) if e <= ERROR_EXPONENT_MAX => {}
            Some(e) => failures.push(format!("error exponent {e} exceeds {ERROR_EXPONENT_MAX}")),
            None => failures.push("error exponent undefined".into()),
        }
        if !odd_t.is_empty() {
            failures.push(format!("T(k) != 2k-1-2a_k at k = {odd_t:?}"));
        }

        self.with_sink(|w| match self.format(Format::Csv) {
            Format::Csv => {
                let mut out = csv::Writer::from_writer(w);
                out.write_record(AsymptoticSample::CSV_HEADER)
                    .map_err(table::csv_error)?;
                for s in &scan.samples {
                    out.write_record(s.csv_record()).map_err(table::csv_error)?;
                }
                out.flush()?;
                Ok(())
            }
            Format::Json => {
                let body = serde_json::json!({
                    "constants": consts,
                    "identity_residual": residual,
                    "samples": scan.samples,
                    "slope": scan.slope,
                    "dirichlet": dirichlet,
                    "failures": failures,
                });
                serde_json::to_writer_pretty(&mut *w, &body).map_err(|e| Error::Io(e.into()))?;
                writeln!(w)?;
                Ok(())
            }
            Format::Text => {
                writeln!(w, "gamma       = {:.15}", consts.gamma)?;
                writeln!(w, "zeta'(2)    = {:.15}", consts.zeta_prime_2)?;
                writeln!(w, "A           = {:.15} (residual {residual:e})", consts.a)?;
                writeln!(w, "c_log       = {:.15}", consts.c_log)?;
                writeln!(w, "c_quad      = {:.15}", consts.c_quad)?;
                writeln!(
                    w,
                    "{:>12} {:>22} {:>22} {:>12}",
                    "x", "sum'", "main", "rel_err"
                )?;
                for s in &scan.samples {
                    writeln!(
                        w,
                        "{:>12} {:>22} {:>22.3} {:>12.3e}",
                        s.x,
                        s.twice_partial as f64 / 2.0,
                        s.main,
                        s.rel_err
                    )?;
                }
                match scan.slope {
                    Some(e) => writeln!(w, "error exponent {e:.4}")?,
                    None => writeln!(w, "error exponent undefined")?,
                }
                writeln!(
                    w,
                    "G(4): {:.8} vs {:.8}; F(4): {:.8} vs {:.8}",
                    dirichlet.g_series, dirichlet.g_closed, dirichlet.f_series, dirichlet.f_closed
                )?;
                Ok(())
            }
        })?;
        if let Some(e) = scan.slope {
            self.note(format!("fitted error exponent {e:.4}"));
        }
        for f in &failures {
            eprintln!("check failed: {f}");
        }
        Ok(failures.is_empty())
    }

    fn bench(&self, max: u64) -> Result<bool> {
        let report = bench(max)?;
        self.with_sink(|w| match self.format(Format::Text) {
            Format::Csv => {
                let mut out = csv::Writer::from_writer(w);
                for t in &report.timings {
                    out.serialize(t).map_err(table::csv_error)?;
                }
                out.flush()?;
                Ok(())
            }
            Format::Json => {
                serde_json::to_writer_pretty(&mut *w, &report).map_err(|e| Error::Io(e.into()))?;
                writeln!(w)?;
                Ok(())
            }
            Format::Text => {
                for t in &report.timings {
                    writeln!(
                        w,
                        "{:>6} k={:>8} {:>12.6} ms/call",
                        t.method,
                        t.k,
                        t.seconds * 1e3
                    )?;
                }
                let show = |e: Option<f64>| e.map_or("undefined".into(), |e| format!("{e:.3}"));
                writeln!(w, "fast growth exponent  {}", show(report.fast_exponent))?;
                writeln!(w, "naive growth exponent {}", show(report.naive_exponent))?;
                writeln!(
                    w,
                    "fast over primes <= {}: {:.3} s; naive extrapolated: {:.1} s; speedup {:.0}x",
                    report.limit,
                    report.fast_all_primes_seconds,
                    report.naive_extrapolated_seconds,
                    report.speedup()
                )?;
                Ok(())
            }
        })?;
        for k in &report.mismatches {
            eprintln!("kernel mismatch at k={k}");
        }
        if !report.passed() {
            eprintln!(
                "growth check failed: fast {:?} (< {}), naive {:?} (in {:?})",
                report.fast_exponent,
                bench::FAST_EXPONENT_MAX,
                report.naive_exponent,
                bench::NAIVE_EXPONENT_RANGE
            );
        }
        Ok(report.passed())
    }
}

fn is_power_of_ten(mut x: u64) -> bool {
    while x >= 10 && x.is_multiple_of(10) {
        x /= 10;
    }
    x == 1
}

/// Reports without timing, so repeated runs write identical files.
#[derive(Serialize)]
struct ReportView<'a> {
    suite: &'a str,
    range: &'a str,
    cases: u64,
    failures: &'a [Failure],
}

fn write_reports(w: &mut dyn Write, reports: &[VerificationReport], format: Format) -> Result<()> {
    match format {
        Format::Text => {
            for r in reports {
                let status = if r.passed() { "PASS" } else { "FAIL" };
                writeln!(
                    w,
                    "[{status}] {} ({}) cases={} failures={}",
                    r.suite,
                    r.range,
                    r.cases,
                    r.failures.len()
                )?;
                for f in &r.failures {
                    writeln!(
                        w,
                        "    {}: expected {}, got {}",
                        f.inputs, f.expected, f.actual
                    )?;
                }
            }
        }
        Format::Json => {
            let views: Vec<ReportView> = reports
                .iter()
                .map(|r| ReportView {
                    suite: &r.suite,
                    range: &r.range,
                    cases: r.cases,
                    failures: &r.failures,
                })
                .collect();
            serde_json::to_writer_pretty(&mut *w, &views).map_err(|e| Error::Io(e.into()))?;
            writeln!(w)?;
        }
        Format::Csv => {
            let mut out = csv::Writer::from_writer(w);
            out.write_record(["suite", "range", "cases", "failures"])
                .map_err(table::csv_error)?;
            for r in reports {
                out.write_record([
                    r.suite.clone(),
                    r.range.clone(),
                    r.cases.to_string(),
                    r.failures.len().to_string(),
                ])
                .map_err(table::csv_error)?;
            }
            out.flush()?;
        }
    }
    Ok(())
}
