//! Parallel, resumable scans of `S(k)`: threshold exceptions, the census of
//! negative values, and the distribution of `S(p) mod 4`.
//!
//! Candidates (all `k`, or the primes) are cut into chunks of
//! [`CHUNK_SIZE`]. Chunks are evaluated in order, each one in parallel
//! across its members, so the merged output never depends on the number
//! of workers.

mod census;
mod checkpoint;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use census::{
    mod4_distribution, negative_census, negative_census_with, Mod4Distribution, NegativeCensus,
};
pub use checkpoint::{
    checkpoint_roundtrip, Checkpoint, ChunkRecord, ScanKind, Summary, CHECKPOINT_VERSION,
};

use crate::error::{domain, integrity, Error, Result};
use crate::fast::s_k_fast;
use crate::sieve::build_sieves;

/// Values of `k` per work unit.
pub const CHUNK_SIZE: usize = 256;
/// Minimum time between checkpoint writes while a scan is running.
pub const CHECKPOINT_INTERVAL: Duration = Duration::from_secs(1);

/// Lower bounds `S(k) > t` examined by the scanner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Threshold {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "2k")]
    TwoK,
    #[serde(rename = "3k")]
    ThreeK,
    #[serde(rename = "4k")]
    FourK,
}

impl Threshold {
    pub const ALL: [Threshold; 4] = [
        Threshold::Zero,
        Threshold::TwoK,
        Threshold::ThreeK,
        Threshold::FourK,
    ];

    pub fn multiplier(self) -> i128 {
        match self {
            Threshold::Zero => 0,
            Threshold::TwoK => 2,
            Threshold::ThreeK => 3,
            Threshold::FourK => 4,
        }
    }

    /// The value `t(k)` that `S(k)` is compared against.
    pub fn bound(self, k: u64) -> i128 {
        self.multiplier() * k as i128
    }

    pub fn label(self) -> &'static str {
        match self {
            Threshold::Zero => "0",
            Threshold::TwoK => "2k",
            Threshold::ThreeK => "3k",
            Threshold::FourK => "4k",
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Threshold::ALL
            .into_iter()
            .find(|t| t.label() == s)
            .ok_or_else(|| domain(format!("unknown threshold {s:?}; expected 0, 2k, 3k or 4k")))
    }
}

/// One scanned `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub k: u64,
    pub s_k: i64,
    pub is_prime: bool,
    pub k_mod4: u8,
    pub s_mod4: u8,
    pub ratio: f64,
    pub gt_0: bool,
    pub gt_2k: bool,
    pub gt_3k: bool,
    pub gt_4k: bool,
}

impl ScanRecord {
    pub fn new(k: u64, s_k: i64, is_prime: bool) -> Self {
        let gt = |t: Threshold| s_k as i128 > t.bound(k);
        ScanRecord {
            k,
            s_k,
            is_prime,
            k_mod4: (k % 4) as u8,
            s_mod4: s_k.rem_euclid(4) as u8,
            ratio: s_k as f64 / k as f64,
            gt_0: gt(Threshold::Zero),
            gt_2k: gt(Threshold::TwoK),
            gt_3k: gt(Threshold::ThreeK),
            gt_4k: gt(Threshold::FourK),
        }
    }

    /// `S(k)` and `k` have opposite parity; odd primes have `S(k) mod 4`
    /// in `{0, 2}`.
    pub fn self_consistent(&self) -> bool {
        let parity = (self.s_k - self.k as i64).rem_euclid(2) == 1;
        let mod4 = !(self.is_prime && self.k > 2) || self.s_mod4.is_multiple_of(2);
        parity && mod4
    }
}

/// Members of the scan failing, or sitting exactly on, one threshold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdList {
    pub threshold: Threshold,
    /// `S(k) < t(k)`.
    pub exceptions: Vec<(u64, i64)>,
    /// `S(k) = t(k)`.
    pub equalities: Vec<(u64, i64)>,
}

impl ThresholdList {
    pub fn exception_ks(&self) -> Vec<u64> {
        self.exceptions.iter().map(|e| e.0).collect()
    }
}

/// Parameters of a threshold scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanConfig {
    pub limit: u64,
    pub primes_only: bool,
    pub workers: usize,
    pub checkpoint: Option<PathBuf>,
    /// Stop (and checkpoint) once this many chunks are complete, as if
    /// interrupted.
    pub stop_after_chunks: Option<usize>,
}

impl ScanConfig {
    pub fn new(limit: u64, primes_only: bool) -> Self {
        ScanConfig {
            limit,
            primes_only,
            workers: rayon::current_num_threads(),
            checkpoint: None,
            stop_after_chunks: None,
        }
    }
}

/// Result of a threshold scan, ascending in `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub limit: u64,
    pub primes_only: bool,
    /// False when the scan stopped early; only finished chunks are listed.
    pub complete: bool,
    pub records: Vec<ScanRecord>,
    pub lists: Vec<ThresholdList>,
}

impl ScanReport {
    pub const CSV_HEADER: &'static str =
        "k,s_k,is_prime,k_mod4,s_mod4,ratio,gt_0,gt_2k,gt_3k,gt_4k";

    pub fn list(&self, t: Threshold) -> &ThresholdList {
        self.lists
            .iter()
            .find(|l| l.threshold == t)
            .expect("every threshold is listed")
    }

    /// Records as CSV with [`Self::CSV_HEADER`].
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.records {
            out.serialize(r).map_err(csv_error)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is UTF-8"))
    }

    /// Threshold lists as JSON.
    pub fn lists_json(&self) -> String {
        serde_json::to_string(&self.lists).expect("lists serialize")
    }
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(
            format!("{other:?}"),
        )),
    }
}

/// The `k` values visited by a scan.
fn candidates(limit: u64, primes_only: bool) -> Result<Vec<u64>> {
    if primes_only {
        Ok(build_sieves(limit)?.primes().collect())
    } else {
        Ok((1..=limit).collect())
    }
}

/// Evaluates `S(k)` over the candidates chunk by chunk, resuming from and
/// saving to `checkpoint` when given. Returns the finished chunks.
pub(crate) fn run_chunks(
    kind: ScanKind,
    limit: u64,
    primes_only: bool,
    workers: usize,
    checkpoint: Option<&Path>,
    stop_after_chunks: Option<usize>,
) -> Result<(Vec<u64>, Checkpoint)> {
    if workers == 0 {
        return Err(domain("worker count must be >= 1"));
    }
    let ks = candidates(limit, primes_only)?;
    let chunks: Vec<&[u64]> = ks.chunks(CHUNK_SIZE).collect();

    let mut state = match checkpoint {
        Some(path) if path.exists() => {
            let cp = Checkpoint::load(path)?;
            check_resumable(&cp, kind, limit, primes_only, &chunks)?;
            cp
        }
        _ => Checkpoint::new(kind, limit, primes_only),
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
    let stop = stop_after_chunks.unwrap_or(usize::MAX).min(chunks.len());
    let mut last_save = Instant::now();
    let mut dirty = false;
    while state.chunks.len() < stop {
        let index = state.chunks.len();
        let members = chunks[index];
        let values: Result<Vec<(u64, i64)>> = pool.install(|| {
            members
                .par_iter()
                .map(|&k| Ok((k, s_k_fast(k)?.value)))
                .collect()
        });
        state.chunks.push(ChunkRecord {
            chunk: index,
            values: values?,
        });
        dirty = true;
        if let Some(path) = checkpoint {
            if last_save.elapsed() >= CHECKPOINT_INTERVAL {
                state.save(path)?;
                last_save = Instant::now();
                dirty = false;
            }
        }
    }
    if let Some(path) = checkpoint {
        if dirty || !path.exists() {
            state.save(path)?;
        }
    }
    Ok((ks, state))
}

fn check_resumable(
    cp: &Checkpoint,
    kind: ScanKind,
    limit: u64,
    primes_only: bool,
    chunks: &[&[u64]],
) -> Result<()> {
    if cp.kind != kind {
        return Err(integrity(
            "kind",
            format!("checkpoint is {:?}, scan is {kind:?}", cp.kind),
        ));
    }
    if cp.limit != limit {
        return Err(integrity(
            "limit",
            format!("checkpoint has {}, scan has {limit}", cp.limit),
        ));
    }
    if cp.primes_only != primes_only {
        return Err(integrity(
            "primes_only",
            "checkpoint was written for the other candidate set",
        ));
    }
    if cp.chunks.len() > chunks.len() {
        return Err(integrity("chunks", "more chunks than the scan has"));
    }
    for (i, (c, expected)) in cp.chunks.iter().zip(chunks).enumerate() {
        if c.values.len() != expected.len()
            || c.values.iter().zip(expected.iter()).any(|(v, k)| v.0 != *k)
        {
            return Err(integrity(
                format!("chunk[{i}].values"),
                "k values do not match the scan",
            ));
        }
    }
    Ok(())
}

/// Evaluates `S(k)` for every `k <= limit` (or every prime `k <= limit`)
/// and lists, for each threshold, the strict failures `S(k) < t(k)` and the
/// equalities `S(k) = t(k)`.
pub fn scan_thresholds(
    limit: u64,
    primes_only: bool,
    workers: usize,
    checkpoint_path: Option<&Path>,
) -> Result<ScanReport> {
    scan_with(&ScanConfig {
        limit,
        primes_only,
        workers,
        checkpoint: checkpoint_path.map(Path::to_path_buf),
        stop_after_chunks: None,
    })
}

pub fn scan_with(config: &ScanConfig) -> Result<ScanReport> {
    if config.limit < 2 {
        return Err(domain("scan limit must be >= 2"));
    }
    let (ks, state) = run_chunks(
        ScanKind::Thresholds,
        config.limit,
        config.primes_only,
        config.workers,
        config.checkpoint.as_deref(),
        config.stop_after_chunks,
    )?;
    let prime_flags = if config.primes_only {
        None
    } else {
        Some(build_sieves(config.limit)?)
    };
    let records: Vec<ScanRecord> = state
        .chunks
        .iter()
        .flat_map(|c| &c.values)
        .map(|&(k, s)| {
            let is_prime = prime_flags.as_ref().is_none_or(|t| t.is_prime(k));
            ScanRecord::new(k, s, is_prime)
        })
        .collect();
    let lists = Threshold::ALL
        .into_iter()
        .map(|t| ThresholdList {
            threshold: t,
            exceptions: records
                .iter()
                .filter(|r| (r.s_k as i128) < t.bound(r.k))
                .map(|r| (r.k, r.s_k))
                .collect(),
            equalities: records
                .iter()
                .filter(|r| r.s_k as i128 == t.bound(r.k))
                .map(|r| (r.k, r.s_k))
                .collect(),
        })
        .collect();
    Ok(ScanReport {
        limit: config.limit,
        primes_only: config.primes_only,
        complete: records.len() == ks.len(),
        records,
        lists,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_labels_round_trip() {
        for t in Threshold::ALL {
            assert_eq!(t.label().parse::<Threshold>().unwrap(), t);
        }
        assert!("5k".parse::<Threshold>().is_err());
        assert_eq!(Threshold::ThreeK.bound(7), 21);
    }

    #[test]
    fn record_flags() {
        let r = ScanRecord::new(19, 38, true);
        assert!(r.gt_0 && !r.gt_2k && !r.gt_3k);
        assert_eq!((r.k_mod4, r.s_mod4), (3, 2));
        assert!(r.self_consistent());
        assert!(!ScanRecord::new(9, 11, false).self_consistent());
    }

    #[test]
    fn small_prime_scan() {
        let r = scan_thresholds(250, true, 2, None).unwrap();
        assert!(r.complete);
        let two_k = r.list(Threshold::TwoK);
        assert_eq!(
            two_k.exception_ks(),
            vec![2, 3, 5, 7, 11, 13, 17, 23, 29, 41, 53, 59, 83, 113, 149, 179, 233]
        );
        // S(19) = 38 sits on the 2k boundary
        assert!(two_k.equalities.contains(&(19, 38)));
        assert!(r.records.iter().all(ScanRecord::self_consistent));
        let zero = r.list(Threshold::Zero);
        assert!(zero.exceptions.iter().all(|&(k, _)| k <= 5));
    }

    #[test]
    fn csv_header_and_rows() {
        let r = scan_thresholds(10, false, 1, None).unwrap();
        let csv = r.to_csv().unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), ScanReport::CSV_HEADER);
        assert_eq!(
            lines.next().unwrap(),
            "1,0,false,1,0,0.0,false,false,false,false"
        );
        assert_eq!(csv.lines().count(), 11);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let a = scan_thresholds(1500, false, 1, None).unwrap();
        let b = scan_thresholds(1500, false, 3, None).unwrap();
        assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
        assert_eq!(a.lists_json(), b.lists_json());
    }

    #[test]
    fn interrupted_scan_resumes_identically() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.ckpt");
        let full = scan_thresholds(2000, false, 2, None).unwrap();
        let mut cfg = ScanConfig::new(2000, false);
        cfg.checkpoint = Some(path.clone());
        cfg.stop_after_chunks = Some(4);
        let partial = scan_with(&cfg).unwrap();
        assert!(!partial.complete);
        assert_eq!(partial.records.len(), 4 * CHUNK_SIZE);
        assert_eq!(Checkpoint::load(&path).unwrap().chunks.len(), 4);
        cfg.stop_after_chunks = None;
        let resumed = scan_with(&cfg).unwrap();
        assert!(resumed.complete);
        assert_eq!(resumed.to_csv().unwrap(), full.to_csv().unwrap());
        assert_eq!(resumed, full);
    }

    #[test]
    fn mismatched_checkpoint_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.ckpt");
        scan_thresholds(300, true, 1, Some(&path)).unwrap();
        let err = scan_thresholds(400, true, 1, Some(&path)).unwrap_err();
        assert!(
            matches!(err, Error::Integrity { ref field, .. } if field == "limit"),
            "{err}"
        );
        let err = scan_thresholds(300, false, 1, Some(&path)).unwrap_err();
        assert!(matches!(err, Error::Integrity { ref field, .. } if field == "primes_only"));
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(scan_thresholds(1, true, 1, None).is_err());
        assert!(scan_thresholds(100, true, 0, None).is_err());
    }
}
