//! Resumable scan state as JSON lines.
//!
//! ```text
//! {"version":1,"kind":"thresholds","limit":50000,"primes_only":true}
//! {"chunk":0,"values":[[2,1],[3,2],...]}
//! ...
//! {"completed_through":1619,"chunks":1,"negatives":0,"below_0":0,"below_2k":17,"below_3k":87,"below_4k":256}
//! {"sha256":"..."}
//! ```
//!
//! The digest covers every byte before the last line. Files are replaced
//! by writing a sibling temporary file and renaming it over the target, so
//! a reader never sees a partial checkpoint.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::Threshold;
use crate::error::{integrity, Result};

pub const CHECKPOINT_VERSION: u32 = 1;

/// What the values in a checkpoint were collected for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanKind {
    Thresholds,
    Census,
}

/// Completed chunk: `(k, S(k))` in ascending `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkRecord {
    pub chunk: usize,
    pub values: Vec<(u64, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Header {
    version: u32,
    kind: ScanKind,
    limit: u64,
    primes_only: bool,
}

/// Running totals over every completed chunk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub completed_through: u64,
    pub chunks: usize,
    pub negatives: u64,
    pub below_0: u64,
    pub below_2k: u64,
    pub below_3k: u64,
    pub below_4k: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct ChecksumLine {
    sha256: String,
}

/// Scan progress: configuration plus the chunks finished so far.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub version: u32,
    pub kind: ScanKind,
    pub limit: u64,
    pub primes_only: bool,
    pub chunks: Vec<ChunkRecord>,
}

impl Checkpoint {
    pub fn new(kind: ScanKind, limit: u64, primes_only: bool) -> Self {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            kind,
            limit,
            primes_only,
            chunks: Vec::new(),
        }
    }

    /// Totals recomputed from the chunk values.
    pub fn summary(&self) -> Summary {
        let mut s = Summary {
            completed_through: 0,
            chunks: self.chunks.len(),
            negatives: 0,
            below_0: 0,
            below_2k: 0,
            below_3k: 0,
            below_4k: 0,
        };
        for &(k, v) in self.chunks.iter().flat_map(|c| &c.values) {
            s.completed_through = s.completed_through.max(k);
            let below = |t: Threshold| u64::from((v as i128) < t.bound(k));
            s.negatives += u64::from(v < 0);
            s.below_0 += below(Threshold::Zero);
            s.below_2k += below(Threshold::TwoK);
            s.below_3k += below(Threshold::ThreeK);
            s.below_4k += below(Threshold::FourK);
        }
        s
    }

    /// Serialized file contents.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut body = String::new();
        let header = Header {
            version: self.version,
            kind: self.kind,
            limit: self.limit,
            primes_only: self.primes_only,
        };
        push_line(&mut body, &header);
        for c in &self.chunks {
            push_line(&mut body, c);
        }
        push_line(&mut body, &self.summary());
        let digest = hex::encode(Sha256::digest(body.as_bytes()));
        push_line(&mut body, &ChecksumLine { sha256: digest });
        body.into_bytes()
    }

    /// Parses and validates file contents; any defect names its field.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let text =
            std::str::from_utf8(bytes).map_err(|e| integrity("file", format!("not UTF-8: {e}")))?;
        let body_end = text
            .trim_end_matches('\n')
            .rfind('\n')
            .map(|i| i + 1)
            .ok_or_else(|| integrity("file", "fewer than two lines"))?;
        let (body, last) = text.split_at(body_end);
        let check: ChecksumLine = parse_line("sha256", last.trim_end())?;
        let digest = hex::encode(Sha256::digest(body.as_bytes()));
        if digest != check.sha256 {
            return Err(integrity(
                "sha256",
                format!("digest {digest} does not match recorded {}", check.sha256),
            ));
        }

        let lines: Vec<&str> = body.lines().collect();
        if lines.len() < 2 {
            return Err(integrity("file", "missing header or summary line"));
        }
        let header: Header = parse_line("header", lines[0])?;
        if header.version != CHECKPOINT_VERSION {
            return Err(integrity(
                "version",
                format!("found {}, expected {CHECKPOINT_VERSION}", header.version),
            ));
        }
        let mut chunks = Vec::with_capacity(lines.len() - 2);
        for (i, line) in lines[1..lines.len() - 1].iter().enumerate() {
            let c: ChunkRecord = parse_line(&format!("chunk[{i}]"), line)?;
            if c.chunk != i {
                return Err(integrity(
                    format!("chunk[{i}].chunk"),
                    format!("out of order: found index {}", c.chunk),
                ));
            }
            if c.values.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(integrity(format!("chunk[{i}].values"), "k not ascending"));
            }
            chunks.push(c);
        }
        let cp = Checkpoint {
            version: header.version,
            kind: header.kind,
            limit: header.limit,
            primes_only: header.primes_only,
            chunks,
        };
        let recorded: Summary = parse_line("summary", lines[lines.len() - 1])?;
        let actual = cp.summary();
        if recorded != actual {
            return Err(integrity(
                "summary",
                format!("recorded {recorded:?}, chunks give {actual:?}"),
            ));
        }
        Ok(cp)
    }

    /// Atomic replace of `path`.
    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = temp_path(path);
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&self.to_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}

/// Saves `state` to `path` and reads it back.
pub fn checkpoint_roundtrip(state: &Checkpoint, path: &Path) -> Result<Checkpoint> {
    state.save(path)?;
    Checkpoint::load(path)
}

fn temp_path(path: &Path) -> PathBuf {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "checkpoint".into());
    path.with_file_name(format!(".{name}.tmp"))
}

fn push_line<T: Serialize>(out: &mut String, value: &T) {
    out.push_str(&serde_json::to_string(value).expect("checkpoint line serializes"));
    out.push('\n');
}

fn parse_line<T: for<'de> Deserialize<'de>>(field: &str, line: &str) -> Result<T> {
    serde_json::from_str(line).map_err(|e| integrity(field, e.to_string()))
}
