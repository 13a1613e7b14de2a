use std::io::Write;

use serde::{Deserialize, Serialize};
use theta_sums::exact::{s_k_naive, t_k_naive};
use theta_sums::fast::{s_k_fast, t_k_closed};
use theta_sums::published::{compare_table_s, compare_table_t, Discrepancy};
use theta_sums::{Error, Result};

use crate::Format;

/// S(k) and T(k) are re-derived by enumeration up to this k.
pub const CROSS_CHECK_LIMIT: u64 = 64;

/// One row of the S/T table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub k: u64,
    pub s_k: i64,
    pub t_k: i64,
}

/// What [`emit_table`] wrote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableOutcome {
    pub rows: Vec<TableRow>,
    /// Rows where the fast and enumeration paths disagree.
    pub mismatches: Vec<String>,
    /// Published table entries the recomputation does not reproduce.
    pub discrepancies: Vec<Discrepancy>,
}

pub fn compute_table(limit: u64) -> Result<TableOutcome> {
    if limit < 1 {
        return Err(Error::Domain("table limit must be >= 1".into()));
    }
    let mut rows = Vec::with_capacity(limit as usize);
    let mut mismatches = Vec::new();
    for k in 1..=limit {
        let s_k = s_k_fast(k)?.value;
        let t_k = t_k_closed(k)?.value;
        if k <= CROSS_CHECK_LIMIT {
            let (sn, tn) = (s_k_naive(k)?.value, t_k_naive(k)?.value);
            if sn != s_k {
                mismatches.push(format!("S({k}): fast {s_k}, enumeration {sn}"));
            }
            if tn != t_k {
                mismatches.push(format!("T({k}): closed form {t_k}, enumeration {tn}"));
            }
        }
        rows.push(TableRow { k, s_k, t_k });
    }
    let s: Vec<i64> = rows.iter().map(|r| r.s_k).collect();
    let t: Vec<i64> = rows.iter().map(|r| r.t_k).collect();
    let mut discrepancies = compare_table_s(&s);
    discrepancies.extend(compare_table_t(&t));
    Ok(TableOutcome {
        rows,
        mismatches,
        discrepancies,
    })
}

/// Writes the table for `k = 1..=limit` and returns the outcome.
///
/// CSV output has header `k,s_k,t_k`; disagreements with the published
/// table follow the rows as `#` comment lines, which CSV readers configured
/// with `#` comments skip.
pub fn emit_table(limit: u64, sink: &mut dyn Write, format: Format) -> Result<TableOutcome> {
    let outcome = compute_table(limit)?;
    match format {
        Format::Csv => {
            {
                let mut w = csv::Writer::from_writer(&mut *sink);
                for r in &outcome.rows {
                    w.serialize(r).map_err(csv_error)?;
                }
                w.flush()?;
            }
            if !outcome.discrepancies.is_empty() || !outcome.mismatches.is_empty() {
                writeln!(sink, "# discrepancies against the published table")?;
                for d in &outcome.discrepancies {
                    writeln!(
                        sink,
                        "# {}: published {}, recomputed {} ({})",
                        d.item, d.published, d.recomputed, d.note
                    )?;
                }
                for m in &outcome.mismatches {
                    writeln!(sink, "# kernel mismatch {m}")?;
                }
            }
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *sink, &outcome).map_err(|e| Error::Io(e.into()))?;
            writeln!(sink)?;
        }
        Format::Text => {
            writeln!(sink, "{:>8} {:>14} {:>14}", "k", "S(k)", "T(k)")?;
            for r in &outcome.rows {
                let mark = if outcome
                    .discrepancies
                    .iter()
                    .any(|d| d.item == format!("S({})", r.k) || d.item == format!("T({})", r.k))
                {
                    "  *"
                } else {
                    ""
                };
                writeln!(sink, "{:>8} {:>14} {:>14}{mark}", r.k, r.s_k, r.t_k)?;
            }
            for d in &outcome.discrepancies {
                writeln!(
                    sink,
                    "* {}: published {}, recomputed {} ({})",
                    d.item, d.published, d.recomputed, d.note
                )?;
            }
            for m in &outcome.mismatches {
                writeln!(sink, "! kernel mismatch {m}")?;
            }
        }
    }
    Ok(outcome)
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Io(std::io::Error::other(
            format!("{other:?}"),
        )),
    }
}
