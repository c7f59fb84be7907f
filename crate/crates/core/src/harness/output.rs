//! Run logs and summary files.
//!
//! Run logs are JSON lines, one [`RoundRecord`] per line with keys in the
//! order `iter, queries, ari, k, mc_cost, batch`. Summaries are CSV with the
//! header `iter,queries,ari_mean,ari_median,ari_std`. Floats use the
//! shortest representation that round-trips.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use super::repeat::SummaryRow;
use super::run::RoundRecord;
use crate::error::Result;

pub const SUMMARY_HEADER: &str = "iter,queries,ari_mean,ari_median,ari_std";

pub fn write_jsonl(path: &Path, records: &[RoundRecord]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl(path: &Path) -> Result<Vec<RoundRecord>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.is_empty())
        .map(|l| serde_json::from_str(l).map_err(Into::into))
        .collect()
}

pub fn summary_line(row: &SummaryRow) -> String {
    format!(
        "{},{},{},{},{}",
        row.iter, row.queries, row.ari_mean, row.ari_median, row.ari_std
    )
}

pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{SUMMARY_HEADER}")?;
    for row in rows {
        writeln!(w, "{}", summary_line(row))?;
    }
    w.flush()?;
    Ok(())
}
