//! On-disk formats: the per-run series CSV and JSON documents.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sqg_core::{EnergyLedger, NormReport};

/// Bumped whenever the column set or order changes.
pub const SERIES_VERSION: u32 = 1;

pub const SERIES_COLUMNS: [&str; 7] = [
    "t",
    "l2",
    "hs",
    "hs_gevrey",
    "dissipation_integral",
    "budget_residual",
    "x1_weighted",
];

pub fn series_comment() -> String {
    format!("# sqg series v{SERIES_VERSION}")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: f64,
    pub l2: f64,
    pub hs: f64,
    pub hs_gevrey: f64,
    pub dissipation_integral: f64,
    pub budget_residual: f64,
    pub x1_weighted: f64,
}

/// Joins the output-time norm reports with the per-step ledger.
///
/// Report times are pinned to the same values the ledger records, so the
/// join is by exact time.
pub fn series_rows(reports: &[(f64, NormReport)], ledger: &EnergyLedger) -> Result<Vec<SeriesRow>> {
    let mut rows = Vec::with_capacity(reports.len());
    let mut i = 0;
    for (t, r) in reports {
        while i < ledger.len() && ledger.times[i] != *t {
            i += 1;
        }
        if i == ledger.len() {
            bail!("report at t = {t} has no ledger entry");
        }
        rows.push(SeriesRow {
            t: *t,
            l2: r.l2,
            hs: r.hs,
            hs_gevrey: r.hs_gevrey,
            dissipation_integral: ledger.diss_accum[i],
            budget_residual: ledger.budget_residual(i),
            x1_weighted: r.x1_weighted,
        });
    }
    Ok(rows)
}

pub fn write_series(path: &Path, rows: &[SeriesRow]) -> Result<()> {
    let mut buf = Vec::new();
    writeln!(buf, "{}", series_comment())?;
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for row in rows {
            w.serialize(row)?;
        }
        if rows.is_empty() {
            w.write_record(SERIES_COLUMNS)?;
        }
        w.flush()?;
    }
    write_bytes(path, &buf)
}

pub fn read_series(path: &Path) -> Result<Vec<SeriesRow>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    if first.trim_end() != series_comment() {
        bail!(
            "{}: expected header comment `{}`, found `{}`",
            path.display(),
            series_comment(),
            first.trim_end()
        );
    }
    let mut r = csv::Reader::from_reader(reader);
    let headers: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if headers != SERIES_COLUMNS {
        bail!("{}: unexpected columns {headers:?}", path.display());
    }
    r.deserialize()
        .map(|row| row.with_context(|| format!("reading {}", path.display())))
        .collect()
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Writes through a temporary sibling and renames, so readers never see a
/// truncated document.
pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    let tmp = path.with_extension("json.partial");
    write_bytes(&tmp, text.as_bytes())?;
    fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} to {}", tmp.display(), path.display()))
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path)
        .with_context(|| format!("creating output directory {}", path.display()))
}
