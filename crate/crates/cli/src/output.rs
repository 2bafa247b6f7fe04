//! Sample, summary and box-plot files.
//!
//! `samples.csv` columns: ue_lat_deg, ue_lon_deg, case_id, peb_m, gdop,
//! degenerate. `boxplot.csv` columns: case_id, mean, median, q1, q3,
//! whisker_lo, whisker_hi, n_outliers. Empty cells mark degenerate samples
//! and cases without statistics. Floats use shortest round-trip decimals.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use ntn_peb::scenarios::{CaseResult, CaseSpec, SummaryStats};
use serde::{Deserialize, Serialize};

use crate::manifest::RunManifest;
use crate::Format;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub ue_lat_deg: f64,
    pub ue_lon_deg: f64,
    pub case_id: String,
    pub peb_m: Option<f64>,
    pub gdop: Option<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotRow {
    pub case_id: String,
    pub mean: Option<f64>,
    pub median: Option<f64>,
    pub q1: Option<f64>,
    pub q3: Option<f64>,
    pub whisker_lo: Option<f64>,
    pub whisker_hi: Option<f64>,
    pub n_outliers: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub case_id: String,
    pub case: CaseSpec,
    pub stats: Option<SummaryStats>,
}

pub fn sample_rows(cases: &[CaseResult]) -> Vec<SampleRow> {
    cases
        .iter()
        .flat_map(|c| {
            c.samples.records.iter().map(|r| SampleRow {
                ue_lat_deg: r.ue_lat_deg,
                ue_lon_deg: r.ue_lon_deg,
                case_id: c.id().to_string(),
                peb_m: r.peb_m,
                gdop: r.gdop,
                degenerate: r.degenerate,
            })
        })
        .collect()
}

pub fn boxplot_rows(cases: &[CaseResult]) -> Vec<BoxplotRow> {
    cases
        .iter()
        .map(|c| {
            let s = c.stats.as_ref();
            BoxplotRow {
                case_id: c.id().to_string(),
                mean: s.map(|s| s.mean),
                median: s.map(|s| s.median),
                q1: s.map(|s| s.q1),
                q3: s.map(|s| s.q3),
                whisker_lo: s.map(|s| s.whisker_low),
                whisker_hi: s.map(|s| s.whisker_high),
                n_outliers: s.map(|s| s.outlier_count),
            }
        })
        .collect()
}

fn write_table<T: Serialize>(dir: &Path, stem: &str, format: Format, rows: &[T], manifest: &mut RunManifest) -> Result<()> {
    match format {
        Format::Csv => {
            let name = format!("{stem}.csv");
            let path = dir.join(&name);
            let mut w = csv::Writer::from_path(&path).with_context(|| format!("cannot write {}", path.display()))?;
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
            manifest.add_output(&name);
        }
        Format::Json => {
            let name = format!("{stem}.json");
            let path = dir.join(&name);
            let mut w = BufWriter::new(File::create(&path).with_context(|| format!("cannot write {}", path.display()))?);
            serde_json::to_writer_pretty(&mut w, rows)?;
            w.write_all(b"\n")?;
            w.flush()?;
            manifest.add_output(&name);
        }
    }
    Ok(())
}

/// Writes samples, summary and box-plot files, and records per-sample
/// failures as manifest errors.
pub fn write_results(dir: &Path, format: Format, cases: &[CaseResult], manifest: &mut RunManifest) -> Result<()> {
    write_table(dir, "samples", format, &sample_rows(cases), manifest)?;
    let summary: Vec<SummaryEntry> = cases
        .iter()
        .map(|c| SummaryEntry {
            case_id: c.id().to_string(),
            case: c.samples.case.clone(),
            stats: c.stats.clone(),
        })
        .collect();
    manifest.write_json(dir, "summary.json", &summary)?;
    write_table(dir, "boxplot", format, &boxplot_rows(cases), manifest)?;
    for c in cases {
        for r in &c.samples.records {
            if let Some(e) = &r.error {
                manifest.errors.push(format!("{} drop {}: {e}", c.id(), r.drop_index));
            }
        }
        if c.stats.is_none() {
            manifest.errors.push(format!("{}: no non-degenerate samples", c.id()));
        }
    }
    Ok(())
}
