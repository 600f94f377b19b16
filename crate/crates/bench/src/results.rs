//! Result rows, their CSV form, and per-cell aggregates.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::RunError;

pub const CSV_HEADER: &str =
    "experiment,cell_id,lambda,of,snr_db,bits,algorithm,trial,seed,nmse,nmse_db,time_s,iterations,converged,L,L_max,M,spark_ok";

/// One `(cell, trial, algorithm)` outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    pub cell_id: usize,
    pub lambda: f64,
    pub of: f64,
    pub snr_db: f64,
    pub bits: Option<u32>,
    pub algorithm: String,
    pub trial: usize,
    pub seed: u64,
    pub nmse: f64,
    pub nmse_db: f64,
    pub time_s: f64,
    pub iterations: usize,
    pub converged: bool,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "L_max")]
    pub l_max: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub spark_ok: bool,
}

pub fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        (a.cell_id, a.trial, &a.algorithm).cmp(&(b.cell_id, b.trial, &b.algorithm))
    });
}

/// Writes `# `-prefixed comment lines, then the header and rows.
pub fn write_csv<W: Write>(mut w: W, rows: &[ResultRow], comments: &[String]) -> Result<(), RunError> {
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    writer.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Parses CSV written by [`write_csv`], skipping comment lines.
pub fn read_csv<R: Read>(r: R) -> Result<Vec<ResultRow>, RunError> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(RunError::new(format!("unexpected CSV header `{}`", header.join(","))));
    }
    reader
        .deserialize()
        .map(|r| r.map_err(RunError::from))
        .collect()
}

/// Trial aggregates for one `(cell, algorithm)`; always recomputed from rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub experiment: String,
    pub cell_id: usize,
    pub lambda: f64,
    pub of: f64,
    pub snr_db: f64,
    pub bits: Option<u32>,
    pub algorithm: String,
    pub trials: usize,
    pub mean_nmse: f64,
    /// `10·log10(mean_nmse)`.
    pub mean_nmse_db: f64,
    pub median_nmse_db: f64,
    pub mean_time_s: f64,
    pub median_time_s: f64,
    pub converged_fraction: f64,
    pub spark_fraction: f64,
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn summarize(rows: &[ResultRow]) -> Vec<CellSummary> {
    let mut keys: Vec<(usize, String)> = rows.iter().map(|r| (r.cell_id, r.algorithm.clone())).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|(cell, alg)| {
            let group: Vec<&ResultRow> = rows.iter().filter(|r| r.cell_id == cell && r.algorithm == alg).collect();
            let first = group[0];
            let nmse: Vec<f64> = group.iter().map(|r| r.nmse).collect();
            let mut nmse_db: Vec<f64> = group.iter().map(|r| r.nmse_db).collect();
            let mut times: Vec<f64> = group.iter().map(|r| r.time_s).collect();
            let frac = |f: &dyn Fn(&ResultRow) -> bool| group.iter().filter(|r| f(r)).count() as f64 / group.len() as f64;
            let mean_nmse = mean(&nmse);
            CellSummary {
                experiment: first.experiment.clone(),
                cell_id: cell,
                lambda: first.lambda,
                of: first.of,
                snr_db: first.snr_db,
                bits: first.bits,
                algorithm: alg,
                trials: group.len(),
                mean_nmse,
                mean_nmse_db: 10.0 * mean_nmse.log10(),
                median_nmse_db: median(&mut nmse_db),
                mean_time_s: mean(&times),
                median_time_s: median(&mut times),
                converged_fraction: frac(&|r| r.converged),
                spark_fraction: frac(&|r| r.spark_ok),
            }
        })
        .collect()
}

/// Fixed-width text table of [`summarize`] output.
pub fn write_summary<W: Write>(mut w: W, summary: &[CellSummary]) -> std::io::Result<()> {
    writeln!(
        w,
        "{:>4} {:>6} {:>5} {:>6} {:>4} {:<11} {:>6} {:>12} {:>12} {:>11} {:>11} {:>6} {:>6}",
        "cell", "lambda", "of", "snr", "bits", "algorithm", "trials", "nmse_db", "median_db", "mean_s", "median_s", "conv", "spark"
    )?;
    for s in summary {
        let bits = s.bits.map_or("-".to_string(), |b| b.to_string());
        writeln!(
            w,
            "{:>4} {:>6} {:>5} {:>6} {:>4} {:<11} {:>6} {:>12.3} {:>12.3} {:>11.3e} {:>11.3e} {:>6.2} {:>6.2}",
            s.cell_id, s.lambda, s.of, s.snr_db, bits, s.algorithm, s.trials, s.mean_nmse_db, s.median_nmse_db,
            s.mean_time_s, s.median_time_s, s.converged_fraction, s.spark_fraction
        )?;
    }
    Ok(())
}
