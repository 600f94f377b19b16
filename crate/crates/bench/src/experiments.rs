//! Seeded experiment runner.
//!
//! Every `(cell, trial)` draws its data from a seed derived from
//! `(base_seed, kind, cell, trial)` and runs all configured algorithms on it.
//! `snr_sweep` keeps one signal per `(λ, OF)` and redraws only the noise per
//! trial; every other kind redraws the signal as well.

use std::time::Instant;

use rayon::prelude::*;

use modrec_core::bounds::{bound_table, count_jumps, spark_feasible, sparsity_bound};
use modrec_core::modulo::{add_noise, fold_signal, quantize_saturating, QuantizerSpec};
use modrec_core::recovery::{hod_unfold, lasso_b2r2, ls_onebit, nmse, nmse_db, Recovery};
use modrec_core::signal::generate_bandlimited;
use modrec_core::{Error, LassoConfig, MeasurementSource, OnebitConfig};

use crate::config::{Algorithm, ExperimentConfig, ExperimentKind};
use crate::results::{sort_rows, ResultRow};
use crate::seeds::{algorithm_seed, group_signal_seed, trial_seed};
use crate::RunError;

/// One point of the `λ × OF × SNR` product, λ-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub id: usize,
    pub lambda: f64,
    pub of: f64,
    pub snr_db: f64,
    /// Index of the `(λ, OF)` pair, shared by all SNR values.
    pub group: usize,
}

pub fn cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    for (li, &lambda) in cfg.lambdas.iter().enumerate() {
        for (oi, &of) in cfg.ofs.iter().enumerate() {
            for &snr_db in &cfg.snrs_db {
                out.push(Cell { id: out.len(), lambda, of, snr_db, group: li * cfg.ofs.len() + oi });
            }
        }
    }
    out
}

/// Timing runs force a single worker.
pub fn effective_jobs(cfg: &ExperimentConfig, jobs: usize) -> usize {
    if cfg.kind == ExperimentKind::Timing {
        1
    } else {
        jobs.max(1)
    }
}

/// Runs every trial of every cell and returns rows sorted by `(cell, trial, algorithm)`.
pub fn run_experiment(cfg: &ExperimentConfig, jobs: usize) -> Result<Vec<ResultRow>, RunError> {
    if cfg.kind == ExperimentKind::BoundTable {
        return Err(RunError::new("bound_table produces a table, not trial rows"));
    }
    let tasks: Vec<(Cell, usize)> = cells(cfg)
        .into_iter()
        .flat_map(|c| (0..cfg.trials).map(move |t| (c, t)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(effective_jobs(cfg, jobs))
        .build()
        .map_err(|e| RunError::new(e.to_string()))?;
    let nested: Vec<Vec<ResultRow>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(cell, trial)| run_trial(cfg, &cell, trial))
            .collect::<Result<_, _>>()
    })?;
    let mut rows: Vec<ResultRow> = nested.into_iter().flatten().collect();
    sort_rows(&mut rows);
    Ok(rows)
}

/// What one algorithm gets to see of a trial.
struct Acquisition {
    samples: Vec<f64>,
    flags: Vec<u8>,
    source: MeasurementSource,
}

fn acquire(
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    noisy: &[f64],
    flags: &[u8],
    lambda: f64,
    noiseless: bool,
) -> Result<Acquisition, RunError> {
    // The one-bit path spends one bit of the word on the folding flag.
    let sample_bits = match (cfg.bits, algorithm) {
        (Some(b), Algorithm::LsOnebit) => Some(b - 1),
        (b, _) => b,
    };
    let (samples, source) = match sample_bits {
        Some(b) => {
            let spec = QuantizerSpec::new(lambda, b)?;
            (quantize_saturating(noisy, &spec)?, MeasurementSource::Quantized)
        }
        None if noiseless => (noisy.to_vec(), MeasurementSource::Exact),
        None => (noisy.to_vec(), MeasurementSource::Noisy),
    };
    Ok(Acquisition { samples, flags: flags.to_vec(), source })
}

/// Whether an `ls_onebit` failure is a property of the instance rather than a bug.
fn infeasible(e: &Error) -> bool {
    matches!(e, Error::SupportTooLarge { .. } | Error::IllConditioned { .. } | Error::NoMeasurements { .. })
}

pub fn run_trial(cfg: &ExperimentConfig, cell: &Cell, trial: usize) -> Result<Vec<ResultRow>, RunError> {
    let kind = cfg.kind.as_str();
    let seed = trial_seed(cfg.base_seed, kind, cell.id, trial);
    let signal_seed = match cfg.kind {
        ExperimentKind::SnrSweep => group_signal_seed(cfg.base_seed, kind, cell.group),
        _ => seed,
    };
    let signal = generate_bandlimited::<f64>(signal_seed, cfg.n, cell.of, cfg.envelope_width)?;
    let record = fold_signal(&signal.samples, cell.lambda)?;
    let residual = record.residual.as_ref().expect("simulated folds carry the residual");
    let flags = record.folding_bits.as_ref().expect("simulated folds carry folding bits");
    let l = count_jumps(residual, cell.lambda)?;
    let bound = sparsity_bound(cfg.n, cell.of, signal.peak, cell.lambda)?;
    let noisy = add_noise(&record.folded, cell.snr_db, seed)?;
    let noiseless = cell.snr_db == f64::INFINITY;

    let mut rows = Vec::with_capacity(cfg.algorithms.len());
    for &algorithm in &cfg.algorithms {
        let input = acquire(cfg, algorithm, &noisy, flags, cell.lambda, noiseless)?;
        let solver_seed = algorithm_seed(seed, algorithm.as_str());
        let start = Instant::now();
        let outcome: Result<(Vec<f64>, usize, bool), Error> = match algorithm {
            Algorithm::LassoB2r2 => {
                let lc = LassoConfig { ista: cfg.ista.clone(), seed: solver_seed, source: input.source, ..LassoConfig::default() };
                lasso_b2r2(&input.samples, cell.lambda, cell.of, &lc).map(unpack)
            }
            Algorithm::LsOnebit => {
                let oc = OnebitConfig { dilation: cfg.dilation, source: input.source, ..OnebitConfig::default() };
                ls_onebit(&input.samples, &input.flags, cell.lambda, cell.of, &oc).map(unpack)
            }
            Algorithm::Hod => hod_unfold(&input.samples, cell.lambda, cfg.hod_order).map(|s| (s, 0, true)),
        };
        let time_s = start.elapsed().as_secs_f64();
        let (estimate, iterations, converged) = match outcome {
            Ok(v) => v,
            Err(e) if algorithm == Algorithm::LsOnebit && infeasible(&e) => {
                log::debug!("cell {} trial {trial}: ls_onebit infeasible ({e}); keeping folded samples", cell.id);
                (input.samples.clone(), 0, false)
            }
            Err(e) => return Err(e.into()),
        };
        rows.push(ResultRow {
            experiment: kind.to_string(),
            cell_id: cell.id,
            lambda: cell.lambda,
            of: cell.of,
            snr_db: cell.snr_db,
            bits: cfg.bits,
            algorithm: algorithm.as_str().to_string(),
            trial,
            seed,
            nmse: nmse(&signal.samples, &estimate)?,
            nmse_db: nmse_db(&signal.samples, &estimate)?,
            time_s,
            iterations,
            converged,
            l,
            l_max: bound.l_max,
            m: bound.m,
            spark_ok: spark_feasible(l, bound.m),
        });
    }
    Ok(rows)
}

fn unpack(r: Recovery<f64>) -> (Vec<f64>, usize, bool) {
    (r.signal, r.residual.iterations_used, r.residual.converged)
}

pub const BOUND_TABLE_HEADER: &str = "lambda,of,two_k,l_max,m";

/// Bound grid as CSV text, one row per `(λ, OF)`.
pub fn bound_table_csv(n: usize, lambdas: &[f64], ofs: &[f64], peak: f64) -> modrec_core::Result<String> {
    let mut out = String::from(BOUND_TABLE_HEADER);
    out.push('\n');
    for r in bound_table(n, lambdas, ofs, peak)? {
        out.push_str(&format!("{},{},{},{},{}\n", r.lambda, r.of, 2 * r.k, r.l_max, r.m));
    }
    Ok(out)
}
