use rayon::prelude::*;
use serde::Serialize;

use super::ga::{ga_run, GaConfig, SearchTrace};
use crate::error::{invalid_input, Result};
use crate::model::InteractionModel;
use crate::rng;
use crate::stats;

/// Mean and sample standard deviation (0 for a single value).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn of(xs: &[f64]) -> Self {
        let mean = stats::mean(xs);
        let std = if xs.len() > 1 { stats::std_dev(xs) } else { 0.0 };
        Self { mean, std }
    }
}

/// Aggregates over a set of runs with equal trace lengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceSummary {
    pub runs: usize,
    pub best_raw: Vec<MeanStd>,
    pub best_by_max: Vec<MeanStd>,
    pub best_minmax: Option<Vec<MeanStd>>,
    pub success_proportion: f64,
    /// Distance to the optimum among runs that missed it; `None` if none did.
    pub failed_distance: Option<MeanStd>,
}

impl TraceSummary {
    /// Traces must not have been stopped early.
    pub fn from_traces(traces: &[SearchTrace]) -> Result<Self> {
        let first = traces.first().ok_or_else(|| invalid_input("no traces to summarize"))?;
        let len = first.best_raw.len();
        if traces.iter().any(|t| t.best_raw.len() != len) {
            return Err(invalid_input("traces have different lengths"));
        }
        let per_gen = |get: &dyn Fn(&SearchTrace) -> &[f64]| -> Vec<MeanStd> {
            (0..len)
                .map(|g| MeanStd::of(&traces.iter().map(|t| get(t)[g]).collect::<Vec<_>>()))
                .collect()
        };
        let best_minmax = if traces.iter().all(|t| t.best_minmax.is_some()) {
            Some(per_gen(&|t| t.best_minmax.as_deref().unwrap()))
        } else {
            None
        };
        let failed: Vec<f64> = traces
            .iter()
            .filter(|t| !t.found_global)
            .map(|t| t.distance_to_opt as f64)
            .collect();
        Ok(Self {
            runs: traces.len(),
            best_raw: per_gen(&|t| &t.best_raw),
            best_by_max: per_gen(&|t| &t.best_by_max),
            best_minmax,
            success_proportion: (traces.len() - failed.len()) as f64 / traces.len() as f64,
            failed_distance: (!failed.is_empty()).then(|| MeanStd::of(&failed)),
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub model_index: usize,
    pub traces: Vec<SearchTrace>,
    /// `None` when any run failed; see `error`.
    pub summary: Option<TraceSummary>,
    pub error: Option<String>,
}

/// Seed of run `run` on model `model_index`.
pub fn run_seed(master_seed: u64, model_index: usize, run: usize) -> u64 {
    rng::derive_seed(rng::derive_seed(master_seed, model_index as u64), run as u64)
}

/// `config.runs` GA runs on every model. Runs execute in parallel; results
/// do not depend on scheduling.
pub fn ga_sweep(models: &[InteractionModel], config: &GaConfig, master_seed: u64) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let sweep_config = GaConfig { early_stop: false, ..config.clone() };
    Ok(models
        .iter()
        .enumerate()
        .map(|(mi, model)| {
            let results: Vec<Result<SearchTrace>> = (0..config.runs)
                .into_par_iter()
                .map(|r| ga_run(model, &sweep_config, run_seed(master_seed, mi, r)))
                .collect();
            let mut traces = Vec::with_capacity(results.len());
            let mut error = None;
            for res in results {
                match res {
                    Ok(t) => traces.push(t),
                    Err(e) => {
                        error.get_or_insert(e.to_string());
                    }
                }
            }
            let summary = match error {
                None => TraceSummary::from_traces(&traces).ok(),
                Some(_) => None,
            };
            SweepRow { model_index: mi, traces, summary, error }
        })
        .collect())
}
