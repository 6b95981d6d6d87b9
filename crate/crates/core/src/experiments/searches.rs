use rayon::prelude::*;
use serde::Serialize;

use super::landscapes::{build_family, seed_for};
use super::{ExperimentSpec, Family};
use crate::error::{invalid_param, Error, Result};
use crate::model::{build_type1_proportion, BuildOptions, InteractionModel};
use crate::search::{ga_run, run_seed, SearchTrace, TraceSummary, FOUND_TOLERANCE};
use crate::stats;

/// Runs on one landscape.
#[derive(Debug, Clone, Serialize)]
pub struct LandscapeRuns {
    pub landscape_seed: u64,
    pub traces: Vec<SearchTrace>,
}

/// GA runs on the random landscapes of one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct GaGroup {
    pub family: Family,
    pub sigma: f64,
    pub max_order: usize,
    /// Second-order proportion, for proportion sweeps.
    pub proportion: Option<f64>,
    pub landscapes: Vec<LandscapeRuns>,
}

/// One generation of one run.
#[derive(Debug, Clone, Serialize)]
pub struct GaRow {
    pub family: Family,
    pub sigma: f64,
    pub max_order: usize,
    pub proportion: Option<f64>,
    pub landscape: usize,
    pub landscape_seed: u64,
    pub seed: u64,
    pub generation: usize,
    pub best_raw: f64,
    pub best_by_max: f64,
    pub best_minmax: Option<f64>,
    pub distance_to_opt: usize,
    pub found_global: bool,
}

/// Per-generation aggregates over every run of a group. Success and failed
/// distance refer to the final generation.
#[derive(Debug, Clone, Serialize)]
pub struct GaSummaryRow {
    pub family: Family,
    pub sigma: f64,
    pub max_order: usize,
    pub proportion: Option<f64>,
    pub generation: usize,
    pub runs: usize,
    pub raw_mean: f64,
    pub raw_std: f64,
    pub by_max_mean: f64,
    pub by_max_std: f64,
    pub minmax_mean: Option<f64>,
    pub minmax_std: Option<f64>,
    pub success_proportion: f64,
    pub failed_distance_mean: Option<f64>,
    pub failed_distance_std: Option<f64>,
}

impl GaGroup {
    pub fn traces(&self) -> impl Iterator<Item = &SearchTrace> + '_ {
        self.landscapes.iter().flat_map(|l| &l.traces)
    }

    pub fn summary(&self) -> Result<TraceSummary> {
        TraceSummary::from_traces(&self.traces().cloned().collect::<Vec<_>>())
    }

    pub fn rows(&self) -> impl Iterator<Item = GaRow> + '_ {
        self.landscapes.iter().enumerate().flat_map(move |(li, l)| {
            l.traces.iter().flat_map(move |t| {
                (0..t.best_raw.len()).map(move |g| GaRow {
                    family: self.family,
                    sigma: self.sigma,
                    max_order: self.max_order,
                    proportion: self.proportion,
                    landscape: li,
                    landscape_seed: l.landscape_seed,
                    seed: t.seed,
                    generation: g,
                    best_raw: t.best_raw[g],
                    best_by_max: t.best_by_max[g],
                    best_minmax: t.best_minmax.as_ref().map(|v| v[g]),
                    distance_to_opt: t.best_distance[g],
                    found_global: (t.best_by_max[g] - 1.0).abs() <= FOUND_TOLERANCE,
                })
            })
        })
    }

    pub fn summary_rows(&self) -> Result<Vec<GaSummaryRow>> {
        let s = self.summary()?;
        Ok((0..s.best_raw.len())
            .map(|g| GaSummaryRow {
                family: self.family,
                sigma: self.sigma,
                max_order: self.max_order,
                proportion: self.proportion,
                generation: g,
                runs: s.runs,
                raw_mean: s.best_raw[g].mean,
                raw_std: s.best_raw[g].std,
                by_max_mean: s.best_by_max[g].mean,
                by_max_std: s.best_by_max[g].std,
                minmax_mean: s.best_minmax.as_ref().map(|v| v[g].mean),
                minmax_std: s.best_minmax.as_ref().map(|v| v[g].std),
                success_proportion: s.success_proportion,
                failed_distance_mean: s.failed_distance.map(|d| d.mean),
                failed_distance_std: s.failed_distance.map(|d| d.std),
            })
            .collect())
    }
}

/// `spec.ga.runs` GA runs on each of `spec.replicates` landscapes built by
/// `build(seed)`. Landscapes are built inside the worker so large models
/// are not all held at once.
fn run_group(
    spec: &ExperimentSpec,
    path: &[usize],
    build: impl Fn(u64) -> Result<InteractionModel> + Sync + Send,
) -> Result<Vec<LandscapeRuns>> {
    let results: Vec<Result<LandscapeRuns>> = (0..spec.replicates)
        .into_par_iter()
        .map(|i| {
            let mut p = path.to_vec();
            p.push(i);
            let landscape_seed = seed_for(spec.seed, &p);
            let model = build(landscape_seed)?;
            let traces = (0..spec.ga.runs)
                .map(|r| ga_run(&model, &spec.ga, run_seed(landscape_seed, 0, r)))
                .collect::<Result<Vec<_>>>()?;
            Ok(LandscapeRuns { landscape_seed, traces })
        })
        .collect();
    results.into_iter().collect()
}

fn single_family(spec: &ExperimentSpec) -> Result<Family> {
    match spec.families.as_slice() {
        [f] if *f != Family::Nk => Ok(*f),
        _ => Err(invalid_param("GA sweeps take exactly one NM landscape family")),
    }
}

/// Type I landscapes with all main effects and a proportion of the
/// second-order terms, for each proportion and sigma.
pub fn p_sweep(spec: &ExperimentSpec) -> Result<Vec<GaGroup>> {
    spec.validate()?;
    let opts = BuildOptions::default().coefficients(spec.coefficients);
    let mut groups = Vec::new();
    for (si, &sigma) in spec.sigmas.iter().enumerate() {
        for (pi, &p) in spec.proportions.iter().enumerate() {
            let landscapes = run_group(spec, &[si, pi], |seed| {
                build_type1_proportion(spec.n, p, sigma, seed, &opts)
            })?;
            groups.push(GaGroup {
                family: Family::TypeI,
                sigma,
                max_order: if p > 0.0 { 2 } else { 1 },
                proportion: Some(p),
                landscapes,
            });
        }
    }
    Ok(groups)
}

/// Full models of the spec's family for each order and sigma.
pub fn m_sweep(spec: &ExperimentSpec) -> Result<Vec<GaGroup>> {
    spec.validate()?;
    let family = single_family(spec)?;
    let opts = BuildOptions::default().coefficients(spec.coefficients);
    let mut groups = Vec::new();
    for (si, &sigma) in spec.sigmas.iter().enumerate() {
        for &m in &spec.orders {
            let landscapes = run_group(spec, &[si, m], |seed| {
                build_family(family, spec.n, m, sigma, seed, &opts)
            })?;
            groups.push(GaGroup { family, sigma, max_order: m, proportion: None, landscapes });
        }
    }
    Ok(groups)
}

/// The single group compared under both normalizations: the first order
/// and sigma of the spec.
pub fn norm_compare_group(spec: &ExperimentSpec) -> Result<GaGroup> {
    let narrowed = ExperimentSpec {
        sigmas: spec.sigmas.iter().take(1).copied().collect(),
        orders: spec.orders.iter().take(1).copied().collect(),
        ..spec.clone()
    };
    m_sweep(&narrowed)?
        .pop()
        .ok_or_else(|| invalid_param("normalization comparison needs one sigma and one order"))
}

/// Best fitness per generation under both normalizations, with the relative
/// gain over generation 0, `(v_g - v_0) / v_0`, per landscape.
#[derive(Debug, Clone, Serialize)]
pub struct NormCompareRow {
    pub generation: usize,
    pub by_max_mean: f64,
    pub by_max_std: f64,
    pub minmax_mean: f64,
    pub minmax_std: f64,
    pub by_max_gain_mean: f64,
    pub by_max_gain_std: f64,
    pub minmax_gain_mean: f64,
    pub minmax_gain_std: f64,
}

pub fn normalization_compare(group: &GaGroup) -> Result<Vec<NormCompareRow>> {
    let traces: Vec<&SearchTrace> = group.traces().collect();
    let first = traces.first().ok_or_else(|| invalid_param("no runs to compare"))?;
    if traces.iter().any(|t| t.best_minmax.is_none()) {
        return Err(Error::MinimumUnknown(
            "minmax normalization needs landscapes with a known minimum".into(),
        ));
    }
    let len = first.best_raw.len();
    let series = |t: &SearchTrace, minmax: bool| -> Vec<f64> {
        if minmax { t.best_minmax.clone().unwrap() } else { t.best_by_max.clone() }
    };
    let gains = |v: &[f64]| -> Result<Vec<f64>> {
        if v[0] == 0.0 {
            return Err(Error::UndefinedStatistic("initial best fitness is zero".into()));
        }
        Ok(v.iter().map(|x| (x - v[0]) / v[0]).collect())
    };
    let mut by_max = Vec::new();
    let mut minmax = Vec::new();
    let mut by_max_gain = Vec::new();
    let mut minmax_gain = Vec::new();
    for t in &traces {
        let (b, m) = (series(t, false), series(t, true));
        by_max_gain.push(gains(&b)?);
        minmax_gain.push(gains(&m)?);
        by_max.push(b);
        minmax.push(m);
    }
    let column = |rows: &[Vec<f64>], g: usize| -> (f64, f64) {
        let col: Vec<f64> = rows.iter().map(|r| r[g]).collect();
        let std = if col.len() > 1 { stats::std_dev(&col) } else { 0.0 };
        (stats::mean(&col), std)
    };
    Ok((0..len)
        .map(|g| {
            let (bm, bs) = column(&by_max, g);
            let (mm, ms) = column(&minmax, g);
            let (bgm, bgs) = column(&by_max_gain, g);
            let (mgm, mgs) = column(&minmax_gain, g);
            NormCompareRow {
                generation: g,
                by_max_mean: bm,
                by_max_std: bs,
                minmax_mean: mm,
                minmax_std: ms,
                by_max_gain_mean: bgm,
                by_max_gain_std: bgs,
                minmax_gain_mean: mgm,
                minmax_gain_std: mgs,
            }
        })
        .collect())
}
