use rayon::prelude::*;
use serde::Serialize;

use super::{ExperimentSpec, Family};
use crate::analysis::{
    basin_fraction, count_local_peaks, distance_profile, enumerate, enumerate_nk,
    fitness_histogram, mean_walk_autocorrelation, EvaluatedLandscape, Histogram, WalkConfig,
    DEFAULT_BINS,
};
use crate::error::{invalid_param, Result};
use crate::model::{
    build_type1, build_type1_master, build_type2, build_type3, schedule_groups, BuildOptions,
    Coefficients, InteractionModel, Term,
};
use crate::nk::generate_nk;
use crate::rng;
use crate::stats;
use crate::walsh::walsh_transform;

/// Seed for the landscape at `path` (configuration indices, then replicate).
pub(crate) fn seed_for(master: u64, path: &[usize]) -> u64 {
    path.iter().fold(master, |s, &i| rng::derive_seed(s, i as u64))
}

/// Full model of `family` with every admissible term of order `<= max_order`.
pub(crate) fn build_family(
    family: Family,
    n: usize,
    max_order: usize,
    sigma: f64,
    seed: u64,
    opts: &BuildOptions,
) -> Result<InteractionModel> {
    match family {
        Family::TypeI => build_type1(n, max_order, sigma, seed, opts),
        Family::TypeII => build_type2(n, max_order, sigma, seed, opts),
        Family::TypeIII => build_type3(n, max_order, sigma, seed, opts),
        Family::Nk => Err(invalid_param("NK landscapes are not interaction models")),
    }
}

/// Table over the features the model actually uses. Features that appear in
/// no term only add plateaus (no strict peaks, no unique maximum), so they
/// are dropped before measuring ruggedness.
pub(crate) fn effective_landscape(model: &InteractionModel, budget: u64) -> Result<EvaluatedLandscape> {
    let active = model.active_features();
    if active.len() == model.n() {
        enumerate(model, budget)
    } else {
        enumerate(&model.project(&active)?, budget)
    }
}

struct Ruggedness {
    peak_count: usize,
    lag1_autocorr: Option<f64>,
    basin_fraction: Option<f64>,
}

fn ruggedness(
    el: &EvaluatedLandscape,
    walks: Option<&WalkConfig>,
    basins: bool,
    walk_seed: u64,
) -> Result<Ruggedness> {
    Ok(Ruggedness {
        peak_count: count_local_peaks(el),
        lag1_autocorr: match walks {
            Some(cfg) => mean_walk_autocorrelation(el, cfg, walk_seed).ok(),
            None => None,
        },
        basin_fraction: if basins { basin_fraction(el).ok() } else { None },
    })
}

/// Runs `jobs` in parallel, keeping job order in the output.
fn run_jobs<J: Sync, T: Send>(jobs: &[J], f: impl Fn(&J) -> Result<Vec<T>> + Sync + Send) -> Result<Vec<T>> {
    let parts: Vec<Result<Vec<T>>> = jobs.par_iter().map(f).collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct NkRow {
    pub n: usize,
    pub k: usize,
    pub replicate: usize,
    pub seed: u64,
    /// Non-constant Walsh coefficients of the landscape, i.e. the number of
    /// terms of the equivalent interaction model.
    pub m_equivalent: usize,
    pub peak_count: usize,
    pub lag1_autocorr: Option<f64>,
    pub basin_fraction: Option<f64>,
}

/// NK landscapes with `K = M - 1` for each `M` in `spec.orders`.
pub fn nk_peaks(spec: &ExperimentSpec) -> Result<Vec<NkRow>> {
    spec.validate()?;
    let jobs: Vec<(usize, usize)> = spec
        .orders
        .iter()
        .flat_map(|&m| (0..spec.replicates).map(move |r| (m, r)))
        .collect();
    run_jobs(&jobs, |&(m, r)| {
        let k = m - 1;
        let seed = seed_for(spec.seed, &[k, r]);
        let nk = generate_nk(spec.n, k, seed)?;
        let el = enumerate_nk(&nk, spec.budget)?;
        let scale = el.fitness().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let walsh = walsh_transform(spec.n, el.fitness(), 1e-12 * scale)?;
        let stats = ruggedness(&el, spec.walks.as_ref(), spec.basins, rng::derive_seed(seed, 1))?;
        Ok(vec![NkRow {
            n: spec.n,
            k,
            replicate: r,
            seed,
            m_equivalent: walsh.omega().keys().filter(|&&j| j != 0).count(),
            peak_count: stats.peak_count,
            lag1_autocorr: stats.lag1_autocorr,
            basin_fraction: stats.basin_fraction,
        }])
    })
}

/// Every fitness of one landscape, with summary statistics.
#[derive(Debug, Clone, Serialize)]
pub struct DistributionResult {
    pub family: Family,
    pub coefficients: Coefficients,
    pub sigma: f64,
    pub max_order: usize,
    pub replicate: usize,
    pub seed: u64,
    pub m: usize,
    /// Constant term, 0 when absent.
    pub constant: f64,
    pub mean: f64,
    pub std: f64,
    /// `None` for a constant landscape.
    pub skewness: Option<f64>,
    pub fitness: Vec<f64>,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, Serialize)]
pub struct DistributionSummaryRow {
    pub family: Family,
    pub coefficients: Coefficients,
    pub sigma: f64,
    pub max_order: usize,
    pub replicate: usize,
    pub seed: u64,
    pub m: usize,
    pub constant: f64,
    pub mean: f64,
    pub std: f64,
    pub skewness: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HistogramRow {
    pub sigma: f64,
    pub max_order: usize,
    pub replicate: usize,
    pub seed: u64,
    pub bin: usize,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitnessRow {
    pub sigma: f64,
    pub max_order: usize,
    pub replicate: usize,
    pub seed: u64,
    pub index: usize,
    pub fitness: f64,
}

impl DistributionResult {
    pub fn summary_row(&self) -> DistributionSummaryRow {
        DistributionSummaryRow {
            family: self.family,
            coefficients: self.coefficients,
            sigma: self.sigma,
            max_order: self.max_order,
            replicate: self.replicate,
            seed: self.seed,
            m: self.m,
            constant: self.constant,
            mean: self.mean,
            std: self.std,
            skewness: self.skewness,
        }
    }

    pub fn histogram_rows(&self) -> impl Iterator<Item = HistogramRow> + '_ {
        let w = self.histogram.bin_width();
        self.histogram.counts.iter().enumerate().map(move |(bin, &count)| HistogramRow {
            sigma: self.sigma,
            max_order: self.max_order,
            replicate: self.replicate,
            seed: self.seed,
            bin,
            lo: self.histogram.lo + w * bin as f64,
            hi: if bin + 1 == self.histogram.counts.len() {
                self.histogram.hi
            } else {
                self.histogram.lo + w * (bin + 1) as f64
            },
            count,
        })
    }

    pub fn fitness_rows(&self) -> impl Iterator<Item = FitnessRow> + '_ {
        self.fitness.iter().enumerate().map(move |(index, &fitness)| FitnessRow {
            sigma: self.sigma,
            max_order: self.max_order,
            replicate: self.replicate,
            seed: self.seed,
            index,
            fitness,
        })
    }
}

/// Full fitness tables of models with every term up to each order in
/// `spec.orders`, for each sigma.
pub fn fitness_distributions(spec: &ExperimentSpec) -> Result<Vec<DistributionResult>> {
    spec.validate()?;
    let family = *spec.families.first().ok_or_else(|| invalid_param("no landscape family given"))?;
    let opts = BuildOptions::default().coefficients(spec.coefficients);
    let mut jobs = Vec::new();
    for (si, &sigma) in spec.sigmas.iter().enumerate() {
        for &m in &spec.orders {
            for r in 0..spec.replicates {
                jobs.push((si, sigma, m, r));
            }
        }
    }
    run_jobs(&jobs, |&(si, sigma, m, r)| {
        let seed = seed_for(spec.seed, &[si, m, r]);
        let model = build_family(family, spec.n, m, sigma, seed, &opts)?;
        let el = enumerate(&model, spec.budget)?;
        let f = el.fitness().to_vec();
        Ok(vec![DistributionResult {
            family,
            coefficients: spec.coefficients,
            sigma,
            max_order: m,
            replicate: r,
            seed,
            m: model.m(),
            constant: model.constant(),
            mean: stats::mean(&f),
            std: stats::std_dev(&f),
            skewness: stats::skewness(&f).ok(),
            histogram: fitness_histogram(&el, DEFAULT_BINS),
            fitness: f,
        }])
    })
}

/// One schedule step of one replicate.
#[derive(Debug, Clone, Serialize)]
pub struct ScheduleRow {
    pub kind: Family,
    pub n: usize,
    pub sigma: f64,
    pub replicate: usize,
    pub seed: u64,
    pub step: usize,
    pub m: usize,
    pub max_order: usize,
    /// Features used by at least one term; statistics are computed over these.
    pub active_features: usize,
    pub peak_count: usize,
    pub lag1_autocorr: Option<f64>,
    pub basin_fraction: Option<f64>,
}

fn build_master(family: Family, n: usize, sigma: f64, seed: u64) -> Result<InteractionModel> {
    let opts = BuildOptions::default();
    match family {
        Family::TypeI => build_type1_master(n, sigma, seed, &opts),
        Family::TypeII => build_type2(n, n, sigma, seed, &opts),
        Family::TypeIII => build_type3(n, if n % 2 == 1 { n } else { n - 1 }, sigma, seed, &opts),
        Family::Nk => Err(invalid_param("schedules are defined for NM landscapes only")),
    }
}

fn schedule_replicate(
    spec: &ExperimentSpec,
    family: Family,
    sigma: f64,
    replicate: usize,
    seed: u64,
) -> Result<Vec<ScheduleRow>> {
    let n = spec.n;
    let master = build_master(family, n, sigma, seed)?;
    let groups = schedule_groups(&master, spec.group_size, &mut rng::substream(seed, 1))?;
    let alphabet = *master.alphabet();
    let mut el = EvaluatedLandscape::zeros(n, 2, spec.budget)?;
    let mut included: Vec<Term> = Vec::new();
    let mut used = vec![false; n];
    let mut max_order = 0;
    let walk_base = rng::derive_seed(seed, 1);
    let mut rows = Vec::with_capacity(groups.len());
    for (step, group) in groups.iter().enumerate() {
        for &p in group {
            let t = &master.terms()[p];
            el.add_term(t, &alphabet)?;
            for &i in t.indices() {
                used[i] = true;
            }
            max_order = max_order.max(t.order());
            included.push(t.clone());
        }
        let active = used.iter().filter(|&&u| u).count();
        let projected;
        let view = if active == n {
            &el
        } else {
            let model = InteractionModel::new(
                n,
                included.clone(),
                alphabet,
                master.kind(),
                master.sigma(),
                master.seed(),
            )?;
            projected = effective_landscape(&model, spec.budget)?;
            &projected
        };
        let stats = ruggedness(
            view,
            spec.walks.as_ref(),
            spec.basins,
            rng::derive_seed(walk_base, step as u64),
        )?;
        rows.push(ScheduleRow {
            kind: family,
            n,
            sigma,
            replicate,
            seed,
            step,
            m: included.len(),
            max_order,
            active_features: active,
            peak_count: stats.peak_count,
            lag1_autocorr: stats.lag1_autocorr,
            basin_fraction: stats.basin_fraction,
        });
    }
    Ok(rows)
}

/// Ruggedness along the term schedule of `spec.replicates` random masters
/// per family and sigma.
pub fn ruggedness_schedule(spec: &ExperimentSpec) -> Result<Vec<ScheduleRow>> {
    spec.validate()?;
    let mut jobs = Vec::new();
    for (fi, &family) in spec.families.iter().enumerate() {
        for (si, &sigma) in spec.sigmas.iter().enumerate() {
            for r in 0..spec.replicates {
                jobs.push((fi, family, si, sigma, r));
            }
        }
    }
    run_jobs(&jobs, |&(fi, family, si, sigma, r)| {
        schedule_replicate(spec, family, sigma, r, seed_for(spec.seed, &[fi, si, r]))
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileRow {
    pub kind: Family,
    pub sigma: f64,
    pub max_order: usize,
    pub replicate: usize,
    pub seed: u64,
    pub index: usize,
    pub distance: usize,
    pub fitness: f64,
    pub is_local_peak: bool,
}

/// Fitness against distance to `[b, ..., b]` for every point of full
/// models of each order. Replicate `r` uses nested models across orders.
pub fn order_profiles(spec: &ExperimentSpec) -> Result<Vec<ProfileRow>> {
    spec.validate()?;
    let mut jobs = Vec::new();
    for (fi, &family) in spec.families.iter().enumerate() {
        for (si, &sigma) in spec.sigmas.iter().enumerate() {
            for &m in &spec.orders {
                for r in 0..spec.replicates {
                    jobs.push((fi, family, si, sigma, m, r));
                }
            }
        }
    }
    run_jobs(&jobs, |&(fi, family, si, sigma, m, r)| {
        // Same seed for every order: coefficients are drawn in canonical
        // order, so the order-M model is a prefix of the order-(M+1) one.
        let seed = seed_for(spec.seed, &[fi, si, r]);
        let model = build_family(family, spec.n, m, sigma, seed, &BuildOptions::default())?;
        let el = enumerate(&model, spec.budget)?;
        Ok(distance_profile(&el, el.top_index())
            .into_iter()
            .map(|e| ProfileRow {
                kind: family,
                sigma,
                max_order: m,
                replicate: r,
                seed,
                index: e.index,
                distance: e.distance,
                fitness: e.fitness,
                is_local_peak: e.is_local_peak,
            })
            .collect())
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BasinRow {
    pub family: Family,
    pub n: usize,
    /// `K + 1` for NK landscapes.
    pub max_order: usize,
    /// `None` for NK landscapes.
    pub sigma: Option<f64>,
    pub replicate: usize,
    pub seed: u64,
    /// `None` when the global maximum is not unique.
    pub basin_fraction: Option<f64>,
    pub peak_count: usize,
}

/// Basin of the global maximum for full models of each order (NK: `K = M - 1`).
/// Replicate `r` uses nested models across orders.
pub fn basin_sizes(spec: &ExperimentSpec) -> Result<Vec<BasinRow>> {
    spec.validate()?;
    let mut jobs = Vec::new();
    for (fi, &family) in spec.families.iter().enumerate() {
        let sigmas: Vec<(usize, Option<f64>)> = if family == Family::Nk {
            vec![(0, None)]
        } else {
            spec.sigmas.iter().copied().map(Some).enumerate().collect()
        };
        for (si, sigma) in sigmas {
            for &m in &spec.orders {
                for r in 0..spec.replicates {
                    jobs.push((fi, family, si, sigma, m, r));
                }
            }
        }
    }
    run_jobs(&jobs, |&(fi, family, si, sigma, m, r)| {
        // NM models of increasing order share a seed and so are nested (see
        // `order_profiles`); NK landscapes are drawn afresh for each K.
        let seed = match sigma {
            None => seed_for(spec.seed, &[fi, si, m, r]),
            Some(_) => seed_for(spec.seed, &[fi, si, r]),
        };
        let el = match sigma {
            None => enumerate_nk(&generate_nk(spec.n, m - 1, seed)?, spec.budget)?,
            Some(sigma) => effective_landscape(
                &build_family(family, spec.n, m, sigma, seed, &BuildOptions::default())?,
                spec.budget,
            )?,
        };
        Ok(vec![BasinRow {
            family,
            n: spec.n,
            max_order: m,
            sigma,
            replicate: r,
            seed,
            basin_fraction: basin_fraction(&el).ok(),
            peak_count: count_local_peaks(&el),
        }])
    })
}
