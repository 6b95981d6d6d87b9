//! Runners that regenerate the data behind each figure.
//!
//! Every runner is a pure function of an [`ExperimentSpec`] returning rows;
//! [`run_experiment`] writes them as CSV next to a `spec.json` sidecar (the
//! full spec, seeds and crate version) and a `run.json` holding the
//! timestamp and worker count. Replicate `r` always draws from seeds derived
//! from `(spec.seed, r)`, so data files are byte-identical across reruns and
//! worker counts.

mod landscapes;
mod searches;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::{WalkConfig, DEFAULT_BUDGET};
use crate::error::{invalid_param, Error, Result};
use crate::model::{Coefficients, ModelKind, DEFAULT_GROUP_SIZE};
use crate::search::{GaConfig, Selection};

pub use landscapes::{
    basin_sizes, fitness_distributions, nk_peaks, order_profiles, ruggedness_schedule,
    BasinRow, DistributionResult, DistributionSummaryRow, FitnessRow, HistogramRow, NkRow,
    ProfileRow, ScheduleRow,
};
pub use searches::{
    m_sweep, norm_compare_group, normalization_compare, p_sweep, GaGroup, GaRow, GaSummaryRow, LandscapeRuns,
    NormCompareRow,
};

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "NMLAND_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    Fig1NkPeaks,
    Fig2Histograms,
    Fig3UniformHistograms,
    Fig4RuggednessSchedule,
    Fig5_6Profiles,
    Fig7Basins,
    Fig8_9PSweep,
    Fig10_11MSweep,
    Fig12NormCompare,
    Fig13SigmaSpread,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 10] = [
        ExperimentId::Fig1NkPeaks,
        ExperimentId::Fig2Histograms,
        ExperimentId::Fig3UniformHistograms,
        ExperimentId::Fig4RuggednessSchedule,
        ExperimentId::Fig5_6Profiles,
        ExperimentId::Fig7Basins,
        ExperimentId::Fig8_9PSweep,
        ExperimentId::Fig10_11MSweep,
        ExperimentId::Fig12NormCompare,
        ExperimentId::Fig13SigmaSpread,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::Fig1NkPeaks => "fig1_nk_peaks",
            ExperimentId::Fig2Histograms => "fig2_histograms",
            ExperimentId::Fig3UniformHistograms => "fig3_uniform_histograms",
            ExperimentId::Fig4RuggednessSchedule => "fig4_ruggedness_schedule",
            ExperimentId::Fig5_6Profiles => "fig5_6_profiles",
            ExperimentId::Fig7Basins => "fig7_basins",
            ExperimentId::Fig8_9PSweep => "fig8_9_p_sweep",
            ExperimentId::Fig10_11MSweep => "fig10_11_m_sweep",
            ExperimentId::Fig12NormCompare => "fig12_norm_compare",
            ExperimentId::Fig13SigmaSpread => "fig13_sigma_spread",
        }
    }

    /// Whether the experiment enumerates every point of its landscapes.
    pub fn is_exhaustive(&self) -> bool {
        !matches!(
            self,
            ExperimentId::Fig8_9PSweep | ExperimentId::Fig10_11MSweep | ExperimentId::Fig12NormCompare
        )
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|id| id.as_str() == s).ok_or_else(|| {
            let known: Vec<&str> = Self::ALL.iter().map(|id| id.as_str()).collect();
            invalid_param(format!("unknown experiment '{s}'; expected one of {}", known.join(", ")))
        })
    }
}

/// Landscape family in experiment parameters and output rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Nk,
    TypeI,
    TypeII,
    TypeIII,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Nk => "nk",
            Family::TypeI => "type_i",
            Family::TypeII => "type_ii",
            Family::TypeIII => "type_iii",
        }
    }

    pub fn model_kind(&self) -> Option<ModelKind> {
        match self {
            Family::Nk => None,
            Family::TypeI => Some(ModelKind::TypeI),
            Family::TypeII => Some(ModelKind::TypeII),
            Family::TypeIII => Some(ModelKind::TypeIII),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "nk" => Ok(Family::Nk),
            "type_i" | "typei" | "1" | "i" => Ok(Family::TypeI),
            "type_ii" | "typeii" | "2" | "ii" => Ok(Family::TypeII),
            "type_iii" | "typeiii" | "3" | "iii" => Ok(Family::TypeIII),
            other => Err(invalid_param(format!("unknown landscape family '{other}'"))),
        }
    }
}

/// Parameters of one experiment. [`ExperimentSpec::defaults`] gives the
/// default setting for each id; fields an experiment does not use are
/// ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    pub n: usize,
    pub sigmas: Vec<f64>,
    /// Landscapes per configuration.
    pub replicates: usize,
    pub seed: u64,
    /// Largest number of points an exhaustive experiment may tabulate.
    pub budget: u64,
    pub group_size: usize,
    pub families: Vec<Family>,
    /// Maximum interaction orders `M` (for NK, `K = M - 1`).
    pub orders: Vec<usize>,
    /// Proportions of second-order terms.
    pub proportions: Vec<f64>,
    pub coefficients: Coefficients,
    /// Random-walk settings; `None` skips autocorrelation.
    pub walks: Option<WalkConfig>,
    pub basins: bool,
    pub ga: GaConfig,
}

impl ExperimentSpec {
    pub fn defaults(id: ExperimentId) -> Self {
        let base = Self {
            id,
            n: 10,
            sigmas: vec![10.0],
            replicates: 100,
            seed: 2016,
            budget: DEFAULT_BUDGET,
            group_size: DEFAULT_GROUP_SIZE,
            families: vec![Family::TypeI, Family::TypeII],
            orders: Vec::new(),
            proportions: Vec::new(),
            coefficients: Coefficients::Exponential,
            walks: Some(WalkConfig::default()),
            basins: true,
            ga: GaConfig::default(),
        };
        let ga = GaConfig { runs: 1, ..GaConfig::default() };
        match id {
            ExperimentId::Fig1NkPeaks => Self {
                families: vec![Family::Nk],
                orders: (1..=10).collect(),
                replicates: 10,
                ..base
            },
            ExperimentId::Fig2Histograms => Self {
                sigmas: vec![1.0, 10.0, 100.0],
                families: vec![Family::TypeI],
                orders: vec![2],
                replicates: 1,
                walks: None,
                basins: false,
                ..base
            },
            ExperimentId::Fig3UniformHistograms => Self {
                sigmas: vec![1.0],
                families: vec![Family::TypeI],
                orders: vec![2],
                replicates: 4,
                coefficients: Coefficients::Uniform,
                walks: None,
                basins: false,
                ..base
            },
            ExperimentId::Fig4RuggednessSchedule => base,
            ExperimentId::Fig5_6Profiles => Self {
                orders: vec![1, 2, 3, 4, 6, 10],
                replicates: 1,
                walks: None,
                basins: false,
                ..base
            },
            ExperimentId::Fig7Basins => Self {
                families: vec![Family::Nk, Family::TypeI, Family::TypeII],
                orders: (1..=10).collect(),
                replicates: 30,
                walks: None,
                ..base
            },
            ExperimentId::Fig8_9PSweep => Self {
                n: 32,
                sigmas: vec![32.0],
                replicates: 32,
                families: vec![Family::TypeI],
                orders: vec![2],
                proportions: (0..=10).map(|i| i as f64 / 10.0).collect(),
                walks: None,
                basins: false,
                ga,
                ..base
            },
            ExperimentId::Fig10_11MSweep => Self {
                n: 32,
                sigmas: vec![32.0],
                replicates: 32,
                families: vec![Family::TypeIII],
                orders: vec![1, 3, 5],
                walks: None,
                basins: false,
                ga,
                ..base
            },
            ExperimentId::Fig12NormCompare => Self {
                n: 32,
                sigmas: vec![32.0],
                replicates: 32,
                families: vec![Family::TypeIII],
                orders: vec![3],
                walks: None,
                basins: false,
                ga,
                ..base
            },
            ExperimentId::Fig13SigmaSpread => Self {
                n: 15,
                sigmas: vec![15.0, 30.0, 100.0],
                families: vec![Family::TypeII],
                walks: None,
                basins: false,
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid_param("n must be at least 1"));
        }
        if self.replicates == 0 {
            return Err(invalid_param("at least one replicate is required"));
        }
        if self.group_size == 0 {
            return Err(invalid_param("group size must be at least 1"));
        }
        if let Some(s) = self.sigmas.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(invalid_param(format!("sigma must be positive and finite, got {s}")));
        }
        if let Some(&m) = self.orders.iter().find(|&&m| m == 0 || m > self.n) {
            return Err(invalid_param(format!("order {m} outside 1..={}", self.n)));
        }
        if let Some(p) = self.proportions.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(invalid_param(format!("proportion {p} outside [0, 1]")));
        }
        self.ga.validate()?;
        if self.id.is_exhaustive() {
            check_budget(2, self.n, self.budget)?;
        }
        Ok(())
    }
}

pub(crate) fn check_budget(arity: usize, n: usize, budget: u64) -> Result<()> {
    let required = (arity as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

/// Worker count from [`WORKERS_ENV`], else the available parallelism.
pub fn workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `f` on a pool of `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Unsupported(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Serialize)]
struct SpecSidecar<'a> {
    crate_version: &'static str,
    spec: &'a ExperimentSpec,
    /// The GA selection scheme, spelled out for readers of the sidecar.
    selection: Selection,
}

#[derive(Serialize)]
struct RunSidecar {
    experiment: &'static str,
    unix_time: u64,
    workers: usize,
    elapsed_seconds: f64,
    files: Vec<String>,
}

fn write_csv<T: Serialize>(dir: &Path, name: &str, rows: &[T], files: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    files.push(path);
    Ok(())
}

/// Runs `spec` with [`workers`] threads and writes its outputs to `dir`
/// (created if needed). Returns the paths written, sidecars last.
pub fn run_experiment(spec: &ExperimentSpec, dir: &Path) -> Result<Vec<PathBuf>> {
    spec.validate()?;
    let threads = workers();
    let started = std::time::Instant::now();
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    with_workers(threads, || write_outputs(spec, dir, &mut files))??;

    let spec_path = dir.join("spec.json");
    let sidecar = SpecSidecar {
        crate_version: env!("CARGO_PKG_VERSION"),
        spec,
        selection: spec.ga.selection,
    };
    fs::write(&spec_path, serde_json::to_string_pretty(&sidecar)? + "\n")?;
    files.push(spec_path);

    let run_path = dir.join("run.json");
    let run = RunSidecar {
        experiment: spec.id.as_str(),
        unix_time: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        workers: threads,
        elapsed_seconds: started.elapsed().as_secs_f64(),
        files: files.iter().filter_map(|p| p.file_name()).map(|f| f.to_string_lossy().into_owned()).collect(),
    };
    fs::write(&run_path, serde_json::to_string_pretty(&run)? + "\n")?;
    files.push(run_path);
    Ok(files)
}

fn write_outputs(spec: &ExperimentSpec, dir: &Path, files: &mut Vec<PathBuf>) -> Result<()> {
    match spec.id {
        ExperimentId::Fig1NkPeaks => write_csv(dir, "nk_peaks.csv", &nk_peaks(spec)?, files),
        ExperimentId::Fig2Histograms | ExperimentId::Fig3UniformHistograms => {
            let results = fitness_distributions(spec)?;
            let summary: Vec<_> = results.iter().map(DistributionResult::summary_row).collect();
            let hist: Vec<_> = results.iter().flat_map(DistributionResult::histogram_rows).collect();
            let fit: Vec<_> = results.iter().flat_map(DistributionResult::fitness_rows).collect();
            write_csv(dir, "summary.csv", &summary, files)?;
            write_csv(dir, "histograms.csv", &hist, files)?;
            write_csv(dir, "fitnesses.csv", &fit, files)
        }
        ExperimentId::Fig4RuggednessSchedule | ExperimentId::Fig13SigmaSpread => {
            write_csv(dir, "schedule.csv", &ruggedness_schedule(spec)?, files)
        }
        ExperimentId::Fig5_6Profiles => write_csv(dir, "profiles.csv", &order_profiles(spec)?, files),
        ExperimentId::Fig7Basins => write_csv(dir, "basins.csv", &basin_sizes(spec)?, files),
        ExperimentId::Fig8_9PSweep | ExperimentId::Fig10_11MSweep => {
            let groups = if spec.id == ExperimentId::Fig8_9PSweep { p_sweep(spec)? } else { m_sweep(spec)? };
            let runs: Vec<GaRow> = groups.iter().flat_map(GaGroup::rows).collect();
            let mut summary: Vec<GaSummaryRow> = Vec::new();
            for g in &groups {
                summary.extend(g.summary_rows()?);
            }
            write_csv(dir, "ga_runs.csv", &runs, files)?;
            write_csv(dir, "ga_summary.csv", &summary, files)
        }
        ExperimentId::Fig12NormCompare => {
            let group = searches::norm_compare_group(spec)?;
            let runs: Vec<GaRow> = group.rows().collect();
            write_csv(dir, "ga_runs.csv", &runs, files)?;
            write_csv(dir, "norm_compare.csv", &normalization_compare(&group)?, files)
        }
    }
}
