use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, Error, Result};
use crate::model::InteractionModel;
use crate::rng;

/// Relative tolerance for declaring the global maximum found.
pub const FOUND_TOLERANCE: f64 = 1e-9;

/// Parent selection scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Selection {
    /// Fitness-proportionate on normalized fitness.
    Proportional,
    /// Linear ranking: weight of the i-th worst is i.
    Rank,
    /// Best of `k` uniformly drawn individuals.
    Tournament(usize),
}

impl fmt::Display for Selection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selection::Proportional => f.write_str("proportional"),
            Selection::Rank => f.write_str("rank"),
            Selection::Tournament(k) => write!(f, "tournament:{k}"),
        }
    }
}

impl FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "proportional" | "roulette" => Ok(Selection::Proportional),
            "rank" => Ok(Selection::Rank),
            _ => {
                let k = s
                    .strip_prefix("tournament")
                    .map(|r| r.trim_start_matches([':', '=']))
                    .ok_or_else(|| invalid_param(format!("unknown selection scheme '{s}'")))?;
                let k = if k.is_empty() { 2 } else {
                    k.parse().map_err(|_| invalid_param(format!("bad tournament size '{k}'")))?
                };
                if k == 0 {
                    return Err(invalid_param("tournament size must be positive"));
                }
                Ok(Selection::Tournament(k))
            }
        }
    }
}

impl TryFrom<String> for Selection {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Selection> for String {
    fn from(s: Selection) -> String {
        s.to_string()
    }
}

/// Fitness scale used by proportional selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `(f - F_min) / (F_max - F_min)`; falls back to rank selection when the
    /// minimum is unknown.
    Minmax,
    /// `f / F_max`, shifted up when negative.
    ByMax,
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "minmax" => Ok(Normalization::Minmax),
            "by_max" | "bymax" | "max" => Ok(Normalization::ByMax),
            other => Err(invalid_param(format!("unknown normalization '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaConfig {
    pub population_size: usize,
    pub crossover_rate: f64,
    /// Per-bit flip probability; `None` means `1/N`.
    pub mutation_rate: Option<f64>,
    pub generations: usize,
    pub runs: usize,
    pub selection: Selection,
    pub normalization: Normalization,
    pub elitism: bool,
    /// Stop a run as soon as the global maximum is found.
    pub early_stop: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 256,
            crossover_rate: 0.7,
            mutation_rate: None,
            generations: 30,
            runs: 32,
            selection: Selection::Rank,
            normalization: Normalization::Minmax,
            elitism: true,
            early_stop: false,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 || self.population_size % 2 != 0 {
            return Err(invalid_param(format!(
                "population size must be even and at least 2, got {}",
                self.population_size
            )));
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return Err(invalid_param(format!(
                "crossover rate must lie in [0, 1], got {}",
                self.crossover_rate
            )));
        }
        if let Some(p) = self.mutation_rate {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid_param(format!("mutation rate must lie in [0, 1], got {p}")));
            }
        }
        if self.runs == 0 {
            return Err(invalid_param("at least one run is required"));
        }
        if let Selection::Tournament(k) = self.selection {
            if k > self.population_size {
                return Err(invalid_param("tournament larger than the population"));
            }
        }
        Ok(())
    }

    /// Parses a TOML key/value config; missing keys keep their defaults.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn mutation_for(&self, n: usize) -> f64 {
        self.mutation_rate.unwrap_or(1.0 / n as f64)
    }
}

/// One GA run on a binary landscape.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchTrace {
    pub seed: u64,
    /// Best fitness in generation 0 (the random initial population) through
    /// the last generation run.
    pub best_raw: Vec<f64>,
    pub best_by_max: Vec<f64>,
    /// Present when the landscape's minimum is known.
    pub best_minmax: Option<Vec<f64>>,
    /// Distance of each generation's best to `[b, ..., b]`.
    pub best_distance: Vec<usize>,
    /// Final best point as alphabet values.
    pub best_point: Vec<f64>,
    /// Number of features where the final best differs from `[b, ..., b]`.
    pub distance_to_opt: usize,
    pub found_global: bool,
    /// First generation whose best reaches the global maximum.
    pub found_at: Option<usize>,
}

impl SearchTrace {
    pub fn final_raw(&self) -> f64 {
        *self.best_raw.last().expect("trace has generation 0")
    }

    pub fn generations(&self) -> usize {
        self.best_raw.len() - 1
    }
}

pub(crate) fn is_global(f: f64, max: f64) -> bool {
    (f - max).abs() <= FOUND_TOLERANCE * max.abs().max(f64::MIN_POSITIVE)
}

fn uniform_crossover<R: Rng + ?Sized>(a: u64, b: u64, full: u64, rng: &mut R) -> (u64, u64) {
    let take = rng.random::<u64>() & full;
    ((a & take) | (b & !take & full), (b & take) | (a & !take & full))
}

fn mutate<R: Rng + ?Sized>(x: u64, n: usize, p: f64, rng: &mut R) -> u64 {
    if p <= 0.0 {
        return x;
    }
    let mut flips = 0u64;
    for i in 0..n {
        if rng.random::<f64>() < p {
            flips |= 1 << i;
        }
    }
    x ^ flips
}

struct Scales {
    max: f64,
    min: Option<f64>,
}

impl Scales {
    fn by_max(&self, f: f64) -> f64 {
        f / self.max
    }

    fn minmax(&self, f: f64) -> Option<f64> {
        self.min.map(|lo| (f - lo) / (self.max - lo))
    }
}

/// Selection weights for the proportional and rank schemes.
fn weights(fit: &[f64], scheme: Selection, norm: Normalization, s: &Scales) -> Vec<f64> {
    let rank_weights = || {
        let mut order: Vec<usize> = (0..fit.len()).collect();
        order.sort_by(|&i, &j| fit[i].total_cmp(&fit[j]));
        let mut w = vec![0.0; fit.len()];
        for (r, &i) in order.iter().enumerate() {
            w[i] = (r + 1) as f64;
        }
        w
    };
    match (scheme, norm) {
        (Selection::Rank, _) => rank_weights(),
        (_, Normalization::Minmax) => match s.min {
            Some(_) => fit.iter().map(|&f| s.minmax(f).unwrap().max(0.0)).collect(),
            None => rank_weights(),
        },
        (_, Normalization::ByMax) => {
            let g: Vec<f64> = fit.iter().map(|&f| s.by_max(f)).collect();
            let lo = g.iter().copied().fold(f64::INFINITY, f64::min);
            if lo < 0.0 {
                g.iter().map(|v| v - lo).collect()
            } else {
                g
            }
        }
    }
}

/// Indices of `count` parents.
fn select<R: Rng + ?Sized>(
    fit: &[f64],
    count: usize,
    config: &GaConfig,
    s: &Scales,
    rng: &mut R,
) -> Vec<usize> {
    if let Selection::Tournament(k) = config.selection {
        return (0..count)
            .map(|_| {
                (0..k)
                    .map(|_| rng.random_range(0..fit.len()))
                    .max_by(|&i, &j| fit[i].total_cmp(&fit[j]).then(j.cmp(&i)))
                    .unwrap()
            })
            .collect();
    }
    let w = weights(fit, config.selection, config.normalization, s);
    match WeightedIndex::new(&w) {
        Ok(dist) => (0..count).map(|_| dist.sample(rng)).collect(),
        // All weights zero: every individual sits at the minimum.
        Err(_) => (0..count).map(|_| rng.random_range(0..fit.len())).collect(),
    }
}

/// A generational GA on a binary model. Deterministic in `(model, config, seed)`.
///
/// Each generation selects `population_size` parents, shuffles them into
/// disjoint pairs, recombines each pair with uniform crossover at
/// `crossover_rate` (otherwise copies it) and flips each bit of each child at
/// the mutation rate. With elitism the previous best replaces one child.
pub fn ga_run(model: &InteractionModel, config: &GaConfig, seed: u64) -> Result<SearchTrace> {
    config.validate()?;
    let kernel = model.binary_kernel()?;
    let n = model.n();
    if n == 0 {
        return Err(invalid_param("landscape has no features"));
    }
    let max = model.max_value()?;
    if max == 0.0 {
        return Err(Error::DivisionByZero("maximum value is zero".into()));
    }
    let scales = Scales { max, min: model.known_min().filter(|&lo| lo < max) };
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let p_mut = config.mutation_for(n);
    let size = config.population_size;
    let mut rng = rng::stream(seed);

    // Converging populations repeat genomes; evaluations are memoized per run.
    let mut cache: HashMap<u64, f64> = HashMap::new();
    let mut eval = |x: u64| *cache.entry(x).or_insert_with(|| kernel.eval(x));

    let mut pop: Vec<u64> = (0..size).map(|_| rng.random::<u64>() & full).collect();
    let mut fit: Vec<f64> = pop.iter().map(|&x| eval(x)).collect();

    let mut best_raw = Vec::with_capacity(config.generations + 1);
    let mut best_distance = Vec::with_capacity(config.generations + 1);
    let mut best_bits = 0u64;
    let mut found_at = None;
    for gen in 0..=config.generations {
        if gen > 0 {
            let parents = select(&fit, size, config, &scales, &mut rng);
            let mut mating: Vec<u64> = parents.iter().map(|&i| pop[i]).collect();
            mating.shuffle(&mut rng);
            let mut next = Vec::with_capacity(size);
            for pair in mating.chunks_exact(2) {
                let (mut c, mut d) = (pair[0], pair[1]);
                if rng.random::<f64>() < config.crossover_rate {
                    (c, d) = uniform_crossover(c, d, full, &mut rng);
                }
                next.push(mutate(c, n, p_mut, &mut rng));
                next.push(mutate(d, n, p_mut, &mut rng));
            }
            fit = next.iter().map(|&x| eval(x)).collect();
            if config.elitism {
                let prev = *best_raw.last().unwrap();
                next[0] = best_bits;
                fit[0] = prev;
            }
            pop = next;
        }
        let (bi, &bf) = fit
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
            .unwrap();
        best_bits = pop[bi];
        best_raw.push(bf);
        best_distance.push((!best_bits & full).count_ones() as usize);
        if found_at.is_none() && is_global(bf, max) {
            found_at = Some(gen);
            if config.early_stop {
                break;
            }
        }
    }

    let final_raw = *best_raw.last().unwrap();
    let (a, b) = (model.alphabet().a(), model.alphabet().b());
    Ok(SearchTrace {
        seed,
        best_by_max: best_raw.iter().map(|&f| scales.by_max(f)).collect(),
        best_minmax: scales
            .min
            .map(|_| best_raw.iter().map(|&f| scales.minmax(f).unwrap()).collect()),
        best_point: (0..n).map(|i| if best_bits >> i & 1 == 1 { b } else { -a }).collect(),
        distance_to_opt: *best_distance.last().unwrap(),
        best_distance,
        found_global: is_global(final_raw, max),
        found_at,
        best_raw,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_type1_master, build_type3, Alphabet, Arity, BuildOptions};

    fn small() -> GaConfig {
        GaConfig { population_size: 32, generations: 10, runs: 2, ..GaConfig::default() }
    }

    #[test]
    fn selection_parses() {
        assert_eq!("proportional".parse::<Selection>().unwrap(), Selection::Proportional);
        assert_eq!("Rank".parse::<Selection>().unwrap(), Selection::Rank);
        assert_eq!("tournament:3".parse::<Selection>().unwrap(), Selection::Tournament(3));
        assert_eq!("tournament".parse::<Selection>().unwrap(), Selection::Tournament(2));
        assert!("boltzmann".parse::<Selection>().is_err());
        assert!("tournament:0".parse::<Selection>().is_err());
    }

    #[test]
    fn config_toml() {
        let cfg = GaConfig::from_toml(
            "population_size = 64\nmutation_rate = 0.05\nselection = \"tournament:4\"\nelitism = false\n",
        )
        .unwrap();
        assert_eq!(cfg.population_size, 64);
        assert_eq!(cfg.mutation_rate, Some(0.05));
        assert_eq!(cfg.selection, Selection::Tournament(4));
        assert!(!cfg.elitism);
        assert_eq!(cfg.generations, 30);
        assert_eq!(GaConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        assert!(GaConfig::from_toml("population_size = 7").is_err());
        assert!(GaConfig::from_toml("crossover_rate = 1.5").is_err());
        assert!(GaConfig::from_toml("colour = 1").is_err());
    }

    #[test]
    fn elitist_trace_is_monotone() {
        let m = build_type3(20, 3, 8.0, 2, &BuildOptions::default()).unwrap();
        for sel in [Selection::Proportional, Selection::Rank, Selection::Tournament(2)] {
            let cfg = GaConfig { selection: sel, ..small() };
            let t = ga_run(&m, &cfg, 9).unwrap();
            assert_eq!(t.best_raw.len(), 11);
            assert!(t.best_raw.windows(2).all(|w| w[1] >= w[0]));
            let mm = t.best_minmax.as_ref().unwrap();
            assert!(mm.iter().all(|v| (0.0..=1.0 + 1e-12).contains(v)));
        }
    }

    #[test]
    fn deterministic() {
        let m = build_type1_master(16, 4.0, 3, &BuildOptions::default()).unwrap();
        assert_eq!(ga_run(&m, &small(), 5).unwrap(), ga_run(&m, &small(), 5).unwrap());
        assert_ne!(ga_run(&m, &small(), 5).unwrap(), ga_run(&m, &small(), 6).unwrap());
    }

    #[test]
    fn type1_has_no_minmax_and_uses_rank_fallback() {
        let m = build_type1_master(12, 4.0, 3, &BuildOptions::default()).unwrap();
        let t = ga_run(&m, &small(), 1).unwrap();
        assert!(t.best_minmax.is_none());
    }

    #[test]
    fn found_global_means_the_top_corner() {
        let m = build_type3(12, 1, 2.0, 4, &BuildOptions::default()).unwrap();
        let t = ga_run(&m, &GaConfig { generations: 40, ..small() }, 3).unwrap();
        assert!(t.found_global);
        assert_eq!(t.distance_to_opt, 0);
        assert_eq!(t.best_point, m.max_location().unwrap());
        assert!((m.evaluate(&t.best_point).unwrap() - t.final_raw()).abs() < 1e-9);
    }

    #[test]
    fn early_stop_truncates() {
        let m = build_type3(8, 1, 1.0, 4, &BuildOptions::default()).unwrap();
        let cfg = GaConfig { early_stop: true, generations: 100, ..small() };
        let t = ga_run(&m, &cfg, 2).unwrap();
        assert!(t.found_global);
        assert_eq!(t.found_at, Some(t.generations()));
    }

    #[test]
    fn rejects_non_binary() {
        let al = Alphabet::new(1.0, 1.0, Arity::Levels(3)).unwrap();
        let m = build_type1_master(4, 1.0, 1, &BuildOptions::default().alphabet(al)).unwrap();
        assert!(matches!(ga_run(&m, &small(), 1), Err(Error::Unsupported(_))));
    }

    #[test]
    fn minmax_weights_ignore_affine_rescaling() {
        let fit = [-3.0, -1.0, 0.5, 2.0, 3.0];
        let s = Scales { max: 3.0, min: Some(-3.0) };
        let w = weights(&fit, Selection::Proportional, Normalization::Minmax, &s);
        let scaled: Vec<f64> = fit.iter().map(|f| 7.5 * f + 2.0).collect();
        let s2 = Scales { max: 7.5 * 3.0 + 2.0, min: Some(7.5 * -3.0 + 2.0) };
        let w2 = weights(&scaled, Selection::Proportional, Normalization::Minmax, &s2);
        for (a, b) in w.iter().zip(&w2) {
            assert!((a - b).abs() < 1e-12);
        }
        let bymax = weights(&fit, Selection::Proportional, Normalization::ByMax, &s);
        assert!(bymax.iter().all(|&v| v >= 0.0));
    }
}
