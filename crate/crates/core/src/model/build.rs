use itertools::Itertools;
use rand::seq::{index, SliceRandom};
use rand::Rng;

use super::{sample_coefficient, Alphabet, InteractionModel, ModelKind, Term};
use crate::error::{invalid_input, invalid_param, Result};
use crate::rng;

/// Terms added per schedule step.
pub const DEFAULT_GROUP_SIZE: usize = 10;

/// Largest `n` for which full masters (`2^n - 1` terms) are built.
const MAX_MASTER_N: usize = 24;

/// Distribution coefficients are drawn from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficients {
    /// `exp(-|z|)`, `z ~ Normal(0, sigma)`; see [`sample_coefficient`].
    #[default]
    Exponential,
    /// Uniform on `(0, 1]`; `sigma` is ignored.
    Uniform,
}

impl Coefficients {
    pub(crate) fn draw<R: Rng + ?Sized>(self, sigma: f64, rng: &mut R) -> Result<f64> {
        match self {
            Coefficients::Exponential => sample_coefficient(sigma, rng),
            Coefficients::Uniform => Ok(1.0 - rng.random::<f64>()),
        }
    }
}

/// Construction knobs shared by the builders.
#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    alphabet: Option<Alphabet>,
    constant: bool,
    coefficients: Coefficients,
}

impl BuildOptions {
    pub fn alphabet(mut self, alphabet: Alphabet) -> Self {
        self.alphabet = Some(alphabet);
        self
    }

    /// Adds a constant term drawn from the same coefficient distribution.
    pub fn with_constant(mut self, constant: bool) -> Self {
        self.constant = constant;
        self
    }

    pub fn coefficients(mut self, coefficients: Coefficients) -> Self {
        self.coefficients = coefficients;
        self
    }

    fn alphabet_or_binary(&self) -> Alphabet {
        self.alphabet.unwrap_or_else(Alphabet::binary)
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid_param("feature count must be at least 1"));
    }
    Ok(())
}

fn check_order(n: usize, max_order: usize) -> Result<()> {
    check_n(n)?;
    if max_order == 0 || max_order > n {
        return Err(invalid_param(format!(
            "max order must satisfy 1 <= M <= N, got M={max_order}, N={n}"
        )));
    }
    Ok(())
}

/// Draws coefficients for `sets` in order, prefixed by a constant when requested.
fn draw_terms<R: Rng + ?Sized>(
    sets: impl IntoIterator<Item = Vec<usize>>,
    opts: &BuildOptions,
    sigma: f64,
    rng: &mut R,
) -> Result<Vec<Term>> {
    if opts.coefficients == Coefficients::Exponential {
        // Validates sigma even when there is nothing to draw.
        sample_coefficient(sigma, &mut rng::stream(0))?;
    }
    let mut terms = Vec::new();
    if opts.constant {
        terms.push(Term::new(Vec::new(), opts.coefficients.draw(sigma, rng)?)?);
    }
    for set in sets {
        terms.push(Term::new(set, opts.coefficients.draw(sigma, rng)?)?);
    }
    Ok(terms)
}

/// Every index set of order `k`, lexicographic.
fn sets_of_order(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..n).combinations(k)
}

/// Type I master: every nonempty subset of the `n` features as a term.
pub fn build_type1_master(
    n: usize,
    sigma: f64,
    seed: u64,
    opts: &BuildOptions,
) -> Result<InteractionModel> {
    check_n(n)?;
    if n > MAX_MASTER_N {
        return Err(invalid_param(format!(
            "a full master over {n} features has 2^{n}-1 terms; at most {MAX_MASTER_N} features are supported"
        )));
    }
    let mut rng = rng::stream(seed);
    let sets = (1..=n).flat_map(|k| sets_of_order(n, k));
    let terms = draw_terms(sets, opts, sigma, &mut rng)?;
    InteractionModel::new(n, terms, opts.alphabet_or_binary(), ModelKind::TypeI, Some(sigma), Some(seed))
}

/// Type I with every index set of order `<= max_order`.
pub fn build_type1(
    n: usize,
    max_order: usize,
    sigma: f64,
    seed: u64,
    opts: &BuildOptions,
) -> Result<InteractionModel> {
    check_order(n, max_order)?;
    if n > MAX_MASTER_N && max_order > 3 {
        return Err(invalid_param(format!(
            "order-{max_order} models over {n} features are too large to build"
        )));
    }
    let mut rng = rng::stream(seed);
    let sets = (1..=max_order).flat_map(|k| sets_of_order(n, k));
    let terms = draw_terms(sets, opts, sigma, &mut rng)?;
    InteractionModel::new(n, terms, opts.alphabet_or_binary(), ModelKind::TypeI, Some(sigma), Some(seed))
}

/// Type II: every index set of order `<= max_order` containing an odd number
/// of odd (1-based) indices. Alphabet is `[-1, 1]`.
pub fn build_type2(
    n: usize,
    max_order: usize,
    sigma: f64,
    seed: u64,
    opts: &BuildOptions,
) -> Result<InteractionModel> {
    check_order(n, max_order)?;
    let alphabet = opts.alphabet_or_binary();
    if !alphabet.is_unit_symmetric() {
        return Err(invalid_param("TypeII landscapes are defined on the [-1, 1] range"));
    }
    let mut rng = rng::stream(seed);
    let sets = (1..=max_order).flat_map(|k| {
        sets_of_order(n, k).filter(|s| s.iter().filter(|&&i| i % 2 == 0).count() % 2 == 1)
    });
    let terms = draw_terms(sets, opts, sigma, &mut rng)?;
    InteractionModel::new(n, terms, alphabet, ModelKind::TypeII, Some(sigma), Some(seed))
}

/// Type III: every index set of odd order up to `max_order` (which must be odd).
pub fn build_type3(
    n: usize,
    max_order: usize,
    sigma: f64,
    seed: u64,
    opts: &BuildOptions,
) -> Result<InteractionModel> {
    check_order(n, max_order)?;
    if max_order % 2 == 0 {
        return Err(invalid_param(format!("TypeIII max order must be odd, got {max_order}")));
    }
    if opts.constant {
        return Err(invalid_param("TypeIII landscapes have no constant term"));
    }
    let mut rng = rng::stream(seed);
    let sets = (1..=max_order).step_by(2).flat_map(|k| sets_of_order(n, k));
    let terms = draw_terms(sets, opts, sigma, &mut rng)?;
    InteractionModel::new(
        n,
        terms,
        opts.alphabet_or_binary(),
        ModelKind::TypeIII,
        Some(sigma),
        Some(seed),
    )
}

/// Rounds half up, tolerant of products like `0.7 * 45 = 31.499999...`.
fn round_half_up(x: f64) -> usize {
    (x + 0.5 + 1e-9).floor() as usize
}

/// Type I with all main effects plus a proportion of the second-order terms.
pub fn build_type1_proportion(
    n: usize,
    proportion: f64,
    sigma: f64,
    seed: u64,
    opts: &BuildOptions,
) -> Result<InteractionModel> {
    check_n(n)?;
    if !(0.0..=1.0).contains(&proportion) {
        return Err(invalid_param(format!("proportion must be in [0, 1], got {proportion}")));
    }
    let mut rng = rng::stream(seed);
    let pairs: Vec<Vec<usize>> = sets_of_order(n, 2).collect();
    let k = round_half_up(proportion * pairs.len() as f64).min(pairs.len());
    let mut chosen = index::sample(&mut rng, pairs.len(), k).into_vec();
    chosen.sort_unstable();
    let sets = sets_of_order(n, 1).chain(chosen.into_iter().map(|i| pairs[i].clone()));
    let terms = draw_terms(sets, opts, sigma, &mut rng)?;
    InteractionModel::new(n, terms, opts.alphabet_or_binary(), ModelKind::TypeI, Some(sigma), Some(seed))
}

/// Main effects a master of this kind must contain.
fn required_main_effects(master: &InteractionModel) -> Vec<usize> {
    match master.kind() {
        ModelKind::TypeII => (0..master.n()).step_by(2).collect(),
        _ => (0..master.n()).collect(),
    }
}

/// Order in which a schedule adds the master's terms: the base (constant and
/// main effects) first, then groups of at most `group_size` term positions,
/// one order at a time. Positions index into `master.terms()`.
pub fn schedule_groups<R: Rng + ?Sized>(
    master: &InteractionModel,
    group_size: usize,
    rng: &mut R,
) -> Result<Vec<Vec<usize>>> {
    if group_size == 0 {
        return Err(invalid_param("group size must be at least 1"));
    }
    let mains: Vec<usize> = master
        .terms()
        .iter()
        .filter(|t| t.order() == 1)
        .map(|t| t.indices()[0])
        .collect();
    let missing: Vec<usize> = required_main_effects(master)
        .into_iter()
        .filter(|i| !mains.contains(i))
        .map(|i| i + 1)
        .collect();
    if !missing.is_empty() {
        return Err(invalid_input(format!("master is missing main effects for features {missing:?}")));
    }

    let terms = master.terms();
    let mut groups = vec![(0..terms.len()).filter(|&p| terms[p].order() <= 1).collect::<Vec<_>>()];
    for order in 2..=master.max_order() {
        let mut pending: Vec<usize> = (0..terms.len()).filter(|&p| terms[p].order() == order).collect();
        pending.shuffle(rng);
        groups.extend(pending.chunks(group_size).map(<[usize]>::to_vec));
    }
    Ok(groups)
}

/// Nested sequence of models from the main effects up to the full master.
pub fn subset_schedule<R: Rng + ?Sized>(
    master: &InteractionModel,
    group_size: usize,
    rng: &mut R,
) -> Result<Vec<InteractionModel>> {
    let groups = schedule_groups(master, group_size, rng)?;
    let mut included: Vec<Term> = Vec::new();
    groups
        .into_iter()
        .map(|group| {
            included.extend(group.into_iter().map(|p| master.terms()[p].clone()));
            InteractionModel::new(
                master.n(),
                included.clone(),
                *master.alphabet(),
                master.kind(),
                master.sigma(),
                master.seed(),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Arity;
    use std::collections::HashSet;

    fn sets(m: &InteractionModel) -> Vec<Vec<usize>> {
        m.terms().iter().map(|t| t.indices().iter().map(|i| i + 1).collect()).collect()
    }

    #[test]
    fn master_n10_has_1023_terms() {
        let m = build_type1_master(10, 10.0, 1, &BuildOptions::default()).unwrap();
        assert_eq!(m.m(), 1023);
        assert_eq!(m.terms().iter().filter(|t| t.order() == 1).count(), 10);
        assert_eq!(m.max_order(), 10);
        assert_eq!(m.kind(), ModelKind::TypeI);
    }

    #[test]
    fn master_n2_terms() {
        let m = build_type1_master(2, 1.0, 1, &BuildOptions::default()).unwrap();
        assert_eq!(sets(&m), vec![vec![1], vec![2], vec![1, 2]]);
    }

    #[test]
    fn master_is_deterministic() {
        let a = build_type1_master(6, 3.0, 42, &BuildOptions::default()).unwrap();
        let b = build_type1_master(6, 3.0, 42, &BuildOptions::default()).unwrap();
        assert_eq!(a, b);
        let c = build_type1_master(6, 3.0, 43, &BuildOptions::default()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn constant_flag_adds_one_term() {
        let m = build_type1_master(3, 1.0, 5, &BuildOptions::default().with_constant(true)).unwrap();
        assert_eq!(m.m(), 8);
        assert!(m.constant() > 0.0);
        assert!(build_type3(3, 1, 1.0, 1, &BuildOptions::default().with_constant(true)).is_err());
    }

    #[test]
    fn schedule_n10_sizes() {
        let master = build_type1_master(10, 10.0, 3, &BuildOptions::default()).unwrap();
        let sched = subset_schedule(&master, 10, &mut rng::stream(9)).unwrap();
        let sizes: Vec<usize> = sched.iter().map(InteractionModel::m).collect();
        assert_eq!(sizes[0], 10);
        assert_eq!(sizes[1], 20);
        assert_eq!(*sizes.last().unwrap(), 1023);
        assert_eq!(sched.last().unwrap(), &master);
        // 45 pairs take 5 groups, so the first third-order group lands at 65.
        assert_eq!(sizes[5], 55);
        assert_eq!(sizes[6], 65);
        assert_eq!(sched[6].max_order(), 3);
    }

    #[test]
    fn schedule_n3_partial_groups() {
        let master = build_type1_master(3, 1.0, 3, &BuildOptions::default()).unwrap();
        let sched = subset_schedule(&master, 10, &mut rng::stream(1)).unwrap();
        let sizes: Vec<usize> = sched.iter().map(InteractionModel::m).collect();
        assert_eq!(sizes, vec![3, 6, 7]);
    }

    #[test]
    fn schedule_is_nested() {
        let master = build_type1_master(6, 2.0, 8, &BuildOptions::default()).unwrap();
        let sched = subset_schedule(&master, 4, &mut rng::stream(2)).unwrap();
        for w in sched.windows(2) {
            let small: HashSet<_> = sets(&w[0]).into_iter().collect();
            let big: HashSet<_> = sets(&w[1]).into_iter().collect();
            assert!(small.is_subset(&big) && small.len() < big.len());
        }
    }

    #[test]
    fn schedule_requires_main_effects() {
        let master = build_type1_proportion(4, 1.0, 1.0, 1, &BuildOptions::default()).unwrap();
        let no_mains = InteractionModel::new(
            4,
            master.terms().iter().filter(|t| t.order() == 2).cloned().collect(),
            Alphabet::binary(),
            ModelKind::TypeI,
            None,
            None,
        )
        .unwrap();
        assert!(subset_schedule(&no_mains, 10, &mut rng::stream(0)).is_err());
    }

    #[test]
    fn type2_schedule_starts_from_odd_main_effects() {
        let master = build_type2(10, 10, 10.0, 1, &BuildOptions::default()).unwrap();
        assert_eq!(master.m(), 512);
        let sched = subset_schedule(&master, 10, &mut rng::stream(4)).unwrap();
        assert_eq!(sched[0].m(), 5);
        assert_eq!(sched.last().unwrap().m(), 512);
    }

    #[test]
    fn type2_parity_rule() {
        let m1 = build_type2(4, 1, 1.0, 1, &BuildOptions::default()).unwrap();
        assert_eq!(sets(&m1), vec![vec![1], vec![3]]);
        let m2 = build_type2(4, 2, 1.0, 1, &BuildOptions::default()).unwrap();
        assert_eq!(
            sets(&m2),
            vec![vec![1], vec![3], vec![1, 2], vec![1, 4], vec![2, 3], vec![3, 4]]
        );
        let m3 = build_type2(5, 3, 1.0, 1, &BuildOptions::default()).unwrap();
        assert!(sets(&m3).contains(&vec![1, 3, 5]));
        assert!(!sets(&m3).contains(&vec![1, 3]));
        let m4 = build_type2(7, 4, 1.0, 1, &BuildOptions::default()).unwrap();
        assert!(sets(&m4).contains(&vec![1, 3, 6, 7]));
    }

    #[test]
    fn type2_rejects_other_ranges() {
        let al = Alphabet::binary_range(0.5, 1.0).unwrap();
        assert!(build_type2(4, 2, 1.0, 1, &BuildOptions::default().alphabet(al)).is_err());
        let ternary = Alphabet::new(1.0, 1.0, Arity::Levels(3)).unwrap();
        assert!(build_type2(4, 2, 1.0, 1, &BuildOptions::default().alphabet(ternary)).is_ok());
    }

    #[test]
    fn type3_term_counts() {
        let m = build_type3(3, 3, 1.0, 1, &BuildOptions::default()).unwrap();
        assert_eq!(sets(&m), vec![vec![1], vec![2], vec![3], vec![1, 2, 3]]);
        assert_eq!(build_type3(32, 1, 32.0, 1, &BuildOptions::default()).unwrap().m(), 32);
        assert_eq!(build_type3(5, 5, 1.0, 1, &BuildOptions::default()).unwrap().m(), 16);
        assert!(build_type3(5, 4, 1.0, 1, &BuildOptions::default()).is_err());
        assert!(build_type3(5, 7, 1.0, 1, &BuildOptions::default()).is_err());
    }

    #[test]
    fn proportion_counts() {
        let p0 = build_type1_proportion(10, 0.0, 1.0, 1, &BuildOptions::default()).unwrap();
        assert_eq!((p0.m(), p0.max_order()), (10, 1));
        let p1 = build_type1_proportion(32, 1.0, 1.0, 1, &BuildOptions::default()).unwrap();
        assert_eq!(p1.m(), 528);
        let half = build_type1_proportion(10, 0.5, 1.0, 1, &BuildOptions::default()).unwrap();
        assert_eq!(half.m(), 33);
        let p7 = build_type1_proportion(10, 0.7, 1.0, 1, &BuildOptions::default()).unwrap();
        assert_eq!(p7.m(), 10 + 32);
        assert!(build_type1_proportion(10, 1.5, 1.0, 1, &BuildOptions::default()).is_err());
    }

    #[test]
    fn type1_by_order() {
        let m = build_type1(10, 3, 1.0, 2, &BuildOptions::default()).unwrap();
        assert_eq!(m.m(), 10 + 45 + 120);
        assert_eq!(m.max_order(), 3);
        let full = build_type1(6, 6, 1.0, 2, &BuildOptions::default()).unwrap();
        assert_eq!(full.m(), 63);
        assert!(build_type1(4, 0, 1.0, 2, &BuildOptions::default()).is_err());
    }

    #[test]
    fn uniform_coefficients() {
        let opts = BuildOptions::default().coefficients(Coefficients::Uniform);
        let m = build_type1(10, 2, 1.0, 3, &opts).unwrap();
        let c: Vec<f64> = m.terms().iter().map(Term::coeff).collect();
        assert!(c.iter().all(|&v| v > 0.0 && v <= 1.0));
        // Far from the exponential draw's concentration near 1 at small sigma.
        let mean = c.iter().sum::<f64>() / c.len() as f64;
        assert!((mean - 0.5).abs() < 0.1);
        assert!(build_type1(10, 2, -1.0, 3, &BuildOptions::default()).is_err());
    }
}
