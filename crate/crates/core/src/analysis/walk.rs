use rand::Rng;

use super::{DiscreteLandscape, EvaluatedLandscape};
use crate::error::{invalid_param, Error, Result};
use crate::rng;
use crate::stats;

/// Random-walk settings for the autocorrelation estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct WalkConfig {
    pub steps: usize,
    pub walks: usize,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self { steps: 10_000, walks: 10 }
    }
}

/// Picks a uniformly random neighbour move: `(feature, +1 | -1)`.
fn choose_move<R: Rng + ?Sized>(
    n: usize,
    r: usize,
    digit: impl Fn(usize) -> usize,
    rng: &mut R,
) -> (usize, isize) {
    if r == 2 {
        let i = rng.random_range(0..n);
        return (i, if digit(i) == 0 { 1 } else { -1 });
    }
    let count: usize = (0..n)
        .map(|i| {
            let d = digit(i);
            usize::from(d > 0) + usize::from(d + 1 < r)
        })
        .sum();
    let mut k = rng.random_range(0..count);
    for i in 0..n {
        let d = digit(i);
        if d > 0 {
            if k == 0 {
                return (i, -1);
            }
            k -= 1;
        }
        if d + 1 < r {
            if k == 0 {
                return (i, 1);
            }
            k -= 1;
        }
    }
    unreachable!("move index within neighbour count")
}

fn check_walk<L: DiscreteLandscape + ?Sized>(landscape: &L, steps: usize) -> Result<()> {
    if steps < 2 {
        return Err(invalid_param(format!("a walk needs at least 2 steps, got {steps}")));
    }
    if landscape.arity() < 2 {
        return Err(Error::Unsupported("random walks need a finite alphabet".into()));
    }
    if landscape.n() == 0 {
        return Err(invalid_param("landscape has no features"));
    }
    Ok(())
}

/// Visited points (as level digits) and their fitnesses; `steps + 1` of each.
pub fn random_walk_points<L, R>(
    landscape: &L,
    steps: usize,
    rng: &mut R,
) -> Result<(Vec<Vec<usize>>, Vec<f64>)>
where
    L: DiscreteLandscape + ?Sized,
    R: Rng + ?Sized,
{
    check_walk(landscape, steps)?;
    let (n, r) = (landscape.n(), landscape.arity());
    let mut digits: Vec<usize> = (0..n).map(|_| rng.random_range(0..r)).collect();
    let mut points = Vec::with_capacity(steps + 1);
    let mut fitness = Vec::with_capacity(steps + 1);
    fitness.push(landscape.fitness(&digits));
    points.push(digits.clone());
    for _ in 0..steps {
        let (i, delta) = choose_move(n, r, |j| digits[j], rng);
        digits[i] = digits[i].wrapping_add_signed(delta);
        fitness.push(landscape.fitness(&digits));
        points.push(digits.clone());
    }
    Ok((points, fitness))
}

/// Fitness sequence of a uniform random walk (`steps + 1` values).
pub fn random_walk<L, R>(landscape: &L, steps: usize, rng: &mut R) -> Result<Vec<f64>>
where
    L: DiscreteLandscape + ?Sized,
    R: Rng + ?Sized,
{
    check_walk(landscape, steps)?;
    let (n, r) = (landscape.n(), landscape.arity());
    let mut digits: Vec<usize> = (0..n).map(|_| rng.random_range(0..r)).collect();
    let mut fitness = Vec::with_capacity(steps + 1);
    fitness.push(landscape.fitness(&digits));
    for _ in 0..steps {
        let (i, delta) = choose_move(n, r, |j| digits[j], rng);
        digits[i] = digits[i].wrapping_add_signed(delta);
        fitness.push(landscape.fitness(&digits));
    }
    Ok(fitness)
}

impl EvaluatedLandscape {
    /// Same walk as [`random_walk`] (identical random choices), tracked by
    /// table index instead of re-encoding digits each step.
    pub fn random_walk<R: Rng + ?Sized>(&self, steps: usize, rng: &mut R) -> Result<Vec<f64>> {
        check_walk(self, steps)?;
        let (n, r) = (self.n(), self.arity());
        let mut index = 0usize;
        let mut stride = 1usize;
        for _ in 0..n {
            index += rng.random_range(0..r) * stride;
            stride *= r;
        }
        let mut fitness = Vec::with_capacity(steps + 1);
        fitness.push(self.fitness_at(index));
        for _ in 0..steps {
            let (i, delta) = choose_move(n, r, |j| self.digit(index, j), rng);
            let s = r.pow(i as u32);
            index = if delta > 0 { index + s } else { index - s };
            fitness.push(self.fitness_at(index));
        }
        Ok(fitness)
    }
}

/// Pearson correlation between consecutive values of a sequence.
pub fn lag1_autocorrelation(f: &[f64]) -> Result<f64> {
    if f.len() < 3 {
        return Err(Error::UndefinedStatistic(format!(
            "lag-1 autocorrelation needs at least 3 values, got {}",
            f.len()
        )));
    }
    stats::pearson(&f[..f.len() - 1], &f[1..])
}

/// Mean lag-1 autocorrelation over `walks` independent walks; walk `w` uses
/// substream `w` of `seed`.
pub fn mean_walk_autocorrelation(
    el: &EvaluatedLandscape,
    config: &WalkConfig,
    seed: u64,
) -> Result<f64> {
    if config.walks == 0 {
        return Err(invalid_param("at least one walk is required"));
    }
    let mut total = 0.0;
    for w in 0..config.walks {
        let mut r = rng::substream(seed, w as u64);
        total += lag1_autocorrelation(&el.random_walk(config.steps, &mut r)?)?;
    }
    Ok(total / config.walks as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{enumerate, DEFAULT_BUDGET};
    use crate::model::{build_type1_master, Alphabet, Arity, BuildOptions};

    #[test]
    fn ramp_and_alternation() {
        let ramp: Vec<f64> = (0..50).map(f64::from).collect();
        assert!((lag1_autocorrelation(&ramp).unwrap() - 1.0).abs() < 1e-9);
        let alt: Vec<f64> = (0..50).map(|i| if i % 2 == 0 { 1.0 } else { 3.0 }).collect();
        assert!((lag1_autocorrelation(&alt).unwrap() + 1.0).abs() < 1e-9);
        assert!(lag1_autocorrelation(&[1.0, 2.0]).is_err());
        assert!(matches!(
            lag1_autocorrelation(&[1.0; 10]),
            Err(Error::UndefinedStatistic(_))
        ));
    }

    #[test]
    fn constant_landscape_gives_constant_walk() {
        let el = EvaluatedLandscape::from_table(4, 2, vec![0.5; 16]).unwrap();
        let f = random_walk(&el, 100, &mut rng::stream(1)).unwrap();
        assert_eq!(f.len(), 101);
        assert!(f.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn steps_are_single_level_moves() {
        let al = Alphabet::new(1.0, 1.0, Arity::Levels(4)).unwrap();
        let m = build_type1_master(4, 1.0, 3, &BuildOptions::default().alphabet(al)).unwrap();
        let (points, f) = random_walk_points(&m, 500, &mut rng::stream(2)).unwrap();
        assert_eq!(points.len(), 501);
        assert_eq!(f.len(), 501);
        for w in points.windows(2) {
            assert!(w[1].iter().all(|&d| d < 4));
            let moved: Vec<usize> = (0..4).filter(|&i| w[0][i] != w[1][i]).collect();
            assert_eq!(moved.len(), 1);
            assert_eq!(w[0][moved[0]].abs_diff(w[1][moved[0]]), 1);
        }
    }

    #[test]
    fn table_walk_matches_generic_walk() {
        for al in [Alphabet::binary(), Alphabet::new(1.0, 1.0, Arity::Levels(3)).unwrap()] {
            let m = build_type1_master(6, 1.0, 4, &BuildOptions::default().alphabet(al)).unwrap();
            let el = enumerate(&m, DEFAULT_BUDGET).unwrap();
            let a = random_walk(&el, 300, &mut rng::stream(8)).unwrap();
            let b = el.random_walk(300, &mut rng::stream(8)).unwrap();
            assert_eq!(a, b);
            let c = random_walk(&m, 300, &mut rng::stream(8)).unwrap();
            for (x, y) in a.iter().zip(&c) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_short_walks() {
        let el = EvaluatedLandscape::from_table(2, 2, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert!(random_walk(&el, 1, &mut rng::stream(1)).is_err());
    }
}
