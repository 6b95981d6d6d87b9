use super::EvaluatedLandscape;
use crate::error::{Error, Result};

/// Weighted size of the global maximum's basin of attraction.
///
/// Points are visited in decreasing fitness order. The global maximum weighs
/// 1; any other point weighs the mean weight of its strictly fitter
/// neighbours, or 0 when it has none (a sub-optimal peak). Equivalently, a
/// point's weight is the probability that a hill climber taking uniformly
/// random uphill steps ends at the global maximum. Returns the mean weight
/// over all points.
pub fn basin_fraction(el: &EvaluatedLandscape) -> Result<f64> {
    let f = el.fitness();
    let mut order: Vec<usize> = (0..el.len()).collect();
    order.sort_by(|&a, &b| f[b].total_cmp(&f[a]));
    let top = order[0];
    if order.len() > 1 && f[order[1]] == f[top] {
        return Err(Error::Unsupported(
            "basin fraction needs a unique global maximum".into(),
        ));
    }

    let mut weight = vec![0.0; el.len()];
    weight[top] = 1.0;
    let mut total = 1.0;
    for &p in &order[1..] {
        let fp = f[p];
        let mut sum = 0.0;
        let mut higher = 0usize;
        el.for_each_neighbor(p, |q| {
            if f[q] > fp {
                sum += weight[q];
                higher += 1;
            }
        });
        if higher > 0 {
            weight[p] = sum / higher as f64;
            total += weight[p];
        }
    }
    Ok(total / el.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{enumerate, DEFAULT_BUDGET};
    use crate::model::{build_type1_master, build_type1_proportion, BuildOptions};

    /// Explicit enumeration of every strictly improving path from `p`; each
    /// step is taken with probability 1 / (number of fitter neighbours).
    fn path_probability(el: &EvaluatedLandscape, p: usize, top: usize) -> f64 {
        if p == top {
            return 1.0;
        }
        let higher: Vec<usize> =
            el.neighbors(p).into_iter().filter(|&q| el.fitness_at(q) > el.fitness_at(p)).collect();
        if higher.is_empty() {
            return 0.0;
        }
        higher.iter().map(|&q| path_probability(el, q, top)).sum::<f64>() / higher.len() as f64
    }

    fn oracle(el: &EvaluatedLandscape) -> f64 {
        let top = el.argmax();
        (0..el.len()).map(|p| path_probability(el, p, top)).sum::<f64>() / el.len() as f64
    }

    #[test]
    fn unimodal_is_one() {
        let m = build_type1_proportion(8, 0.0, 2.0, 4, &BuildOptions::default()).unwrap();
        let el = enumerate(&m, DEFAULT_BUDGET).unwrap();
        assert_eq!(basin_fraction(&el).unwrap(), 1.0);
    }

    #[test]
    fn second_peak_shrinks_the_basin() {
        // N=2 with a strong pair term: peaks at 00 and 11, global at 11.
        // Hand-built N=4 table: global max at 1111, a separate peak at 0000.
        let mut table = vec![0.0; 16];
        for (p, v) in table.iter_mut().enumerate() {
            let ones = (p as u32).count_ones() as f64;
            *v = (ones - 1.6).powi(2) + 0.01 * p as f64;
        }
        let el = EvaluatedLandscape::from_table(4, 2, table).unwrap();
        let frac = basin_fraction(&el).unwrap();
        assert!(frac < 1.0);
        assert!((frac - oracle(&el)).abs() < 1e-12);
    }

    #[test]
    fn matches_path_enumeration() {
        for seed in 0..10 {
            let m = build_type1_master(6, 6.0, seed, &BuildOptions::default()).unwrap();
            let el = enumerate(&m, DEFAULT_BUDGET).unwrap();
            assert!((basin_fraction(&el).unwrap() - oracle(&el)).abs() < 1e-9);
        }
    }

    #[test]
    fn multiple_maxima_are_unsupported() {
        let el = EvaluatedLandscape::from_table(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(basin_fraction(&el), Err(Error::Unsupported(_))));
    }
}
