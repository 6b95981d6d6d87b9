use crate::analysis::DiscreteLandscape;
use crate::error::{invalid_input, Error, Result};

/// Steepest-ascent hill climbing from `start` (level digits). Moves to the
/// fittest strictly better neighbour until none exists; ties between equally
/// fit best neighbours go to the lowest point index. Returns the local peak
/// reached and its fitness.
pub fn hill_climb<L: DiscreteLandscape + ?Sized>(
    landscape: &L,
    start: &[usize],
) -> Result<(Vec<usize>, f64)> {
    let (n, r) = (landscape.n(), landscape.arity());
    if r < 2 {
        return Err(Error::Unsupported("hill climbing needs a finite alphabet".into()));
    }
    if start.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: start.len() });
    }
    if start.iter().any(|&d| d >= r) {
        return Err(invalid_input("start point has a level outside the alphabet"));
    }
    let mut current = start.to_vec();
    let mut fitness = landscape.fitness(&current);
    loop {
        // (fitness, feature, new digit); lower feature index with a lower
        // digit gives a lower point index, so ties resolve by comparing
        // index deltas.
        let mut best: Option<(f64, i128, usize, usize)> = None;
        for i in 0..n {
            let d = current[i];
            for nd in [d.wrapping_sub(1), d + 1] {
                if nd >= r {
                    continue;
                }
                current[i] = nd;
                let f = landscape.fitness(&current);
                current[i] = d;
                if f <= fitness {
                    continue;
                }
                let delta = (nd as i128 - d as i128) * (r as i128).pow(i as u32);
                let better = match best {
                    None => true,
                    Some((bf, bdelta, _, _)) => f > bf || (f == bf && delta < bdelta),
                };
                if better {
                    best = Some((f, delta, i, nd));
                }
            }
        }
        match best {
            Some((f, _, i, nd)) => {
                current[i] = nd;
                fitness = f;
            }
            None => return Ok((current, fitness)),
        }
    }
}
