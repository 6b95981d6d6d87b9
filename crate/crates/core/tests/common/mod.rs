//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use nmland::analysis::EvaluatedLandscape;
use nmland::model::InteractionModel;

/// Evenly spaced levels from `-a` to `b`.
pub fn levels(a: f64, b: f64, r: usize) -> Vec<f64> {
    (0..r).map(|k| -a + (a + b) * k as f64 / (r - 1) as f64).collect()
}

/// Point at mixed-radix `index`, feature 0 least significant.
pub fn point(n: usize, lv: &[f64], mut index: usize) -> Vec<f64> {
    let r = lv.len();
    (0..n)
        .map(|_| {
            let d = index % r;
            index /= r;
            lv[d]
        })
        .collect()
}

/// Sum over terms of `beta * prod x_i`, term by term.
pub fn naive_eval(model: &InteractionModel, x: &[f64]) -> f64 {
    let mut total = 0.0;
    for t in model.terms() {
        let mut p = t.coeff();
        for &i in t.indices() {
            p *= x[i];
        }
        total += p;
    }
    total
}

/// `sum_j omega_j (-1)^{popcount(j & y)}`.
pub fn walsh_naive(omega: &BTreeMap<u64, f64>, y: u64) -> f64 {
    omega
        .iter()
        .map(|(&j, &w)| if (j & y).count_ones() % 2 == 0 { w } else { -w })
        .sum()
}

pub fn close(x: f64, y: f64, rel: f64) -> bool {
    (x - y).abs() <= rel * x.abs().max(y.abs()).max(1.0)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation.
pub fn std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Population skewness `m3 / m2^1.5`.
pub fn skewness(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let n = xs.len() as f64;
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
    m3 / m2.powf(1.5)
}

/// Average ranks, 1-based.
fn ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].partial_cmp(&xs[b]).unwrap());
    let mut out = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            out[k] = r;
        }
        i = j + 1;
    }
    out
}

pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let (rx, ry) = (ranks(xs), ranks(ys));
    let (mx, my) = (mean(&rx), mean(&ry));
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

/// Probability that a climber taking uniformly random strictly uphill steps
/// from each point ends at the unique maximum, averaged over all points.
/// Every improving path is followed explicitly (memoized on the point).
pub fn basin_oracle(el: &EvaluatedLandscape) -> f64 {
    let f = el.fitness();
    let top = (0..f.len()).max_by(|&a, &b| f[a].partial_cmp(&f[b]).unwrap()).unwrap();
    let mut memo: Vec<Option<f64>> = vec![None; f.len()];
    fn visit(el: &EvaluatedLandscape, p: usize, top: usize, memo: &mut Vec<Option<f64>>) -> f64 {
        if let Some(v) = memo[p] {
            return v;
        }
        let v = if p == top {
            1.0
        } else {
            let up: Vec<usize> =
                el.neighbors(p).into_iter().filter(|&q| el.fitness_at(q) > el.fitness_at(p)).collect();
            if up.is_empty() {
                0.0
            } else {
                up.iter().map(|&q| visit(el, q, top, memo)).sum::<f64>() / up.len() as f64
            }
        };
        memo[p] = Some(v);
        v
    }
    (0..f.len()).map(|p| visit(el, p, top, &mut memo)).sum::<f64>() / f.len() as f64
}

/// Indices whose fitness is within `rel` of the best.
pub fn near_max(fitness: &[f64], rel: f64) -> Vec<usize> {
    let best = fitness.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (0..fitness.len()).filter(|&i| close(fitness[i], best, rel)).collect()
}

pub fn near_min(fitness: &[f64], rel: f64) -> Vec<usize> {
    let worst = fitness.iter().cloned().fold(f64::INFINITY, f64::min);
    (0..fitness.len()).filter(|&i| close(fitness[i], worst, rel)).collect()
}
