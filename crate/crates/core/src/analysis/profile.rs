use serde::Serialize;

use super::{is_local_peak, EvaluatedLandscape};

/// Default histogram resolution.
pub const DEFAULT_BINS: usize = 30;

/// Equal-width bins spanning `[lo, hi]`; the last bin is closed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.counts.len() as f64
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub fn fitness_histogram(el: &EvaluatedLandscape, bins: usize) -> Histogram {
    let bins = bins.max(1);
    let f = el.fitness();
    let lo = f.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut counts = vec![0usize; bins];
    let width = hi - lo;
    for &v in f {
        let b = if width > 0.0 {
            (((v - lo) / width * bins as f64) as usize).min(bins - 1)
        } else {
            0
        };
        counts[b] += 1;
    }
    Histogram { lo, hi, counts }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileEntry {
    pub index: usize,
    pub distance: usize,
    pub fitness: f64,
    pub is_local_peak: bool,
}

/// Every point's distance (in feature steps) to `optimum`, its fitness and
/// whether it is a local peak.
pub fn distance_profile(el: &EvaluatedLandscape, optimum: usize) -> Vec<ProfileEntry> {
    (0..el.len())
        .map(|p| ProfileEntry {
            index: p,
            distance: el.distance(p, optimum),
            fitness: el.fitness_at(p),
            is_local_peak: is_local_peak(el, p),
        })
        .collect()
}
