//! Exhaustive and sampling-based landscape statistics.
//!
//! Points of a finite-arity landscape are encoded as mixed-radix indices:
//! feature `i` sits at level `digit_i = (index / r^i) % r`, so feature 0 is
//! the least significant digit. For binary alphabets this is the usual bit
//! string with bit `i` set when `x_i = b`.
//!
//! Neighbours differ in exactly one feature by one level.

mod basin;
mod enumerate;
mod peaks;
mod profile;
mod walk;

use serde::Serialize;

use crate::model::InteractionModel;
use crate::nk::NkLandscape;

pub use basin::basin_fraction;
pub use enumerate::{enumerate, enumerate_nk, EvaluatedLandscape, DEFAULT_BUDGET};
pub use peaks::{count_local_peaks, is_local_peak, local_peaks};
pub use profile::{distance_profile, fitness_histogram, Histogram, ProfileEntry, DEFAULT_BINS};
pub use walk::{lag1_autocorrelation, mean_walk_autocorrelation, random_walk, random_walk_points, WalkConfig};

/// A landscape over `n` features with `arity` levels each.
pub trait DiscreteLandscape: Sync {
    fn n(&self) -> usize;

    /// Levels per feature; 0 when the alphabet is not finite.
    fn arity(&self) -> usize;

    /// Fitness at the point with the given level digits.
    fn fitness(&self, digits: &[usize]) -> f64;
}

impl DiscreteLandscape for InteractionModel {
    fn n(&self) -> usize {
        InteractionModel::n(self)
    }

    fn arity(&self) -> usize {
        self.alphabet().levels_count().unwrap_or(0)
    }

    fn fitness(&self, digits: &[usize]) -> f64 {
        let al = self.alphabet();
        let x: Vec<f64> = digits.iter().map(|&d| al.level(d)).collect();
        self.evaluate_unchecked(&x)
    }
}

impl DiscreteLandscape for NkLandscape {
    fn n(&self) -> usize {
        NkLandscape::n(self)
    }

    fn arity(&self) -> usize {
        2
    }

    fn fitness(&self, digits: &[usize]) -> f64 {
        let bits = digits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &d)| acc | ((d as u64 & 1) << i));
        self.evaluate_bits(bits)
    }
}

/// Per-landscape summary row.
#[derive(Debug, Clone, Serialize)]
pub struct LandscapeStats {
    pub peak_count: usize,
    pub lag1_autocorr: f64,
    /// `None` when the global maximum is not unique.
    pub basin_fraction: Option<f64>,
    pub histogram: Histogram,
    pub profile: Vec<ProfileEntry>,
}

impl LandscapeStats {
    /// All statistics for an enumerated landscape. `optimum` is the index of
    /// the global maximum used for the distance profile.
    pub fn compute(
        el: &EvaluatedLandscape,
        optimum: usize,
        walks: &WalkConfig,
        seed: u64,
    ) -> crate::Result<Self> {
        Ok(Self {
            peak_count: count_local_peaks(el),
            lag1_autocorr: mean_walk_autocorrelation(el, walks, seed)?,
            basin_fraction: basin_fraction(el).ok(),
            histogram: fitness_histogram(el, DEFAULT_BINS),
            profile: distance_profile(el, optimum),
        })
    }
}
