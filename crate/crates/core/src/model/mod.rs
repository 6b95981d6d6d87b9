//! Parametric interaction models and NM landscapes.
//!
//! A model is a sum of coefficiented products over index sets of features:
//! `F(x) = sum_k beta_k * prod_{i in U_k} x_i`, where the empty product is 1.
//! NM landscapes restrict coefficients to be positive and the alphabet to a
//! range `[-a, b]` with `0 < a <= b`, which pins the global maximum at
//! `[b, ..., b]`.
//!
//! Feature indices are 0-based in Rust and 1-based in documents and in the
//! Type II parity rule ("odd index" means odd 1-based position).

mod alphabet;
mod build;
mod document;
mod extremes;

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid_input, invalid_param, Error, Result};

pub use alphabet::{Alphabet, Arity};
pub use build::{
    build_type1, build_type1_master, build_type1_proportion, build_type2, build_type3,
    schedule_groups, subset_schedule, BuildOptions, Coefficients, DEFAULT_GROUP_SIZE,
};
pub use document::{AlphabetDocument, LandscapeDocument, TermDocument, FORMAT_VERSION};
pub(crate) use document::serialize_f64_17;
pub use extremes::{closed_form_min_value, normalize_by_max, normalize_minmax};

/// Draws a coefficient `exp(-|z|)` with `z ~ Normal(0, sigma)`; result in `(0, 1]`.
pub fn sample_coefficient<R: Rng + ?Sized>(sigma: f64, rng: &mut R) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(invalid_param(format!("sigma must be positive and finite, got {sigma}")));
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| invalid_param(e.to_string()))?;
    let z: f64 = normal.sample(rng);
    // exp(-|z|) underflows to 0 for |z| > ~745; keep the coefficient positive.
    Ok((-z.abs()).exp().max(f64::MIN_POSITIVE))
}

/// One coefficiented product term.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    indices: Vec<usize>,
    coeff: f64,
}

impl Term {
    /// Builds a term from 0-based feature indices (sorted and checked here).
    pub fn new(mut indices: Vec<usize>, coeff: f64) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid_input(format!("duplicate feature index in term {indices:?}")));
        }
        if !coeff.is_finite() {
            return Err(invalid_input(format!("non-finite coefficient {coeff}")));
        }
        Ok(Self { indices, coeff })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn coeff(&self) -> f64 {
        self.coeff
    }

    pub fn order(&self) -> usize {
        self.indices.len()
    }

    pub fn is_constant(&self) -> bool {
        self.indices.is_empty()
    }

    /// Number of odd 1-based indices in the term.
    pub fn odd_index_count(&self) -> usize {
        self.indices.iter().filter(|&&i| i % 2 == 0).count()
    }

    /// Bit mask of the term's features (requires `n <= 64`).
    pub fn mask(&self) -> u64 {
        self.indices.iter().fold(0u64, |m, &i| m | (1u64 << i))
    }

    fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.indices.cmp(&other.indices))
    }
}

/// Which family a model belongs to; decides which extremes are known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// General NM landscape: known maximum.
    TypeI,
    /// Every term has an odd number of odd indices: known minimum at `[-1, 1, -1, ...]`.
    TypeII,
    /// Only odd-order terms: known minimum at `[-a, ..., -a]` when `a == b`.
    TypeIII,
    /// Arbitrary real coefficients; evaluation only.
    General,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::TypeI => "TypeI",
            ModelKind::TypeII => "TypeII",
            ModelKind::TypeIII => "TypeIII",
            ModelKind::General => "General",
        }
    }

    pub fn is_nm(&self) -> bool {
        !matches!(self, ModelKind::General)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "TypeI" | "1" | "I" => Ok(ModelKind::TypeI),
            "TypeII" | "2" | "II" => Ok(ModelKind::TypeII),
            "TypeIII" | "3" | "III" => Ok(ModelKind::TypeIII),
            "General" => Ok(ModelKind::General),
            other => Err(invalid_param(format!("unknown model kind '{other}'"))),
        }
    }
}

/// An interaction model over `n` features. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionModel {
    n: usize,
    terms: Vec<Term>,
    alphabet: Alphabet,
    kind: ModelKind,
    max_order: usize,
    sigma: Option<f64>,
    seed: Option<u64>,
}

impl InteractionModel {
    /// Validates and canonicalizes a model.
    pub fn new(
        n: usize,
        mut terms: Vec<Term>,
        alphabet: Alphabet,
        kind: ModelKind,
        sigma: Option<f64>,
        seed: Option<u64>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(invalid_param("feature count must be at least 1"));
        }
        terms.sort_by(Term::canonical_cmp);
        let mut seen = HashSet::with_capacity(terms.len());
        for t in &terms {
            if let Some(&last) = t.indices.last() {
                if last >= n {
                    return Err(invalid_input(format!(
                        "term index {} exceeds feature count {n}",
                        last + 1
                    )));
                }
            }
            if !seen.insert(t.indices.as_slice()) {
                return Err(invalid_input(format!(
                    "duplicate index set {:?}",
                    one_based(&t.indices)
                )));
            }
            if kind.is_nm() && t.coeff <= 0.0 {
                return Err(invalid_input(format!(
                    "{kind} landscapes require positive coefficients, term {:?} has {}",
                    one_based(&t.indices),
                    t.coeff
                )));
            }
        }
        match kind {
            ModelKind::TypeII => {
                if !alphabet.is_unit_symmetric() {
                    return Err(invalid_input("TypeII landscapes require the [-1, 1] alphabet"));
                }
                if let Some(t) = terms
                    .iter()
                    .find(|t| !t.is_constant() && t.odd_index_count() % 2 == 0)
                {
                    return Err(invalid_input(format!(
                        "TypeII term {:?} does not contain an odd number of odd indices",
                        one_based(&t.indices)
                    )));
                }
            }
            ModelKind::TypeIII => {
                if let Some(t) = terms.iter().find(|t| t.order() % 2 == 0) {
                    return Err(invalid_input(format!(
                        "TypeIII term {:?} has even order",
                        one_based(&t.indices)
                    )));
                }
            }
            _ => {}
        }
        if let Some(s) = sigma {
            if !(s > 0.0) {
                return Err(invalid_input(format!("recorded sigma must be positive, got {s}")));
            }
        }
        let max_order = terms.iter().map(Term::order).max().unwrap_or(0);
        Ok(Self { n, terms, alphabet, kind, max_order, sigma, seed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of terms.
    pub fn m(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Coefficient of the empty index set, 0 if absent.
    pub fn constant(&self) -> f64 {
        self.terms
            .first()
            .filter(|t| t.is_constant())
            .map_or(0.0, Term::coeff)
    }

    /// Whether every feature appears as a main effect.
    pub fn has_all_main_effects(&self) -> bool {
        self.terms.iter().filter(|t| t.order() == 1).count() == self.n
    }

    /// Features that occur in at least one term, ascending.
    pub fn active_features(&self) -> Vec<usize> {
        let mut used = vec![false; self.n];
        for t in &self.terms {
            for &i in &t.indices {
                used[i] = true;
            }
        }
        (0..self.n).filter(|&i| used[i]).collect()
    }

    /// Same terms, different alphabet. Kind constraints are rechecked.
    pub fn with_alphabet(&self, alphabet: Alphabet) -> Result<Self> {
        Self::new(self.n, self.terms.clone(), alphabet, self.kind, self.sigma, self.seed)
    }

    /// Copy of this model restricted to the listed features, renumbered
    /// `0..features.len()`. Terms touching other features must not exist.
    pub fn project(&self, features: &[usize]) -> Result<Self> {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in features.iter().enumerate() {
            map[old] = new;
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let idx = t
                    .indices
                    .iter()
                    .map(|&i| match map[i] {
                        usize::MAX => Err(invalid_input(format!(
                            "feature {} is used by a term but not kept",
                            i + 1
                        ))),
                        j => Ok(j),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Term::new(idx, t.coeff)
            })
            .collect::<Result<Vec<_>>>()?;
        // Renumbering can break the 1-based parity rule, so keep TypeII only
        // when parity is preserved.
        let kind = match self.kind {
            ModelKind::TypeII
                if terms.iter().any(|t| !t.is_constant() && t.odd_index_count() % 2 == 0) =>
            {
                ModelKind::TypeI
            }
            k => k,
        };
        Self::new(features.len(), terms, self.alphabet, kind, self.sigma, self.seed)
    }

    /// Evaluates the model at `x`, checking dimension and admissibility.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        Ok(self.evaluate_unchecked(x))
    }

    /// Evaluates without validating `x`.
    pub fn evaluate_unchecked(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coeff * t.indices.iter().map(|&i| x[i]).product::<f64>())
            .sum()
    }

    /// Evaluates at the point whose feature `i` sits at level `digits[i]`.
    pub fn evaluate_levels(&self, digits: &[usize]) -> Result<f64> {
        if digits.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: digits.len() });
        }
        let levels = self
            .alphabet
            .levels()
            .ok_or_else(|| Error::Unsupported("level evaluation needs a finite alphabet".into()))?;
        let x = digits
            .iter()
            .map(|&d| {
                levels
                    .get(d)
                    .copied()
                    .ok_or_else(|| invalid_input(format!("level {d} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.evaluate_unchecked(&x))
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: x.len() });
        }
        if let Some((i, v)) = x.iter().enumerate().find(|(_, &v)| !self.alphabet.admits(v)) {
            return Err(invalid_input(format!(
                "value {v} at feature {} is not admissible for the alphabet",
                i + 1
            )));
        }
        Ok(())
    }

    /// Bit-mask evaluator for binary models with `n <= 64`.
    pub fn binary_kernel(&self) -> Result<BinaryKernel> {
        if !self.alphabet.is_binary() {
            return Err(Error::Unsupported("binary kernel needs a binary alphabet".into()));
        }
        if self.n > 64 {
            return Err(Error::Unsupported(format!(
                "binary kernel supports at most 64 features, got {}",
                self.n
            )));
        }
        Ok(BinaryKernel::new(self))
    }
}

#[inline(always)]
fn parity(mut x: u64) -> u64 {
    x ^= x >> 32;
    x ^= x >> 16;
    x ^= x >> 8;
    x ^= x >> 4;
    x ^= x >> 2;
    x ^= x >> 1;
    x & 1
}

pub(crate) fn one_based(indices: &[usize]) -> Vec<usize> {
    indices.iter().map(|i| i + 1).collect()
}

/// Fast evaluator over bit strings: bit `i` set means `x_i = b`, clear means `x_i = -a`.
#[derive(Debug, Clone)]
pub struct BinaryKernel {
    n: usize,
    masks: Vec<u64>,
    coeffs: Vec<f64>,
    unit: bool,
    neg_pow: Vec<f64>,
    pos_pow: Vec<f64>,
}

impl BinaryKernel {
    fn new(model: &InteractionModel) -> Self {
        let n = model.n;
        let (a, b) = (model.alphabet.a(), model.alphabet.b());
        Self {
            n,
            masks: model.terms.iter().map(Term::mask).collect(),
            coeffs: model.terms.iter().map(Term::coeff).collect(),
            unit: model.alphabet.is_unit_symmetric(),
            neg_pow: (0..=n).map(|k| (-a).powi(k as i32)).collect(),
            pos_pow: (0..=n).map(|k| b.powi(k as i32)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn eval(&self, bits: u64) -> f64 {
        if self.unit {
            // Sign flip by xor-ing the parity into the sign bit. Eight
            // partial sums break the serial add dependency.
            let neg = !bits;
            let term = |m: u64, c: f64| f64::from_bits(c.to_bits() ^ (parity(m & neg) << 63));
            let mut acc = [0.0f64; 8];
            let mc = self.masks.chunks_exact(8);
            let cc = self.coeffs.chunks_exact(8);
            let (mr, cr) = (mc.remainder(), cc.remainder());
            for (m8, c8) in mc.zip(cc) {
                for k in 0..8 {
                    acc[k] += term(m8[k], c8[k]);
                }
            }
            let tail: f64 = mr.iter().zip(cr).map(|(&m, &c)| term(m, c)).sum();
            acc.iter().sum::<f64>() + tail
        } else {
            self.masks
                .iter()
                .zip(&self.coeffs)
                .map(|(&m, &c)| {
                    let k1 = (m & bits).count_ones() as usize;
                    let k0 = m.count_ones() as usize - k1;
                    c * self.neg_pow[k0] * self.pos_pow[k1]
                })
                .sum()
        }
    }

    /// Bit string for a point given as alphabet values.
    pub fn bits_of(&self, x: &[f64]) -> u64 {
        x.iter()
            .enumerate()
            .fold(0u64, |acc, (i, &v)| if v > 0.0 { acc | (1 << i) } else { acc })
    }
}
