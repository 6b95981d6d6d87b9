use super::DiscreteLandscape;
use crate::error::{invalid_input, Error, Result};
use crate::model::{Alphabet, InteractionModel, Term};
use crate::nk::NkLandscape;

/// Default cap on the number of points an exhaustive enumeration may visit.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

/// Fitness of every point of a finite landscape, by mixed-radix index.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluatedLandscape {
    n: usize,
    arity: usize,
    strides: Vec<usize>,
    fitness: Vec<f64>,
}

fn check_budget(arity: usize, n: usize, budget: u64) -> Result<usize> {
    let required = (arity as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if required > u128::from(budget) {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(required as usize)
}

impl EvaluatedLandscape {
    /// Wraps an existing table of `arity^n` fitnesses.
    pub fn from_table(n: usize, arity: usize, fitness: Vec<f64>) -> Result<Self> {
        if arity < 2 {
            return Err(invalid_input("arity must be at least 2"));
        }
        let len = check_budget(arity, n, u64::MAX)?;
        if fitness.len() != len {
            return Err(invalid_input(format!(
                "table has {} entries, expected {arity}^{n} = {len}",
                fitness.len()
            )));
        }
        let strides = (0..n).map(|i| arity.pow(i as u32)).collect();
        Ok(Self { n, arity, strides, fitness })
    }

    /// All-zero table, the starting point for incremental construction.
    pub fn zeros(n: usize, arity: usize, budget: u64) -> Result<Self> {
        let len = check_budget(arity, n, budget)?;
        Self::from_table(n, arity, vec![0.0; len])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.fitness.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fitness.is_empty()
    }

    pub fn fitness(&self) -> &[f64] {
        &self.fitness
    }

    #[inline]
    pub fn fitness_at(&self, index: usize) -> f64 {
        self.fitness[index]
    }

    /// Level of feature `i` at point `index`.
    #[inline]
    pub fn digit(&self, index: usize, i: usize) -> usize {
        (index / self.strides[i]) % self.arity
    }

    pub fn digits(&self, index: usize) -> Vec<usize> {
        (0..self.n).map(|i| self.digit(index, i)).collect()
    }

    pub fn index_of(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    /// Index of a model point given as alphabet values.
    pub fn index_of_point(&self, alphabet: &Alphabet, x: &[f64]) -> Result<usize> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: x.len() });
        }
        let digits = x
            .iter()
            .map(|&v| {
                alphabet
                    .level_index(v)
                    .ok_or_else(|| invalid_input(format!("{v} is not an alphabet level")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.index_of(&digits))
    }

    /// Index of `[b, ..., b]`: every digit at its top level.
    pub fn top_index(&self) -> usize {
        self.len() - 1
    }

    /// Calls `f` with every neighbour of `index`.
    #[inline]
    pub fn for_each_neighbor(&self, index: usize, mut f: impl FnMut(usize)) {
        if self.arity == 2 {
            for i in 0..self.n {
                f(index ^ (1 << i));
            }
        } else {
            for &s in &self.strides {
                let d = (index / s) % self.arity;
                if d > 0 {
                    f(index - s);
                }
                if d + 1 < self.arity {
                    f(index + s);
                }
            }
        }
    }

    pub fn neighbors(&self, index: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(2 * self.n);
        self.for_each_neighbor(index, |q| out.push(q));
        out
    }

    /// Feature-step distance: sum over features of the level difference.
    pub fn distance(&self, p: usize, q: usize) -> usize {
        if self.arity == 2 {
            return (p ^ q).count_ones() as usize;
        }
        (0..self.n).map(|i| self.digit(p, i).abs_diff(self.digit(q, i))).sum()
    }

    /// Index of the highest fitness (first one on ties).
    pub fn argmax(&self) -> usize {
        self.fitness
            .iter()
            .enumerate()
            .fold(0, |best, (i, &f)| if f > self.fitness[best] { i } else { best })
    }

    /// Index of the lowest fitness (first one on ties).
    pub fn argmin(&self) -> usize {
        self.fitness
            .iter()
            .enumerate()
            .fold(0, |best, (i, &f)| if f < self.fitness[best] { i } else { best })
    }

    /// Adds one term's contribution to every point.
    pub fn add_term(&mut self, term: &Term, alphabet: &Alphabet) -> Result<()> {
        if alphabet.levels_count() != Some(self.arity) {
            return Err(invalid_input("alphabet arity does not match the table"));
        }
        if term.indices().last().is_some_and(|&i| i >= self.n) {
            return Err(invalid_input("term index outside the table's features"));
        }
        let c = term.coeff();
        if self.arity == 2 {
            let mask = term.mask() as usize;
            let order = term.order();
            if alphabet.is_unit_symmetric() {
                for (p, f) in self.fitness.iter_mut().enumerate() {
                    // bits clear in p are -1, so the sign is the parity of the cleared bits
                    let cleared = order - (p & mask).count_ones() as usize;
                    *f += if cleared % 2 == 0 { c } else { -c };
                }
            } else {
                let (a, b) = (alphabet.a(), alphabet.b());
                let neg_pow: Vec<f64> = (0..=order).map(|k| (-a).powi(k as i32)).collect();
                let pos_pow: Vec<f64> = (0..=order).map(|k| b.powi(k as i32)).collect();
                for (p, f) in self.fitness.iter_mut().enumerate() {
                    let k1 = (p & mask).count_ones() as usize;
                    *f += c * neg_pow[order - k1] * pos_pow[k1];
                }
            }
        } else {
            let levels = alphabet.levels().expect("finite alphabet");
            let strides: Vec<usize> = term.indices().iter().map(|&i| self.strides[i]).collect();
            let r = self.arity;
            for (p, f) in self.fitness.iter_mut().enumerate() {
                let prod: f64 = strides.iter().map(|&s| levels[(p / s) % r]).product();
                *f += c * prod;
            }
        }
        Ok(())
    }
}

impl DiscreteLandscape for EvaluatedLandscape {
    fn n(&self) -> usize {
        self.n
    }

    fn arity(&self) -> usize {
        self.arity
    }

    fn fitness(&self, digits: &[usize]) -> f64 {
        self.fitness[self.index_of(digits)]
    }
}

/// Tabulates every point of a finite-arity model.
///
/// Starts from the coefficient array over subsets (`2^n` entries) and
/// expands one feature at a time from the `{1, x_i}` basis to the `r` level
/// values, so the cost is about `n * r^n` instead of `m * r^n`.
pub fn enumerate(model: &InteractionModel, budget: u64) -> Result<EvaluatedLandscape> {
    let alphabet = model.alphabet();
    let levels = alphabet.levels().ok_or_else(|| {
        Error::Unsupported("exhaustive enumeration needs a finite alphabet".into())
    })?;
    let r = levels.len();
    let n = model.n();
    let len = check_budget(r, n, budget)?;
    if n >= usize::BITS as usize - 1 {
        return Err(Error::Unsupported("too many features to enumerate".into()));
    }

    let mut cur = vec![0.0; 1usize << n];
    for t in model.terms() {
        cur[t.mask() as usize] += t.coeff();
    }
    for d in 0..n {
        let low = r.pow(d as u32);
        let high = 1usize << (n - d - 1);
        let mut next = vec![0.0; low * r * high];
        for h in 0..high {
            let src0 = low * 2 * h;
            let src1 = low * (2 * h + 1);
            for (j, &lv) in levels.iter().enumerate() {
                let dst = low * (j + r * h);
                for l in 0..low {
                    next[dst + l] = cur[src0 + l] + lv * cur[src1 + l];
                }
            }
        }
        cur = next;
    }
    debug_assert_eq!(cur.len(), len);
    EvaluatedLandscape::from_table(n, r, cur)
}

/// Tabulates every bit string of an NK landscape.
pub fn enumerate_nk(nk: &NkLandscape, budget: u64) -> Result<EvaluatedLandscape> {
    let len = check_budget(2, nk.n(), budget)?;
    let fitness = (0..len as u64).map(|bits| nk.evaluate_bits(bits)).collect();
    EvaluatedLandscape::from_table(nk.n(), 2, fitness)
}
