use serde::{Deserialize, Serialize};

use crate::error::{invalid_param, Result};

/// Number of values a feature can take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arity {
    /// `r >= 2` evenly spaced levels including both endpoints.
    Levels(usize),
    /// Any real value in the range.
    Real,
}

/// Homogeneous feature domain `[-a, b]` with `0 < a <= b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alphabet {
    a: f64,
    b: f64,
    arity: Arity,
}

impl Alphabet {
    pub fn new(a: f64, b: f64, arity: Arity) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(invalid_param(format!("alphabet bounds must be finite (a={a}, b={b})")));
        }
        if !(a > 0.0 && a <= b) {
            return Err(invalid_param(format!(
                "alphabet must satisfy 0 < a <= b, got a={a}, b={b}"
            )));
        }
        if let Arity::Levels(r) = arity {
            if r < 2 {
                return Err(invalid_param(format!("arity must be at least 2, got {r}")));
            }
        }
        Ok(Self { a, b, arity })
    }

    /// The binary alphabet `{-1, 1}`.
    pub fn binary() -> Self {
        Self { a: 1.0, b: 1.0, arity: Arity::Levels(2) }
    }

    /// Binary alphabet `{-a, b}`.
    pub fn binary_range(a: f64, b: f64) -> Result<Self> {
        Self::new(a, b, Arity::Levels(2))
    }

    /// Magnitude of the lower bound.
    pub fn a(&self) -> f64 {
        self.a
    }

    /// Upper bound.
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    /// Number of levels, `None` for real-valued alphabets.
    pub fn levels_count(&self) -> Option<usize> {
        match self.arity {
            Arity::Levels(r) => Some(r),
            Arity::Real => None,
        }
    }

    pub fn is_binary(&self) -> bool {
        self.arity == Arity::Levels(2)
    }

    /// `true` for the `{-1, 1}` alphabet (any arity).
    pub fn is_unit_symmetric(&self) -> bool {
        self.a == 1.0 && self.b == 1.0
    }

    pub fn is_symmetric(&self) -> bool {
        self.a == self.b
    }

    /// Value of level `k` out of `r`; endpoints are exact.
    pub fn level(&self, k: usize) -> f64 {
        let r = self.levels_count().expect("level() requires a finite alphabet");
        assert!(k < r, "level {k} out of range for arity {r}");
        if k == 0 {
            -self.a
        } else if k == r - 1 {
            self.b
        } else {
            -self.a + (self.a + self.b) * k as f64 / (r - 1) as f64
        }
    }

    /// All levels in increasing order.
    pub fn levels(&self) -> Option<Vec<f64>> {
        self.levels_count().map(|r| (0..r).map(|k| self.level(k)).collect())
    }

    /// Level index of `x`, if `x` is one of the levels.
    pub fn level_index(&self, x: f64) -> Option<usize> {
        let r = self.levels_count()?;
        let tol = 1e-9 * (self.a + self.b);
        let pos = (x + self.a) / (self.a + self.b) * (r - 1) as f64;
        let k = pos.round();
        if k < 0.0 || k > (r - 1) as f64 {
            return None;
        }
        let k = k as usize;
        ((self.level(k) - x).abs() <= tol).then_some(k)
    }

    /// Whether `x` is a valid feature value.
    pub fn admits(&self, x: f64) -> bool {
        match self.arity {
            Arity::Real => x.is_finite() && x >= -self.a && x <= self.b,
            Arity::Levels(_) => self.level_index(x).is_some(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_levels_are_endpoints() {
        let al = Alphabet::binary_range(0.5, 2.0).unwrap();
        assert_eq!(al.levels().unwrap(), vec![-0.5, 2.0]);
    }

    #[test]
    fn odd_arity_contains_zero_on_symmetric_range() {
        let al = Alphabet::new(1.0, 1.0, Arity::Levels(3)).unwrap();
        assert_eq!(al.levels().unwrap(), vec![-1.0, 0.0, 1.0]);
        assert_eq!(al.level_index(0.0), Some(1));
        assert!(!al.admits(0.5));
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(Alphabet::new(0.0, 1.0, Arity::Real).is_err());
        assert!(Alphabet::new(2.0, 1.0, Arity::Real).is_err());
        assert!(Alphabet::new(1.0, 1.0, Arity::Levels(1)).is_err());
    }

    #[test]
    fn real_alphabet_admits_interior() {
        let al = Alphabet::new(1.0, 3.0, Arity::Real).unwrap();
        assert!(al.admits(0.123));
        assert!(!al.admits(-1.5));
        assert!(al.levels().is_none());
    }
}
