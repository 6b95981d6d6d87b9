//! Walsh polynomials over bit strings and their exact correspondence with
//! binary interaction models.
//!
//! Bit `i` of a partition index `j` (least significant bit first) stands for
//! feature `i` (0-based), and bit `i` of a [`BitString`] is `y_{i+1}`. The
//! model value `x_i = 1` maps to `y_i = 1` and `x_i = -1` to `y_i = 0`, so
//! `prod_{i in U} x_i = (-1)^{|U|} psi_j(y)` and `omega_j = (-1)^{|U|} beta_U`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid_input, Error, Result};
use crate::model::{Alphabet, InteractionModel, ModelKind, Term};

/// Fixed-length bit string, `len <= 64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    bits: u64,
}

impl BitString {
    pub fn new(len: usize, bits: u64) -> Result<Self> {
        if len > 64 {
            return Err(invalid_input(format!("bit strings hold at most 64 bits, got {len}")));
        }
        if len < 64 && bits >> len != 0 {
            return Err(invalid_input(format!("value {bits:#b} does not fit in {len} bits")));
        }
        Ok(Self { len, bits })
    }

    /// From `y_1, y_2, ...` given as 0/1 values.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let mut v = 0u64;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => v |= 1 << i,
                other => return Err(invalid_input(format!("bit {} is {other}, not 0 or 1", i + 1))),
            }
        }
        Self::new(bits.len(), v)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn get(&self, i: usize) -> u8 {
        (self.bits >> i & 1) as u8
    }

    /// Model point under `y = 1 -> x = 1`, `y = 0 -> x = -1`.
    pub fn to_point(&self) -> Vec<f64> {
        (0..self.len).map(|i| if self.get(i) == 1 { 1.0 } else { -1.0 }).collect()
    }
}

fn check_partition(j: u64, q: usize) -> Result<()> {
    if q < 64 && j >> q != 0 {
        return Err(invalid_input(format!("partition index {j} out of range for q = {q}")));
    }
    Ok(())
}

/// Walsh function of partition `j`: `+1` when `y AND j` has even parity.
pub fn psi(j: u64, y: &BitString) -> Result<i8> {
    check_partition(j, y.len())?;
    Ok(psi_unchecked(j, y.bits()))
}

#[inline]
fn psi_unchecked(j: u64, y: u64) -> i8 {
    if (j & y).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sparse Walsh polynomial `f(y) = sum_j omega_j psi_j(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalshPolynomial {
    q: usize,
    omega: BTreeMap<u64, f64>,
}

impl WalshPolynomial {
    pub fn new(q: usize, omega: BTreeMap<u64, f64>) -> Result<Self> {
        if q > 64 {
            return Err(invalid_input(format!("q must be at most 64, got {q}")));
        }
        for (&j, &w) in &omega {
            check_partition(j, q)?;
            if !w.is_finite() {
                return Err(invalid_input(format!("non-finite coefficient for partition {j}")));
            }
        }
        Ok(Self { q, omega })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn omega(&self) -> &BTreeMap<u64, f64> {
        &self.omega
    }

    /// Coefficient of partition `j`, 0 when absent.
    pub fn coefficient(&self, j: u64) -> f64 {
        self.omega.get(&j).copied().unwrap_or(0.0)
    }

    pub fn evaluate(&self, y: &BitString) -> Result<f64> {
        if y.len() != self.q {
            return Err(Error::DimensionMismatch { expected: self.q, actual: y.len() });
        }
        Ok(self
            .omega
            .iter()
            .map(|(&j, &w)| w * f64::from(psi_unchecked(j, y.bits())))
            .sum())
    }
}

/// `sum_j omega_j psi_j(y)`.
pub fn evaluate_walsh(w: &WalshPolynomial, y: &BitString) -> Result<f64> {
    w.evaluate(y)
}

/// Walsh coefficients of a full table (`table[y]` is `f(y)`, `2^q` entries)
/// by the fast Walsh-Hadamard transform. Coefficients with magnitude at most
/// `tolerance` are dropped.
pub fn walsh_transform(q: usize, table: &[f64], tolerance: f64) -> Result<WalshPolynomial> {
    if q >= usize::BITS as usize || table.len() != 1usize << q {
        return Err(invalid_input(format!(
            "a table over {q} bits needs 2^{q} entries, got {}",
            table.len()
        )));
    }
    let mut w = table.to_vec();
    let mut h = 1;
    while h < w.len() {
        for block in w.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi) {
                (*a, *b) = (*a + *b, *a - *b);
            }
        }
        h *= 2;
    }
    let scale = 1.0 / w.len() as f64;
    let omega = w
        .into_iter()
        .enumerate()
        .map(|(j, v)| (j as u64, v * scale))
        .filter(|(_, v)| v.abs() > tolerance)
        .collect();
    WalshPolynomial::new(q, omega)
}

fn sign_for_order(order: usize) -> f64 {
    if order % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Term-wise conversion of a `{-1, 1}` model to Walsh form.
pub fn to_walsh(model: &InteractionModel) -> Result<WalshPolynomial> {
    let al = model.alphabet();
    if !(al.is_binary() && al.is_unit_symmetric()) {
        return Err(Error::Unsupported(
            "Walsh conversion is defined for the binary {-1, 1} alphabet only".into(),
        ));
    }
    if model.n() > 64 {
        return Err(Error::Unsupported("Walsh conversion supports at most 64 features".into()));
    }
    let omega = model
        .terms()
        .iter()
        .map(|t| (t.mask(), sign_for_order(t.order()) * t.coeff()))
        .collect();
    WalshPolynomial::new(model.n(), omega)
}

/// Inverse of [`to_walsh`]; the result is a `General` model on `{-1, 1}`.
/// Zero coefficients are dropped.
pub fn from_walsh(w: &WalshPolynomial) -> Result<InteractionModel> {
    if w.q() == 0 {
        return Err(invalid_input("cannot build a model over zero features"));
    }
    let terms = w
        .omega()
        .iter()
        .filter(|(_, &c)| c != 0.0)
        .map(|(&j, &c)| {
            let indices: Vec<usize> = (0..w.q()).filter(|&i| j >> i & 1 == 1).collect();
            let order = indices.len();
            Term::new(indices, sign_for_order(order) * c)
        })
        .collect::<Result<Vec<_>>>()?;
    InteractionModel::new(w.q(), terms, Alphabet::binary(), ModelKind::General, None, None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaDocument {
    pub j: u64,
    #[serde(serialize_with = "crate::model::serialize_f64_17")]
    pub coeff: f64,
}

/// JSON form: `{ "format_version": 1, "q": .., "omega": [{ "j": .., "coeff": .. }] }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalshDocument {
    pub format_version: u32,
    pub q: usize,
    pub omega: Vec<OmegaDocument>,
}

impl WalshPolynomial {
    pub fn to_document(&self) -> WalshDocument {
        WalshDocument {
            format_version: crate::model::FORMAT_VERSION,
            q: self.q,
            omega: self.omega.iter().map(|(&j, &coeff)| OmegaDocument { j, coeff }).collect(),
        }
    }

    pub fn from_document(doc: &WalshDocument) -> Result<Self> {
        if doc.format_version != crate::model::FORMAT_VERSION {
            return Err(Error::Malformed(format!(
                "unsupported format_version {}",
                doc.format_version
            )));
        }
        let mut omega = BTreeMap::new();
        for o in &doc.omega {
            if omega.insert(o.j, o.coeff).is_some() {
                return Err(Error::Malformed(format!("partition {} listed twice", o.j)));
            }
        }
        Self::new(doc.q, omega)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: WalshDocument =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        Self::from_document(&doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_recovers_sparse_polynomial() {
        let mut omega = BTreeMap::new();
        omega.insert(0b000, 0.5);
        omega.insert(0b101, -2.0);
        omega.insert(0b110, 0.25);
        let w = WalshPolynomial::new(3, omega).unwrap();
        let table: Vec<f64> = (0..8)
            .map(|y| w.evaluate(&BitString::new(3, y).unwrap()).unwrap())
            .collect();
        let back = walsh_transform(3, &table, 1e-12).unwrap();
        assert_eq!(back.omega().len(), 3);
        for (j, c) in w.omega() {
            assert!((back.coefficient(*j) - c).abs() < 1e-12);
        }
        assert!(walsh_transform(3, &table[..7], 0.0).is_err());
    }
    use crate::model::{build_type1_proportion, BuildOptions};

    fn eq5(b0: f64, b1: f64, b2: f64, b12: f64) -> InteractionModel {
        let terms = vec![
            Term::new(vec![], b0).unwrap(),
            Term::new(vec![0], b1).unwrap(),
            Term::new(vec![1], b2).unwrap(),
            Term::new(vec![0, 1], b12).unwrap(),
        ];
        InteractionModel::new(2, terms, Alphabet::binary(), ModelKind::TypeI, None, None).unwrap()
    }

    #[test]
    fn psi_examples() {
        let y11 = BitString::from_bits(&[1, 1]).unwrap();
        let y01 = BitString::new(2, 0b01).unwrap();
        assert_eq!(psi(0, &y11).unwrap(), 1);
        assert_eq!(psi(3, &y11).unwrap(), 1);
        assert_eq!(psi(3, &y01).unwrap(), -1);
        assert!(psi(4, &y11).is_err());
    }

    #[test]
    fn constant_and_zero_polynomials() {
        let c = WalshPolynomial::new(3, BTreeMap::from([(0, 2.5)])).unwrap();
        let zero = WalshPolynomial::new(3, BTreeMap::new()).unwrap();
        for bits in 0..8 {
            let y = BitString::new(3, bits).unwrap();
            assert_eq!(c.evaluate(&y).unwrap(), 2.5);
            assert_eq!(evaluate_walsh(&zero, &y).unwrap(), 0.0);
        }
        assert!(c.evaluate(&BitString::new(2, 0).unwrap()).is_err());
    }

    #[test]
    fn two_feature_example_signs() {
        let m = eq5(1.0, 2.0, 3.0, 4.0);
        let w = to_walsh(&m).unwrap();
        assert_eq!(w.coefficient(0), 1.0);
        assert_eq!(w.coefficient(1), -2.0);
        assert_eq!(w.coefficient(2), -3.0);
        assert_eq!(w.coefficient(3), 4.0);
        for bits in 0..4 {
            let y = BitString::new(2, bits).unwrap();
            assert_eq!(w.evaluate(&y).unwrap(), m.evaluate(&y.to_point()).unwrap());
        }
    }

    #[test]
    fn rejects_non_unit_alphabets() {
        let al = Alphabet::binary_range(0.5, 1.0).unwrap();
        let m = build_type1_proportion(3, 1.0, 1.0, 1, &BuildOptions::default().alphabet(al))
            .unwrap();
        assert!(to_walsh(&m).is_err());
    }

    #[test]
    fn walsh_basis_is_orthogonal() {
        let q = 6;
        for i in 0..1u64 << q {
            for j in 0..1u64 << q {
                let dot: i64 = (0..1u64 << q)
                    .map(|y| i64::from(psi_unchecked(i, y) * psi_unchecked(j, y)))
                    .sum();
                assert_eq!(dot, if i == j { 1 << q } else { 0 });
            }
        }
    }

    #[test]
    fn round_trip_preserves_terms() {
        let m = build_type1_proportion(8, 0.6, 5.0, 77, &BuildOptions::default()).unwrap();
        let back = from_walsh(&to_walsh(&m).unwrap()).unwrap();
        assert_eq!(back.terms(), m.terms());
        assert_eq!(back.kind(), ModelKind::General);
    }

    #[test]
    fn document_round_trip() {
        let m = build_type1_proportion(5, 0.5, 2.0, 3, &BuildOptions::default()).unwrap();
        let w = to_walsh(&m).unwrap();
        assert_eq!(WalshPolynomial::from_json(&w.to_json().unwrap()).unwrap(), w);
        let dup = r#"{"format_version":1,"q":2,"omega":[{"j":1,"coeff":1.0},{"j":1,"coeff":2.0}]}"#;
        assert!(WalshPolynomial::from_json(dup).is_err());
    }
}
