//! JSON landscape documents.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "kind": "TypeIII",
//!   "n": 3, "m": 4, "max_order": 3,
//!   "sigma": 1.0, "seed": 7,
//!   "alphabet": { "a": 1.0, "b": 1.0, "arity": 2 },
//!   "terms": [ { "indices": [1], "coeff": 5.0000000000000000e-1 }, ... ]
//! }
//! ```
//!
//! Indices are 1-based and ascending. Coefficients are written with 17
//! significant digits, which round-trips every `f64`.

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use super::{one_based, Alphabet, Arity, InteractionModel, ModelKind, Term};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RealMarker {
    Real,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum ArityDocument {
    Levels(usize),
    Real(RealMarker),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphabetDocument {
    pub a: f64,
    pub b: f64,
    arity: ArityDocument,
}

impl From<&Alphabet> for AlphabetDocument {
    fn from(al: &Alphabet) -> Self {
        let arity = match al.arity() {
            Arity::Levels(r) => ArityDocument::Levels(r),
            Arity::Real => ArityDocument::Real(RealMarker::Real),
        };
        Self { a: al.a(), b: al.b(), arity }
    }
}

impl AlphabetDocument {
    pub fn to_alphabet(&self) -> Result<Alphabet> {
        let arity = match self.arity {
            ArityDocument::Levels(r) => Arity::Levels(r),
            ArityDocument::Real(_) => Arity::Real,
        };
        Alphabet::new(self.a, self.b, arity)
    }
}

/// Writes `x` with 17 significant digits.
pub(crate) fn serialize_f64_17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if !x.is_finite() {
        return Err(serde::ser::Error::custom(format!("non-finite number {x}")));
    }
    let raw = RawValue::from_string(format!("{x:.16e}")).map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDocument {
    pub indices: Vec<usize>,
    #[serde(serialize_with = "serialize_f64_17")]
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeDocument {
    pub format_version: u32,
    pub kind: ModelKind,
    pub n: usize,
    pub m: usize,
    pub max_order: usize,
    pub sigma: Option<f64>,
    pub seed: Option<u64>,
    pub alphabet: AlphabetDocument,
    pub terms: Vec<TermDocument>,
}

impl InteractionModel {
    pub fn to_document(&self) -> LandscapeDocument {
        LandscapeDocument {
            format_version: FORMAT_VERSION,
            kind: self.kind(),
            n: self.n(),
            m: self.m(),
            max_order: self.max_order(),
            sigma: self.sigma(),
            seed: self.seed(),
            alphabet: self.alphabet().into(),
            terms: self
                .terms()
                .iter()
                .map(|t| TermDocument { indices: one_based(t.indices()), coeff: t.coeff() })
                .collect(),
        }
    }

    pub fn from_document(doc: &LandscapeDocument) -> Result<Self> {
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Malformed(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                doc.format_version
            )));
        }
        let terms = doc
            .terms
            .iter()
            .map(|t| {
                if t.indices.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::Malformed(format!(
                        "term indices {:?} are not strictly ascending",
                        t.indices
                    )));
                }
                if t.indices.contains(&0) {
                    return Err(Error::Malformed("term indices are 1-based".into()));
                }
                Term::new(t.indices.iter().map(|i| i - 1).collect(), t.coeff)
            })
            .collect::<Result<Vec<_>>>()?;
        let model = InteractionModel::new(
            doc.n,
            terms,
            doc.alphabet.to_alphabet()?,
            doc.kind,
            doc.sigma,
            doc.seed,
        )?;
        if model.m() != doc.m {
            return Err(Error::Malformed(format!("m = {} but {} terms listed", doc.m, model.m())));
        }
        if model.max_order() != doc.max_order {
            return Err(Error::Malformed(format!(
                "max_order = {} but terms reach order {}",
                doc.max_order,
                model.max_order()
            )));
        }
        Ok(model)
    }

    /// Pretty-printed JSON document.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: LandscapeDocument =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        Self::from_document(&doc)
    }
}
