use super::{InteractionModel, ModelKind};
use crate::error::{Error, Result};

impl InteractionModel {
    /// Whether every coefficient is positive, i.e. the model is an NM landscape
    /// on its alphabet (the alphabet itself always satisfies `0 < a <= b`).
    pub fn satisfies_nm_constraints(&self) -> bool {
        self.terms().iter().all(|t| t.coeff() > 0.0)
    }

    fn require_known_max(&self) -> Result<()> {
        if self.kind() == ModelKind::General && !self.satisfies_nm_constraints() {
            return Err(Error::Unsupported(
                "global maximum is only known for models with non-negative coefficients".into(),
            ));
        }
        Ok(())
    }

    /// `[b, ..., b]`.
    pub fn max_location(&self) -> Result<Vec<f64>> {
        self.require_known_max()?;
        Ok(vec![self.alphabet().b(); self.n()])
    }

    /// `sum_k beta_k * b^|U_k|`, computed in O(m) with the same arithmetic as
    /// [`InteractionModel::evaluate`] so the two agree bit for bit.
    pub fn max_value(&self) -> Result<f64> {
        self.require_known_max()?;
        let b = self.alphabet().b();
        Ok(self
            .terms()
            .iter()
            .map(|t| t.coeff() * t.indices().iter().map(|_| b).product::<f64>())
            .sum())
    }

    /// Proven minimizer: alternating `-1, 1, ...` for Type II, `[-a, ..., -a]`
    /// for Type III with `a == b`.
    pub fn min_location(&self) -> Result<Vec<f64>> {
        match self.kind() {
            ModelKind::TypeII => Ok((0..self.n())
                .map(|i| if i % 2 == 0 { -1.0 } else { 1.0 })
                .collect()),
            ModelKind::TypeIII if self.alphabet().is_symmetric() => {
                Ok(vec![-self.alphabet().a(); self.n()])
            }
            ModelKind::TypeIII => Err(Error::MinimumUnknown(
                "TypeIII minimum is only guaranteed when a == b".into(),
            )),
            kind => Err(Error::MinimumUnknown(format!(
                "no known minimum for {kind} landscapes"
            ))),
        }
    }

    /// Model value at [`InteractionModel::min_location`].
    pub fn min_value(&self) -> Result<f64> {
        let loc = self.min_location()?;
        Ok(self.evaluate_unchecked(&loc))
    }

    /// `Some(min_value)` when the minimum is known.
    pub fn known_min(&self) -> Option<f64> {
        self.min_value().ok()
    }
}

/// Closed-form minimum (negated weighted coefficient sum). Only defined for
/// models without a constant term; used as a cross-check on
/// [`InteractionModel::min_value`].
pub fn closed_form_min_value(model: &InteractionModel) -> Result<f64> {
    if model.terms().first().is_some_and(|t| t.is_constant()) {
        return Err(Error::Unsupported(
            "closed-form minimum is only used for models without a constant term".into(),
        ));
    }
    // Checks the kind/alphabet preconditions.
    model.min_location()?;
    let a = model.alphabet().a();
    Ok(-model
        .terms()
        .iter()
        .map(|t| t.coeff() * a.powi(t.order() as i32))
        .sum::<f64>())
}

/// `f / F_max`.
pub fn normalize_by_max(model: &InteractionModel, f: f64) -> Result<f64> {
    let max = model.max_value()?;
    if max == 0.0 {
        return Err(Error::DivisionByZero("maximum value is zero".into()));
    }
    Ok(f / max)
}

/// `(f - F_min) / (F_max - F_min)`.
pub fn normalize_minmax(model: &InteractionModel, f: f64) -> Result<f64> {
    let max = model.max_value()?;
    let min = model.min_value()?;
    if max == min {
        return Err(Error::DivisionByZero("maximum equals minimum".into()));
    }
    Ok((f - min) / (max - min))
}
