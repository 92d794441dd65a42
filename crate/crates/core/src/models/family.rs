use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::bloch::AffineMap;
use crate::{Error, Result};

/// Pure evaluator `t ↦ Λ(t,0)`.
pub type Evaluator = Arc<dyn Fn(f64) -> Result<AffineMap> + Send + Sync>;

type SingularTimes = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// A one-parameter family of dynamical maps on `[0, horizon]`.
///
/// Cheap to clone; the evaluator is shared.
#[derive(Clone)]
pub struct MapFamily {
    name: String,
    dim: usize,
    params: BTreeMap<String, f64>,
    horizon: f64,
    evaluator: Evaluator,
    singular_times: Option<SingularTimes>,
    period: Option<f64>,
}

impl fmt::Debug for MapFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MapFamily")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("params", &self.params)
            .field("horizon", &self.horizon)
            .field("period", &self.period)
            .finish_non_exhaustive()
    }
}

impl MapFamily {
    /// A family on `[0, horizon]`; use `f64::INFINITY` for closed forms.
    pub fn new<F>(name: impl Into<String>, dim: usize, horizon: f64, evaluator: F) -> Self
    where
        F: Fn(f64) -> Result<AffineMap> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            dim,
            params: BTreeMap::new(),
            horizon,
            evaluator: Arc::new(evaluator),
            singular_times: None,
            period: None,
        }
    }

    pub fn with_param(mut self, key: impl Into<String>, value: f64) -> Self {
        self.params.insert(key.into(), value);
        self
    }

    /// Attach the analytic singular times `n ↦ t_c⁽ⁿ⁾`.
    pub fn with_singular_times<F>(mut self, times: F) -> Self
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        self.singular_times = Some(Arc::new(times));
        self
    }

    /// Attach the characteristic oscillation period of the family.
    pub fn with_period(mut self, period: f64) -> Self {
        self.period = Some(period);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn period(&self) -> Option<f64> {
        self.period
    }

    pub fn has_closed_form_singular_points(&self) -> bool {
        self.singular_times.is_some()
    }

    /// The `n`-th analytic singular time, if the family knows it.
    pub fn closed_form_singular_point(&self, n: usize) -> Option<f64> {
        self.singular_times.as_ref().map(|f| f(n))
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= 0.0 && t <= self.horizon
    }

    /// `Λ(t,0)`; errors carry the offending time.
    pub fn evaluate(&self, t: f64) -> Result<AffineMap> {
        if !t.is_finite() || !self.contains(t) {
            return Err(Error::Domain { t, lo: 0.0, hi: self.horizon });
        }
        let m = (self.evaluator)(t)?;
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: m.dim() });
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_is_enforced() {
        let fam = MapFamily::new("id", 2, 1.0, |_| AffineMap::identity(2));
        assert!(fam.evaluate(0.5).is_ok());
        assert!(matches!(fam.evaluate(1.5), Err(Error::Domain { t, .. }) if t == 1.5));
        assert!(fam.evaluate(-0.1).is_err());
        assert!(fam.evaluate(f64::NAN).is_err());
        assert!(fam.closed_form_singular_point(0).is_none());
    }

    #[test]
    fn evaluator_dimension_is_checked() {
        let fam = MapFamily::new("bad", 3, 1.0, |_| AffineMap::identity(2));
        assert!(matches!(fam.evaluate(0.1), Err(Error::DimensionMismatch { .. })));
    }
}
