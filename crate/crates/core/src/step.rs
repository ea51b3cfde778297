//! Right-continuous piecewise-constant functions on `[0, ∞)`.

use crate::error::{Error, Result};

/// A right-continuous step function: `initial_value` on `[0, knots[0])`,
/// then `values[i]` on `[knots[i], knots[i + 1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction {
    knots: Vec<f64>,
    values: Vec<f64>,
    initial_value: f64,
}

impl StepFunction {
    pub fn new(knots: Vec<f64>, values: Vec<f64>, initial_value: f64) -> Result<Self> {
        if knots.len() != values.len() {
            return Err(Error::Domain(format!(
                "step function has {} knots but {} values",
                knots.len(),
                values.len()
            )));
        }
        if knots.iter().any(|k| !k.is_finite() || *k < 0.0) {
            return Err(Error::Domain("step function knots must be finite and >= 0".into()));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("step function knots must be strictly increasing".into()));
        }
        Ok(Self {
            knots,
            values,
            initial_value,
        })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            knots: Vec::new(),
            values: Vec::new(),
            initial_value: value,
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn initial_value(&self) -> f64 {
        self.initial_value
    }

    /// Number of knots at or before `t`.
    fn segment_index(&self, t: f64) -> usize {
        self.knots.partition_point(|&k| k <= t)
    }

    fn value_in_segment(&self, idx: usize) -> f64 {
        if idx == 0 {
            self.initial_value
        } else {
            self.values[idx - 1]
        }
    }

    /// Value at `t`; at a knot this is the post-jump value.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::Domain(format!(
                "evaluation time must be finite and non-negative, got {t}"
            )));
        }
        Ok(self.value_in_segment(self.segment_index(t)))
    }

    /// Exact area under the function over `[a, b]`, summed segment by segment.
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        if !a.is_finite() || !b.is_finite() || a < 0.0 {
            return Err(Error::Domain(format!("invalid integration bounds [{a}, {b}]")));
        }
        if a > b {
            return Err(Error::Domain(format!(
                "integration bounds reversed: a = {a} > b = {b}"
            )));
        }
        let mut idx = self.segment_index(a);
        let mut left = a;
        let mut area = 0.0;
        while left < b {
            let right = self.knots.get(idx).map_or(b, |&k| k.min(b));
            area += self.value_in_segment(idx) * (right - left);
            left = right;
            idx += 1;
        }
        Ok(area)
    }
}
