//! Kaplan–Meier product-limit estimation.

use crate::dataset::SurvivalSample;
use crate::error::{Error, Result};
use crate::step::StepFunction;

/// Product-limit estimate for one sample.
#[derive(Debug, Clone)]
pub struct KmCurve {
    group: String,
    n: usize,
    max_time: f64,
    event_times: Vec<f64>,
    at_risk: Vec<usize>,
    deaths: Vec<usize>,
    survival: StepFunction,
    censor_marks: Vec<f64>,
}

impl KmCurve {
    pub fn group(&self) -> &str {
        &self.group
    }

    /// Sample size the curve was fitted on.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest observed time in the sample (end of follow-up).
    pub fn max_time(&self) -> f64 {
        self.max_time
    }

    /// Distinct event times, ascending.
    pub fn event_times(&self) -> &[f64] {
        &self.event_times
    }

    /// Number at risk just before each event time.
    pub fn at_risk(&self) -> &[usize] {
        &self.at_risk
    }

    /// Number of events at each event time.
    pub fn deaths(&self) -> &[usize] {
        &self.deaths
    }

    pub fn survival(&self) -> &StepFunction {
        &self.survival
    }

    /// Times of censored observations (with repeats), ascending.
    pub fn censor_marks(&self) -> &[f64] {
        &self.censor_marks
    }

    /// Ŝ(t).
    pub fn eval(&self, t: f64) -> Result<f64> {
        self.survival.eval(t)
    }
}

/// Fits the Kaplan–Meier estimator.
///
/// Relies on the sample ordering (ascending time, events before censorings at
/// ties) so one pass suffices. Censorings after the last event extend the
/// final plateau without adding a jump.
pub fn km_fit(sample: &SurvivalSample) -> KmCurve {
    let obs = sample.observations();
    let n = obs.len();
    let mut event_times = Vec::new();
    let mut at_risk = Vec::new();
    let mut deaths = Vec::new();
    let mut values = Vec::new();
    let mut censor_marks = Vec::new();

    let mut surv = 1.0;
    let mut i = 0;
    while i < n {
        let t = obs[i].time;
        let risk = n - i;
        let mut d = 0;
        let mut j = i;
        while j < n && obs[j].time == t {
            if obs[j].event {
                d += 1;
            } else {
                censor_marks.push(t);
            }
            j += 1;
        }
        if d > 0 {
            surv *= (risk - d) as f64 / risk as f64;
            event_times.push(t);
            at_risk.push(risk);
            deaths.push(d);
            values.push(surv);
        }
        i = j;
    }

    let survival = StepFunction::new(event_times.clone(), values, 1.0)
        .expect("sample times are sorted and non-negative");
    KmCurve {
        group: sample.group().to_string(),
        n,
        max_time: sample.max_time(),
        event_times,
        at_risk,
        deaths,
        survival,
        censor_marks,
    }
}

/// Restricted mean residual life below `u`: ∫ₜᵘ Ŝ(s) ds / Ŝ(t).
pub fn restricted_mrl_km(curve: &KmCurve, t: f64, u: f64) -> Result<f64> {
    if !(t.is_finite() && u.is_finite()) || t < 0.0 || t > u {
        return Err(Error::Domain(format!(
            "restricted MRL needs 0 <= t <= u, got t = {t}, u = {u}"
        )));
    }
    let s_t = curve.eval(t)?;
    if s_t <= 0.0 {
        return Err(Error::ZeroSurvival { t });
    }
    Ok(curve.survival.integral(t, u)? / s_t)
}
