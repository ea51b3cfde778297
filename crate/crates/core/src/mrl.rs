//! Hybrid semi-parametric mean residual life.
//!
//! Below a threshold `u` the MRL comes from the area under the Kaplan–Meier
//! curve; beyond `u` a Generalized Pareto tail fitted to the exceedances
//! supplies the remaining area:
//!
//! ```text
//! m(t) = ∫ₜᵘ Ŝ(s) ds / Ŝ(t)  +  m(u) · Ŝ(u) / Ŝ(t),    m(u) = σ / (1 - ξ)
//! ```
//!
//! Curves are defined on `[0, u]` only.

use crate::dataset::SurvivalSample;
use crate::error::{Error, Result};
use crate::gpd::{fit_gpd, gpd_mrl_at_threshold, Exceedance, GpdFit};
use crate::grid::{sorted_unique, GridSpec};
use crate::km::{km_fit, restricted_mrl_km};
use crate::rng::quantile_sorted;
use crate::step::StepFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdMode {
    /// Quantile of the event (uncensored) times.
    Quantile(f64),
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdConfig {
    pub mode: ThresholdMode,
    pub min_exceedances: usize,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            mode: ThresholdMode::Quantile(0.8),
            min_exceedances: 10,
        }
    }
}

impl ThresholdConfig {
    pub fn quantile(q: f64) -> Self {
        Self {
            mode: ThresholdMode::Quantile(q),
            ..Self::default()
        }
    }

    pub fn explicit(u: f64) -> Self {
        Self {
            mode: ThresholdMode::Explicit(u),
            ..Self::default()
        }
    }

    pub fn with_min_exceedances(mut self, k: usize) -> Self {
        self.min_exceedances = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            ThresholdMode::Quantile(q) if !(q > 0.0 && q < 1.0) => {
                return Err(Error::InvalidConfig(format!(
                    "threshold quantile must lie strictly between 0 and 1, got {q}"
                )))
            }
            ThresholdMode::Explicit(u) if !(u.is_finite() && u >= 0.0) => {
                return Err(Error::InvalidConfig(format!(
                    "explicit threshold must be finite and non-negative, got {u}"
                )))
            }
            _ => {}
        }
        if self.min_exceedances < 2 {
            return Err(Error::InvalidConfig(format!(
                "min_exceedances must be at least 2, got {}",
                self.min_exceedances
            )));
        }
        Ok(())
    }
}

/// Picks the threshold `u` and checks that enough observations lie strictly
/// above it.
pub fn select_threshold(sample: &SurvivalSample, config: &ThresholdConfig) -> Result<f64> {
    config.validate()?;
    let u = match config.mode {
        ThresholdMode::Quantile(q) => {
            let events = sample.event_times();
            if events.is_empty() {
                return Err(Error::NoEventsForQuantile);
            }
            quantile_sorted(&events, q)
        }
        ThresholdMode::Explicit(u) => u,
    };
    let above = sample.observations().iter().filter(|o| o.time > u).count();
    if u >= sample.max_time() || above < config.min_exceedances {
        return Err(Error::ThresholdTooHigh {
            threshold: u,
            found: above,
            required: config.min_exceedances,
        });
    }
    Ok(u)
}

/// Observations strictly above `u`, as excesses with their event flags.
pub fn exceedances(sample: &SurvivalSample, u: f64) -> Vec<Exceedance> {
    sample
        .observations()
        .iter()
        .filter(|o| o.time > u)
        .map(|o| Exceedance {
            excess: o.time - u,
            event: o.event,
        })
        .collect()
}

/// A fitted hybrid MRL curve on `[0, u]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MrlCurve {
    group: String,
    grid: Vec<f64>,
    values: Vec<f64>,
    km_component: Vec<f64>,
    tail_component: Vec<f64>,
    threshold: f64,
    mrl_at_threshold: f64,
    gpd: GpdFit,
    survival: StepFunction,
    source_n: usize,
}

impl MrlCurve {
    pub fn group(&self) -> &str {
        &self.group
    }
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    /// Restricted KM part, ∫ₜᵘ Ŝ / Ŝ(t).
    pub fn km_component(&self) -> &[f64] {
        &self.km_component
    }
    /// Tail part, m(u)·Ŝ(u)/Ŝ(t).
    pub fn tail_component(&self) -> &[f64] {
        &self.tail_component
    }
    pub fn threshold(&self) -> f64 {
        self.threshold
    }
    /// σ / (1 - ξ) from the tail fit.
    pub fn mrl_at_threshold(&self) -> f64 {
        self.mrl_at_threshold
    }
    pub fn gpd(&self) -> &GpdFit {
        &self.gpd
    }
    /// The Kaplan–Meier survival curve underlying the estimate.
    pub fn survival(&self) -> &StepFunction {
        &self.survival
    }
    pub fn source_n(&self) -> usize {
        self.source_n
    }

    /// First grid point; the curve's domain is `[domain_start, threshold]`.
    pub fn domain_start(&self) -> f64 {
        self.grid[0]
    }

    /// Re-evaluates the estimator at any `t` in `[0, u]`, returning
    /// `(value, km_component, tail_component)`.
    pub fn eval_parts(&self, t: f64) -> Result<(f64, f64, f64)> {
        hybrid_at(&self.survival, self.threshold, self.mrl_at_threshold, t)
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        self.eval_parts(t).map(|(v, _, _)| v)
    }
}

fn hybrid_at(survival: &StepFunction, u: f64, mrl_u: f64, t: f64) -> Result<(f64, f64, f64)> {
    if !t.is_finite() || t < 0.0 || t > u {
        return Err(Error::Domain(format!(
            "MRL curve is defined on [0, {u}], got t = {t}"
        )));
    }
    let s_t = survival.eval(t)?;
    if s_t <= 0.0 {
        return Err(Error::ZeroSurvival { t });
    }
    let area = survival.integral(t, u)?;
    let km_part = area / s_t;
    let tail_part = mrl_u * (survival.eval(u)? / s_t);
    Ok((km_part + tail_part, km_part, tail_part))
}

/// Fits the hybrid MRL estimator to one sample.
///
/// The default grid is every distinct observed time at or below `u`, plus
/// `0` and `u`. Explicit grid points outside `[0, u]` are dropped and `u` is
/// always appended.
pub fn fit_hybrid_mrl(
    sample: &SurvivalSample,
    config: &ThresholdConfig,
    grid: &GridSpec,
) -> Result<MrlCurve> {
    let u = select_threshold(sample, config)?;
    let tail = exceedances(sample, u);
    let gpd = fit_gpd(&tail, u)?;
    let mrl_u = gpd_mrl_at_threshold(&gpd)?;
    let km = km_fit(sample);

    let mut points: Vec<f64> = match grid {
        GridSpec::Default => sample
            .observations()
            .iter()
            .map(|o| o.time)
            .filter(|&t| t <= u)
            .collect(),
        GridSpec::Explicit(pts) => pts
            .iter()
            .copied()
            .filter(|&t| t.is_finite() && (0.0..=u).contains(&t))
            .collect(),
    };
    if matches!(grid, GridSpec::Default) {
        points.push(0.0);
    }
    points.push(u);
    let grid = sorted_unique(points);

    let mut values = Vec::with_capacity(grid.len());
    let mut km_component = Vec::with_capacity(grid.len());
    let mut tail_component = Vec::with_capacity(grid.len());
    for &t in &grid {
        let (v, k, tl) = hybrid_at(km.survival(), u, mrl_u, t)?;
        debug_assert_eq!(k, restricted_mrl_km(&km, t, u)?);
        values.push(v);
        km_component.push(k);
        tail_component.push(tl);
    }

    Ok(MrlCurve {
        group: sample.group().to_string(),
        grid,
        values,
        km_component,
        tail_component,
        threshold: u,
        mrl_at_threshold: mrl_u,
        gpd,
        survival: km.survival().clone(),
        source_n: sample.len(),
    })
}
