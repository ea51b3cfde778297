//! Generalized Pareto tail fitted to threshold exceedances under right
//! censoring.
//!
//! Events contribute the GPD log-density and censored exceedances the
//! log-survival:
//!
//! ```text
//! event:    -ln σ - (1/ξ + 1) ln(1 + ξ t / σ)
//! censored:       - (1/ξ)     ln(1 + ξ t / σ)
//! ```
//!
//! The shape is restricted to the open box `(-0.99, 0.99)` so that the mean
//! residual life `σ / (1 - ξ)` stays finite.

use crate::error::{Error, Result};
use crate::optim::{nelder_mead, NelderMeadOptions};

/// Below this |ξ| the likelihood switches to a series around the
/// exponential limit.
pub const SMALL_SHAPE_CUTOFF: f64 = 1e-8;
/// Open bound on |ξ| searched by the optimiser.
pub const SHAPE_BOUND: f64 = 0.99;
/// A fitted shape this close to the upper bound is reported as an
/// infinite-mean fit.
const UPPER_BOUND_MARGIN: f64 = 1e-3;

/// An excess `t = x - u` over the threshold together with its event flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exceedance {
    pub excess: f64,
    pub event: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpdFit {
    /// ξ
    pub shape: f64,
    /// σ_u
    pub scale: f64,
    pub threshold: f64,
    pub n_exceedances: usize,
    pub n_tail_events: usize,
    pub log_likelihood: f64,
    pub converged: bool,
}

/// (1/ξ)·ln(1 + ξz), continuous through ξ = 0.
fn scaled_log1p(shape: f64, z: f64) -> f64 {
    let x = shape * z;
    if shape.abs() < SMALL_SHAPE_CUTOFF && x.abs() < 1e-4 {
        // z - ξz²/2 + ξ²z³/3; exactly z at ξ = 0
        z * (1.0 - x / 2.0 + x * x / 3.0)
    } else {
        x.ln_1p() / shape
    }
}

/// Censored GPD log-likelihood, or `None` outside the support
/// (`σ <= 0` or `1 + ξt/σ <= 0` for some excess).
pub fn gpd_log_likelihood(exceedances: &[Exceedance], shape: f64, scale: f64) -> Option<f64> {
    if !(scale > 0.0) || !shape.is_finite() || !scale.is_finite() {
        return None;
    }
    let log_scale = scale.ln();
    let mut total = 0.0;
    for e in exceedances {
        let z = e.excess / scale;
        let arg = shape * z;
        if !(1.0 + arg > 0.0) {
            return None;
        }
        let survival_term = scaled_log1p(shape, z);
        total -= survival_term;
        if e.event {
            total -= log_scale + arg.ln_1p();
        }
    }
    if total.is_finite() {
        Some(total)
    } else {
        None
    }
}

fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    (mean, var)
}

/// Maximum-likelihood GPD fit by multi-start Nelder–Mead over `(ξ, ln σ)`.
///
/// Starts from a moment estimate, the exponential (ξ = 0) and a heavy tail
/// (ξ = 0.5); each start is polished by one restart. `converged` is false if
/// the winning run stopped on the iteration cap.
pub fn fit_gpd(exceedances: &[Exceedance], threshold: f64) -> Result<GpdFit> {
    let m = exceedances.len();
    if m < 2 {
        return Err(Error::InsufficientTailData { found: m });
    }
    if exceedances
        .iter()
        .any(|e| !e.excess.is_finite() || e.excess < 0.0)
    {
        return Err(Error::Domain("exceedances must be finite and non-negative".into()));
    }
    let n_tail_events = exceedances.iter().filter(|e| e.event).count();
    if n_tail_events == 0 {
        return Err(Error::AllTailCensored);
    }

    let excesses: Vec<f64> = exceedances.iter().map(|e| e.excess).collect();
    let (mean, var) = mean_and_variance(&excesses);
    if !(mean > 0.0) {
        return Err(Error::Domain("all exceedances are zero".into()));
    }

    let objective = |p: &[f64]| -> f64 {
        let (shape, log_scale) = (p[0], p[1]);
        if shape <= -SHAPE_BOUND || shape >= SHAPE_BOUND {
            return f64::INFINITY;
        }
        gpd_log_likelihood(exceedances, shape, log_scale.exp()).map_or(f64::INFINITY, |ll| -ll)
    };

    let moment_shape = if var > 0.0 {
        (0.5 * (1.0 - mean * mean / var)).clamp(-0.9, 0.9)
    } else {
        0.0
    };
    let max_excess = excesses.iter().cloned().fold(0.0, f64::max);
    let starts = [
        (moment_shape, mean * (1.0 - moment_shape)),
        (0.0, mean),
        (0.5, mean * 0.5),
    ];

    let opts = NelderMeadOptions::default();
    let mut best: Option<(Vec<f64>, f64, bool)> = None;
    for (shape, scale) in starts {
        // negative shapes need σ large enough to cover the largest excess
        let scale = if shape < 0.0 {
            scale.max(-shape * max_excess * 1.01)
        } else {
            scale
        };
        let start = [shape, scale.ln()];
        if !objective(&start).is_finite() {
            continue;
        }
        let first = nelder_mead(objective, &start, &[0.1, 0.1], &opts);
        let polished = nelder_mead(objective, &first.point, &[0.02, 0.02], &opts);
        let run = if polished.value <= first.value {
            polished
        } else {
            first
        };
        if best.as_ref().is_none_or(|(_, v, _)| run.value < *v) {
            best = Some((run.point, run.value, run.converged));
        }
    }
    let (point, _, converged) = best.ok_or_else(|| {
        Error::Domain("no feasible starting point for the GPD likelihood".into())
    })?;

    let shape = point[0];
    let scale = point[1].exp();
    if shape >= SHAPE_BOUND - UPPER_BOUND_MARGIN {
        return Err(Error::InfiniteMeanTail { shape });
    }
    let log_likelihood = gpd_log_likelihood(exceedances, shape, scale)
        .expect("optimum lies inside the support");
    Ok(GpdFit {
        shape,
        scale,
        threshold,
        n_exceedances: m,
        n_tail_events,
        log_likelihood,
        converged,
    })
}

/// Mean residual life of the fitted tail at the threshold, σ / (1 - ξ).
pub fn gpd_mrl_at_threshold(fit: &GpdFit) -> Result<f64> {
    if fit.shape >= 1.0 {
        return Err(Error::InfiniteMrl { shape: fit.shape });
    }
    Ok(fit.scale / (1.0 - fit.shape))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulate;
    use proptest::prelude::*;

    fn ev(excess: f64) -> Exceedance {
        Exceedance { excess, event: true }
    }

    fn cens(excess: f64) -> Exceedance {
        Exceedance {
            excess,
            event: false,
        }
    }

    fn fit_with(shape: f64, scale: f64) -> GpdFit {
        GpdFit {
            shape,
            scale,
            threshold: 0.0,
            n_exceedances: 2,
            n_tail_events: 1,
            log_likelihood: 0.0,
            converged: true,
        }
    }

    // Independent log-density, written straight from the GPD pdf.
    fn direct_log_density(x: f64, shape: f64, scale: f64) -> f64 {
        if shape == 0.0 {
            (1.0 / scale * (-x / scale).exp()).ln()
        } else {
            (1.0 / scale * (1.0 + shape * x / scale).powf(-1.0 / shape - 1.0)).ln()
        }
    }

    #[test]
    fn exponential_limit_values() {
        assert_eq!(gpd_log_likelihood(&[ev(1.0)], 0.0, 1.0), Some(-1.0));
        assert_eq!(gpd_log_likelihood(&[cens(1.0)], 0.0, 1.0), Some(-1.0));
    }

    #[test]
    fn corrected_event_exponent() {
        // ln[(1/2) · 1.25^(-3)]
        let expected = (0.5 * 1.25f64.powi(-3)).ln();
        let got = gpd_log_likelihood(&[ev(1.0)], 0.5, 2.0).unwrap();
        assert!((got - expected).abs() < 1e-14);
        assert!((got - (-1.3626)).abs() < 1e-4);
    }

    #[test]
    fn outside_support_is_none() {
        assert_eq!(gpd_log_likelihood(&[ev(3.0)], -0.5, 1.0), None);
        assert_eq!(gpd_log_likelihood(&[ev(2.0)], -0.5, 1.0), None);
        assert!(gpd_log_likelihood(&[ev(1.9)], -0.5, 1.0).is_some());
        assert_eq!(gpd_log_likelihood(&[ev(1.0)], 0.1, 0.0), None);
        assert_eq!(gpd_log_likelihood(&[ev(1.0)], 0.1, -1.0), None);
    }

    #[test]
    fn likelihood_matches_direct_density() {
        let xs = [0.0, 0.3, 1.1, 2.5, 7.0, 15.0];
        for &(shape, scale) in &[(0.25, 2.0), (-0.3, 5.0), (0.7, 0.5), (0.0, 1.5)] {
            let exc: Vec<Exceedance> = xs.iter().map(|&x| ev(x)).collect();
            if let Some(ll) = gpd_log_likelihood(&exc, shape, scale) {
                let direct: f64 = xs.iter().map(|&x| direct_log_density(x, shape, scale)).sum();
                assert!((ll - direct).abs() < 1e-12, "{shape} {scale}: {ll} vs {direct}");
            } else {
                panic!("unexpected support failure for ({shape}, {scale})");
            }
        }
    }

    proptest! {
        #[test]
        fn continuous_across_the_series_switch(
            excesses in prop::collection::vec((0.0f64..100.0, any::<bool>()), 1..20),
            scale in 0.1f64..10.0,
        ) {
            let exc: Vec<Exceedance> =
                excesses.into_iter().map(|(excess, event)| Exceedance { excess, event }).collect();
            for edge in [SMALL_SHAPE_CUTOFF, -SMALL_SHAPE_CUTOFF] {
                let inside = gpd_log_likelihood(&exc, edge * (1.0 - 1e-10), scale).unwrap();
                let outside = gpd_log_likelihood(&exc, edge * (1.0 + 1e-10), scale).unwrap();
                prop_assert!((inside - outside).abs() < 1e-8, "edge {}: {} vs {}", edge, inside, outside);
            }
        }

        #[test]
        fn cutoff_values_match_exponential_limit(
            excesses in prop::collection::vec((0.0f64..100.0, any::<bool>()), 1..20),
            scale in 0.1f64..10.0,
        ) {
            let exc: Vec<Exceedance> =
                excesses.into_iter().map(|(excess, event)| Exceedance { excess, event }).collect();
            let limit = gpd_log_likelihood(&exc, 0.0, scale).unwrap();
            // Taylor coefficients of the log-likelihood in ξ around 0:
            // Σ (z²/2 - δz) and Σ (-z³/3 + δz²/2)
            let (c1, c2) = exc.iter().fold((0.0, 0.0), |(a, b), e| {
                let z = e.excess / scale;
                let d = if e.event { 1.0 } else { 0.0 };
                (a + z * z / 2.0 - d * z, b - z * z * z / 3.0 + d * z * z / 2.0)
            });
            for shape in [SMALL_SHAPE_CUTOFF, -SMALL_SHAPE_CUTOFF] {
                let ll = gpd_log_likelihood(&exc, shape, scale).unwrap();
                prop_assert!(
                    (ll - limit - shape * c1 - shape * shape * c2).abs() < 1e-8,
                    "shape {}: {} vs {}", shape, ll, limit
                );
            }
        }

        #[test]
        fn direct_density_for_random_parameters(
            xs in prop::collection::vec(0.0f64..20.0, 1..15),
            shape in -0.9f64..0.9,
            scale in 0.2f64..10.0,
        ) {
            let exc: Vec<Exceedance> = xs.iter().map(|&x| ev(x)).collect();
            if let Some(ll) = gpd_log_likelihood(&exc, shape, scale) {
                let direct: f64 = xs.iter().map(|&x| direct_log_density(x, shape, scale)).sum();
                prop_assert!((ll - direct).abs() < 1e-12 * (1.0 + direct.abs()));
            }
        }
    }

    #[test]
    fn precondition_errors() {
        assert!(matches!(
            fit_gpd(&[ev(1.0)], 0.0),
            Err(Error::InsufficientTailData { found: 1 })
        ));
        assert!(matches!(
            fit_gpd(&[cens(1.0), cens(2.0), cens(0.5)], 0.0),
            Err(Error::AllTailCensored)
        ));
    }

    #[test]
    fn exponential_data_gives_zero_shape() {
        let xs = simulate::exponential_draws(2000, 1.0, 20_251_111);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let exc: Vec<Exceedance> = xs.iter().map(|&x| ev(x)).collect();
        let fit = fit_gpd(&exc, 0.0).unwrap();
        assert!(fit.converged);
        assert!(fit.shape.abs() < 0.1, "shape {}", fit.shape);
        assert!((fit.scale - mean).abs() < 0.05, "scale {} mean {mean}", fit.scale);
        assert_eq!(fit.n_exceedances, 2000);
        assert_eq!(
            fit.log_likelihood,
            gpd_log_likelihood(&exc, fit.shape, fit.scale).unwrap()
        );
    }

    #[test]
    fn censored_exceedances_shift_the_fit() {
        let xs = simulate::exponential_draws(400, 0.5, 7);
        let all_events: Vec<Exceedance> = xs.iter().map(|&x| ev(x)).collect();
        let some_censored: Vec<Exceedance> = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| Exceedance {
                excess: x,
                event: i % 3 != 0,
            })
            .collect();
        let a = fit_gpd(&all_events, 0.0).unwrap();
        let b = fit_gpd(&some_censored, 0.0).unwrap();
        // treating a third of the times as lower bounds lengthens the tail
        assert!(gpd_mrl_at_threshold(&b).unwrap() > gpd_mrl_at_threshold(&a).unwrap());
    }

    #[test]
    fn heavy_tail_beyond_bound_is_an_error() {
        // Pareto-like draws with ξ = 1.5 push the fit to the upper bound
        let xs = simulate::gpd_draws(3000, 1.5, 1.0, 3);
        let exc: Vec<Exceedance> = xs.iter().map(|&x| ev(x)).collect();
        assert!(matches!(
            fit_gpd(&exc, 0.0),
            Err(Error::InfiniteMeanTail { .. })
        ));
    }

    #[test]
    fn scaling_the_data_scales_sigma() {
        let xs = simulate::gpd_draws(800, 0.2, 1.5, 11);
        let exc: Vec<Exceedance> = xs.iter().map(|&x| ev(x)).collect();
        let base = fit_gpd(&exc, 0.0).unwrap();
        for c in [0.1, 3.0, 250.0] {
            let scaled: Vec<Exceedance> = xs.iter().map(|&x| ev(x * c)).collect();
            let fit = fit_gpd(&scaled, 0.0).unwrap();
            assert!((fit.shape - base.shape).abs() < 1e-4);
            assert!((fit.scale / c - base.scale).abs() < 1e-4 * base.scale.max(1.0));
        }
    }

    #[test]
    fn mrl_at_threshold() {
        assert_eq!(gpd_mrl_at_threshold(&fit_with(0.0, 1.0)).unwrap(), 1.0);
        assert_eq!(gpd_mrl_at_threshold(&fit_with(0.5, 2.0)).unwrap(), 4.0);
        assert!(matches!(
            gpd_mrl_at_threshold(&fit_with(1.0, 2.0)),
            Err(Error::InfiniteMrl { .. })
        ));
    }
}
