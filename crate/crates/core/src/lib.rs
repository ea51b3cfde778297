//! Survival curves for right-censored data: Kaplan–Meier estimation,
//! hybrid mean residual life with a Generalized Pareto tail, group
//! comparisons with permutation envelopes, paired study statistics and
//! deterministic SVG/CSV output.
//!
//! ```
//! use survmrl::{km_fit, SurvivalSample};
//!
//! let sample = SurvivalSample::from_pairs("A", &[(2.0, true), (3.0, false), (4.0, true), (5.0, true)])?;
//! let km = km_fit(&sample);
//! assert_eq!(km.eval(3.9)?, 0.75);
//! # Ok::<(), survmrl::Error>(())
//! ```

pub mod cli;
pub mod compare;
pub mod dataset;
pub mod error;
pub mod gpd;
pub mod grid;
pub mod km;
pub mod mrl;
pub mod optim;
pub mod render;
pub mod rng;
pub mod simulate;
pub mod step;
pub mod studystats;

pub use compare::{
    mrl_difference, permutation_envelope, survival_difference, survival_ratio, ComparisonCurve,
    ComparisonKind, Envelope, EnvelopeConfig,
};
pub use dataset::{load_dataset, write_dataset, ColumnSpec, Observation, SurvivalSample};
pub use error::{Error, Result};
pub use gpd::{fit_gpd, gpd_log_likelihood, gpd_mrl_at_threshold, Exceedance, GpdFit};
pub use grid::GridSpec;
pub use km::{km_fit, restricted_mrl_km, KmCurve};
pub use mrl::{fit_hybrid_mrl, select_threshold, MrlCurve, ThresholdConfig, ThresholdMode};
pub use step::StepFunction;
