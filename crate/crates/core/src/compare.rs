//! Two-group comparison curves and permutation reference envelopes.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::dataset::{Observation, SurvivalSample};
use crate::error::{Error, Result};
use crate::grid::{sorted_unique, GridSpec};
use crate::km::{km_fit, KmCurve};
use crate::mrl::MrlCurve;
use crate::rng::{quantile_sorted, replicate_rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComparisonKind {
    SurvDiff,
    SurvRatio,
    MrlDiff,
}

impl ComparisonKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::SurvDiff => "surv_diff",
            Self::SurvRatio => "surv_ratio",
            Self::MrlDiff => "mrl_diff",
        }
    }

    /// Neutral value of the comparison: 0 for differences, 1 for ratios.
    pub fn reference(self) -> f64 {
        match self {
            Self::SurvRatio => 1.0,
            Self::SurvDiff | Self::MrlDiff => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonCurve {
    pub kind: ComparisonKind,
    pub group_a: String,
    pub group_b: String,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Upper end of the time window both groups support.
    pub window_end: f64,
}

/// Default grid for survival comparisons: the union of both groups' event
/// times, cut at the shorter follow-up. Explicit grids are used as given.
fn survival_grid(a: &KmCurve, b: &KmCurve, grid: &GridSpec) -> Result<(Vec<f64>, f64)> {
    let window_end = a.max_time().min(b.max_time());
    let points = match grid {
        GridSpec::Default => sorted_unique(
            a.event_times()
                .iter()
                .chain(b.event_times())
                .copied()
                .filter(|&t| t <= window_end)
                .collect(),
        ),
        GridSpec::Explicit(pts) => {
            if pts.iter().any(|t| !t.is_finite() || *t < 0.0) {
                return Err(Error::Domain("grid points must be finite and >= 0".into()));
            }
            GridSpec::explicit_points(pts)
        }
    };
    if points.is_empty() {
        return Err(Error::NoCommonWindow);
    }
    Ok((points, window_end))
}

/// ΔS(t) = Ŝ_A(t) − Ŝ_B(t).
pub fn survival_difference(a: &KmCurve, b: &KmCurve, grid: &GridSpec) -> Result<ComparisonCurve> {
    let (grid, window_end) = survival_grid(a, b, grid)?;
    let values = grid
        .iter()
        .map(|&t| Ok(a.eval(t)? - b.eval(t)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonCurve {
        kind: ComparisonKind::SurvDiff,
        group_a: a.group().to_string(),
        group_b: b.group().to_string(),
        grid,
        values,
        window_end,
    })
}

/// Ŝ_A(t) / Ŝ_B(t), restricted to times where Ŝ_B(t) > 0.
pub fn survival_ratio(a: &KmCurve, b: &KmCurve, grid: &GridSpec) -> Result<ComparisonCurve> {
    let (candidates, window_end) = survival_grid(a, b, grid)?;
    let mut grid = Vec::with_capacity(candidates.len());
    let mut values = Vec::with_capacity(candidates.len());
    for t in candidates {
        let denom = b.eval(t)?;
        if denom > 0.0 {
            grid.push(t);
            values.push(a.eval(t)? / denom);
        }
    }
    if grid.is_empty() {
        return Err(Error::RatioUndefined);
    }
    Ok(ComparisonCurve {
        kind: ComparisonKind::SurvRatio,
        group_a: a.group().to_string(),
        group_b: b.group().to_string(),
        grid,
        values,
        window_end,
    })
}

/// m̂_A(t) − m̂_B(t) on the overlap of the two domains. Both estimators are
/// re-evaluated at every point of the merged grid.
pub fn mrl_difference(a: &MrlCurve, b: &MrlCurve) -> Result<ComparisonCurve> {
    let start = a.domain_start().max(b.domain_start());
    let end = a.threshold().min(b.threshold());
    if start > end {
        return Err(Error::NoOverlappingMrlDomain);
    }
    let grid = sorted_unique(
        a.grid()
            .iter()
            .chain(b.grid())
            .copied()
            .filter(|&t| t >= start && t <= end)
            .collect(),
    );
    if grid.is_empty() {
        return Err(Error::NoOverlappingMrlDomain);
    }
    let values = grid
        .iter()
        .map(|&t| Ok(a.eval(t)? - b.eval(t)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(ComparisonCurve {
        kind: ComparisonKind::MrlDiff,
        group_a: a.group().to_string(),
        group_b: b.group().to_string(),
        grid,
        values,
        window_end: end,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeConfig {
    pub permutations: usize,
    pub seed: u64,
    /// Pointwise lower and upper quantiles of the permutation distribution.
    pub band: (f64, f64),
    /// Run replicates on the rayon pool. Results do not depend on this.
    pub parallel: bool,
}

impl EnvelopeConfig {
    pub fn new(permutations: usize, seed: u64) -> Self {
        Self {
            permutations,
            seed,
            band: (0.025, 0.975),
            parallel: true,
        }
    }

    pub fn with_band(mut self, lower: f64, upper: f64) -> Self {
        self.band = (lower, upper);
        self
    }

    pub fn serial(mut self) -> Self {
        self.parallel = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    pub kind: ComparisonKind,
    pub grid: Vec<f64>,
    /// NaN where no replicate was defined (ratio kind only).
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Replicates contributing a defined value at each grid point.
    pub n_defined: Vec<usize>,
    pub n_permutations: usize,
    pub seed: u64,
    pub band: (f64, f64),
}

impl Envelope {
    /// Whether each value of `curve` lies inside the band. Curve and
    /// envelope must share a grid.
    pub fn contains(&self, curve: &ComparisonCurve) -> Result<Vec<bool>> {
        if curve.grid != self.grid {
            return Err(Error::EnvelopeGridMismatch);
        }
        Ok(curve
            .values
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
            .collect())
    }

    /// Fraction of grid points where `curve` lies inside the band.
    pub fn coverage(&self, curve: &ComparisonCurve) -> Result<f64> {
        let inside = self.contains(curve)?;
        Ok(inside.iter().filter(|&&b| b).count() as f64 / inside.len() as f64)
    }
}

fn replicate_values(
    pooled: &[Observation],
    n_a: usize,
    kind: ComparisonKind,
    grid: &[f64],
    seed: u64,
    replicate: u64,
) -> Result<Vec<Option<f64>>> {
    let mut labels: Vec<bool> = (0..pooled.len()).map(|i| i < n_a).collect();
    labels.shuffle(&mut replicate_rng(seed, replicate));
    let (in_a, in_b): (Vec<_>, Vec<_>) = pooled
        .iter()
        .zip(&labels)
        .partition(|(_, &is_a)| is_a);
    let take = |side: Vec<(&Observation, &bool)>| side.into_iter().map(|(o, _)| o.clone()).collect();
    let km_a = km_fit(&SurvivalSample::new("a", take(in_a))?);
    let km_b = km_fit(&SurvivalSample::new("b", take(in_b))?);

    grid.iter()
        .map(|&t| {
            let (sa, sb) = (km_a.eval(t)?, km_b.eval(t)?);
            Ok(match kind {
                ComparisonKind::SurvDiff => Some(sa - sb),
                ComparisonKind::SurvRatio => (sb > 0.0).then(|| sa / sb),
                ComparisonKind::MrlDiff => unreachable!("rejected before resampling"),
            })
        })
        .collect()
}

/// Pointwise permutation envelope for a survival difference or ratio.
///
/// Each replicate shuffles the group labels of the pooled subjects (keeping
/// both group sizes), refits both Kaplan–Meier curves and evaluates the
/// comparison on the fixed `grid`. Replicate `b` uses RNG stream `b` of
/// `config.seed`, so results are identical serially or in parallel.
pub fn permutation_envelope(
    a: &SurvivalSample,
    b: &SurvivalSample,
    kind: ComparisonKind,
    grid: &[f64],
    config: &EnvelopeConfig,
) -> Result<Envelope> {
    if kind == ComparisonKind::MrlDiff {
        return Err(Error::UnsupportedKind(kind.name()));
    }
    if config.permutations == 0 {
        return Err(Error::NoPermutations);
    }
    let (lo_q, hi_q) = config.band;
    if !(0.0..=1.0).contains(&lo_q) || !(0.0..=1.0).contains(&hi_q) || lo_q > hi_q {
        return Err(Error::InvalidConfig(format!(
            "band quantiles must satisfy 0 <= lower <= upper <= 1, got ({lo_q}, {hi_q})"
        )));
    }
    let pooled_n = a.len() + b.len();
    if pooled_n < 4 {
        return Err(Error::PooledTooSmall(pooled_n));
    }
    if grid.is_empty() {
        return Err(Error::EmptyCurve);
    }

    let pooled: Vec<Observation> = a
        .observations()
        .iter()
        .chain(b.observations())
        .cloned()
        .collect();
    let run = |r: usize| replicate_values(&pooled, a.len(), kind, grid, config.seed, r as u64);
    let replicates: Vec<Vec<Option<f64>>> = if config.parallel {
        (0..config.permutations)
            .into_par_iter()
            .map(run)
            .collect::<Result<_>>()?
    } else {
        (0..config.permutations).map(run).collect::<Result<_>>()?
    };

    let mut lower = Vec::with_capacity(grid.len());
    let mut upper = Vec::with_capacity(grid.len());
    let mut n_defined = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let mut column: Vec<f64> = replicates.iter().filter_map(|r| r[i]).collect();
        column.sort_by(f64::total_cmp);
        n_defined.push(column.len());
        if column.is_empty() {
            lower.push(f64::NAN);
            upper.push(f64::NAN);
        } else {
            lower.push(quantile_sorted(&column, lo_q));
            upper.push(quantile_sorted(&column, hi_q));
        }
    }

    Ok(Envelope {
        kind,
        grid: grid.to_vec(),
        lower,
        upper,
        n_defined,
        n_permutations: config.permutations,
        seed: config.seed,
        band: config.band,
    })
}
