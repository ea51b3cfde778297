/// Where a curve is evaluated: the operation's natural default grid, or an
/// explicit list of times supplied by the caller.
#[derive(Debug, Clone, Default, PartialEq)]
pub enum GridSpec {
    #[default]
    Default,
    Explicit(Vec<f64>),
}

impl GridSpec {
    /// Explicit points sorted ascending with duplicates removed.
    pub(crate) fn explicit_points(points: &[f64]) -> Vec<f64> {
        let mut pts: Vec<f64> = points.iter().copied().filter(|t| t.is_finite()).collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }
}

/// Sorts and removes exact duplicates.
pub(crate) fn sorted_unique(mut pts: Vec<f64>) -> Vec<f64> {
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}
