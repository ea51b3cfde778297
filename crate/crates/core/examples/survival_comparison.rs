//! Survival difference and ratio between the two sample groups, each with a
//! permutation envelope under the null of no group effect.
//!
//! ```text
//! cargo run -p survmrl --example survival_comparison
//! ```

use std::fs::{self, File};

use survmrl::render::{render_plot_svg, PlotSpec};
use survmrl::{
    km_fit, load_dataset, permutation_envelope, survival_difference, survival_ratio, ColumnSpec,
    ComparisonKind, EnvelopeConfig, GridSpec,
};

fn main() -> survmrl::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/two_groups.csv");
    let groups = load_dataset(File::open(path)?, &ColumnSpec::default())?;
    let (a, b) = (&groups["A"], &groups["B"]);
    let (km_a, km_b) = (km_fit(a), km_fit(b));
    let config = EnvelopeConfig::new(1000, 42);

    fs::create_dir_all("plots")?;
    for kind in [ComparisonKind::SurvDiff, ComparisonKind::SurvRatio] {
        let curve = match kind {
            ComparisonKind::SurvDiff => survival_difference(&km_a, &km_b, &GridSpec::Default)?,
            _ => survival_ratio(&km_a, &km_b, &GridSpec::Default)?,
        };
        let envelope = permutation_envelope(a, b, kind, &curve.grid, &config)?;
        let outside = envelope.contains(&curve)?.iter().filter(|inside| !**inside).count();
        println!(
            "{}: {} grid points on [0, {:.3}], {} outside the 95% null envelope",
            kind.name(),
            curve.grid.len(),
            curve.window_end,
            outside
        );

        let file = format!("plots/{}.svg", kind.name());
        fs::write(&file, render_plot_svg(&PlotSpec::comparison(&curve, Some(&envelope)))?)?;
        println!("wrote {file}");
    }
    Ok(())
}
