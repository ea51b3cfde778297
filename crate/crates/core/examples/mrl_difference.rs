//! Difference in hybrid MRL between two exponential groups. Memorylessness
//! makes the true difference constant: 1/1 - 1/0.5 = -1.
//!
//! ```text
//! cargo run -p survmrl --example mrl_difference
//! ```

use std::fs;

use survmrl::render::{render_plot_svg, PlotSpec};
use survmrl::simulate::exponential_sample;
use survmrl::{fit_hybrid_mrl, mrl_difference, GridSpec, ThresholdConfig};

fn main() -> survmrl::Result<()> {
    let fast = exponential_sample("rate 1", 1500, 1.0, 0.0, 1)?;
    let slow = exponential_sample("rate 0.5", 1500, 0.5, 0.0, 2)?;
    let cfg = ThresholdConfig::default();
    let a = fit_hybrid_mrl(&fast, &cfg, &GridSpec::Default)?;
    let b = fit_hybrid_mrl(&slow, &cfg, &GridSpec::Default)?;

    let diff = mrl_difference(&a, &b)?;
    println!("common domain [0, {:.4}] with {} grid points", diff.window_end, diff.grid.len());
    for i in (0..diff.grid.len()).step_by(diff.grid.len() / 8) {
        println!("  t = {:>7.4}  difference = {:+.4}", diff.grid[i], diff.values[i]);
    }

    fs::create_dir_all("plots")?;
    fs::write("plots/mrl_diff.svg", render_plot_svg(&PlotSpec::comparison(&diff, None))?)?;
    println!("wrote plots/mrl_diff.svg");
    Ok(())
}
