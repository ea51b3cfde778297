//! Hybrid mean residual life on a censored exponential sample, where the
//! true MRL is constant at 1 / rate.
//!
//! ```text
//! cargo run -p survmrl --example hybrid_mrl
//! ```

use std::fs;

use survmrl::render::{export_curve_csv, render_plot_svg, CurveTable, PlotSpec};
use survmrl::simulate::exponential_sample;
use survmrl::{fit_hybrid_mrl, GridSpec, ThresholdConfig};

fn main() -> survmrl::Result<()> {
    let sample = exponential_sample("exp(0.5)", 1000, 0.5, 0.5 / 3.0, 2026)?;
    let curve = fit_hybrid_mrl(&sample, &ThresholdConfig::default(), &GridSpec::Default)?;

    let gpd = curve.gpd();
    println!(
        "threshold u = {:.4} ({} exceedances, tail shape {:.3}, scale {:.3})",
        curve.threshold(),
        gpd.n_exceedances,
        gpd.shape,
        gpd.scale
    );
    println!("m(u) = {:.4}; true MRL is 2 everywhere", curve.mrl_at_threshold());
    println!("{:>6} {:>8} {:>8} {:>8}", "t", "m(t)", "km part", "tail");
    let u = curve.threshold();
    for t in [0.0, 0.5, 1.0, 1.5, 2.0, 2.5].into_iter().filter(|&t| t < u).chain([u]) {
        let (m, km, tail) = curve.eval_parts(t)?;
        println!("{t:>6.3} {m:>8.4} {km:>8.4} {tail:>8.4}");
    }

    fs::create_dir_all("plots")?;
    fs::write("plots/mrl.svg", render_plot_svg(&PlotSpec::mean_residual_life(&[&curve]))?)?;
    fs::write("plots/mrl.csv", export_curve_csv(&CurveTable::from(&curve))?)?;
    println!("wrote plots/mrl.svg and plots/mrl.csv");
    Ok(())
}
