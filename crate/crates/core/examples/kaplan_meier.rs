//! Kaplan-Meier curves for the two-group sample data, printed as a risk
//! table and written to `plots/km.svg`.
//!
//! ```text
//! cargo run -p survmrl --example kaplan_meier
//! ```

use std::fs::{self, File};

use survmrl::render::{render_plot_svg, PlotSpec};
use survmrl::{km_fit, load_dataset, restricted_mrl_km, ColumnSpec};

fn main() -> survmrl::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/two_groups.csv");
    let groups = load_dataset(File::open(path)?, &ColumnSpec::default())?;

    let curves: Vec<_> = groups.values().map(km_fit).collect();
    for km in &curves {
        println!("group {} (n = {}, {} distinct event times)", km.group(), km.n(), km.event_times().len());
        println!("  {:>8} {:>8} {:>6} {:>9}", "time", "at risk", "events", "survival");
        for (i, &t) in km.event_times().iter().enumerate().step_by(15) {
            println!("  {t:>8.4} {:>8} {:>6} {:>9.4}", km.at_risk()[i], km.deaths()[i], km.eval(t)?);
        }
        // expected time lived over the next two units, given survival to t = 1
        println!("  restricted MRL on [1, 3]: {:.4}", restricted_mrl_km(km, 1.0, 3.0)?);
    }

    let refs: Vec<_> = curves.iter().collect();
    fs::create_dir_all("plots")?;
    fs::write("plots/km.svg", render_plot_svg(&PlotSpec::kaplan_meier(&refs))?)?;
    println!("wrote plots/km.svg");
    Ok(())
}
