//! Fits a Generalized Pareto tail to censored exceedances and compares the
//! estimate with the generating parameters.
//!
//! ```text
//! cargo run -p survmrl --example gpd_tail
//! ```

use survmrl::simulate::gpd_draws;
use survmrl::{fit_gpd, gpd_log_likelihood, gpd_mrl_at_threshold, Exceedance};

fn main() -> survmrl::Result<()> {
    let (shape, scale) = (0.25, 2.0);
    let excesses = gpd_draws(3000, shape, scale, 11);
    let censor_at = gpd_draws(3000, 0.0, 12.0, 12);

    // administrative censoring: observe min(excess, censoring time)
    let data: Vec<Exceedance> = excesses
        .iter()
        .zip(&censor_at)
        .map(|(&x, &c)| Exceedance { excess: x.min(c), event: x <= c })
        .collect();

    let fit = fit_gpd(&data, 0.0)?;
    println!(
        "{} exceedances, {} events, converged = {}",
        fit.n_exceedances, fit.n_tail_events, fit.converged
    );
    println!("shape  true {shape:>6.3}  fitted {:>6.3}", fit.shape);
    println!("scale  true {scale:>6.3}  fitted {:>6.3}", fit.scale);
    println!(
        "mean excess  true {:.3}  fitted {:.3}",
        scale / (1.0 - shape),
        gpd_mrl_at_threshold(&fit)?
    );

    let at_truth = gpd_log_likelihood(&data, shape, scale).unwrap_or(f64::NEG_INFINITY);
    println!("log-likelihood at fit {:.3}, at truth {:.3}", fit.log_likelihood, at_truth);
    Ok(())
}
