//! Paired pre/post accuracy statistics on the bundled survey: McNemar per
//! item, Wilcoxon signed-rank on per-participant accuracy, bootstrap CIs.
//!
//! ```text
//! cargo run -p survmrl --example study_stats
//! ```

use std::fs::File;

use survmrl::studystats::{
    load_survey, mcnemar_test, summarize_survey, McNemarMethod, PairedBinary, SurveyConfig,
};

fn main() -> survmrl::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/survey.csv");
    let responses = load_survey(File::open(path)?)?;

    let km_item = PairedBinary::from_pairs(
        responses.iter().filter(|r| r.item == "KM").map(|r| (r.pre, r.post)),
    );
    println!("KM item: {} lost, {} gained, {} unchanged", km_item.b, km_item.c, km_item.n_concordant);
    for method in [McNemarMethod::ContinuityCorrected, McNemarMethod::Exact] {
        let res = mcnemar_test(&km_item, method)?;
        println!("  {method:?}: statistic {:.3}, p = {:.4}", res.statistic, res.p_value);
    }

    let config = SurveyConfig {
        bootstrap_replicates: 2000,
        seed: 7,
        band: (0.025, 0.975),
        mcnemar: McNemarMethod::ContinuityCorrected,
    };
    println!();
    for row in summarize_survey(&responses, &config)? {
        let p = row.result.map_or("-".to_string(), |r| format!("{:.4}", r.p_value));
        println!(
            "{:<8} pre {:>5.1}%  post {:>5.1}%  gain {:>5.1} [{:.1}, {:.1}]  {} p = {p}",
            row.scope,
            100.0 * row.pre.estimate,
            100.0 * row.post.estimate,
            100.0 * row.gain.estimate,
            100.0 * row.gain.lower,
            100.0 * row.gain.upper,
            row.test,
        );
    }
    Ok(())
}
