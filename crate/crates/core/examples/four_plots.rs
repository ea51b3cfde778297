//! The four standard figures for a two-group comparison, driven through the
//! command-line entry point exactly as a user would run it.
//!
//! ```text
//! cargo run -p survmrl --example four_plots
//! ```

use survmrl::cli::run_cli;

fn main() {
    let input = concat!(env!("CARGO_MANIFEST_DIR"), "/data/two_groups.csv");
    std::fs::create_dir_all("plots").expect("create plots/");
    let runs: [&[&str]; 4] = [
        &["km", "--out", "plots/fig_km.svg"],
        &["mrl", "--out", "plots/fig_mrl.svg"],
        &["diff", "--groups", "A,B", "--seed", "42", "--out", "plots/fig_diff.svg"],
        &["mrl-diff", "--groups", "A,B", "--out", "plots/fig_mrl_diff.svg"],
    ];
    for args in runs {
        let argv = ["survmrl", args[0], "--input", input]
            .into_iter()
            .chain(args[1..].iter().copied());
        let code = run_cli(argv);
        if code != 0 {
            std::process::exit(code);
        }
    }
}
