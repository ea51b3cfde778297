//! Regenerates the synthetic datasets under `data/`.
//!
//! ```text
//! cargo run -p survmrl --example make_sample_data
//! ```

use std::fs;
use std::path::Path;

use survmrl::dataset::{write_dataset, Observation, SurvivalSample};
use survmrl::simulate::exponential_sample;

fn rounded(sample: SurvivalSample) -> survmrl::Result<SurvivalSample> {
    let obs = sample
        .observations()
        .iter()
        .map(|o| Observation::new((o.time * 1e4).round() / 1e4, o.event, o.group.clone()))
        .collect::<survmrl::Result<Vec<_>>>()?;
    SurvivalSample::new(sample.group(), obs)
}

fn survey_csv() -> String {
    // 32 participants, two items. KM: 18 → 26 correct with one
    // correct→incorrect switch; MRL: 14 → 26 correct with none.
    let mut out = String::from("participant,item,pre,post\n");
    for p in 1..=32 {
        let km = match p {
            1..=17 => (1, 1),
            18 => (1, 0),
            19..=27 => (0, 1),
            _ => (0, 0),
        };
        let mrl = match p {
            1..=14 => (1, 1),
            15..=26 => (0, 1),
            _ => (0, 0),
        };
        out += &format!("P{p:02},KM,{},{}\nP{p:02},MRL,{},{}\n", km.0, km.1, mrl.0, mrl.1);
    }
    out
}

fn main() -> survmrl::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    fs::create_dir_all(&dir)?;

    // A lives twice as long as B on average (MRL 2 vs 1).
    let a = rounded(exponential_sample("A", 150, 0.5, 0.1, 2024)?)?;
    let b = rounded(exponential_sample("B", 150, 1.0, 0.2, 2025)?)?;
    write_dataset(fs::File::create(dir.join("two_groups.csv"))?, [&a, &b])?;

    let single = rounded(exponential_sample("all", 400, 0.5, 1.0 / 6.0, 7)?)?;
    let mut text = Vec::new();
    write_dataset(&mut text, [&single])?;
    // drop the group column: single-sample files may omit it
    let text = String::from_utf8(text).expect("utf-8");
    let stripped: String = text
        .lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string() + "\n")
        .collect();
    fs::write(dir.join("single_group.csv"), stripped)?;

    fs::write(dir.join("survey.csv"), survey_csv())?;
    println!("wrote datasets to {}", dir.display());
    Ok(())
}
