//! Paired statistics for pre/post interpretation studies: McNemar's test,
//! the Wilcoxon signed-rank test and percentile-bootstrap intervals for
//! accuracy proportions.

use std::collections::BTreeMap;
use std::io::Read;

use rand::Rng;
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;
use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::rng::{quantile_sorted, replicate_rng};

/// Discordant-pair counts of a paired binary outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PairedBinary {
    /// correct → incorrect
    pub b: u64,
    /// incorrect → correct
    pub c: u64,
    pub n_concordant: u64,
}

impl PairedBinary {
    pub fn from_pairs<I: IntoIterator<Item = (bool, bool)>>(pairs: I) -> Self {
        let mut out = Self::default();
        for (pre, post) in pairs {
            match (pre, post) {
                (true, false) => out.b += 1,
                (false, true) => out.c += 1,
                _ => out.n_concordant += 1,
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum McNemarMethod {
    #[default]
    ContinuityCorrected,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// P(X ≤ k) for X ~ Binomial(n, ½).
fn binomial_half_cdf(k: u64, n: u64) -> f64 {
    let ln_half_n = n as f64 * std::f64::consts::LN_2;
    (0..=k)
        .map(|i| (ln_binomial(n, i) - ln_half_n).exp())
        .sum()
}

/// McNemar's test on the discordant pairs.
///
/// The continuity-corrected statistic is `(|b − c| − 1)² / (b + c)` against
/// a 1-df chi-square; the exact variant reports `min(b, c)` with the
/// two-sided binomial p-value `2·P(X ≤ min(b, c))`, capped at 1.
pub fn mcnemar_test(pairs: &PairedBinary, method: McNemarMethod) -> Result<TestResult> {
    let n = pairs.b + pairs.c;
    if n == 0 {
        return Err(Error::NoDiscordantPairs);
    }
    Ok(match method {
        McNemarMethod::ContinuityCorrected => {
            let diff = pairs.b.abs_diff(pairs.c) as f64 - 1.0;
            let statistic = diff * diff / n as f64;
            TestResult {
                statistic,
                p_value: erfc((statistic / 2.0).sqrt()),
            }
        }
        McNemarMethod::Exact => {
            let k = pairs.b.min(pairs.c);
            TestResult {
                statistic: k as f64,
                p_value: (2.0 * binomial_half_cdf(k, n)).min(1.0),
            }
        }
    })
}

/// Per-participant scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector {
    ids: Vec<String>,
    scores: Vec<f64>,
}

impl ScoreVector {
    pub fn new(ids: Vec<String>, scores: Vec<f64>) -> Result<Self> {
        if scores.is_empty() {
            return Err(Error::EmptyScores);
        }
        if ids.len() != scores.len() {
            return Err(Error::Unpaired(format!(
                "{} ids for {} scores",
                ids.len(),
                scores.len()
            )));
        }
        if scores.iter().any(|s| !s.is_finite()) {
            return Err(Error::Domain("scores must be finite".into()));
        }
        Ok(Self { ids, scores })
    }

    /// Scores with ids `"1"`, `"2"`, ….
    pub fn from_scores(scores: Vec<f64>) -> Result<Self> {
        let ids = (1..=scores.len()).map(|i| i.to_string()).collect();
        Self::new(ids, scores)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.scores.iter().sum::<f64>() / self.scores.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// Sum of ranks of the positive differences.
    pub w_plus: f64,
    pub n_nonzero: usize,
    pub p_value: f64,
    /// Exact enumeration (true) or tie-corrected normal approximation.
    pub exact: bool,
}

/// Largest number of nonzero differences handled by exact enumeration.
pub const WILCOXON_EXACT_MAX: usize = 25;

/// Average ranks of `values` (1-based), ties sharing their mean rank.
pub(crate) fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j + 2) as f64 / 2.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Signed-rank test on paired differences (`post − pre`). Zero differences
/// are dropped.
pub fn wilcoxon_signed_rank_differences(differences: &[f64]) -> Result<WilcoxonResult> {
    if differences.iter().any(|d| !d.is_finite()) {
        return Err(Error::Domain("differences must be finite".into()));
    }
    let nonzero: Vec<f64> = differences.iter().copied().filter(|&d| d != 0.0).collect();
    let n = nonzero.len();
    if n == 0 {
        return Err(Error::NoNonzeroDifferences);
    }
    let abs: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&abs);
    let w_plus: f64 = nonzero
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();

    if n <= WILCOXON_EXACT_MAX {
        // Distribution of the doubled rank sum over all 2ⁿ sign patterns.
        let doubled: Vec<usize> = ranks.iter().map(|r| (r * 2.0).round() as usize).collect();
        let total: usize = doubled.iter().sum();
        let mut counts = vec![0u64; total + 1];
        counts[0] = 1;
        for &r in &doubled {
            for s in (r..=total).rev() {
                counts[s] += counts[s - r];
            }
        }
        let observed = (w_plus * 2.0).round() as usize;
        let below: u64 = counts[..=observed].iter().sum();
        let above: u64 = counts[observed..].iter().sum();
        let patterns = (1u64 << n) as f64;
        let p = (2.0 * below.min(above) as f64 / patterns).min(1.0);
        return Ok(WilcoxonResult {
            w_plus,
            n_nonzero: n,
            p_value: p,
            exact: true,
        });
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let mut tie_correction = 0.0;
    let mut sorted = abs.clone();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|&&x| x == sorted[i]).count();
        let t = j as f64;
        tie_correction += t * t * t - t;
        i += j;
    }
    let variance = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_correction / 48.0;
    let deviation = (w_plus - mean).abs();
    let z = (deviation - 0.5).max(0.0) / variance.sqrt();
    let normal = Normal::standard();
    Ok(WilcoxonResult {
        w_plus,
        n_nonzero: n,
        p_value: (2.0 * (1.0 - normal.cdf(z))).min(1.0),
        exact: false,
    })
}

/// Signed-rank test on two score vectors matched by participant id.
pub fn wilcoxon_signed_rank(pre: &ScoreVector, post: &ScoreVector) -> Result<WilcoxonResult> {
    let post_by_id: BTreeMap<&str, f64> = post
        .ids
        .iter()
        .map(String::as_str)
        .zip(post.scores.iter().copied())
        .collect();
    if post_by_id.len() != post.len() || pre.len() != post.len() {
        return Err(Error::Unpaired("participant ids differ between vectors".into()));
    }
    let differences = pre
        .ids
        .iter()
        .zip(&pre.scores)
        .map(|(id, before)| {
            post_by_id
                .get(id.as_str())
                .map(|after| after - before)
                .ok_or_else(|| Error::Unpaired(format!("participant {id} has no post score")))
        })
        .collect::<Result<Vec<_>>>()?;
    wilcoxon_signed_rank_differences(&differences)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProportionCi {
    /// Mean of the per-participant scores.
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub replicates: usize,
}

/// Percentile bootstrap over participants. Replicate `r` resamples with
/// RNG stream `r` of `seed`.
pub fn bootstrap_proportion_ci(
    scores: &ScoreVector,
    replicates: usize,
    seed: u64,
    band: (f64, f64),
) -> Result<ProportionCi> {
    if scores.is_empty() {
        return Err(Error::EmptyScores);
    }
    if replicates == 0 {
        return Err(Error::InvalidConfig("bootstrap needs at least one replicate".into()));
    }
    let (lo, hi) = band;
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
        return Err(Error::InvalidConfig(format!(
            "band quantiles must satisfy 0 <= lower <= upper <= 1, got ({lo}, {hi})"
        )));
    }
    let n = scores.len();
    let mut means: Vec<f64> = (0..replicates)
        .map(|r| {
            let mut rng = replicate_rng(seed, r as u64);
            let total: f64 = (0..n).map(|_| scores.scores[rng.random_range(0..n)]).sum();
            total / n as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    Ok(ProportionCi {
        estimate: scores.mean(),
        lower: quantile_sorted(&means, lo),
        upper: quantile_sorted(&means, hi),
        replicates,
    })
}

/// One participant's answer to one item before and after the intervention.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyResponse {
    pub participant: String,
    pub item: String,
    pub pre: bool,
    pub post: bool,
}

/// Reads `participant,item,pre,post` rows (pre/post in {0, 1}).
pub fn load_survey<R: Read>(source: R) -> Result<Vec<SurveyResponse>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = reader.headers()?.clone();
    let expected = ["participant", "item", "pre", "post"];
    let mut cols = [0usize; 4];
    for (slot, name) in cols.iter_mut().zip(expected) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("missing required column `{name}`")))?;
    }
    if let Some(extra) = headers.iter().find(|h| !expected.contains(h)) {
        return Err(Error::Schema(format!("unknown column `{extra}`")));
    }

    let mut seen = std::collections::BTreeSet::new();
    let mut rows = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        let text = |i: usize| record.get(cols[i]).unwrap_or("").to_string();
        let flag = |i: usize| match record.get(cols[i]).unwrap_or("") {
            "1" => Ok(true),
            "0" => Ok(false),
            other => Err(Error::Parse {
                row,
                message: format!("`{}` must be 0 or 1, got `{other}`", expected[i]),
            }),
        };
        let response = SurveyResponse {
            participant: text(0),
            item: text(1),
            pre: flag(2)?,
            post: flag(3)?,
        };
        if response.participant.is_empty() || response.item.is_empty() {
            return Err(Error::Parse {
                row,
                message: "participant and item must be non-empty".into(),
            });
        }
        if !seen.insert((response.participant.clone(), response.item.clone())) {
            return Err(Error::Parse {
                row,
                message: format!(
                    "duplicate response for participant {} item {}",
                    response.participant, response.item
                ),
            });
        }
        rows.push(response);
    }
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(rows)
}

/// Accuracy summary for one item or for all items pooled per participant.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scope: String,
    pub n_participants: usize,
    pub pre: ProportionCi,
    pub post: ProportionCi,
    /// Per-participant post − pre, in proportion units.
    pub gain: ProportionCi,
    pub test: &'static str,
    /// `None` when the test is undefined (no discordant pairs or no change).
    pub result: Option<TestResult>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurveyConfig {
    pub bootstrap_replicates: usize,
    pub seed: u64,
    pub band: (f64, f64),
    pub mcnemar: McNemarMethod,
}

fn summarize(
    scope: String,
    ids: Vec<String>,
    pre: Vec<f64>,
    post: Vec<f64>,
    config: &SurveyConfig,
) -> Result<(ScoreVector, ScoreVector, SummaryRow)> {
    let gain: Vec<f64> = post.iter().zip(&pre).map(|(a, b)| a - b).collect();
    let pre = ScoreVector::new(ids.clone(), pre)?;
    let post = ScoreVector::new(ids.clone(), post)?;
    let gain_v = ScoreVector::new(ids, gain)?;
    let ci = |v: &ScoreVector| {
        bootstrap_proportion_ci(v, config.bootstrap_replicates, config.seed, config.band)
    };
    let row = SummaryRow {
        scope,
        n_participants: pre.len(),
        pre: ci(&pre)?,
        post: ci(&post)?,
        gain: ci(&gain_v)?,
        test: "",
        result: None,
    };
    Ok((pre, post, row))
}

/// Per-item McNemar tests and an overall Wilcoxon test on per-participant
/// accuracy, each with bootstrap intervals. Items appear in sorted order,
/// followed by the `overall` row.
pub fn summarize_survey(responses: &[SurveyResponse], config: &SurveyConfig) -> Result<Vec<SummaryRow>> {
    let mut by_item: BTreeMap<&str, Vec<&SurveyResponse>> = BTreeMap::new();
    let mut by_participant: BTreeMap<&str, (f64, f64, usize)> = BTreeMap::new();
    for r in responses {
        by_item.entry(&r.item).or_default().push(r);
        let entry = by_participant.entry(&r.participant).or_default();
        entry.0 += f64::from(u8::from(r.pre));
        entry.1 += f64::from(u8::from(r.post));
        entry.2 += 1;
    }

    let mut rows = Vec::new();
    for (item, answers) in by_item {
        let ids = answers.iter().map(|r| r.participant.clone()).collect();
        let pre = answers.iter().map(|r| f64::from(u8::from(r.pre))).collect();
        let post = answers.iter().map(|r| f64::from(u8::from(r.post))).collect();
        let (_, _, mut row) = summarize(item.to_string(), ids, pre, post, config)?;
        let pairs = PairedBinary::from_pairs(answers.iter().map(|r| (r.pre, r.post)));
        row.test = match config.mcnemar {
            McNemarMethod::ContinuityCorrected => "mcnemar_cc",
            McNemarMethod::Exact => "mcnemar_exact",
        };
        row.result = match mcnemar_test(&pairs, config.mcnemar) {
            Ok(r) => Some(r),
            Err(Error::NoDiscordantPairs) => None,
            Err(e) => return Err(e),
        };
        rows.push(row);
    }

    let ids = by_participant.keys().map(|k| k.to_string()).collect();
    let pre = by_participant.values().map(|(p, _, k)| p / *k as f64).collect();
    let post = by_participant.values().map(|(_, q, k)| q / *k as f64).collect();
    let (pre_v, post_v, mut overall) = summarize("overall".into(), ids, pre, post, config)?;
    overall.test = "wilcoxon";
    overall.result = match wilcoxon_signed_rank(&pre_v, &post_v) {
        Ok(w) => Some(TestResult {
            statistic: w.w_plus,
            p_value: w.p_value,
        }),
        Err(Error::NoNonzeroDifferences) => None,
        Err(e) => return Err(e),
    };
    rows.push(overall);
    Ok(rows)
}
