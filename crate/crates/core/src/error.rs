use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report. Messages are printed verbatim by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,
    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("MRL undefined: zero survival at t = {t}")]
    ZeroSurvival { t: f64 },

    #[error("insufficient tail data: {found} exceedances, need at least 2")]
    InsufficientTailData { found: usize },
    #[error("all tail observations censored")]
    AllTailCensored,
    #[error("infinite-mean tail fit: shape estimate {shape} reached the upper bound")]
    InfiniteMeanTail { shape: f64 },
    #[error("infinite mean residual life: shape {shape} >= 1")]
    InfiniteMrl { shape: f64 },

    #[error("threshold too high: fewer than min_exceedances tail observations (u = {threshold}, {found} above, need {required})")]
    ThresholdTooHigh {
        threshold: f64,
        found: usize,
        required: usize,
    },
    #[error("no events for quantile threshold")]
    NoEventsForQuantile,

    #[error("no common follow-up window")]
    NoCommonWindow,
    #[error("ratio undefined: denominator survival is zero")]
    RatioUndefined,
    #[error("no overlapping MRL domain")]
    NoOverlappingMrlDomain,
    #[error("need at least one permutation")]
    NoPermutations,
    #[error("pooled sample too small for permutation: {0} subjects, need at least 4")]
    PooledTooSmall(usize),
    #[error("unsupported comparison kind for this operation: {0}")]
    UnsupportedKind(&'static str),

    #[error("no discordant pairs")]
    NoDiscordantPairs,
    #[error("no nonzero differences")]
    NoNonzeroDifferences,
    #[error("empty scores")]
    EmptyScores,
    #[error("paired score vectors do not match: {0}")]
    Unpaired(String),

    #[error("nothing to plot")]
    NothingToPlot,
    #[error("envelope grid mismatch")]
    EnvelopeGridMismatch,
    #[error("empty curve")]
    EmptyCurve,
    #[error("unknown group: {0}")]
    UnknownGroup(String),
}
