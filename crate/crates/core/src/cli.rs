//! Command-line entry point.
//!
//! Exit codes: 0 on success, 1 on data or estimation errors (message on
//! stderr), 2 on flag-grammar errors (usage on stderr).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::compare::{
    mrl_difference, permutation_envelope, survival_difference, survival_ratio, ComparisonCurve,
    ComparisonKind, Envelope, EnvelopeConfig,
};
use crate::dataset::{load_dataset, ColumnSpec, SurvivalSample};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::km::{km_fit, KmCurve};
use crate::mrl::{fit_hybrid_mrl, MrlCurve, ThresholdConfig, ThresholdMode};
use crate::render::{export_curve_csv, export_grouped_csv, render_plot_svg, CurveTable, PlotSpec};
use crate::studystats::{load_survey, summarize_survey, McNemarMethod, SummaryRow, SurveyConfig};

#[derive(Debug, Parser)]
#[command(
    name = "survmrl",
    version,
    about = "Kaplan-Meier, hybrid mean residual life and group comparisons for right-censored data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Kaplan-Meier curves for one or more groups.
    Km(KmArgs),
    /// Hybrid mean residual life curves for one or more groups.
    Mrl(MrlArgs),
    /// Survival difference between two groups with a permutation envelope.
    Diff(CompareArgs),
    /// Survival ratio between two groups with a permutation envelope.
    Ratio(CompareArgs),
    /// Difference in mean residual life between two groups.
    MrlDiff(MrlArgs),
    /// Paired pre/post accuracy statistics from a survey CSV.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct IoArgs {
    /// Input CSV with columns time,status[,group].
    #[arg(long)]
    input: PathBuf,
    /// SVG output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV output path.
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Comma-separated group labels.
    #[arg(long, value_delimiter = ',')]
    groups: Vec<String>,
}

#[derive(Debug, Args)]
struct KmArgs {
    #[command(flatten)]
    io: IoArgs,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    /// Explicit threshold time u.
    #[arg(long, conflicts_with = "threshold_quantile")]
    threshold: Option<f64>,
    /// Quantile of event times used as threshold (default 0.8).
    #[arg(long, value_parser = parse_open_unit)]
    threshold_quantile: Option<f64>,
    /// Minimum observations above the threshold.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    min_exceedances: u64,
}

impl ThresholdArgs {
    fn config(&self) -> ThresholdConfig {
        let mode = match (self.threshold, self.threshold_quantile) {
            (Some(u), _) => ThresholdMode::Explicit(u),
            (None, q) => ThresholdMode::Quantile(q.unwrap_or(0.8)),
        };
        ThresholdConfig {
            mode,
            min_exceedances: self.min_exceedances as usize,
        }
    }

    fn describe(&self) -> String {
        let mode = match self.config().mode {
            ThresholdMode::Explicit(u) => format!("threshold={u}"),
            ThresholdMode::Quantile(q) => format!("threshold_quantile={q}"),
        };
        format!("{mode} min_exceedances={}", self.min_exceedances)
    }
}

#[derive(Debug, Args)]
struct MrlArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    threshold: ThresholdArgs,
    /// Comma-separated evaluation times.
    #[arg(long, value_delimiter = ',', value_parser = parse_time)]
    grid: Vec<f64>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Label permutations for the envelope; 0 disables it.
    #[arg(long, default_value_t = 1000)]
    permutations: usize,
    /// RNG seed, required whenever permutations are requested.
    #[arg(long)]
    seed: Option<u64>,
    /// Lower and upper band quantiles.
    #[arg(long, value_parser = parse_band, default_value = "0.025,0.975")]
    band: (f64, f64),
    /// Comma-separated evaluation times.
    #[arg(long, value_delimiter = ',', value_parser = parse_time)]
    grid: Vec<f64>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// Survey CSV with columns participant,item,pre,post.
    #[arg(long)]
    input: PathBuf,
    /// Plain-text summary output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV summary output path.
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Bootstrap replicates for the intervals.
    #[arg(long, default_value_t = 2000, value_parser = clap::value_parser!(u64).range(1..))]
    bootstrap: u64,
    /// RNG seed for the bootstrap.
    #[arg(long, required = true)]
    seed: u64,
    #[arg(long, value_parser = parse_band, default_value = "0.025,0.975")]
    band: (f64, f64),
    /// Use the exact binomial McNemar test instead of the corrected chi-square.
    #[arg(long)]
    exact: bool,
}

fn parse_open_unit(s: &str) -> std::result::Result<f64, String> {
    let q: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if q > 0.0 && q < 1.0 {
        Ok(q)
    } else {
        Err(format!("{q} must lie strictly between 0 and 1"))
    }
}

fn parse_time(s: &str) -> std::result::Result<f64, String> {
    let t: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if t.is_finite() && t >= 0.0 {
        Ok(t)
    } else {
        Err(format!("{t} must be a finite non-negative time"))
    }
}

fn parse_band(s: &str) -> std::result::Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("`{s}` must be two comma-separated quantiles"))?;
    let lo: f64 = lo.trim().parse().map_err(|_| format!("`{lo}` is not a number"))?;
    let hi: f64 = hi.trim().parse().map_err(|_| format!("`{hi}` is not a number"))?;
    if (0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi) && lo < hi {
        Ok((lo, hi))
    } else {
        Err(format!("band ({lo}, {hi}) must satisfy 0 <= lower < upper <= 1"))
    }
}

fn grid_spec(points: &[f64]) -> GridSpec {
    if points.is_empty() {
        GridSpec::Default
    } else {
        GridSpec::Explicit(points.to_vec())
    }
}

fn display(path: &Option<PathBuf>) -> String {
    path.as_ref().map_or("-".into(), |p| p.display().to_string())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = File::create(path)?;
    f.write_all(contents.as_bytes())?;
    Ok(())
}

fn load_groups(io: &IoArgs) -> Result<BTreeMap<String, SurvivalSample>> {
    let file = File::open(&io.input)?;
    load_dataset(BufReader::new(file), &ColumnSpec::default())
}

fn pick<'a>(
    groups: &'a BTreeMap<String, SurvivalSample>,
    wanted: &[String],
) -> Result<Vec<&'a SurvivalSample>> {
    if wanted.is_empty() {
        return Ok(groups.values().collect());
    }
    wanted
        .iter()
        .map(|g| groups.get(g).ok_or_else(|| Error::UnknownGroup(g.clone())))
        .collect()
}

fn pick_two<'a>(
    groups: &'a BTreeMap<String, SurvivalSample>,
    wanted: &[String],
) -> Result<(&'a SurvivalSample, &'a SurvivalSample)> {
    let picked = pick(groups, wanted)?;
    match picked.as_slice() {
        [a, b] => Ok((a, b)),
        other => Err(Error::InvalidConfig(format!(
            "exactly two groups are required, got {} (use --groups A,B)",
            other.len()
        ))),
    }
}

fn write_tables(path: &Option<PathBuf>, tables: &[(&str, CurveTable)]) -> Result<()> {
    let Some(path) = path else { return Ok(()) };
    let text = if let [(_, table)] = tables {
        export_curve_csv(table)?
    } else {
        let refs: Vec<(Option<&str>, &CurveTable)> =
            tables.iter().map(|(g, t)| (Some(*g), t)).collect();
        export_grouped_csv(&refs)?
    };
    write_file(path, &text)
}

fn write_svg(path: &Option<PathBuf>, spec: &PlotSpec) -> Result<()> {
    match path {
        Some(p) => write_file(p, &render_plot_svg(spec)?),
        None => Ok(()),
    }
}

fn run_km(args: &KmArgs) -> Result<String> {
    let groups = load_groups(&args.io)?;
    let samples = pick(&groups, &args.io.groups)?;
    let curves: Vec<KmCurve> = samples.iter().map(|s| km_fit(s)).collect();
    let refs: Vec<&KmCurve> = curves.iter().collect();
    write_svg(&args.io.out, &PlotSpec::kaplan_meier(&refs))?;
    let tables: Vec<(&str, CurveTable)> =
        curves.iter().map(|c| (c.group(), CurveTable::from(c))).collect();
    write_tables(&args.io.out_csv, &tables)?;
    let parts: Vec<String> = curves
        .iter()
        .map(|c| {
            format!(
                "{}: n={} events={} knots={}",
                c.group(),
                c.n(),
                c.deaths().iter().sum::<usize>(),
                c.event_times().len()
            )
        })
        .collect();
    Ok(format!(
        "km input={} out={} out_csv={} | {}",
        args.io.input.display(),
        display(&args.io.out),
        display(&args.io.out_csv),
        parts.join("; ")
    ))
}

fn describe_mrl(curve: &MrlCurve) -> String {
    let gpd = curve.gpd();
    format!(
        "{}: u={} exceedances={} xi={:.6} sigma={:.6} converged={} mrl_u={:.6} grid={}",
        curve.group(),
        curve.threshold(),
        gpd.n_exceedances,
        gpd.shape,
        gpd.scale,
        gpd.converged,
        curve.mrl_at_threshold(),
        curve.grid().len()
    )
}

fn fit_mrls(
    samples: &[&SurvivalSample],
    args: &MrlArgs,
    stderr: &mut dyn Write,
) -> Result<Vec<MrlCurve>> {
    let config = args.threshold.config();
    let grid = grid_spec(&args.grid);
    let curves = samples
        .iter()
        .map(|s| fit_hybrid_mrl(s, &config, &grid))
        .collect::<Result<Vec<_>>>()?;
    for c in curves.iter().filter(|c| !c.gpd().converged) {
        let _ = writeln!(
            stderr,
            "warning: GPD fit for group {} stopped at the iteration limit",
            c.group()
        );
    }
    Ok(curves)
}

fn grid_desc(grid: &[f64]) -> String {
    if grid.is_empty() {
        "default".into()
    } else {
        grid.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
    }
}

fn run_mrl(args: &MrlArgs, stderr: &mut dyn Write) -> Result<String> {
    let groups = load_groups(&args.io)?;
    let samples = pick(&groups, &args.io.groups)?;
    let curves = fit_mrls(&samples, args, stderr)?;
    let refs: Vec<&MrlCurve> = curves.iter().collect();
    write_svg(&args.io.out, &PlotSpec::mean_residual_life(&refs))?;
    let tables: Vec<(&str, CurveTable)> =
        curves.iter().map(|c| (c.group(), CurveTable::from(c))).collect();
    write_tables(&args.io.out_csv, &tables)?;
    Ok(format!(
        "mrl input={} out={} out_csv={} {} grid={} | {}",
        args.io.input.display(),
        display(&args.io.out),
        display(&args.io.out_csv),
        args.threshold.describe(),
        grid_desc(&args.grid),
        curves.iter().map(describe_mrl).collect::<Vec<_>>().join("; ")
    ))
}

fn run_mrl_diff(args: &MrlArgs, stderr: &mut dyn Write) -> Result<String> {
    let groups = load_groups(&args.io)?;
    let (a, b) = pick_two(&groups, &args.io.groups)?;
    let curves = fit_mrls(&[a, b], args, stderr)?;
    let diff = mrl_difference(&curves[0], &curves[1])?;
    write_svg(&args.io.out, &PlotSpec::comparison(&diff, None))?;
    write_tables(&args.io.out_csv, &[("", CurveTable::from(&diff))])?;
    Ok(format!(
        "mrl-diff input={} out={} out_csv={} groups={},{} {} grid={} common_window=[{}, {}] points={} | {}",
        args.io.input.display(),
        display(&args.io.out),
        display(&args.io.out_csv),
        a.group(),
        b.group(),
        args.threshold.describe(),
        grid_desc(&args.grid),
        diff.grid[0],
        diff.window_end,
        diff.grid.len(),
        curves.iter().map(describe_mrl).collect::<Vec<_>>().join("; ")
    ))
}

fn run_compare(args: &CompareArgs, kind: ComparisonKind) -> Result<String> {
    let groups = load_groups(&args.io)?;
    let (a, b) = pick_two(&groups, &args.io.groups)?;
    let (km_a, km_b) = (km_fit(a), km_fit(b));
    let grid = grid_spec(&args.grid);
    let curve: ComparisonCurve = match kind {
        ComparisonKind::SurvDiff => survival_difference(&km_a, &km_b, &grid)?,
        _ => survival_ratio(&km_a, &km_b, &grid)?,
    };
    let envelope: Option<Envelope> = match (args.permutations, args.seed) {
        (0, _) => None,
        (b_count, Some(seed)) => {
            let config = EnvelopeConfig::new(b_count, seed).with_band(args.band.0, args.band.1);
            Some(permutation_envelope(a, b, kind, &curve.grid, &config)?)
        }
        (_, None) => unreachable!("seed presence is checked at parse time"),
    };
    write_svg(&args.io.out, &PlotSpec::comparison(&curve, envelope.as_ref()))?;
    let mut table = CurveTable::from(&curve);
    if let Some(env) = &envelope {
        table = table.with_envelope(env)?;
    }
    write_tables(&args.io.out_csv, &[("", table)])?;

    let env_desc = match &envelope {
        Some(env) => {
            let min_defined = env.n_defined.iter().copied().min().unwrap_or(0);
            format!(
                "permutations={} seed={} band={},{} coverage={:.4} min_defined={}",
                env.n_permutations,
                env.seed,
                env.band.0,
                env.band.1,
                env.coverage(&curve)?,
                min_defined
            )
        }
        None => "permutations=0".into(),
    };
    Ok(format!(
        "{} input={} out={} out_csv={} groups={},{} grid={} points={} window_end={} {}",
        if kind == ComparisonKind::SurvDiff { "diff" } else { "ratio" },
        args.io.input.display(),
        display(&args.io.out),
        display(&args.io.out_csv),
        a.group(),
        b.group(),
        grid_desc(&args.grid),
        curve.grid.len(),
        curve.window_end,
        env_desc
    ))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or("NA".into(), |x| x.to_string())
}

fn stats_csv(rows: &[SummaryRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "scope", "n", "pre", "pre_lower", "pre_upper", "post", "post_lower", "post_upper", "gain",
        "gain_lower", "gain_upper", "test", "statistic", "p_value",
    ])?;
    for r in rows {
        w.write_record([
            r.scope.clone(),
            r.n_participants.to_string(),
            r.pre.estimate.to_string(),
            r.pre.lower.to_string(),
            r.pre.upper.to_string(),
            r.post.estimate.to_string(),
            r.post.lower.to_string(),
            r.post.upper.to_string(),
            r.gain.estimate.to_string(),
            r.gain.lower.to_string(),
            r.gain.upper.to_string(),
            r.test.to_string(),
            fmt_opt(r.result.map(|t| t.statistic)),
            fmt_opt(r.result.map(|t| t.p_value)),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn stats_text(rows: &[SummaryRow]) -> String {
    let pct = |x: f64| format!("{:.1}", x * 100.0);
    let mut out = format!(
        "{:<12} {:>4}  {:<22} {:<22} {:<24} {:<14} {:>8}\n",
        "scope", "n", "pre % [CI]", "post % [CI]", "gain pts [CI]", "test", "p"
    );
    for r in rows {
        let ci = |c: &crate::studystats::ProportionCi| {
            format!("{} [{} - {}]", pct(c.estimate), pct(c.lower), pct(c.upper))
        };
        out += &format!(
            "{:<12} {:>4}  {:<22} {:<22} {:<24} {:<14} {:>8}\n",
            r.scope,
            r.n_participants,
            ci(&r.pre),
            ci(&r.post),
            ci(&r.gain),
            r.test,
            r.result.map_or("NA".into(), |t| format!("{:.4}", t.p_value))
        );
    }
    out
}

fn run_stats(args: &StatsArgs, stdout: &mut dyn Write) -> Result<String> {
    let responses = load_survey(BufReader::new(File::open(&args.input)?))?;
    let config = SurveyConfig {
        bootstrap_replicates: args.bootstrap as usize,
        seed: args.seed,
        band: args.band,
        mcnemar: if args.exact {
            McNemarMethod::Exact
        } else {
            McNemarMethod::ContinuityCorrected
        },
    };
    let rows = summarize_survey(&responses, &config)?;
    let text = stats_text(&rows);
    if let Some(p) = &args.out {
        write_file(p, &text)?;
    }
    if let Some(p) = &args.out_csv {
        write_file(p, &stats_csv(&rows)?)?;
    }
    let _ = stdout.write_all(text.as_bytes());
    Ok(format!(
        "stats input={} out={} out_csv={} bootstrap={} seed={} band={},{} mcnemar={} responses={} rows={}",
        args.input.display(),
        display(&args.out),
        display(&args.out_csv),
        args.bootstrap,
        args.seed,
        args.band.0,
        args.band.1,
        if args.exact { "exact" } else { "continuity_corrected" },
        responses.len(),
        rows.len()
    ))
}

fn parse(args: Vec<OsString>) -> std::result::Result<Cli, clap::Error> {
    let cli = Cli::try_parse_from(args)?;
    if let Command::Diff(c) | Command::Ratio(c) = &cli.command {
        if c.permutations > 0 && c.seed.is_none() {
            return Err(Cli::command().error(
                ErrorKind::MissingRequiredArgument,
                "--seed is required when --permutations is greater than 0",
            ));
        }
    }
    Ok(cli)
}

/// Runs the CLI with explicit output streams and returns the exit code.
pub fn run_cli_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match parse(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(rendered.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(rendered.as_bytes());
                    2
                }
            };
        }
    };
    let outcome = match &cli.command {
        Command::Km(a) => run_km(a),
        Command::Mrl(a) => run_mrl(a, stderr),
        Command::Diff(a) => run_compare(a, ComparisonKind::SurvDiff),
        Command::Ratio(a) => run_compare(a, ComparisonKind::SurvRatio),
        Command::MrlDiff(a) => run_mrl_diff(a, stderr),
        Command::Stats(a) => run_stats(a, stdout),
    };
    match outcome {
        Ok(summary) => {
            let _ = writeln!(stdout, "{summary}");
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

/// Runs the CLI against the process's stdout and stderr.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}
