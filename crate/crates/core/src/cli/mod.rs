//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 on a computation failure or golden
//! mismatch, 2 on a usage or validation error.

pub mod golden;
pub mod render;

use std::ffi::OsString;
use std::fs::File;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    asymptotic_value, kappa, lambda_bounds, tv_distance, PoissonLaw, TvReport,
};
use crate::distribution::{complete_suffix_distribution, Mode};
use crate::error::Error;
use crate::profiles::{load_profile, ProfileFormat, SuccessProfile};
use crate::rules::{
    certify_mode, epsilon_gap, mean_threshold, odds_threshold, poisson_threshold,
    win_probability_of_threshold, ImplicationCheck, ModeCertificate, Rule, ThresholdResult,
};
use crate::simulator::{simulate_compare, simulate_rule, PairedComparison, SimulationReport};

use golden::{Golden, GoldenCell, SIZES, THETAS, VALUE_TOL};
use render::{Cell, Format, Report};

/// Two-sided 95% normal quantile used for printed confidence intervals.
const CI_Z: f64 = 1.96;

#[derive(Debug, Parser)]
#[command(
    name = "last-success",
    version,
    about = "Threshold rules for the m-th last success"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output encoding; defaults to table on a terminal, json otherwise.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Thresholds and win probabilities of the selected rules.
    Threshold {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, value_enum, default_value_t = RuleSelector::All)]
        rule: RuleSelector,
    },
    /// Win probability of an explicit threshold.
    Winprob {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long)]
        k: usize,
    },
    /// Odds versus mean rule over the Karamata-Stirling grid.
    Compare {
        /// Target ranks (repeat or comma-separate).
        #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2])]
        m: Vec<usize>,
        /// Check every cell against the embedded reference values.
        #[arg(long)]
        golden: bool,
    },
    /// Monte Carlo estimate next to the exact win probability.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long, value_enum, default_value_t = RuleSelector::All)]
        rule: RuleSelector,
        /// Simulate this threshold instead of a rule's.
        #[arg(long, conflicts_with = "rule")]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        reps: u64,
    },
    /// Limiting constants and Poisson diagnostics at the odds threshold.
    Asymptotics {
        #[arg(long, value_name = "THETA,N", value_parser = parse_karamata)]
        karamata: Karamata,
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Sufficient conditions for the mode of the win probability at k.
    Certify {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long)]
        k: usize,
    },
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Karamata-Stirling profile p_j = theta / (theta + j - 1).
    #[arg(long, value_name = "THETA,N", value_parser = parse_karamata)]
    karamata: Option<Karamata>,
    /// Profile file: `.json` holds a numeric array, anything else is CSV.
    #[arg(long, value_name = "FILE")]
    profile: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Karamata {
    theta: f64,
    n: usize,
}

fn parse_karamata(s: &str) -> Result<Karamata, String> {
    let (theta, n) = s.split_once(',').ok_or("expected THETA,N")?;
    let theta = theta
        .trim()
        .parse::<f64>()
        .map_err(|e| format!("theta: {e}"))?;
    let n = n.trim().parse::<usize>().map_err(|e| format!("n: {e}"))?;
    Ok(Karamata { theta, n })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RuleSelector {
    Odds,
    Mean,
    Poisson,
    All,
}

#[derive(Debug)]
enum Failure {
    Validation(String),
    Computation(String),
    /// Output was written but a check failed.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Computation(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Computation(format!("write failed: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

struct Loaded {
    profile: SuccessProfile,
    karamata: Option<Karamata>,
}

impl Source {
    fn load(&self) -> CliResult<Loaded> {
        if let Some(k) = self.karamata {
            let profile = SuccessProfile::karamata_stirling(k.theta, k.n)?;
            return Ok(Loaded {
                profile,
                karamata: Some(k),
            });
        }
        let path = self.profile.as_deref().expect("clap enforces one source");
        let file = File::open(path)
            .map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
        let profile = load_profile(file, format_for(path))?;
        Ok(Loaded {
            profile,
            karamata: None,
        })
    }
}

fn format_for(path: &Path) -> ProfileFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => ProfileFormat::Json,
        _ => ProfileFormat::Csv,
    }
}

/// Parse `args` (program name first), run the command, and return the
/// process exit code. Output goes to `out`, diagnostics to stderr.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let default = if std::io::stdout().is_terminal() {
        Format::Table
    } else {
        Format::Json
    };
    run_with_default(args, out, default)
}

/// As [`run`], with an explicit fallback for `--format`.
pub fn run_with_default<I, T>(args: I, out: &mut dyn Write, default: Format) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let format = cli.format.unwrap_or(default);
    match execute(cli.command, format, out) {
        Ok(()) => 0,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Computation(msg)) | Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn execute(command: Command, format: Format, out: &mut dyn Write) -> CliResult<()> {
    match command {
        Command::Threshold { source, m, rule } => {
            cmd_threshold(&source.load()?, m, rule, format, out)
        }
        Command::Winprob { source, m, k } => {
            cmd_winprob(&source.load()?.profile, m, k, format, out)
        }
        Command::Compare { m, golden } => cmd_compare(&m, golden, format, out),
        Command::Simulate {
            source,
            m,
            rule,
            k,
            seed,
            reps,
        } => cmd_simulate(&source.load()?, m, rule, k, seed, reps, format, out),
        Command::Asymptotics { karamata, m } => cmd_asymptotics(karamata, m, format, out),
        Command::Certify { source, m, k } => {
            cmd_certify(&source.load()?.profile, m, k, format, out)
        }
    }
}

fn rules_for(selector: RuleSelector, loaded: &Loaded) -> CliResult<Vec<Rule>> {
    Ok(match selector {
        RuleSelector::Odds => vec![Rule::Odds],
        RuleSelector::Mean => vec![Rule::Mean],
        RuleSelector::Poisson if loaded.karamata.is_none() => {
            return Err(Failure::Validation(
                "the poisson rule requires a --karamata profile".into(),
            ))
        }
        RuleSelector::Poisson => vec![Rule::Poisson],
        RuleSelector::All if loaded.karamata.is_some() => {
            vec![Rule::Odds, Rule::Mean, Rule::Poisson]
        }
        RuleSelector::All => vec![Rule::Odds, Rule::Mean],
    })
}

fn threshold_of(loaded: &Loaded, rule: Rule, m: usize) -> CliResult<ThresholdResult> {
    Ok(match rule {
        Rule::Odds => odds_threshold(&loaded.profile, m)?,
        Rule::Mean => mean_threshold(&loaded.profile, m)?,
        Rule::Poisson => {
            let k = loaded.karamata.expect("checked by rules_for");
            poisson_threshold(k.n, k.theta, m)?
        }
    })
}

fn cmd_threshold(
    loaded: &Loaded,
    m: usize,
    selector: RuleSelector,
    format: Format,
    out: &mut dyn Write,
) -> CliResult<()> {
    let results = rules_for(selector, loaded)?
        .into_iter()
        .map(|rule| threshold_of(loaded, rule, m))
        .collect::<CliResult<Vec<_>>>()?;
    let mut report = Report::new(
        &results,
        vec![
            "rule",
            "m",
            "threshold",
            "win_probability",
            "lambda",
            "s_m_minus_1",
            "fallback",
        ],
    );
    for r in &results {
        let d = r.diagnostics.expect("rules attach diagnostics");
        report.row(vec![
            r.rule.name().into(),
            r.m.into(),
            r.threshold.into(),
            r.win_probability.into(),
            d.lambda.into(),
            d.s_m_minus_1.into(),
            d.fallback.into(),
        ]);
    }
    report.write(format, out)?;
    Ok(())
}

/// Win probability of one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WinProbRecord {
    pub m: usize,
    pub k: usize,
    pub n: usize,
    pub win_probability: f64,
}

fn cmd_winprob(
    profile: &SuccessProfile,
    m: usize,
    k: usize,
    format: Format,
    out: &mut dyn Write,
) -> CliResult<()> {
    let record = WinProbRecord {
        m,
        k,
        n: profile.len(),
        win_probability: win_probability_of_threshold(profile, m, k)?,
    };
    let mut report = Report::new(&record, vec!["m", "k", "n", "win_probability"]);
    report.row(vec![
        m.into(),
        k.into(),
        record.n.into(),
        record.win_probability.into(),
    ]);
    report.write(format, out)?;
    Ok(())
}

/// Outcome of checking one grid cell against the reference values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenCheck {
    pub passed: bool,
    /// Human-readable mismatches.
    pub mismatches: Vec<String>,
    /// Reference fields skipped because the published value is unreproducible.
    pub not_asserted: Vec<String>,
}

/// One cell of the comparison grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRecord {
    pub m: usize,
    pub n: usize,
    pub theta: f64,
    pub epsilon: f64,
    pub s_star: f64,
    pub odds_threshold: usize,
    pub mean_threshold: usize,
    pub mean_value: f64,
    /// `None` without `--golden`, or when the cell is not tabulated.
    pub golden: Option<GoldenCheck>,
}

fn check_value(field: &str, expected: Golden, actual: f64, check: &mut GoldenCheck) {
    match expected {
        Golden::Asserted(v) if (actual - v).abs() > VALUE_TOL => {
            check
                .mismatches
                .push(format!("{field}: expected {v:.6}, got {actual:.6}"));
        }
        Golden::Asserted(_) => {}
        Golden::Anomaly(_) => check.not_asserted.push(field.to_string()),
    }
}

fn check_threshold(field: &str, expected: usize, actual: usize, check: &mut GoldenCheck) {
    if expected != actual {
        check
            .mismatches
            .push(format!("{field}: expected {expected}, got {actual}"));
    }
}

/// Compare one computed cell with its reference.
pub fn golden_check(record: &CompareRecord, cell: &GoldenCell) -> GoldenCheck {
    let mut check = GoldenCheck {
        passed: true,
        mismatches: Vec::new(),
        not_asserted: Vec::new(),
    };
    check_value("epsilon", cell.epsilon, record.epsilon, &mut check);
    check_value("s_star", cell.s_star, record.s_star, &mut check);
    check_threshold(
        "odds_threshold",
        cell.odds,
        record.odds_threshold,
        &mut check,
    );
    check_threshold(
        "mean_threshold",
        cell.mean,
        record.mean_threshold,
        &mut check,
    );
    check.passed = check.mismatches.is_empty();
    check
}

/// Compute the comparison grid for the given ranks.
pub fn compare_grid(ms: &[usize], golden: bool) -> crate::Result<Vec<CompareRecord>> {
    let mut records = Vec::with_capacity(ms.len() * SIZES.len() * THETAS.len());
    for &m in ms {
        for n in SIZES {
            for theta in THETAS {
                let profile = SuccessProfile::karamata_stirling(theta, n)?;
                let gap = epsilon_gap(&profile, m)?;
                let mut record = CompareRecord {
                    m,
                    n,
                    theta,
                    epsilon: gap.epsilon,
                    s_star: gap.optimal_value,
                    odds_threshold: gap.odds_threshold,
                    mean_threshold: gap.mean_threshold,
                    mean_value: gap.mean_value,
                    golden: None,
                };
                if golden {
                    record.golden =
                        golden::lookup(m, n, theta).map(|cell| golden_check(&record, &cell));
                }
                records.push(record);
            }
        }
    }
    Ok(records)
}

fn cmd_compare(ms: &[usize], golden: bool, format: Format, out: &mut dyn Write) -> CliResult<()> {
    let records = compare_grid(ms, golden)?;
    let mut headers = vec!["m", "n", "theta", "epsilon", "s_star", "odds", "mean"];
    if golden {
        headers.push("golden");
    }
    let mut report = Report::new(&records, headers);
    for r in &records {
        let mut row: Vec<Cell> = vec![
            r.m.into(),
            r.n.into(),
            r.theta.into(),
            r.epsilon.into(),
            r.s_star.into(),
            r.odds_threshold.into(),
            r.mean_threshold.into(),
        ];
        if golden {
            row.push(match &r.golden {
                None => "untabulated".into(),
                Some(c) if !c.passed => format!("FAIL {}", c.mismatches.join("; ")).into(),
                Some(c) if !c.not_asserted.is_empty() => {
                    format!("pass (not asserted: {})", c.not_asserted.join(", ")).into()
                }
                Some(_) => "pass".into(),
            });
        }
        report.row(row);
    }
    report.write(format, out)?;

    if golden {
        let failed: Vec<String> = records
            .iter()
            .filter_map(|r| {
                let c = r.golden.as_ref()?;
                (!c.passed).then(|| {
                    format!(
                        "m={} n={} theta={}: {}",
                        r.m,
                        r.n,
                        r.theta,
                        c.mismatches.join("; ")
                    )
                })
            })
            .collect();
        if !failed.is_empty() {
            return Err(Failure::Check(format!(
                "{} golden cell(s) mismatched\n  {}",
                failed.len(),
                failed.join("\n  ")
            )));
        }
    }
    Ok(())
}

/// Simulation output for a single threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateRecord {
    pub report: SimulationReport,
    pub exact: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl SimulateRecord {
    fn new(report: SimulationReport, exact: f64) -> Self {
        let half = CI_Z * report.std_error;
        Self {
            ci_low: report.empirical_rate - half,
            ci_high: report.empirical_rate + half,
            report,
            exact,
        }
    }
}

/// Paired simulation of the odds and mean rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateCompareRecord {
    pub odds: SimulateRecord,
    pub mean: SimulateRecord,
    pub comparison: PairedComparison,
    /// Exact shortfall of the mean rule.
    pub exact_difference: f64,
}

const SIM_HEADERS: [&str; 9] = [
    "rule",
    "threshold",
    "replications",
    "wins",
    "rate",
    "std_error",
    "ci_low",
    "ci_high",
    "exact",
];

fn sim_row(label: &str, r: &SimulateRecord) -> Vec<Cell> {
    vec![
        label.into(),
        r.report.threshold.into(),
        r.report.replications.into(),
        r.report.wins.into(),
        r.report.empirical_rate.into(),
        r.report.std_error.into(),
        r.ci_low.into(),
        r.ci_high.into(),
        r.exact.into(),
    ]
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    loaded: &Loaded,
    m: usize,
    selector: RuleSelector,
    k: Option<usize>,
    seed: u64,
    reps: u64,
    format: Format,
    out: &mut dyn Write,
) -> CliResult<()> {
    let profile = &loaded.profile;
    if let Some(k) = k {
        let report = simulate_rule(profile, m, k, reps, seed)?;
        let record = SimulateRecord::new(report, win_probability_of_threshold(profile, m, k)?);
        let mut out_report = Report::new(&record, SIM_HEADERS.to_vec());
        out_report.row(sim_row("explicit", &record));
        out_report.write(format, out)?;
        return Ok(());
    }
    if selector == RuleSelector::All {
        let c = simulate_compare(profile, m, reps, seed)?;
        let exact_odds = win_probability_of_threshold(profile, m, c.odds.threshold)?;
        let exact_mean = win_probability_of_threshold(profile, m, c.mean.threshold)?;
        let record = SimulateCompareRecord {
            odds: SimulateRecord::new(c.odds.clone(), exact_odds),
            mean: SimulateRecord::new(c.mean.clone(), exact_mean),
            exact_difference: if c.odds.threshold == c.mean.threshold {
                0.0
            } else {
                exact_odds - exact_mean
            },
            comparison: c,
        };
        let mut report = Report::new(&record, SIM_HEADERS.to_vec());
        report.row(sim_row("odds", &record.odds));
        report.row(sim_row("mean", &record.mean));
        let diff_se = record.comparison.difference_std_error;
        let d = record.comparison.difference;
        report.row(vec![
            "difference".into(),
            Cell::Text(String::new()),
            reps.into(),
            (record.comparison.odds_only_wins as i64 - record.comparison.mean_only_wins as i64)
                .into(),
            d.into(),
            diff_se.into(),
            (d - CI_Z * diff_se).into(),
            (d + CI_Z * diff_se).into(),
            record.exact_difference.into(),
        ]);
        report.write(format, out)?;
        return Ok(());
    }
    let rule = rules_for(selector, loaded)?[0];
    let threshold = threshold_of(loaded, rule, m)?;
    let mut report = simulate_rule(profile, m, threshold.threshold, reps, seed)?;
    report.rule = Some(rule);
    let record = SimulateRecord::new(report, threshold.win_probability);
    let mut out_report = Report::new(&record, SIM_HEADERS.to_vec());
    out_report.row(sim_row(rule.name(), &record));
    out_report.write(format, out)?;
    Ok(())
}

/// Closed-form limits and finite-`n` Poisson diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsRecord {
    pub theta: f64,
    pub n: usize,
    pub m: usize,
    pub kappa: f64,
    pub asymptotic_value: f64,
    pub odds_threshold: usize,
    /// `odds_threshold / n`.
    pub odds_proportion: f64,
    pub optimal_value: f64,
    pub poisson_threshold: usize,
    pub poisson_value: f64,
    pub tv: TvReport,
    pub lambda_lower: f64,
    /// `None` when the bound is infinite.
    pub lambda_upper: Option<f64>,
}

fn cmd_asymptotics(k: Karamata, m: usize, format: Format, out: &mut dyn Write) -> CliResult<()> {
    let profile = SuccessProfile::karamata_stirling(k.theta, k.n)?;
    let odds = odds_threshold(&profile, m)?;
    let poisson = poisson_threshold(k.n, k.theta, m)?;
    let dist = complete_suffix_distribution(&profile, odds.threshold)?;
    let law = PoissonLaw::new(dist.sums().lambda)?;
    let tv = tv_distance(&dist, &law)?;
    let (lower, upper) = lambda_bounds(k.theta, odds.threshold, k.n)?;
    let record = AsymptoticsRecord {
        theta: k.theta,
        n: k.n,
        m,
        kappa: kappa(k.theta, m),
        asymptotic_value: asymptotic_value(m),
        odds_threshold: odds.threshold,
        odds_proportion: odds.threshold as f64 / k.n as f64,
        optimal_value: odds.win_probability,
        poisson_threshold: poisson.threshold,
        poisson_value: poisson.win_probability,
        tv,
        lambda_lower: lower,
        lambda_upper: upper.is_finite().then_some(upper),
    };
    let mut report = Report::key_value(&record);
    report
        .pair("theta", k.theta)
        .pair("n", k.n)
        .pair("m", m)
        .pair("kappa", record.kappa)
        .pair("asymptotic_value", record.asymptotic_value)
        .pair("odds_threshold", record.odds_threshold)
        .pair("odds_proportion", record.odds_proportion)
        .pair("optimal_value", record.optimal_value)
        .pair("poisson_threshold", record.poisson_threshold)
        .pair("poisson_value", record.poisson_value)
        .pair("lambda", tv.lambda)
        .pair("lambda_lower", lower)
        .pair("lambda_upper", upper)
        .pair("lambda2", tv.lambda2)
        .pair("tv", tv.tv)
        .pair("lecam_upper", tv.lecam_upper)
        .pair("bh_lower", tv.bh_lower)
        .pair("bh_upper", tv.bh_upper)
        .pair("brackets_hold", tv.ordered());
    report.write(format, out)?;
    Ok(())
}

fn implication_cell(check: &ImplicationCheck) -> Cell {
    serde_json::to_value(check.status)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
        .into()
}

fn mode_cell(mode: Mode) -> Cell {
    if mode.low == mode.high {
        mode.low.into()
    } else {
        format!("{}..={}", mode.low, mode.high).into()
    }
}

fn cmd_certify(
    profile: &SuccessProfile,
    m: usize,
    k: usize,
    format: Format,
    out: &mut dyn Write,
) -> CliResult<()> {
    let cert: ModeCertificate = certify_mode(profile, k, m)?;
    let c = cert.conditions;
    let verdict = serde_json::to_value(cert.verdict)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default();
    let mut report = Report::key_value(&cert);
    report
        .pair("candidate", cert.candidate)
        .pair("m", cert.m)
        .pair("next_is_tail_max", c.next_is_tail_max)
        .pair("step_below_min", c.step_below_min)
        .pair("sum_above_lower", c.sum_above_lower)
        .pair("sum_below_upper", c.sum_below_upper)
        .pair("tail_sum_above_lower", c.tail_sum_above_lower)
        .pair("tail_sum_below_m", c.tail_sum_below_m)
        .pair(
            "implication_lower",
            implication_cell(&cert.implications.lower),
        )
        .pair(
            "implication_upper",
            implication_cell(&cert.implications.upper),
        )
        .pair(
            "implication_band",
            implication_cell(&cert.implications.band),
        )
        .pair("verdict", verdict)
        .pair("sweep_mode", mode_cell(cert.sweep_mode))
        .pair(
            "consistent",
            cert.consistent.map_or("n/a".to_string(), |v| v.to_string()),
        );
    report.write(format, out)?;
    if cert.consistent == Some(false) {
        return Err(Failure::Check(format!(
            "verdict {:?} contradicts sweep mode {}..={}",
            cert.verdict, cert.sweep_mode.low, cert.sweep_mode.high
        )));
    }
    if cert.implications.any_violated() {
        return Err(Failure::Check(
            "a mean-based implication was violated".into(),
        ));
    }
    Ok(())
}
