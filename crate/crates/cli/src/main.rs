//! Command-line driver over the radial Coulomb-Sobolev toolkit.
//!
//! Every run emits one artifact: a JSON object with `schema`, the
//! echoed `config`, and the `report`, or a CSV rendering of the
//! report's samples table. Exit codes are CI-oriented: 0 for success
//! (including Match verdicts), 2 for invalid input with a message
//! naming the violated hypothesis, 3 for Mismatch verdicts or an
//! unbounded corpus, 1 for internal numerical failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use csl_core::bump::{BumpSpec, Profile};
use csl_core::experiments::{
    run_boundedness, run_multibump, run_schedule, run_weighted_checks, CorpusReport,
    CorpusSpec, ExperimentConfig, SweepResult, Verdict, WeightedReport,
};
use csl_core::exponents::{
    p_rad, ExponentBundle, ParamSet, ScheduleKind, ScheduleLaw, schedule_params,
};
use csl_core::functionals::{EnergyEvaluator, EnergyReport};
use csl_core::grid::composite_grid;
use csl_core::optimize::{
    ascend, default_start, random_start, write_trace, AscentConfig, AscentSummary,
    OptimizerState, StartSummary,
};
use csl_core::{CslError, Result};

#[derive(Parser)]
#[command(
    name = "csl",
    version,
    about = "Radial Coulomb-Sobolev energies: exponent algebra, scaling sweeps, \
             quotient optimization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Threshold exponents, admissible intervals, and the coupling regime.
    Exponents(ExponentsArgs),
    /// Energies and interpolation quotient of a single annular bump.
    Energy(EnergyArgs),
    /// Scaling sweep along one of the threshold-detecting schedules.
    Sweep(SweepArgs),
    /// Tower of disjoint bumps at geometrically growing radii.
    Multibump(MultibumpArgs),
    /// Quotient spread over a seeded random corpus.
    Bounded(BoundedArgs),
    /// Weighted-inequality ratio suite over a seeded random corpus.
    Weighted(WeightedArgs),
    /// Projected gradient ascent toward an extremal quotient.
    Optimize(OptimizeArgs),
}

#[derive(Args, Serialize)]
struct ParamFlags {
    /// Ambient dimension.
    #[arg(long, default_value_t = 3)]
    d: u32,
    /// Seminorm order, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    s: f64,
    /// Interaction potential exponent, in (0, d).
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Interaction density power, at least 1.
    #[arg(long, default_value_t = 2.0)]
    q: f64,
}

impl ParamFlags {
    fn params(&self) -> Result<ParamSet> {
        ParamSet::new(self.d, self.s, self.alpha, self.q)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Serialize)]
struct OutputFlags {
    /// Artifact format; JSON carries the full report, CSV its samples table.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Output path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads for kernel assembly and sweeps.
    #[arg(long, env = "CSL_THREADS")]
    threads: Option<usize>,
}

/// Experiment tuning knobs, mapped one-to-one onto the runners'
/// configuration and echoed inside every report.
#[derive(Args, Serialize)]
struct ConfigFlags {
    /// Relative slope tolerance for Match verdicts.
    #[arg(long, default_value_t = 0.1)]
    slope_rel_tol: f64,
    /// Absolute slope band around zero predictions.
    #[arg(long, default_value_t = 0.02)]
    slope_abs_tol: f64,
    /// Corpus max/median ratio still counted as bounded.
    #[arg(long, default_value_t = 10.0)]
    spread_factor: f64,
    /// Trailing fraction of samples used by the log-log fits.
    #[arg(long, default_value_t = 0.5)]
    fit_fraction: f64,
    /// Geometric backbone nodes per decade on sweep grids.
    #[arg(long, default_value_t = 8)]
    backbone_per_decade: usize,
    /// Uniform refinement nodes across each bump window.
    #[arg(long, default_value_t = 128)]
    nodes_per_window: usize,
    /// Bump center for the width-driven schedule.
    #[arg(long, default_value_t = 4.0)]
    fixed_radius: f64,
    /// Relative truncation budget for the nonlocal tail.
    #[arg(long, default_value_t = 1e-3)]
    tail_eps: f64,
}

impl ConfigFlags {
    fn config(&self) -> ExperimentConfig {
        ExperimentConfig {
            slope_rel_tol: self.slope_rel_tol,
            slope_abs_tol: self.slope_abs_tol,
            spread_factor: self.spread_factor,
            fit_fraction: self.fit_fraction,
            backbone_per_decade: self.backbone_per_decade,
            nodes_per_window: self.nodes_per_window,
            fixed_radius: self.fixed_radius,
            tail_eps: self.tail_eps,
        }
    }
}

#[derive(Args, Serialize)]
struct ExponentsArgs {
    #[command(flatten)]
    params: ParamFlags,
    /// Also evaluate the interpolation pair at this exponent.
    #[arg(long)]
    p: Option<f64>,
    #[command(flatten)]
    out: OutputFlags,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ProfileKind {
    Bump,
}

#[derive(Args, Serialize)]
struct EnergyArgs {
    #[command(flatten)]
    params: ParamFlags,
    /// Test-function family.
    #[arg(long, value_enum, default_value_t = ProfileKind::Bump)]
    profile: ProfileKind,
    /// Bump amplitude.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Bump center radius.
    #[arg(long = "R", default_value_t = 4.0)]
    center: f64,
    /// Bump half-width.
    #[arg(long = "S", default_value_t = 1.0)]
    width: f64,
    /// Lebesgue exponent of the norm in the numerator.
    #[arg(long)]
    p: f64,
    /// Inner grid radius; derived from the support when omitted.
    #[arg(long)]
    r_min: Option<f64>,
    /// Outer grid radius; derived from the support when omitted.
    #[arg(long)]
    r_max: Option<f64>,
    /// Geometric backbone nodes per decade.
    #[arg(long, default_value_t = 64)]
    backbone_per_decade: usize,
    /// Uniform refinement nodes across the bump window.
    #[arg(long, default_value_t = 128)]
    nodes_per_window: usize,
    #[command(flatten)]
    out: OutputFlags,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ScheduleArg {
    Table2Row1,
    Table2Row2,
    Table2Row3,
    Table3Row1,
    Table3Row2,
    Table3Row3,
    FixedRWidthVaries,
}

impl ScheduleArg {
    fn kind(self) -> ScheduleKind {
        match self {
            ScheduleArg::Table2Row1 => ScheduleKind::Table2Row1,
            ScheduleArg::Table2Row2 => ScheduleKind::Table2Row2,
            ScheduleArg::Table2Row3 => ScheduleKind::Table2Row3,
            ScheduleArg::Table3Row1 => ScheduleKind::Table3Row1,
            ScheduleArg::Table3Row2 => ScheduleKind::Table3Row2,
            ScheduleArg::Table3Row3 => ScheduleKind::Table3Row3,
            ScheduleArg::FixedRWidthVaries => ScheduleKind::FixedRWidthVaries,
        }
    }
}

#[derive(Args, Serialize)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamFlags,
    /// Schedule row driving the sweep.
    #[arg(long, value_enum)]
    schedule: ScheduleArg,
    /// Lebesgue exponent probed against the schedule's threshold.
    #[arg(long)]
    p: f64,
    /// Comma-separated axis values (radii or widths); defaults to
    /// 4..4096 for radius schedules and 1..2^-7 for width schedules.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<f64>>,
    #[command(flatten)]
    cfg: ConfigFlags,
    #[command(flatten)]
    out: OutputFlags,
}

#[derive(Args, Serialize)]
struct MultibumpArgs {
    #[command(flatten)]
    params: ParamFlags,
    /// Radius ratio between consecutive bumps in the tower.
    #[arg(long, default_value_t = 64.0)]
    base: f64,
    /// Smallest bump count.
    #[arg(long, default_value_t = 1)]
    m_min: u32,
    /// Largest bump count.
    #[arg(long, default_value_t = 8)]
    m_max: u32,
    /// Lebesgue exponent; defaults to the radial threshold.
    #[arg(long)]
    p: Option<f64>,
    /// Apply the concentration rescaling to each tower member.
    #[arg(long)]
    rescaled: bool,
    #[command(flatten)]
    cfg: ConfigFlags,
    #[command(flatten)]
    out: OutputFlags,
}

#[derive(Args, Serialize)]
struct BoundedArgs {
    #[command(flatten)]
    params: ParamFlags,
    /// Lebesgue exponent of the quotient numerator.
    #[arg(long)]
    p: f64,
    /// Corpus size.
    #[arg(long, default_value_t = 200)]
    count: usize,
    /// Corpus seed; a fixed default keeps runs reproducible.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    cfg: ConfigFlags,
    #[command(flatten)]
    out: OutputFlags,
}

#[derive(Args, Serialize)]
struct WeightedArgs {
    #[command(flatten)]
    params: ParamFlags,
    /// Corpus size.
    #[arg(long, default_value_t = 200)]
    count: usize,
    /// Corpus seed; a fixed default keeps runs reproducible.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    cfg: ConfigFlags,
    #[command(flatten)]
    out: OutputFlags,
}

#[derive(Args, Serialize)]
struct OptimizeArgs {
    #[command(flatten)]
    params: ParamFlags,
    /// Lebesgue exponent; must lie strictly inside the admissible range.
    #[arg(long)]
    p: f64,
    /// Ascent runs: the default bump start plus seeded random starts.
    #[arg(long, default_value_t = 1)]
    starts: usize,
    /// Seed for the random starts.
    #[arg(long, default_value_t = 0x5eed)]
    seed: u64,
    #[arg(long, default_value_t = 5000)]
    max_iterations: usize,
    /// Convergence threshold on the relative stationarity residual.
    #[arg(long, default_value_t = 1e-6)]
    grad_tol: f64,
    /// Inner grid radius.
    #[arg(long, default_value_t = 0.05)]
    r_min: f64,
    /// Outer grid radius.
    #[arg(long, default_value_t = 40.0)]
    r_max: f64,
    /// Geometric backbone nodes per decade.
    #[arg(long, default_value_t = 256)]
    backbone_per_decade: usize,
    /// Write the best run's per-iteration trace here, one JSON object
    /// per line.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the best candidate here in the radial columnar format.
    #[arg(long)]
    candidate: Option<PathBuf>,
    #[command(flatten)]
    out: OutputFlags,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e))
        }
    }
}

/// 2 for rejected input (the message names the violated hypothesis),
/// 1 for numerical or IO failures.
fn error_exit_code(e: &CslError) -> u8 {
    match e {
        CslError::InvalidParams(_)
        | CslError::CriticalQ { .. }
        | CslError::RadialTheoryUnavailable(_)
        | CslError::OutsideValidity { .. }
        | CslError::Refused(_) => 2,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<u8> {
    init_threads(out_flags(&cli.command).threads);
    match cli.command {
        Command::Exponents(a) => cmd_exponents(a),
        Command::Energy(a) => cmd_energy(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Multibump(a) => cmd_multibump(a),
        Command::Bounded(a) => cmd_bounded(a),
        Command::Weighted(a) => cmd_weighted(a),
        Command::Optimize(a) => cmd_optimize(a),
    }
}

fn out_flags(cmd: &Command) -> &OutputFlags {
    match cmd {
        Command::Exponents(a) => &a.out,
        Command::Energy(a) => &a.out,
        Command::Sweep(a) => &a.out,
        Command::Multibump(a) => &a.out,
        Command::Bounded(a) => &a.out,
        Command::Weighted(a) => &a.out,
        Command::Optimize(a) => &a.out,
    }
}

fn init_threads(threads: Option<usize>) {
    if let Some(t) = threads.filter(|t| *t > 0) {
        // Only the first global pool wins; later calls are harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
}

#[derive(Serialize)]
struct Artifact<'a, C: Serialize, R: Serialize> {
    schema: u32,
    command: &'a str,
    config: &'a C,
    report: &'a R,
}

/// Renders the artifact in the requested format and writes it to the
/// requested sink, then surfaces the verdict-derived exit code.
fn finish<C: Serialize, R: Serialize>(
    out: &OutputFlags,
    command: &str,
    config: &C,
    report: &R,
    csv: impl FnOnce(&R) -> Result<String>,
    code: u8,
) -> Result<u8> {
    let text = match out.format {
        Format::Json => {
            let artifact = Artifact { schema: 1, command, config, report };
            serde_json::to_string_pretty(&artifact)? + "\n"
        }
        Format::Csv => csv(report)?,
    };
    match &out.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(code)
}

fn csv_table(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fmt_err = |e: csv::Error| CslError::Format(e.to_string());
    w.write_record(header).map_err(fmt_err)?;
    for row in rows {
        w.write_record(&row).map_err(fmt_err)?;
    }
    let bytes =
        w.into_inner().map_err(|e| CslError::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CslError::Format(e.to_string()))
}

fn sweep_csv(res: &SweepResult) -> Result<String> {
    csv_table(
        &["axis_value", "lp_p", "seminorm_sq", "coulomb", "quotient"],
        res.samples
            .iter()
            .map(|s| {
                vec![
                    s.axis_value.to_string(),
                    s.lp_p.to_string(),
                    s.seminorm_sq.to_string(),
                    s.coulomb.to_string(),
                    s.quotient.to_string(),
                ]
            })
            .collect(),
    )
}

fn verdict_code(v: Verdict) -> u8 {
    if v == Verdict::Mismatch {
        3
    } else {
        0
    }
}

fn cmd_exponents(a: ExponentsArgs) -> Result<u8> {
    let params = a.params.params()?;
    let report = ExponentBundle::compute(&params, a.p)?;
    finish(
        &a.out,
        "exponents",
        &a,
        &report,
        |b| {
            csv_table(
                &[
                    "p_endpoint",
                    "p_sobolev",
                    "p_rad",
                    "regime",
                    "p_interval",
                    "p_interval_radial",
                    "beta_gn",
                    "gamma_gn",
                ],
                vec![vec![
                    b.p_endpoint.to_string(),
                    b.p_sobolev.to_string(),
                    b.p_rad.map_or_else(String::new, |v| v.to_string()),
                    format!("{:?}", b.regime),
                    b.p_interval.describe(),
                    b.p_interval_radial.describe(),
                    b.beta_gn.map_or_else(String::new, |v| v.to_string()),
                    b.gamma_gn.map_or_else(String::new, |v| v.to_string()),
                ]],
            )
        },
        0,
    )
}

fn cmd_energy(a: EnergyArgs) -> Result<u8> {
    let params = a.params.params()?;
    let bump = BumpSpec {
        lambda: a.lambda,
        center: a.center,
        width: a.width,
        profile: Profile::default(),
    };
    bump.validate()?;
    let (lo, hi) = bump.window();
    let grid = composite_grid(
        params.d,
        a.r_min.unwrap_or(lo / 100.0),
        a.r_max.unwrap_or(4.0 * hi),
        a.backbone_per_decade,
        &[(lo, hi)],
        a.nodes_per_window,
    )?;
    let f = bump.sample(&grid)?;
    let report: EnergyReport = EnergyEvaluator::new(&params, &grid)?.report(&f, a.p)?;
    finish(
        &a.out,
        "energy",
        &a,
        &report,
        |r| {
            csv_table(
                &["lp_norm", "seminorm_sq", "coulomb", "quotient", "p"],
                vec![vec![
                    r.lp_norm.to_string(),
                    r.seminorm_sq.to_string(),
                    r.coulomb.to_string(),
                    r.quotient.to_string(),
                    r.p.to_string(),
                ]],
            )
        },
        0,
    )
}

fn cmd_sweep(a: SweepArgs) -> Result<u8> {
    let params = a.params.params()?;
    let schedule = schedule_params(&params, a.schedule.kind())?;
    let values = match &a.values {
        Some(v) => v.clone(),
        None => match schedule.law {
            ScheduleLaw::PowerOfRadius { .. } => {
                (2..=12).map(|k| f64::powi(2.0, k)).collect()
            }
            ScheduleLaw::WidthDriven { .. } => {
                (0..8).map(|k| f64::powi(2.0, -k)).collect()
            }
        },
    };
    let res = run_schedule(&params, &schedule, a.p, &values, &a.cfg.config())?;
    let code = verdict_code(res.verdict);
    finish(&a.out, "sweep", &a, &res, sweep_csv, code)
}

fn cmd_multibump(a: MultibumpArgs) -> Result<u8> {
    let params = a.params.params()?;
    if a.m_min < 1 || a.m_max < a.m_min {
        return Err(CslError::InvalidParams(format!(
            "need 1 <= m_min <= m_max, got {}..{}",
            a.m_min, a.m_max
        )));
    }
    let p = match a.p {
        Some(p) => p,
        None => p_rad(&params)?,
    };
    let ms: Vec<u32> = (a.m_min..=a.m_max).collect();
    let res = run_multibump(&params, a.base, &ms, p, a.rescaled, &a.cfg.config())?;
    let code = verdict_code(res.verdict);
    finish(&a.out, "multibump", &a, &res, sweep_csv, code)
}

fn cmd_bounded(a: BoundedArgs) -> Result<u8> {
    let params = a.params.params()?;
    let mut spec = CorpusSpec { count: a.count, ..CorpusSpec::default() };
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    let report: CorpusReport = run_boundedness(&params, a.p, &spec, &a.cfg.config())?;
    let code = if report.stats.bounded { 0 } else { 3 };
    finish(
        &a.out,
        "bounded",
        &a,
        &report,
        |r| {
            csv_table(
                &["index", "quotient"],
                r.values
                    .iter()
                    .enumerate()
                    .map(|(i, v)| vec![i.to_string(), v.to_string()])
                    .collect(),
            )
        },
        code,
    )
}

fn cmd_weighted(a: WeightedArgs) -> Result<u8> {
    let params = a.params.params()?;
    let mut spec = CorpusSpec { count: a.count, ..CorpusSpec::default() };
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    let report: WeightedReport = run_weighted_checks(&params, &spec, &a.cfg.config())?;
    let code = if report.checks.iter().all(|c| c.stats.bounded) { 0 } else { 3 };
    finish(
        &a.out,
        "weighted",
        &a,
        &report,
        |r| {
            csv_table(
                &["name", "detail", "max", "median", "spread", "bounded", "n_degenerate"],
                r.checks
                    .iter()
                    .map(|c| {
                        vec![
                            c.name.clone(),
                            c.detail.clone(),
                            c.stats.max.to_string(),
                            c.stats.median.to_string(),
                            c.stats.spread.to_string(),
                            c.stats.bounded.to_string(),
                            c.n_degenerate.to_string(),
                        ]
                    })
                    .collect(),
            )
        },
        code,
    )
}

#[derive(Serialize)]
struct OptimizeReport {
    best: AscentSummary,
    starts: Vec<StartSummary>,
    /// (max - min) / max over the final quotients.
    relative_spread: f64,
}

fn cmd_optimize(a: OptimizeArgs) -> Result<u8> {
    let params = a.params.params()?;
    if a.starts < 1 {
        return Err(CslError::InvalidParams("need at least one start".into()));
    }
    let cfg = AscentConfig {
        max_iterations: a.max_iterations,
        grad_tol: a.grad_tol,
        ..AscentConfig::default()
    };
    let grid = composite_grid(params.d, a.r_min, a.r_max, a.backbone_per_decade, &[], 0)?;
    let mut summaries = Vec::with_capacity(a.starts);
    let mut best: Option<OptimizerState> = None;
    for k in 0..a.starts {
        let init = if k == 0 {
            default_start(&grid)?
        } else {
            random_start(&grid, a.seed, k)?
        };
        let state = ascend(&params, a.p, &init, &cfg)?;
        summaries.push(StartSummary {
            start_index: k,
            q_star: state.q_star,
            status: state.status,
            iterations: state.history.len().saturating_sub(1),
        });
        if best.as_ref().is_none_or(|b| state.q_star > b.q_star) {
            best = Some(state);
        }
    }
    let best = best.expect("at least one start");
    let (lo, hi) = summaries
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), s| (lo.min(s.q_star), hi.max(s.q_star)));
    if let Some(path) = &a.trace {
        write_trace(&best, std::fs::File::create(path)?)?;
    }
    if let Some(path) = &a.candidate {
        std::fs::write(path, best.f.to_columnar())?;
    }
    let report = OptimizeReport {
        best: best.summary(&cfg),
        starts: summaries,
        relative_spread: (hi - lo) / hi,
    };
    finish(
        &a.out,
        "optimize",
        &a,
        &report,
        |r| {
            csv_table(
                &["start_index", "q_star", "status", "iterations"],
                r.starts
                    .iter()
                    .map(|s| {
                        vec![
                            s.start_index.to_string(),
                            s.q_star.to_string(),
                            format!("{:?}", s.status),
                            s.iterations.to_string(),
                        ]
                    })
                    .collect(),
            )
        },
        0,
    )
}
