//! Command-line front end: `reduce`, `synth`, `verify`, `bench` and `instab`.
//!
//! Exit codes: 0 when a certificate was produced (or every check passed),
//! 2 for UNKNOWN or TIMEOUT, 3 for TEMPLATE_INFEASIBLE and 1 for usage or
//! I/O errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use thiserror::Error;

use crate::instab::{format_table, run_cell, cell_seed, CellStats, InstabError, RandomSystemSpec, TrialConfig};
use crate::lasalle::DEFAULT_R_MAX;
use crate::rational::{parse_rational, Rational};
use crate::smt::SolverConfig;
use crate::symred::{reduce_to_fixpoint_with, ReductionOptions, ReductionStatus, SymredError};
use crate::synth::{
    cegis, synth_complete, synth_instability, CertificateReport, InstabilityOptions, Method, Status, SynthError,
    SynthesisConfig,
};
use crate::system::{corpus_system, parse_system, Expectation, SystemFile, SystemParseError, CORPUS};
use crate::template::{build_template, fmt_substitutions, Parity, TemplateError, TemplateSpec};
use crate::verify::{verify_candidate, CandidateStatus, Mode, Verifier, VerifyError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{source}")]
    Parse { path: String, source: SystemParseError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Symred(#[from] SymredError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Instab(#[from] InstabError),
}

#[derive(Debug, Parser)]
#[command(name = "lyra", version, about = "Global Lyapunov certificates for polynomial vector fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply the symbolic reduction to a template and print what is left.
    Reduce(ReduceArgs),
    /// Synthesize a certificate.
    Synth(SynthArgs),
    /// Check a given candidate `V`.
    Verify(VerifyArgs),
    /// Run the bundled benchmark systems through every method.
    Bench(BenchArgs),
    /// Random-system instability experiment.
    Instab(InstabArgs),
}

/// Template shape; unset fields fall back to the system file, then to the
/// full quadratic template.
#[derive(Debug, Args, Default, Clone)]
pub struct TemplateArgs {
    /// Degree range `LO..HI` or a single degree.
    #[arg(long)]
    pub deg: Option<String>,
    /// Include mixed monomials.
    #[arg(long, overrides_with = "no_cross")]
    pub cross: bool,
    /// Only pure powers.
    #[arg(long)]
    pub no_cross: bool,
    #[arg(long, value_enum)]
    pub parity: Option<ParityArg>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ParityArg {
    Even,
    All,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// System file, or a bundled key such as `e1`.
    pub system: String,
    #[command(flatten)]
    pub template: TemplateArgs,
    /// Also apply the Newton-polytope vertex rule.
    #[arg(long)]
    pub newton: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Complete,
    LpCegis,
    SmtCegis,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Complete => Method::Complete,
            MethodArg::LpCegis => Method::LpCegis,
            MethodArg::SmtCegis => Method::SmtCegis,
        }
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    pub system: String,
    #[arg(long, value_enum, default_value = "complete")]
    pub method: MethodArg,
    /// Symbolic reduction on (the default).
    #[arg(long, overrides_with = "no_sr")]
    pub sr: bool,
    #[arg(long)]
    pub no_sr: bool,
    /// Skip the Newton-polytope vertex rule in the reduction.
    #[arg(long)]
    pub no_newton: bool,
    /// Keep the raw LP values instead of rounding them.
    #[arg(long)]
    pub no_round: bool,
    /// Semidefinite `V̇` plus the LaSalle condition.
    #[arg(long, conflicts_with_all = ["weak", "instability"])]
    pub lasalle: bool,
    /// Semidefinite `V̇` only; never proves GAS on its own.
    #[arg(long, conflicts_with = "instability")]
    pub weak: bool,
    /// Look for an instability certificate instead.
    #[arg(long)]
    pub instability: bool,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub cegis_steps: Option<usize>,
    /// Margin scale, e.g. `1/100`.
    #[arg(long)]
    pub mu: Option<String>,
    /// Half-width of the sampling box.
    #[arg(long)]
    pub domain: Option<String>,
    /// Highest Lie-derivative order in the LaSalle condition.
    #[arg(long)]
    pub lasalle_r: Option<usize>,
    /// Seconds per solver call.
    #[arg(long)]
    pub timeout: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub template: TemplateArgs,
    /// Print the report as one JSON object.
    #[arg(long)]
    pub json: bool,
    /// TOML file whose keys override the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Strict,
    Weak,
    Lasalle,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Strict => Mode::Strict,
            ModeArg::Weak => Mode::Weak,
            ModeArg::Lasalle => Mode::WeakLaSalle,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub system: String,
    /// Candidate in the polynomial grammar, e.g. `x1^2/3 + x2^2`.
    pub candidate: String,
    #[arg(long, value_enum, default_value = "strict")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = DEFAULT_R_MAX)]
    pub lasalle_r: usize,
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// `e1-e10`, a sub-range such as `e2-e5`, or a comma list.
    #[arg(long, default_value = "e1-e10")]
    pub suite: String,
    /// Methods to run; defaults to all three.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub methods: Vec<MethodArg>,
    #[arg(long)]
    pub no_sr: bool,
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct InstabArgs {
    /// Dimensions: `2..4` or `2,3,6`.
    #[arg(long, default_value = "2..4")]
    pub dims: String,
    #[arg(long, default_value = "2,3")]
    pub degs: String,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Seconds per solver call.
    #[arg(long, default_value_t = 1.0)]
    pub timeout: f64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub no_sr: bool,
    /// Print every trial as a JSON line.
    #[arg(long)]
    pub records: bool,
}

/// Keys accepted by `--config`; each one present replaces the flag value.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    pub method: Option<MethodArg>,
    pub sr: Option<bool>,
    pub newton: Option<bool>,
    pub round: Option<bool>,
    pub samples: Option<usize>,
    pub cegis_steps: Option<usize>,
    pub mu: Option<String>,
    pub domain: Option<String>,
    pub lasalle_r: Option<usize>,
    pub timeout: Option<f64>,
    pub seed: Option<u64>,
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Reduce(a) => cmd_reduce(&a),
        Command::Synth(a) => cmd_synth(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Instab(a) => cmd_instab(&a),
    }
}

/// Reads a system file; a missing path that names a bundled system
/// (`e3`, `e3.sys`) loads the bundled copy.
pub fn load_system(arg: &str) -> Result<SystemFile, CliError> {
    let path = Path::new(arg);
    if !path.exists() {
        let key = arg.strip_suffix(".sys").unwrap_or(arg);
        if let Some(sys) = corpus_system(key) {
            return Ok(sys);
        }
    }
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    parse_system(&text).map_err(|source| CliError::Parse { path: arg.to_string(), source })
}

fn parse_degrees(text: &str) -> Result<(u32, u32), CliError> {
    let bad = || CliError::Usage(format!("bad degree range `{text}`"));
    let (lo, hi) = text.split_once("..").unwrap_or((text, text));
    let lo = lo.trim().parse().map_err(|_| bad())?;
    let hi = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

/// Template from the flags, layered over `base`.
pub fn template_from(args: &TemplateArgs, base: TemplateSpec) -> Result<TemplateSpec, CliError> {
    let mut spec = base;
    if let Some(deg) = &args.deg {
        let (lo, hi) = parse_degrees(deg)?;
        spec.min_degree = lo;
        spec.max_degree = hi;
        if !args.cross && !args.no_cross {
            spec.cross_terms = hi <= 2;
        }
    }
    if args.cross {
        spec.cross_terms = true;
    }
    if args.no_cross {
        spec.cross_terms = false;
    }
    if let Some(p) = args.parity {
        spec.parity = match p {
            ParityArg::Even => Parity::EvenOnly,
            ParityArg::All => Parity::All,
        };
    }
    spec.validate()?;
    Ok(spec)
}

fn parse_list(text: &str, what: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("bad {what} list `{text}`"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: u64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u64 = hi.trim().parse().map_err(|_| bad())?;
        return Ok((lo..=hi).collect());
    }
    text.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.trim().parse().map_err(|_| bad())).collect()
}

fn rational_arg(text: &str, what: &str) -> Result<Rational, CliError> {
    parse_rational(text.trim()).ok_or_else(|| CliError::Usage(format!("bad {what} `{text}`")))
}

fn seconds(s: f64) -> Result<Duration, CliError> {
    Duration::try_from_secs_f64(s)
        .ok()
        .filter(|d| !d.is_zero())
        .ok_or_else(|| CliError::Usage(format!("bad timeout `{s}`")))
}

fn cmd_reduce(args: &ReduceArgs) -> Result<i32, CliError> {
    let sys = load_system(&args.system)?;
    let spec = template_from(&args.template, sys.template_or_default())?;
    let start = Instant::now();
    let raw = build_template(&spec)?;
    let red = reduce_to_fixpoint_with(&raw, &sys.field, ReductionOptions { newton_vertices: args.newton })?;
    let elapsed = start.elapsed().as_secs_f64();
    println!("template: V = {}", raw.display_grouped());
    let subs = fmt_substitutions(&red.substitutions);
    println!("substitutions: {{{}}}", subs.join(", "));
    for c in &red.inequalities_pending {
        println!("pending: {c}");
    }
    println!("passes: {}  time: {elapsed:.4}s", red.iterations);
    match red.status {
        ReductionStatus::Reduced => {
            println!("V = {}", red.reduced_template.display_grouped());
            Ok(EXIT_OK)
        }
        ReductionStatus::Collapsed | ReductionStatus::Infeasible => {
            println!("TEMPLATE_INFEASIBLE ({:?})", red.status);
            Ok(EXIT_INFEASIBLE)
        }
    }
}

/// Flags and config file folded into a synthesis configuration.
pub fn synthesis_config(args: &SynthArgs) -> Result<SynthesisConfig, CliError> {
    let file = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            toml::from_str::<ConfigFile>(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => ConfigFile::default(),
    };
    let method = file.method.unwrap_or(args.method);
    let mut config = SynthesisConfig::new(method.into());
    config.use_reduction = file.sr.unwrap_or(!args.no_sr);
    config.newton_rule = file.newton.unwrap_or(config.newton_rule && !args.no_newton);
    if !file.round.unwrap_or(!args.no_round) {
        config.rounding_denominator = None;
    }
    if let Some(n) = file.samples.or(args.samples) {
        config.n_samples = n;
    }
    if let Some(n) = file.cegis_steps.or(args.cegis_steps) {
        config.cegis_steps = n;
    }
    if let Some(mu) = file.mu.as_ref().or(args.mu.as_ref()) {
        config.mu = rational_arg(mu, "mu")?;
    }
    if let Some(d) = file.domain.as_ref().or(args.domain.as_ref()) {
        config.domain_halfwidth = rational_arg(d, "domain")?;
    }
    if let Some(r) = file.lasalle_r.or(args.lasalle_r) {
        config.r_max = r;
    }
    if let Some(t) = file.timeout.or(args.timeout) {
        config.timeout = seconds(t)?;
    }
    if let Some(s) = file.seed.or(args.seed) {
        config.seed = s;
    }
    config.validate()?;
    Ok(config)
}

fn print_report(report: &CertificateReport, json: bool) {
    if json {
        println!("{}", report.to_json());
        return;
    }
    println!("system: {}", report.system);
    println!("method: {}  mode: {}", report.method, report.mode);
    println!("status: {}", report.status);
    if let Some(w) = &report.witness {
        println!("V = {w}");
    }
    if let Some(z) = &report.instability_witness_point {
        let pts: Vec<String> = z.iter().map(crate::rational::fmt_rational).collect();
        println!("z = ({})", pts.join(", "));
    }
    if let Some(r) = report.lasalle_order {
        println!("lasalle order: {r}");
    }
    let t = &report.timings;
    println!(
        "time: reduction {:.3}s  solve {:.3}s  verify {:.3}s  cegis steps: {}",
        t.reduction_s, t.solve_s, t.verify_s, report.cegis_iterations
    );
    for d in &report.diagnostics {
        println!("  {d}");
    }
}

/// Runs the chosen method on one system.
pub fn synthesize(
    sys: &SystemFile,
    spec: &TemplateSpec,
    config: &SynthesisConfig,
    mode: Mode,
    verifier: &Verifier,
) -> Result<CertificateReport, CliError> {
    let report = match config.method {
        Method::Complete => synth_complete(&sys.field, spec, config, mode, verifier)?,
        Method::LpCegis | Method::SmtCegis => cegis(&sys.field, spec, config, mode, verifier)?,
    };
    Ok(report.with_system(sys.display_name(), &sys.vars))
}

fn cmd_synth(args: &SynthArgs) -> Result<i32, CliError> {
    let sys = load_system(&args.system)?;
    let config = synthesis_config(args)?;
    let verifier = Verifier::new(SolverConfig::detect(), config.timeout);
    let report = if args.instability {
        let base = InstabilityOptions::default_template(sys.vars.len());
        let spec = template_from(&args.template, base)?;
        synth_instability(&sys.field, &spec, &config, &InstabilityOptions::default(), &verifier)?
            .with_system(sys.display_name(), &sys.vars)
    } else {
        let spec = template_from(&args.template, sys.template_or_default())?;
        let mode = if args.lasalle {
            Mode::WeakLaSalle
        } else if args.weak {
            Mode::Weak
        } else {
            Mode::Strict
        };
        synthesize(&sys, &spec, &config, mode, &verifier)?
    };
    print_report(&report, args.json);
    Ok(report.status.exit_code())
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32, CliError> {
    let sys = load_system(&args.system)?;
    let v = sys.parse_candidate(&args.candidate).map_err(|e| CliError::Usage(format!("candidate: {e}")))?;
    let verifier = Verifier::new(SolverConfig::detect(), seconds(args.timeout)?);
    if verifier.solver.is_none() {
        println!("note: no SMT solver found, using the numeric falsifier only");
    }
    let report = verify_candidate(&verifier, &v, &sys.field, args.mode.into(), args.lasalle_r)?;
    println!("V = {}", v.display_with(&sys.vars));
    for o in &report.outcomes {
        println!("{o}");
    }
    let (label, code) = match report.status {
        CandidateStatus::Gas => ("VALID: GAS".to_string(), EXIT_OK),
        CandidateStatus::GasLaSalle(r) => (format!("VALID: GAS_LASALLE (order {r})"), EXIT_OK),
        CandidateStatus::WeakOnly => ("VALID: weak conditions".to_string(), EXIT_OK),
        CandidateStatus::Rejected => ("INVALID".to_string(), EXIT_UNKNOWN),
        CandidateStatus::Unknown => ("UNKNOWN".to_string(), EXIT_UNKNOWN),
        CandidateStatus::Timeout => ("TIMEOUT".to_string(), EXIT_UNKNOWN),
    };
    println!("{label}");
    Ok(code)
}

/// Bundled keys selected by `e1-e10`, `e2-e5` or `e1,e8`.
pub fn select_suite(text: &str) -> Result<Vec<&'static str>, CliError> {
    let index = |key: &str| CORPUS.iter().position(|(k, _)| *k == key.trim().to_ascii_lowercase());
    let unknown = |key: &str| CliError::Usage(format!("unknown system `{key}` in suite"));
    let mut out = Vec::new();
    for part in text.split(',').filter(|s| !s.trim().is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (i, j) = (index(a).ok_or_else(|| unknown(a))?, index(b).ok_or_else(|| unknown(b))?);
                if i > j {
                    return Err(CliError::Usage(format!("empty range `{part}`")));
                }
                out.extend(CORPUS[i..=j].iter().map(|(k, _)| *k));
            }
            None => out.push(CORPUS[index(part).ok_or_else(|| unknown(part))?].0),
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("empty suite selection".into()));
    }
    Ok(out)
}

#[derive(serde::Serialize)]
struct BenchRow {
    system: String,
    method: String,
    mode: String,
    status: Status,
    seconds: f64,
    witness: Option<String>,
}

fn bench_one(key: &str, method: Method, use_reduction: bool, timeout: Duration, verifier: &Verifier) -> BenchRow {
    let sys = corpus_system(key).expect("suite keys are bundled");
    let mode = match sys.expect {
        Some(Expectation::GasLaSalle) => Mode::WeakLaSalle,
        _ => Mode::Strict,
    };
    let mut config = SynthesisConfig::new(method);
    config.use_reduction = use_reduction;
    config.timeout = timeout;
    let start = Instant::now();
    let (status, witness) = match synthesize(&sys, &sys.template_or_default(), &config, mode, verifier) {
        Ok(r) => (r.status, r.witness),
        Err(e) => (Status::Unknown, Some(format!("error: {e}"))),
    };
    BenchRow {
        system: key.to_ascii_uppercase(),
        method: method.to_string(),
        mode: crate::synth::mode_name(mode).to_string(),
        status,
        seconds: start.elapsed().as_secs_f64(),
        witness,
    }
}

fn cmd_bench(args: &BenchArgs) -> Result<i32, CliError> {
    let keys = select_suite(&args.suite)?;
    let timeout = seconds(args.timeout)?;
    let solver = SolverConfig::detect();
    let mut methods: Vec<Method> = if args.methods.is_empty() {
        vec![Method::Complete, Method::LpCegis, Method::SmtCegis]
    } else {
        args.methods.iter().map(|&m| m.into()).collect()
    };
    if solver.is_none() {
        eprintln!("note: no SMT solver found, running lp-cegis with the numeric falsifier only");
        methods.retain(|&m| m == Method::LpCegis);
    }
    let verifier = Verifier::new(solver, timeout);
    let jobs: Vec<(&str, Method)> = keys.iter().flat_map(|&k| methods.iter().map(move |&m| (k, m))).collect();
    let workers = args.workers.max(1);
    let mut rows: Vec<(usize, BenchRow)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let (jobs, verifier) = (&jobs, &verifier);
                scope.spawn(move || {
                    jobs.iter()
                        .enumerate()
                        .skip(w)
                        .step_by(workers)
                        .map(|(i, &(k, m))| (i, bench_one(k, m, !args.no_sr, timeout, verifier)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("bench worker panicked")).collect()
    });
    rows.sort_by_key(|(i, _)| *i);
    if args.json {
        for (_, row) in &rows {
            println!("{}", serde_json::to_string(row).expect("row serializes"));
        }
    } else {
        println!("{:<4} {:<10} {:<13} {:<20} {:>8}  witness", "sys", "method", "mode", "status", "time(s)");
        for (_, r) in &rows {
            println!(
                "{:<4} {:<10} {:<13} {:<20} {:>8.3}  {}",
                r.system,
                r.method,
                r.mode,
                r.status.to_string(),
                r.seconds,
                r.witness.as_deref().unwrap_or("-")
            );
        }
    }
    let all_certified = rows.iter().all(|(_, r)| r.status.has_certificate());
    Ok(if all_certified { EXIT_OK } else { EXIT_UNKNOWN })
}

fn cmd_instab(args: &InstabArgs) -> Result<i32, CliError> {
    let dims: Vec<usize> = parse_list(&args.dims, "dimension")?.into_iter().map(|d| d as usize).collect();
    let degs: Vec<u32> = parse_list(&args.degs, "degree")?.into_iter().map(|d| d as u32).collect();
    if dims.is_empty() || degs.is_empty() {
        return Err(CliError::Usage("empty dimension or degree selection".into()));
    }
    let config = TrialConfig { timeout: seconds(args.timeout)?, use_reduction: !args.no_sr, ..TrialConfig::default() };
    let solver = SolverConfig::detect()
        .ok_or_else(|| CliError::Usage("the instability experiment needs an SMT solver (set LYRA_SOLVER)".into()))?;
    let verifier = Verifier::new(Some(solver), config.timeout);
    let mut cells: Vec<CellStats> = Vec::new();
    for &n in &dims {
        for &d in &degs {
            let spec = RandomSystemSpec::new(n, d);
            spec.validate()?;
            if args.trials == 0 {
                continue;
            }
            let (records, stats) = run_cell(&spec, args.trials, cell_seed(args.seed, n, d), &config, &verifier, args.workers)?;
            if args.records {
                for r in &records {
                    println!("{}", serde_json::to_string(r).expect("record serializes"));
                }
            }
            cells.push(stats);
        }
    }
    print!("{}", format_table(&cells));
    Ok(EXIT_OK)
}
