//! Random polynomial systems and the speedy stability/instability experiment.
//!
//! Each trial draws a field, screens out the ones that cannot be GAS for
//! trivial reasons, then runs complete synthesis in both directions under a
//! short timeout: a strict Lyapunov function for GAS and an instability
//! certificate for NOT_GAS.

use std::time::Duration;

use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::poly::{MultiIndex, Polynomial, PolyError, VectorField};
use crate::rational::{to_f64, Rational};
use crate::synth::{synth_complete, synth_instability, InstabilityOptions, Method, Status, SynthError, SynthesisConfig};
use crate::template::{Parity, TemplateSpec};
use crate::verify::{Mode, Verifier};

/// Eigenvalues with real part above this count as unstable.
pub const EIGEN_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum InstabError {
    #[error("soundness violation: system {system} was proven both GAS and not GAS")]
    SoundnessViolation { system: String },
    #[error("no admissible system after {attempts} draws for n={nvars}, deg={max_degree}")]
    TooManyExclusions { nvars: usize, max_degree: u32, attempts: usize },
    #[error("invalid experiment: {0}")]
    Config(String),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Shape of a random field: `terms_per_component` monomials of degree
/// `1..=max_degree` per component, integer coefficients in
/// `[-coeff_bound, coeff_bound] \ {0}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RandomSystemSpec {
    pub nvars: usize,
    pub max_degree: u32,
    pub terms_per_component: usize,
    pub coeff_bound: i64,
}

impl RandomSystemSpec {
    pub fn new(nvars: usize, max_degree: u32) -> Self {
        RandomSystemSpec { nvars, max_degree, terms_per_component: 3, coeff_bound: 3 }
    }

    pub fn validate(&self) -> Result<(), InstabError> {
        if !(1..=10).contains(&self.nvars) {
            return Err(InstabError::Config(format!("dimension {} outside 1..=10", self.nvars)));
        }
        if self.max_degree == 0 || self.coeff_bound < 1 || self.terms_per_component == 0 {
            return Err(InstabError::Config("degree, coefficient bound and term count must be positive".into()));
        }
        Ok(())
    }
}

/// Draws one field from `rng`. Repeated monomials are merged, so a
/// component may end up with fewer terms or vanish altogether.
pub fn gen_system_from<R: rand::Rng>(spec: &RandomSystemSpec, rng: &mut R) -> VectorField {
    let pool = TemplateSpec {
        nvars: spec.nvars,
        min_degree: 1,
        max_degree: spec.max_degree,
        parity: Parity::All,
        cross_terms: true,
    }
    .monomials();
    let components = (0..spec.nvars)
        .map(|_| {
            let terms: Vec<(MultiIndex, Rational)> = (0..spec.terms_per_component)
                .map(|_| {
                    let m = pool[rng.random_range(0..pool.len())].clone();
                    let mut c = rng.random_range(-spec.coeff_bound..spec.coeff_bound);
                    if c >= 0 {
                        c += 1;
                    }
                    (m, Rational::from_integer(c.into()))
                })
                .collect();
            Polynomial::from_terms(spec.nvars, terms)
        })
        .collect();
    VectorField::new(components).expect("random monomials have no constant term")
}

/// Deterministic in `seed`.
pub fn gen_system(spec: &RandomSystemSpec, seed: u64) -> VectorField {
    gen_system_from(spec, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Screen {
    Keep,
    /// The linearization has an eigenvalue with positive real part.
    ExcludedTrivial,
    /// Some component is identically zero.
    ExcludedZeroComponent,
}

pub fn screen(f: &VectorField) -> Screen {
    if f.components().iter().any(Polynomial::is_zero) {
        return Screen::ExcludedZeroComponent;
    }
    let n = f.nvars();
    let jac = f.linearization();
    let m = DMatrix::from_fn(n, n, |i, j| to_f64(&jac[i][j]));
    if m.complex_eigenvalues().iter().any(|l| l.re > EIGEN_TOL) {
        return Screen::ExcludedTrivial;
    }
    Screen::Keep
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    UnstableProven,
    StableProven,
    /// Both directions hit the timeout.
    TimeoutBoth,
    /// Neither proven, at least one direction finished without a timeout.
    Undecided,
    ExcludedTrivial,
    ExcludedZeroComponent,
}

/// One direction of a trial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectionResult {
    pub status: Status,
    /// Reduction plus solver time; verification excluded.
    pub synthesis_s: f64,
    pub witness: Option<String>,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub index: usize,
    pub system: String,
    pub classification: Classification,
    pub unstable: Option<DirectionResult>,
    pub stable: Option<DirectionResult>,
}

/// Knobs shared by every trial.
#[derive(Clone, Debug)]
pub struct TrialConfig {
    pub timeout: Duration,
    pub use_reduction: bool,
    /// Template for the Lyapunov direction, as a function of `n`.
    pub stable_degree: u32,
    /// Template for the instability direction.
    pub unstable_template: fn(usize) -> TemplateSpec,
    pub instability: InstabilityOptions,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            timeout: Duration::from_secs(1),
            use_reduction: true,
            stable_degree: 2,
            unstable_template: InstabilityOptions::default_template,
            instability: InstabilityOptions::default(),
        }
    }
}

fn direction(report: &crate::synth::CertificateReport) -> DirectionResult {
    DirectionResult {
        status: report.status,
        synthesis_s: report.timings.reduction_s + report.timings.solve_s,
        witness: report.witness.clone(),
        diagnostics: report.diagnostics.clone(),
    }
}

fn one_line(f: &VectorField) -> String {
    f.components().iter().enumerate().map(|(i, c)| format!("f{} = {c}", i + 1)).collect::<Vec<_>>().join("; ")
}

/// Combines the two directions. A system proven both stable and unstable
/// means a bug somewhere in the pipeline, so it aborts the experiment.
pub fn classify(system: &str, unstable: Status, stable: Status) -> Result<Classification, InstabError> {
    Ok(match (unstable == Status::NotGas, stable == Status::Gas) {
        (true, true) => return Err(InstabError::SoundnessViolation { system: system.to_string() }),
        (true, false) => Classification::UnstableProven,
        (false, true) => Classification::StableProven,
        _ if unstable == Status::Timeout && stable == Status::Timeout => Classification::TimeoutBoth,
        _ => Classification::Undecided,
    })
}

/// Screens `f` and, if admitted, runs both directions.
pub fn run_trial(index: usize, f: &VectorField, config: &TrialConfig, verifier: &Verifier) -> Result<TrialRecord, InstabError> {
    let system = one_line(f);
    let excluded = |classification| TrialRecord { index, system: system.clone(), classification, unstable: None, stable: None };
    match screen(f) {
        Screen::ExcludedTrivial => return Ok(excluded(Classification::ExcludedTrivial)),
        Screen::ExcludedZeroComponent => return Ok(excluded(Classification::ExcludedZeroComponent)),
        Screen::Keep => {}
    }
    let n = f.nvars();
    let mut synth = SynthesisConfig::new(Method::Complete);
    synth.use_reduction = config.use_reduction;
    synth.timeout = config.timeout;
    synth.seed = index as u64;

    let unstable = synth_instability(f, &(config.unstable_template)(n), &synth, &config.instability, verifier)?;
    let stable_spec = TemplateSpec::default_for(n, config.stable_degree);
    let stable = synth_complete(f, &stable_spec, &synth, Mode::Strict, verifier)?;

    let classification = classify(&system, unstable.status, stable.status)?;
    Ok(TrialRecord { index, system, classification, unstable: Some(direction(&unstable)), stable: Some(direction(&stable)) })
}

/// Per-cell summary; percentages are over the admitted trials.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellStats {
    pub nvars: usize,
    pub max_degree: u32,
    pub trials: usize,
    pub excluded_trivial: usize,
    pub excluded_zero_component: usize,
    pub unstable_pct: f64,
    pub unstable_timeout_pct: f64,
    /// Mean synthesis time over the proven-unstable trials.
    pub unstable_mean_s: f64,
    pub stable_pct: f64,
    pub stable_timeout_pct: f64,
    pub stable_mean_s: f64,
}

impl CellStats {
    pub fn from_records(spec: &RandomSystemSpec, records: &[TrialRecord]) -> Self {
        let admitted: Vec<&TrialRecord> = records.iter().filter(|r| r.unstable.is_some()).collect();
        let count = |c| records.iter().filter(|r| r.classification == c).count();
        let total = admitted.len();
        let pct = |k: usize| if total == 0 { 0.0 } else { 100.0 * k as f64 / total as f64 };
        let side = |pick: fn(&TrialRecord) -> &Option<DirectionResult>, proven: Status| {
            let results: Vec<&DirectionResult> = admitted.iter().filter_map(|r| pick(r).as_ref()).collect();
            let wins: Vec<f64> = results.iter().filter(|d| d.status == proven).map(|d| d.synthesis_s).collect();
            let timeouts = results.iter().filter(|d| d.status == Status::Timeout).count();
            let mean = if wins.is_empty() { 0.0 } else { wins.iter().sum::<f64>() / wins.len() as f64 };
            (pct(wins.len()), pct(timeouts), mean)
        };
        let (unstable_pct, unstable_timeout_pct, unstable_mean_s) = side(|r| &r.unstable, Status::NotGas);
        let (stable_pct, stable_timeout_pct, stable_mean_s) = side(|r| &r.stable, Status::Gas);
        CellStats {
            nvars: spec.nvars,
            max_degree: spec.max_degree,
            trials: total,
            excluded_trivial: count(Classification::ExcludedTrivial),
            excluded_zero_component: count(Classification::ExcludedZeroComponent),
            unstable_pct,
            unstable_timeout_pct,
            unstable_mean_s,
            stable_pct,
            stable_timeout_pct,
            stable_mean_s,
        }
    }
}

/// Seed of the system stream for one cell.
pub fn cell_seed(base: u64, nvars: usize, max_degree: u32) -> u64 {
    base ^ ((nvars as u64) << 32) ^ (u64::from(max_degree) << 48)
}

/// Draws from the cell's seeded stream until `trials` systems pass the
/// screen. Excluded draws are returned too but do not count.
pub fn admitted_systems(spec: &RandomSystemSpec, trials: usize, seed: u64) -> Result<Vec<(usize, VectorField)>, InstabError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = 100 * trials.max(1);
    let mut out = Vec::new();
    let mut kept = 0;
    for index in 0..budget {
        if kept == trials {
            return Ok(out);
        }
        let f = gen_system_from(spec, &mut rng);
        if screen(&f) == Screen::Keep {
            kept += 1;
        }
        out.push((index, f));
    }
    if kept == trials {
        return Ok(out);
    }
    Err(InstabError::TooManyExclusions { nvars: spec.nvars, max_degree: spec.max_degree, attempts: budget })
}

/// Runs one cell over `workers` threads.
pub fn run_cell(
    spec: &RandomSystemSpec,
    trials: usize,
    seed: u64,
    config: &TrialConfig,
    verifier: &Verifier,
    workers: usize,
) -> Result<(Vec<TrialRecord>, CellStats), InstabError> {
    let systems = admitted_systems(spec, trials, seed)?;
    let workers = workers.max(1);
    let mut records: Vec<TrialRecord> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let systems = &systems;
                scope.spawn(move || {
                    systems
                        .iter()
                        .skip(w)
                        .step_by(workers)
                        .map(|(i, f)| run_trial(*i, f, config, verifier))
                        .collect::<Result<Vec<_>, _>>()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("trial worker panicked")).collect::<Result<Vec<Vec<_>>, _>>()
    })?
    .into_iter()
    .flatten()
    .collect();
    records.sort_by_key(|r| r.index);
    let stats = CellStats::from_records(spec, &records);
    Ok((records, stats))
}

/// Every `(n, deg)` cell, in order.
pub fn run_table3(
    dims: &[usize],
    degs: &[u32],
    trials: usize,
    base_seed: u64,
    config: &TrialConfig,
    verifier: &Verifier,
    workers: usize,
) -> Result<Vec<CellStats>, InstabError> {
    let mut out = Vec::new();
    if trials == 0 {
        return Ok(out);
    }
    for &n in dims {
        for &d in degs {
            let spec = RandomSystemSpec::new(n, d);
            let (_, stats) = run_cell(&spec, trials, cell_seed(base_seed, n, d), config, verifier, workers)?;
            out.push(stats);
        }
    }
    Ok(out)
}

/// Aligned text table in the layout of the published results.
pub fn format_table(cells: &[CellStats]) -> String {
    let mut s = format!(
        "{:>3} {:>3} | {:>9} {:>6} {:>8} | {:>8} {:>6} {:>8} | {:>6}\n",
        "n", "deg", "unstable%", "t.o.%", "time(s)", "stable%", "t.o.%", "time(s)", "trials"
    );
    for c in cells {
        s.push_str(&format!(
            "{:>3} {:>3} | {:>9.1} {:>6.1} {:>8.3} | {:>8.1} {:>6.1} {:>8.3} | {:>6}\n",
            c.nvars,
            c.max_degree,
            c.unstable_pct,
            c.unstable_timeout_pct,
            c.unstable_mean_s,
            c.stable_pct,
            c.stable_timeout_pct,
            c.stable_mean_s,
            c.trials
        ));
    }
    s
}
