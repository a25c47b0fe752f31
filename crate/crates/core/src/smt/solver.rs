//! Solver subprocess driver.

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::sexp::{parse_all, to_rational, Sexp};
use super::{Model, SmtError};

/// How to launch the solver. Defaults to a Z3-compatible binary reading
/// SMT-LIB v2 on standard input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    pub binary: PathBuf,
    pub args: Vec<String>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { binary: PathBuf::from("z3"), args: vec!["-in".into(), "-smt2".into()] }
    }
}

impl SolverConfig {
    /// Reads `LYRA_SOLVER` (binary) and `LYRA_SOLVER_ARGS` (whitespace-separated flags).
    pub fn from_env() -> Self {
        let mut cfg = SolverConfig::default();
        if let Ok(bin) = std::env::var("LYRA_SOLVER") {
            cfg.binary = PathBuf::from(bin);
        }
        if let Ok(args) = std::env::var("LYRA_SOLVER_ARGS") {
            cfg.args = args.split_whitespace().map(str::to_string).collect();
        }
        cfg
    }

    /// The configured solver, if it answers a trivial query.
    pub fn detect() -> Option<Self> {
        if std::env::var("LYRA_SOLVER").is_ok_and(|v| v == "none") {
            return None;
        }
        let cfg = Self::from_env();
        match run_solver(&cfg, "(check-sat)\n", Duration::from_secs(10), &[]) {
            Ok(SolverOutcome::Sat(_)) => Some(cfg),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolverOutcome {
    Sat(Model),
    Unsat,
    /// Solver gave up, crashed, printed something unexpected, or returned an
    /// irrational model. The string carries the reason and raw transcript.
    Unknown(String),
    Timeout,
}

fn parse_response(stdout: &str, constants: &[String]) -> SolverOutcome {
    let mut lines = stdout.lines().map(str::trim).filter(|l| !l.is_empty());
    match lines.next() {
        Some("unsat") => SolverOutcome::Unsat,
        Some("sat") => {
            let rest: String = lines.collect::<Vec<_>>().join("\n");
            match read_model(&rest, constants) {
                Ok(model) => SolverOutcome::Sat(model),
                Err(e) => SolverOutcome::Unknown(format!("{e}; transcript: {stdout}")),
            }
        }
        Some("unknown") => SolverOutcome::Unknown(format!("solver answered unknown; transcript: {stdout}")),
        Some("timeout") => SolverOutcome::Timeout,
        _ => SolverOutcome::Unknown(format!("unexpected solver output: {stdout}")),
    }
}

fn read_model(text: &str, constants: &[String]) -> Result<Model, SmtError> {
    let mut model = Model::new();
    if constants.is_empty() {
        return Ok(model);
    }
    let exprs = parse_all(text)?;
    let pairs = exprs
        .iter()
        .find_map(|e| e.as_list().filter(|l| l.iter().all(|p| p.as_list().is_some_and(|p| p.len() == 2))))
        .ok_or_else(|| SmtError::Parse(format!("no get-value block in `{text}`")))?;
    for pair in pairs {
        let [name, value] = pair.as_list().expect("checked above") else { unreachable!() };
        let Sexp::Atom(name) = name else { continue };
        model.insert(name.clone(), to_rational(value)?);
    }
    for c in constants {
        if !model.contains_key(c) {
            return Err(SmtError::Parse(format!("model lacks a value for {c}")));
        }
    }
    Ok(model)
}

/// Runs one query in a fresh process. The process is killed once `timeout`
/// of wall-clock time has elapsed.
pub fn run_solver(cfg: &SolverConfig, script: &str, timeout: Duration, constants: &[String]) -> Result<SolverOutcome, SmtError> {
    Ok(match run_raw(cfg, script, timeout)? {
        None => SolverOutcome::Timeout,
        Some(out) => parse_response(&out, constants),
    })
}

/// Standard output of one solver process, or `None` if it was killed at the deadline.
fn run_raw(cfg: &SolverConfig, script: &str, timeout: Duration) -> Result<Option<String>, SmtError> {
    let mut child = Command::new(&cfg.binary)
        .args(&cfg.args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied => {
                SmtError::SolverNotFound(cfg.binary.display().to_string())
            }
            _ => SmtError::Io(e.to_string()),
        })?;
    let mut stdin = child.stdin.take().expect("piped stdin");
    let text = script.to_owned();
    // A solver that exits early closes the pipe; that shows up in its output.
    let writer = thread::spawn(move || {
        let _ = stdin.write_all(text.as_bytes());
    });
    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    let out_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });

    let start = Instant::now();
    let mut poll = Duration::from_micros(200);
    loop {
        match child.try_wait() {
            Ok(Some(_)) => break,
            Ok(None) if start.elapsed() >= timeout => {
                let _ = child.kill();
                let _ = child.wait();
                let _ = writer.join();
                let _ = out_reader.join();
                let _ = err_reader.join();
                return Ok(None);
            }
            Ok(None) => {
                thread::sleep(poll.min(timeout.saturating_sub(start.elapsed())));
                poll = (poll * 2).min(Duration::from_millis(5));
            }
            Err(e) => return Err(SmtError::Io(e.to_string())),
        }
    }
    let _ = writer.join();
    let out = out_reader.join().unwrap_or_default();
    let err = err_reader.join().unwrap_or_default();
    if out.trim().is_empty() && !err.is_empty() {
        return Ok(Some(format!("stderr: {err}")));
    }
    Ok(Some(out))
}

/// Re-runs a satisfiable query asking for decimal approximations, for when
/// the exact model is algebraic. Values are truncated decimals, not exact.
pub fn approximate_model(cfg: &SolverConfig, script: &str, timeout: Duration, constants: &[String]) -> Option<Model> {
    let text = format!("(set-option :pp.decimal true)\n(set-option :pp.decimal_precision 12)\n{script}");
    let out = run_raw(cfg, &text, timeout).ok()??.replace('?', "");
    match parse_response(&out, constants) {
        SolverOutcome::Sat(m) => Some(m),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn responses() {
        assert_eq!(parse_response("unsat\n(error \"model is not available\")\n", &names(&["c"])), SolverOutcome::Unsat);
        let sat = parse_response("sat\n((c0 1.0)\n (c1 (/ 1.0 2.0)))\n", &names(&["c0", "c1"]));
        let SolverOutcome::Sat(m) = sat else { panic!("expected sat") };
        assert_eq!(m["c1"], ratio(1, 2));
        assert!(matches!(parse_response("sat\n((c0 (root-obj (+ (^ x 2) (- 2)) 1)))", &names(&["c0"])), SolverOutcome::Unknown(_)));
        assert!(matches!(parse_response("garbage", &[]), SolverOutcome::Unknown(_)));
        assert_eq!(parse_response("sat\n", &[]), SolverOutcome::Sat(Model::new()));
    }

    #[test]
    fn missing_binary_is_a_configuration_error() {
        let cfg = SolverConfig { binary: PathBuf::from("/nonexistent/solver"), args: vec![] };
        assert!(matches!(run_solver(&cfg, "(check-sat)", Duration::from_secs(1), &[]), Err(SmtError::SolverNotFound(_))));
    }
}
