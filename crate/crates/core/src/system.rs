//! System description files and the bundled benchmark corpus.
//!
//! ```text
//! # comment
//! name: E8
//! vars: x1 x2
//! f1: x2
//! f2: -x1^3 - x2^3
//! expect: GAS_LASALLE
//! template: degree=2..4 cross=no
//! ```
//!
//! Only `vars:` and one `fN:` line per variable are required.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::poly::{parse_polynomial, Polynomial, VectorField};
use crate::template::{Parity, TemplateSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {message}")]
pub struct SystemParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Status a benchmark is expected to reach.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    Gas,
    GasLaSalle,
    NotGas,
}

impl FromStr for Expectation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "GAS" => Ok(Expectation::Gas),
            "GAS_LASALLE" => Ok(Expectation::GasLaSalle),
            "NOT_GAS" => Ok(Expectation::NotGas),
            other => Err(format!("unknown expectation `{other}`")),
        }
    }
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Expectation::Gas => "GAS",
            Expectation::GasLaSalle => "GAS_LASALLE",
            Expectation::NotGas => "NOT_GAS",
        })
    }
}

#[derive(Clone, Debug)]
pub struct SystemFile {
    pub name: Option<String>,
    pub vars: Vec<String>,
    pub field: VectorField,
    pub expect: Option<Expectation>,
    pub template: Option<TemplateSpec>,
}

impl SystemFile {
    pub fn display_name(&self) -> &str {
        self.name.as_deref().unwrap_or("system")
    }

    /// Declared template, or the default quadratic one.
    pub fn template_or_default(&self) -> TemplateSpec {
        self.template.clone().unwrap_or_else(|| TemplateSpec::default_for(self.vars.len(), 2))
    }

    /// Parses a candidate polynomial over this system's variables.
    pub fn parse_candidate(&self, text: &str) -> Result<Polynomial, crate::poly::ParseError> {
        parse_polynomial(text, &self.vars)
    }
}

/// `degree=LO..HI` (or `degree=K`), `cross=yes|no`, `parity=even|all`.
fn parse_template(text: &str, nvars: usize) -> Result<TemplateSpec, String> {
    let mut spec = TemplateSpec::default_for(nvars, 2);
    let mut cross = None;
    for item in text.split_whitespace() {
        let (key, value) = item.split_once('=').ok_or_else(|| format!("expected key=value, got `{item}`"))?;
        match key {
            "degree" => {
                let (lo, hi) = match value.split_once("..") {
                    Some((lo, hi)) => (lo, hi),
                    None => (value, value),
                };
                let lo: u32 = lo.parse().map_err(|_| format!("bad degree `{value}`"))?;
                let hi: u32 = hi.parse().map_err(|_| format!("bad degree `{value}`"))?;
                spec.min_degree = lo;
                spec.max_degree = hi;
            }
            "cross" => {
                cross = Some(match value {
                    "yes" => true,
                    "no" => false,
                    _ => return Err(format!("cross must be yes or no, got `{value}`")),
                })
            }
            "parity" => {
                spec.parity = match value {
                    "even" => Parity::EvenOnly,
                    "all" => Parity::All,
                    _ => return Err(format!("parity must be even or all, got `{value}`")),
                }
            }
            _ => return Err(format!("unknown template key `{key}`")),
        }
    }
    spec.cross_terms = cross.unwrap_or(spec.max_degree <= 2);
    spec.validate().map_err(|e| e.to_string())?;
    Ok(spec)
}

pub fn parse_system(text: &str) -> Result<SystemFile, SystemParseError> {
    let mut name = None;
    let mut vars: Option<(Vec<String>, usize)> = None;
    let mut comps: Vec<(usize, usize, usize, String)> = Vec::new();
    let mut expect = None;
    let mut template: Option<(usize, usize, String)> = None;
    let err = |line, column, message: String| SystemParseError { line, column, message };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once(':') else {
            let col = raw.len() - raw.trim_start().len() + 1;
            return Err(err(line_no, col, "expected `key: value`".into()));
        };
        let value_col = key.len() + 2 + (value.len() - value.trim_start().len());
        let key_trim = key.trim();
        let value = value.trim();
        match key_trim {
            "name" => name = Some(value.to_string()),
            "vars" => {
                let names: Vec<String> = value.split_whitespace().map(str::to_string).collect();
                if names.is_empty() {
                    return Err(err(line_no, value_col, "empty variable list".into()));
                }
                for (i, v) in names.iter().enumerate() {
                    let ok = v.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                        && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
                    if !ok || names[..i].contains(v) {
                        return Err(err(line_no, value_col, format!("bad or duplicate variable `{v}`")));
                    }
                }
                vars = Some((names, line_no));
            }
            "expect" => {
                expect = Some(value.parse::<Expectation>().map_err(|m| err(line_no, value_col, m))?);
            }
            "template" => template = Some((line_no, value_col, value.to_string())),
            k if k.starts_with('f') && k.len() > 1 && k[1..].chars().all(|c| c.is_ascii_digit()) => {
                let i: usize = k[1..].parse().map_err(|_| err(line_no, 1, format!("bad component `{k}`")))?;
                if i == 0 {
                    return Err(err(line_no, 1, "components are numbered from f1".into()));
                }
                comps.push((i, line_no, value_col, value.to_string()));
            }
            other => return Err(err(line_no, 1, format!("unknown key `{other}`"))),
        }
    }

    let (vars, _) = vars.ok_or_else(|| err(1, 1, "missing `vars:` line".into()))?;
    let n = vars.len();
    let mut polys: Vec<Option<Polynomial>> = vec![None; n];
    for (i, line, col, text) in comps {
        if i > n {
            return Err(err(line, 1, format!("component f{i} but only {n} variables")));
        }
        if polys[i - 1].is_some() {
            return Err(err(line, 1, format!("duplicate component f{i}")));
        }
        let p = parse_polynomial(&text, &vars).map_err(|e| err(line, col + e.column - 1, e.message))?;
        if !p.constant_term().eq(&num_traits::Zero::zero()) {
            return Err(err(line, col, format!("f{i} has a nonzero constant term, so f(0) != 0")));
        }
        polys[i - 1] = Some(p);
    }
    let mut components = Vec::with_capacity(n);
    for (i, p) in polys.into_iter().enumerate() {
        components.push(p.ok_or_else(|| err(1, 1, format!("missing component f{}", i + 1)))?);
    }
    let field = VectorField::new(components).map_err(|e| err(1, 1, e.to_string()))?;
    let template = template
        .map(|(line, col, text)| parse_template(&text, n).map_err(|m| err(line, col, m)))
        .transpose()?;
    Ok(SystemFile { name, vars, field, expect, template })
}

/// The ten benchmark systems, in order.
pub const CORPUS: [(&str, &str); 10] = [
    ("e1", include_str!("../corpus/e1.sys")),
    ("e2", include_str!("../corpus/e2.sys")),
    ("e3", include_str!("../corpus/e3.sys")),
    ("e4", include_str!("../corpus/e4.sys")),
    ("e5", include_str!("../corpus/e5.sys")),
    ("e6", include_str!("../corpus/e6.sys")),
    ("e7", include_str!("../corpus/e7.sys")),
    ("e8", include_str!("../corpus/e8.sys")),
    ("e9", include_str!("../corpus/e9.sys")),
    ("e10", include_str!("../corpus/e10.sys")),
];

/// A bundled system by key (`e1` … `e10`, case-insensitive).
pub fn corpus_system(key: &str) -> Option<SystemFile> {
    let key = key.to_ascii_lowercase();
    CORPUS
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, text)| parse_system(text).expect("bundled corpus parses"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_metadata() {
        let s = parse_system("# demo\nname: demo\nvars: a b\nf1: -a + b^3  # trailing\nf2: -b\nexpect: GAS\ntemplate: degree=2..4\n")
            .unwrap();
        assert_eq!(s.vars, vec!["a", "b"]);
        assert_eq!(s.field.component(0).display_with(&s.vars), "b^3 - a");
        assert_eq!(s.expect, Some(Expectation::Gas));
        let t = s.template.unwrap();
        assert_eq!((t.min_degree, t.max_degree, t.cross_terms), (2, 4, false));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_system("vars: x1 x2\nf1: x1 +* x2\nf2: x1\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.column > 4, "{e}");
        assert_eq!(parse_system("vars: x1\nf1: 1 + x1\n").unwrap_err().line, 2);
        assert!(parse_system("vars: x1 x2\nf1: x1\n").unwrap_err().message.contains("f2"));
        assert_eq!(parse_system("vars: x\nbogus line\n").unwrap_err().line, 2);
    }

    #[test]
    fn corpus_parses() {
        for (key, _) in CORPUS {
            let s = corpus_system(key).unwrap();
            assert_eq!(s.field.nvars(), s.vars.len(), "{key}");
        }
    }
}
