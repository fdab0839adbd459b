//! TOML input files.

use std::path::Path;

use num_rational::BigRational;
use serde::Deserialize;

use crate::expr::{Expr, Point, VarSpace};
use crate::feq::{FunctionalEquationSpec, RhsSpec, SpecError, Term};
use crate::hormander::{DEFAULT_EPS_RANK, DEFAULT_MAX_DEPTH};
use crate::verify::{decimal_rational, DEFAULT_H, DEFAULT_TOL};
use crate::vfield::VectorField;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Toml(String),
    #[error("line {line}: key `{key}`: {message}")]
    Key { line: usize, key: String, message: String },
    #[error("line {line}: {source}")]
    Spec {
        line: usize,
        #[source]
        source: SpecError,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Num {
    Int(i64),
    Float(f64),
    Str(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    equation: Option<RawEquation>,
    #[serde(default)]
    term: Vec<RawTerm>,
    rhs: Option<toml::Table>,
    b: Option<String>,
    check: Option<RawCheck>,
    candidate: Option<RawCandidate>,
    #[serde(default)]
    field: Vec<RawField>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEquation {
    n: usize,
    r: usize,
    k: usize,
    t0: Vec<Num>,
    param_direction: Option<Vec<Num>>,
    b: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    a: String,
    phi: Vec<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCheck {
    depth: Option<usize>,
    #[serde(rename = "box")]
    bounds: Option<Vec<(Num, Num)>>,
    grid: Option<usize>,
    extra_points: Option<Vec<Vec<Num>>>,
    t_box: Option<Vec<(Num, Num)>>,
    eps_rank: Option<f64>,
    tol_fd: Option<f64>,
    h_fd: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCandidate {
    f: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    label: Option<String>,
    coeffs: Vec<String>,
}

/// Settings from `[check]`, with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckSettings {
    pub depth: usize,
    pub bounds: Option<Vec<(BigRational, BigRational)>>,
    pub grid: usize,
    pub extra_points: Vec<Vec<BigRational>>,
    pub t_box: Option<Vec<(BigRational, BigRational)>>,
    pub eps_rank: f64,
    pub tol_fd: f64,
    pub h_fd: f64,
}

impl Default for CheckSettings {
    fn default() -> Self {
        CheckSettings {
            depth: DEFAULT_MAX_DEPTH,
            bounds: None,
            grid: 3,
            extra_points: Vec::new(),
            t_box: None,
            eps_rank: DEFAULT_EPS_RANK,
            tol_fd: DEFAULT_TOL,
            h_fd: DEFAULT_H,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpecFile {
    pub spec: Option<FunctionalEquationSpec>,
    pub check: CheckSettings,
    pub candidate: Option<Expr>,
    pub fields: Vec<VectorField>,
}

impl SpecFile {
    pub fn extra_points(&self) -> Vec<Point> {
        self.check.extra_points.iter().map(|p| Point::exact(p.clone())).collect()
    }
}

/// 1-based line of the first occurrence of `needle`, or 1.
fn line_of(src: &str, needle: &str) -> usize {
    src.lines().position(|l| l.contains(needle)).map_or(1, |i| i + 1)
}

/// Line of the `index`-th (0-based) line containing `needle`.
fn nth_line_of(src: &str, needle: &str, index: usize) -> usize {
    src.lines()
        .enumerate()
        .filter(|(_, l)| l.trim_start().starts_with(needle))
        .nth(index)
        .map_or(1, |(i, _)| i + 1)
}

struct Ctx<'a> {
    src: &'a str,
}

impl Ctx<'_> {
    fn key_err(&self, key: &str, message: impl Into<String>) -> LoadError {
        let leaf = key.rsplit('.').next().unwrap_or(key);
        LoadError::Key {
            line: line_of(self.src, leaf),
            key: key.to_string(),
            message: message.into(),
        }
    }

    fn rational(&self, key: &str, v: &Num) -> Result<BigRational, LoadError> {
        match v {
            Num::Int(i) => Ok(BigRational::from_integer((*i).into())),
            Num::Float(f) => decimal_rational(*f).ok_or_else(|| self.key_err(key, format!("not a finite number: {f}"))),
            Num::Str(s) => match Expr::parse_in(s, &VarSpace::default()).map(|e| e.simplify()) {
                Ok(Expr::Const(c)) => Ok(c),
                Ok(_) => Err(self.key_err(key, format!("not a rational constant: {s:?}"))),
                Err(e) => Err(self.key_err(key, format!("{s:?}: {e}"))),
            },
        }
    }

    fn rationals(&self, key: &str, v: &[Num]) -> Result<Vec<BigRational>, LoadError> {
        v.iter().map(|x| self.rational(key, x)).collect()
    }

    fn interval_list(&self, key: &str, v: &[(Num, Num)]) -> Result<Vec<(BigRational, BigRational)>, LoadError> {
        v.iter()
            .map(|(lo, hi)| {
                let (lo, hi) = (self.rational(key, lo)?, self.rational(key, hi)?);
                if lo > hi {
                    return Err(self.key_err(key, format!("empty interval [{lo}, {hi}]")));
                }
                Ok((lo, hi))
            })
            .collect()
    }

    fn expr(&self, key: &str, src: &str, space: &VarSpace) -> Result<Expr, LoadError> {
        Expr::parse_in(src, space).map_err(|e| self.key_err(key, format!("{src:?}: {e}")))
    }
}

pub fn load_spec(path: &Path) -> Result<SpecFile, LoadError> {
    let src = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec(&src)
}

pub fn parse_spec(src: &str) -> Result<SpecFile, LoadError> {
    let raw: RawFile = toml::from_str(src).map_err(|e| LoadError::Toml(e.to_string().trim_end().to_string()))?;
    let cx = Ctx { src };

    let spec = match &raw.equation {
        Some(eq) => Some(build_spec(&cx, eq, &raw)?),
        None if !raw.term.is_empty() || raw.rhs.is_some() || raw.b.is_some() => {
            return Err(cx.key_err("equation", "missing [equation] table"))
        }
        None => None,
    };

    let rc = raw.check.unwrap_or_default();
    let mut check = CheckSettings::default();
    if let Some(d) = rc.depth {
        check.depth = d;
    }
    if let Some(g) = rc.grid {
        if g == 0 {
            return Err(cx.key_err("check.grid", "must be at least 1"));
        }
        check.grid = g;
    }
    if let Some(b) = &rc.bounds {
        check.bounds = Some(cx.interval_list("check.box", b)?);
    }
    if let Some(b) = &rc.t_box {
        check.t_box = Some(cx.interval_list("check.t_box", b)?);
    }
    if let Some(pts) = &rc.extra_points {
        check.extra_points = pts
            .iter()
            .map(|p| cx.rationals("check.extra_points", p))
            .collect::<Result<_, _>>()?;
    }
    for (key, value, slot) in [
        ("check.eps_rank", rc.eps_rank, &mut check.eps_rank),
        ("check.tol_fd", rc.tol_fd, &mut check.tol_fd),
        ("check.h_fd", rc.h_fd, &mut check.h_fd),
    ] {
        if let Some(v) = value {
            if !(v.is_finite() && v > 0.0) {
                return Err(cx.key_err(key, format!("must be positive, got {v}")));
            }
            *slot = v;
        }
    }

    let candidate = match (&raw.candidate, &spec) {
        (Some(c), Some(s)) => Some(cx.expr("candidate.f", &c.f, &VarSpace::new(s.n() as u32, 0, 0))?),
        (Some(_), None) => return Err(cx.key_err("candidate", "a candidate needs an [equation]")),
        _ => None,
    };

    let mut fields = Vec::with_capacity(raw.field.len());
    for (i, f) in raw.field.iter().enumerate() {
        let key = format!("field[{}].coeffs", i + 1);
        let n = f.coeffs.len();
        if n == 0 {
            return Err(cx.key_err(&key, "a field needs at least one coefficient"));
        }
        if let Some(first) = fields.first().map(VectorField::dim) {
            if first != n {
                return Err(cx.key_err(&key, format!("has {n} coefficients, the first field has {first}")));
            }
        }
        let space = VarSpace::new(n as u32, 0, 0);
        let coeffs = f.coeffs.iter().map(|c| cx.expr(&key, c, &space)).collect::<Result<Vec<_>, _>>()?;
        let label = f.label.clone().unwrap_or_else(|| format!("X{}", i + 1));
        fields.push(VectorField::new(label, coeffs).map_err(|e| cx.key_err(&key, e.to_string()))?);
    }

    let n = spec.as_ref().map(FunctionalEquationSpec::n).or(fields.first().map(VectorField::dim));
    if let Some(n) = n {
        if let Some(b) = &check.bounds {
            if b.len() != n {
                return Err(cx.key_err("check.box", format!("has {} intervals, expected n = {n}", b.len())));
            }
        }
        if let Some(p) = check.extra_points.iter().find(|p| p.len() != n) {
            return Err(cx.key_err("check.extra_points", format!("point of dimension {}, expected n = {n}", p.len())));
        }
    }
    if let (Some(t), Some(s)) = (&check.t_box, &spec) {
        if t.len() != s.r() {
            return Err(cx.key_err("check.t_box", format!("has {} intervals, expected r = {}", t.len(), s.r())));
        }
    }

    Ok(SpecFile {
        spec,
        check,
        candidate,
        fields,
    })
}

fn build_spec(cx: &Ctx, eq: &RawEquation, raw: &RawFile) -> Result<FunctionalEquationSpec, LoadError> {
    if eq.k != raw.term.len() {
        return Err(cx.key_err(
            "equation.k",
            format!("term count mismatch: k = {} but found {} [[term]] block(s)", eq.k, raw.term.len()),
        ));
    }
    if eq.t0.len() != eq.r {
        return Err(cx.key_err("equation.t0", format!("has {} entries, expected r = {}", eq.t0.len(), eq.r)));
    }
    let space = VarSpace::new(eq.n as u32, eq.r as u32, 0);
    let mut terms = Vec::with_capacity(eq.k);
    for (j, t) in raw.term.iter().enumerate() {
        let line = nth_line_of(cx.src, "[[term]]", j);
        if t.phi.len() != eq.n {
            return Err(LoadError::Spec {
                line,
                source: SpecError::PhiLength {
                    term: j + 1,
                    expected: eq.n,
                    found: t.phi.len(),
                },
            });
        }
        let a = cx.expr(&format!("term[{}].a", j + 1), &t.a, &space)?;
        let phi = t
            .phi
            .iter()
            .map(|c| cx.expr(&format!("term[{}].phi", j + 1), c, &space))
            .collect::<Result<Vec<_>, _>>()?;
        terms.push(Term { a, phi });
    }
    let b_src = match (&eq.b, &raw.b) {
        (Some(_), Some(_)) => return Err(cx.key_err("b", "given both in [equation] and at top level")),
        (Some(b), None) | (None, Some(b)) => b.as_str(),
        (None, None) => "0",
    };
    let b = cx.expr("equation.b", b_src, &space)?;
    let t0 = cx.rationals("equation.t0", &eq.t0)?;
    let wrap = |source: SpecError| LoadError::Spec {
        line: line_of(cx.src, "[equation]"),
        source,
    };
    let mut spec = FunctionalEquationSpec::new(eq.n, eq.r, terms, b, t0).map_err(wrap)?;
    if let Some(d) = &eq.param_direction {
        spec = spec.with_direction(cx.rationals("equation.param_direction", d)?).map_err(wrap)?;
    }
    if let Some(rhs) = &raw.rhs {
        spec = spec.with_rhs(build_rhs(cx, rhs, eq.n)?).map_err(|source| LoadError::Spec {
            line: line_of(cx.src, "[rhs]"),
            source,
        })?;
    }
    Ok(spec)
}

fn build_rhs(cx: &Ctx, table: &toml::Table, n: usize) -> Result<RhsSpec, LoadError> {
    let s = match table.get("s") {
        Some(toml::Value::Integer(s)) if *s >= 0 => *s as usize,
        Some(_) => return Err(cx.key_err("rhs.s", "must be a nonnegative integer")),
        None => return Err(cx.key_err("rhs.s", "missing")),
    };
    for key in table.keys() {
        let known = key == "s"
            || key == "F"
            || key
                .strip_prefix("lambda_")
                .and_then(|i| i.parse::<usize>().ok())
                .is_some_and(|i| (1..=s).contains(&i));
        if !known {
            return Err(cx.key_err(&format!("rhs.{key}"), "unknown key"));
        }
    }
    let f_src = match table.get("F") {
        Some(toml::Value::String(f)) => f.as_str(),
        Some(_) => return Err(cx.key_err("rhs.F", "must be an expression string")),
        None => return Err(cx.key_err("rhs.F", "missing")),
    };
    let f = cx.expr("rhs.F", f_src, &VarSpace::new(n as u32, 0, s as u32))?;
    let xspace = VarSpace::new(n as u32, 0, 0);
    let mut lambdas = Vec::with_capacity(s);
    for i in 1..=s {
        let key = format!("rhs.lambda_{i}");
        let arr = match table.get(&format!("lambda_{i}")) {
            Some(toml::Value::Array(a)) => a,
            Some(_) => return Err(cx.key_err(&key, "must be an array of expression strings")),
            None => return Err(cx.key_err(&key, "missing")),
        };
        let comps = arr
            .iter()
            .map(|v| match v {
                toml::Value::String(c) => cx.expr(&key, c, &xspace),
                _ => Err(cx.key_err(&key, "must be an array of expression strings")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        lambdas.push(comps);
    }
    Ok(RhsSpec { f, lambdas })
}

#[cfg(test)]
mod tests {
    use super::*;

    const JENSEN: &str = r#"
[equation]
n = 1
r = 1
k = 2
t0 = ["0"]
b = "0"

[[term]]
a = "1"
phi = ["t1"]

[[term]]
a = "1"
phi = ["-t1"]

[rhs]
s = 1
F = "2*z1"
lambda_1 = ["x1"]
"#;

    #[test]
    fn loads_jensen() {
        let f = parse_spec(JENSEN).unwrap();
        let spec = f.spec.unwrap();
        assert_eq!(spec, crate::feq::fixtures::jensen());
        assert_eq!(f.check, CheckSettings::default());
    }

    #[test]
    fn term_count_mismatch() {
        let src = JENSEN.replacen("[[term]]\na = \"1\"\nphi = [\"-t1\"]\n", "", 1);
        let err = parse_spec(&src).unwrap_err().to_string();
        assert!(err.contains("term count mismatch"), "{err}");
        assert!(err.starts_with("line 5:"), "{err}");
    }

    #[test]
    fn phi_length_mismatch() {
        let src = JENSEN.replacen("phi = [\"-t1\"]", "phi = [\"-t1\", \"0\"]", 1);
        let err = parse_spec(&src).unwrap_err();
        assert!(matches!(err, LoadError::Spec { line: 13, source: SpecError::PhiLength { term: 2, .. } }), "{err}");
    }

    #[test]
    fn unknown_keys_and_bad_expressions() {
        let err = parse_spec(&format!("{JENSEN}\n[check]\ndepht = 3\n")).unwrap_err().to_string();
        assert!(err.contains("depht"), "{err}");
        let err = parse_spec(&JENSEN.replacen("a = \"1\"", "a = \"1 + y\"", 1)).unwrap_err().to_string();
        assert!(err.contains("term[1].a"), "{err}");
        let err = parse_spec(&JENSEN.replace("t0 = [\"0\"]", "t0 = [\"x1\"]")).unwrap_err().to_string();
        assert!(err.starts_with("line 6: key `equation.t0`"), "{err}");
        let err = parse_spec(&JENSEN.replace("t0 = [\"0\"]", "t0 = [\"sqrt(2)\"]")).unwrap_err().to_string();
        assert!(err.contains("not a rational constant"), "{err}");
    }

    #[test]
    fn check_table_and_fields() {
        let src = r#"
[[field]]
label = "X1"
coeffs = ["1", "0"]

[[field]]
coeffs = ["0", "x1"]

[check]
depth = 1
box = [["-1", "1"], [-2, 2]]
grid = 5
extra_points = [["1/3", "0"]]
eps_rank = 1e-8
"#;
        let f = parse_spec(src).unwrap();
        assert!(f.spec.is_none());
        assert_eq!(f.fields.len(), 2);
        assert_eq!(f.fields[1].label(), "X2");
        assert_eq!(f.check.depth, 1);
        assert_eq!(f.check.grid, 5);
        assert_eq!(f.check.eps_rank, 1e-8);
        assert_eq!(f.extra_points().len(), 1);
        let bad = src.replace("[-2, 2]", "[2, -2]");
        assert!(parse_spec(&bad).unwrap_err().to_string().contains("empty interval"));
    }
}
