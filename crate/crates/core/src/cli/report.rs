//! Machine-readable reports. Every number is a string: exact values as
//! `p/q`, floats with 17 significant digits.

use serde::Serialize;

use crate::expr::{Expr, Point, Value};
use crate::feq::{AssumptionReport, CheckReport, DerivedPde, FunctionalEquationSpec, IdentityReport, SampleViolation, TheoremReport};
use crate::hormander::{BracketBasis, RankReport};
use crate::linalg::Arithmetic;
use crate::verify::Lemma31Report;
use crate::vfield::VectorField;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn point(p: &Point) -> Vec<String> {
    p.coords.iter().map(Value::to_string).collect()
}

fn exprs(v: &[Expr]) -> Vec<String> {
    v.iter().map(Expr::to_string).collect()
}

#[derive(Debug, Serialize)]
pub struct SpecJson {
    pub n: usize,
    pub r: usize,
    pub k: usize,
    pub t0: Vec<String>,
    pub param_direction: Vec<String>,
    pub terms: Vec<TermJson>,
    pub b: String,
}

#[derive(Debug, Serialize)]
pub struct TermJson {
    pub a: String,
    pub phi: Vec<String>,
}

impl SpecJson {
    pub fn new(spec: &FunctionalEquationSpec) -> Self {
        SpecJson {
            n: spec.n(),
            r: spec.r(),
            k: spec.k(),
            t0: spec.t0().iter().map(|c| c.to_string()).collect(),
            param_direction: spec.direction().iter().map(|c| c.to_string()).collect(),
            terms: spec
                .terms()
                .iter()
                .map(|t| TermJson {
                    a: t.a.to_string(),
                    phi: exprs(&t.phi),
                })
                .collect(),
            b: spec.b().to_string(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SamplingJson {
    #[serde(rename = "box")]
    pub bounds: Vec<[String; 2]>,
    pub grid: usize,
    pub points: usize,
    pub t_box: Vec<[String; 2]>,
    pub eps_rank: String,
    pub depth: usize,
}

#[derive(Debug, Serialize)]
pub struct AnchorJson {
    pub term: usize,
    pub residual: Vec<String>,
    pub error: Option<String>,
    pub ok: bool,
}

#[derive(Debug, Serialize)]
pub struct ViolationJson {
    pub term: usize,
    pub x: Vec<String>,
    pub t: Vec<String>,
    pub value: Option<String>,
    pub error: Option<String>,
}

impl ViolationJson {
    fn new(v: &SampleViolation) -> Self {
        ViolationJson {
            term: v.term,
            x: point(&v.x),
            t: point(&v.t),
            value: v.value.as_ref().map(Value::to_string),
            error: v.error.as_ref().map(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SampleCheckJson {
    pub status: String,
    pub samples: usize,
    pub violations: Vec<ViolationJson>,
}

#[derive(Debug, Serialize)]
pub struct AssumptionsJson {
    pub anchor_ok: bool,
    pub anchor: Vec<AnchorJson>,
    pub positivity: SampleCheckJson,
    pub nonnegativity: SampleCheckJson,
    pub constant_coefficients: bool,
}

impl AssumptionsJson {
    pub fn new(a: &AssumptionReport) -> Self {
        AssumptionsJson {
            anchor_ok: a.anchor_ok(),
            anchor: a
                .anchor
                .iter()
                .map(|r| AnchorJson {
                    term: r.term,
                    residual: r.residual.iter().map(Value::to_string).collect(),
                    error: r.error.as_ref().map(|e| e.to_string()),
                    ok: r.ok(),
                })
                .collect(),
            positivity: SampleCheckJson {
                status: if a.positive_on_samples() {
                    "positive on sampled set"
                } else {
                    "not positive on sampled set"
                }
                .into(),
                samples: a.positivity_samples,
                violations: a.positivity.iter().map(ViolationJson::new).collect(),
            },
            nonnegativity: SampleCheckJson {
                status: if a.nonnegative_on_samples() {
                    "nonnegative on sampled set"
                } else {
                    "negative on sampled set"
                }
                .into(),
                samples: a.nonnegativity_samples,
                violations: a.nonnegativity.iter().map(ViolationJson::new).collect(),
            },
            constant_coefficients: a.constant_coefficients,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct WitnessJson {
    pub point: Option<Vec<String>>,
    pub rank: usize,
    pub vectors: Vec<String>,
    pub arithmetic: Arithmetic,
}

#[derive(Debug, Serialize)]
pub struct TheoremJson {
    pub verdict: &'static str,
    pub reason: Option<String>,
    pub witnesses: Vec<WitnessJson>,
    pub failing_points: Vec<Vec<String>>,
    pub depth_used: Option<usize>,
    pub warnings: Vec<String>,
}

impl TheoremJson {
    pub fn new(t: &TheoremReport) -> Self {
        TheoremJson {
            verdict: t.verdict.as_str(),
            reason: t.reason.clone(),
            witnesses: t
                .witnesses
                .iter()
                .map(|w| WitnessJson {
                    point: w.point.as_ref().map(point),
                    rank: w.rank,
                    vectors: w.vectors.clone(),
                    arithmetic: w.arithmetic,
                })
                .collect(),
            failing_points: t.failing_points.iter().map(point).collect(),
            depth_used: t.depth_used,
            warnings: t.warnings.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TheoremsJson {
    pub swiatak: TheoremJson,
    pub corollary22: TheoremJson,
    pub theorem23: TheoremJson,
    pub theorem21: TheoremJson,
}

#[derive(Debug, Serialize)]
pub struct FieldJson {
    pub label: String,
    pub coeffs: Vec<String>,
}

impl FieldJson {
    pub fn new(f: &VectorField) -> Self {
        FieldJson {
            label: f.label().to_string(),
            coeffs: exprs(f.coeffs()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ExpansionJson {
    #[serde(rename = "A")]
    pub a: Vec<Vec<String>>,
    #[serde(rename = "B")]
    pub b: Vec<String>,
    pub c: String,
}

#[derive(Debug, Serialize)]
pub struct DerivedPdeJson {
    pub fields: Vec<FieldJson>,
    pub expansion: ExpansionJson,
    pub c: String,
    pub g: String,
    pub operator: String,
}

impl DerivedPdeJson {
    pub fn new(p: &DerivedPde) -> Self {
        let mut fields: Vec<FieldJson> = p.l_fields.iter().map(FieldJson::new).collect();
        fields.push(FieldJson::new(&p.l0));
        DerivedPdeJson {
            fields,
            expansion: ExpansionJson {
                a: p.a.iter().map(|row| exprs(row)).collect(),
                b: exprs(&p.b),
                c: p.c.to_string(),
            },
            c: p.c.to_string(),
            g: p.g.to_string(),
            operator: p.operator_text(),
        }
    }
}

/// Either a derivation or the reason it was refused.
#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum DerivedOrError {
    Derived(DerivedPdeJson),
    Error { error: String },
}

#[derive(Debug, Serialize)]
pub struct DeviationJson {
    pub x: Vec<String>,
    pub fd: String,
    pub symbolic: String,
}

#[derive(Debug, Serialize)]
pub struct Lemma31Json {
    pub candidate: String,
    pub status: &'static str,
    pub max_residual: String,
    pub max_fd_deviation: String,
    pub max_symbolic_deviation: String,
    pub h: String,
    pub tol: String,
    pub points: Vec<DeviationJson>,
}

impl Lemma31Json {
    pub fn new(f: &Expr, r: &Lemma31Report) -> Self {
        Lemma31Json {
            candidate: f.to_string(),
            status: r.label(),
            max_residual: fmt_f64(r.max_residual),
            max_fd_deviation: fmt_f64(r.max_fd),
            max_symbolic_deviation: fmt_f64(r.max_symbolic),
            h: fmt_f64(r.h),
            tol: fmt_f64(r.tol),
            points: r
                .points
                .iter()
                .map(|d| DeviationJson {
                    x: point(&d.x),
                    fd: d.fd.to_string(),
                    symbolic: d.symbolic.to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Lemma31OrError {
    Report(Lemma31Json),
    Error { candidate: String, error: String },
}

#[derive(Debug, Serialize)]
pub struct CheckJson {
    pub command: &'static str,
    pub spec: SpecJson,
    pub sampling: SamplingJson,
    pub assumptions: AssumptionsJson,
    pub theorems: TheoremsJson,
    pub derived_pde: DerivedOrError,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lemma31_check: Option<Lemma31OrError>,
    pub exit_code: i32,
}

impl CheckJson {
    pub fn theorems(r: &CheckReport) -> TheoremsJson {
        TheoremsJson {
            swiatak: TheoremJson::new(&r.swiatak),
            corollary22: TheoremJson::new(&r.corollary22),
            theorem23: TheoremJson::new(&r.theorem23),
            theorem21: TheoremJson::new(&r.theorem21),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DeriveJson {
    pub command: &'static str,
    pub spec: SpecJson,
    pub derived_pde: DerivedOrError,
    pub exit_code: i32,
}

#[derive(Debug, Serialize)]
pub struct VerifyJson {
    pub command: &'static str,
    pub spec: SpecJson,
    pub lemma31_check: Lemma31OrError,
    pub exit_code: i32,
}

#[derive(Debug, Serialize)]
pub struct BracketEntryJson {
    pub index: usize,
    pub label: String,
    pub depth: usize,
    pub coeffs: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct RankPointJson {
    pub point: Vec<String>,
    pub rank: usize,
    pub witness: Vec<String>,
    pub arithmetic: Arithmetic,
    pub min_pivot: Option<String>,
    pub full_rank_depth: Option<usize>,
    pub undefined: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct RankJson {
    pub verdict: String,
    pub spanning_everywhere: bool,
    pub min_rank: usize,
    pub depth_used: Option<usize>,
    pub failing_points: Vec<Vec<String>>,
    pub points: Vec<RankPointJson>,
}

#[derive(Debug, Serialize)]
pub struct BracketsJson {
    pub command: &'static str,
    pub n: usize,
    pub max_depth: usize,
    pub eps_rank: String,
    pub entries: Vec<BracketEntryJson>,
    pub rank: RankJson,
    pub exit_code: i32,
}

impl BracketsJson {
    pub fn new(basis: &BracketBasis, rank: &RankReport, eps: f64, exit_code: i32) -> Self {
        let label = |i: usize| basis.entries()[i].trace().to_string();
        BracketsJson {
            command: "brackets",
            n: basis.dim(),
            max_depth: basis.max_depth(),
            eps_rank: fmt_f64(eps),
            entries: basis
                .entries()
                .iter()
                .enumerate()
                .map(|(i, e)| BracketEntryJson {
                    index: i,
                    label: e.trace().to_string(),
                    depth: e.depth,
                    coeffs: exprs(e.field.coeffs()),
                })
                .collect(),
            rank: RankJson {
                verdict: rank.verdict_text(),
                spanning_everywhere: rank.spanning_everywhere,
                min_rank: rank.min_rank(),
                depth_used: rank.depth_used(),
                failing_points: rank.failing_points.iter().map(|&i| point(&rank.points[i].point)).collect(),
                points: rank
                    .points
                    .iter()
                    .map(|p| RankPointJson {
                        point: point(&p.point),
                        rank: p.rank,
                        witness: p.witness.iter().map(|&i| label(i)).collect(),
                        arithmetic: p.arithmetic,
                        min_pivot: p.min_pivot.map(fmt_f64),
                        full_rank_depth: p.full_rank_depth,
                        undefined: p.undefined.iter().map(|(i, e)| format!("{}: {e}", label(*i))).collect(),
                    })
                    .collect(),
            },
            exit_code,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct IdentityCaseJson {
    pub name: String,
    pub a: String,
    pub phi_prime: Vec<String>,
    pub test_functions: Vec<String>,
    pub points: usize,
    pub max_discrepancy: String,
    pub exact: bool,
    pub error: Option<String>,
}

impl IdentityCaseJson {
    pub fn new(name: String, a: &Expr, phi_prime: Vec<String>, testfns: &[Expr], points: usize, r: Result<&IdentityReport, String>) -> Self {
        let (max, exact, error) = match r {
            Ok(r) => (fmt_f64(r.max_discrepancy), r.exact, None),
            Err(e) => (fmt_f64(f64::NAN), false, Some(e)),
        };
        IdentityCaseJson {
            name,
            a: a.to_string(),
            phi_prime,
            test_functions: exprs(testfns),
            points,
            max_discrepancy: max,
            exact,
            error,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SelftestJson {
    pub command: &'static str,
    pub threshold: String,
    pub cases: Vec<IdentityCaseJson>,
    pub exit_code: i32,
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report structs serialize");
    s.push('\n');
    s
}
