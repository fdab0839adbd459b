//! Command-line front end.
//!
//! Exit codes: 0 success (for `check`, at least one criterion passes),
//! 1 negative result, 2 input error, 3 evaluation error.

mod report;
mod specfile;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};

use crate::expr::{Expr, Point};
use crate::feq::{self, check_all, derive_pde, verify_identity_34, CheckReport, FunctionalEquationSpec, Sampling};
use crate::hormander::{check_spanning, generate_brackets, SamplingPlan};
use crate::verify::{check_lemma31, FdPlan, Lemma31Report, VerifyError};

pub use report::fmt_f64;
pub use specfile::{load_spec, parse_spec, CheckSettings, LoadError, SpecFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EVAL: i32 = 3;

/// Largest discrepancy the self-test accepts.
pub const SELFTEST_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "hypocheck", version, about = "Regularity criteria for mean-value functional equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify the equation against every regularity criterion.
    Check(Opts),
    /// Print the second-order operator obtained at the anchor.
    Derive(Opts),
    /// Bracket generation and rank test for the `[[field]]` entries.
    Brackets(Opts),
    /// Check a `[candidate]` solution against the derived operator.
    Verify(Opts),
    /// Symbolic self-test of the square-root operator identity.
    Selftest(Opts),
}

#[derive(Debug, clap::Args)]
struct Opts {
    /// Spec file (TOML). Optional for `selftest`.
    spec: Option<PathBuf>,
    /// Write the JSON report here (`-` for stdout instead of the summary).
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    depth: Option<usize>,
    /// Grid points per axis.
    #[arg(long, value_name = "N")]
    grid: Option<usize>,
    #[arg(long = "eps-rank", value_name = "X")]
    eps_rank: Option<f64>,
    /// Finite-difference step.
    #[arg(long, value_name = "X")]
    h: Option<f64>,
    /// Finite-difference tolerance.
    #[arg(long, value_name = "X")]
    tol: Option<f64>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

/// Parse `args` (including the program name), run the command and return
/// the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    if let Err(msg) = init_threads() {
        eprintln!("error: {msg}");
        return EXIT_INPUT;
    }
    let result = match &cli.command {
        Command::Check(o) => cmd_check(o),
        Command::Derive(o) => cmd_derive(o),
        Command::Brackets(o) => cmd_brackets(o),
        Command::Verify(o) => cmd_verify(o),
        Command::Selftest(o) => cmd_selftest(o),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn init_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("HYPOCHECK_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| format!("HYPOCHECK_THREADS must be a nonnegative integer, got {raw:?}"))?;
    // a pool may already exist when called twice in one process
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn load(o: &Opts) -> Result<SpecFile, Failure> {
    let path = o.spec.as_deref().ok_or_else(|| Failure::input("missing spec file argument"))?;
    let mut file = load_spec(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let c = &mut file.check;
    if let Some(d) = o.depth {
        c.depth = d;
    }
    if let Some(g) = o.grid {
        if g == 0 {
            return Err(Failure::input("--grid must be at least 1"));
        }
        c.grid = g;
    }
    for (name, value, slot) in [
        ("--eps-rank", o.eps_rank, &mut c.eps_rank),
        ("--h", o.h, &mut c.h_fd),
        ("--tol", o.tol, &mut c.tol_fd),
    ] {
        if let Some(v) = value {
            if !(v.is_finite() && v > 0.0) {
                return Err(Failure::input(format!("{name} must be positive, got {v}")));
            }
            *slot = v;
        }
    }
    Ok(file)
}

fn require_spec(file: &SpecFile) -> Result<&FunctionalEquationSpec, Failure> {
    file.spec.as_ref().ok_or_else(|| Failure::input("spec file has no [equation]"))
}

fn sampling_for(spec: &FunctionalEquationSpec, file: &SpecFile) -> Sampling {
    let mut s = Sampling::default_for(spec).with_grid(file.check.grid);
    if let Some(b) = &file.check.bounds {
        s.x_plan.bounds = b.clone();
    }
    if let Some(t) = &file.check.t_box {
        s.t_box = t.clone();
    }
    s.x_plan.extra = file.extra_points();
    s.eps_rank = file.check.eps_rank;
    s
}

fn emit(o: &Opts, json: String, human: impl FnOnce() -> String) -> Result<(), Failure> {
    match o.json.as_deref() {
        Some(p) if p == Path::new("-") => print!("{json}"),
        Some(p) => {
            std::fs::write(p, json).map_err(|e| Failure {
                code: EXIT_INPUT,
                message: format!("cannot write {}: {e}", p.display()),
            })?;
            print!("{}", human());
        }
        None => print!("{}", human()),
    }
    Ok(())
}

fn sampling_json(s: &Sampling, depth: usize) -> report::SamplingJson {
    let pair = |(lo, hi): &(BigRational, BigRational)| [lo.to_string(), hi.to_string()];
    report::SamplingJson {
        bounds: s.x_plan.bounds.iter().map(pair).collect(),
        grid: s.x_plan.effective_per_axis(),
        points: s.x_points().len(),
        t_box: s.t_box.iter().map(pair).collect(),
        eps_rank: fmt_f64(s.eps_rank),
        depth,
    }
}

fn lemma_json(f: &Expr, r: &Result<Lemma31Report, VerifyError>) -> report::Lemma31OrError {
    match r {
        Ok(rep) => report::Lemma31OrError::Report(report::Lemma31Json::new(f, rep)),
        Err(e) => report::Lemma31OrError::Error {
            candidate: f.to_string(),
            error: e.to_string(),
        },
    }
}

fn check_exit(r: &CheckReport) -> i32 {
    if r.any_pass() {
        EXIT_OK
    } else if r.any_error() {
        EXIT_EVAL
    } else {
        EXIT_NEGATIVE
    }
}

fn cmd_check(o: &Opts) -> Result<i32, Failure> {
    let file = load(o)?;
    let spec = require_spec(&file)?;
    let sampling = sampling_for(spec, &file);
    let rep = check_all(spec, &sampling, file.check.depth);
    let pde = derive_pde(spec);
    let fd_plan = FdPlan::new(sampling.x_points()).with_h(file.check.h_fd).with_tol(file.check.tol_fd);
    let candidate = file.candidate.as_ref().map(|f| (f, check_lemma31(spec, f, &fd_plan)));
    let code = check_exit(&rep);

    let json = report::CheckJson {
        command: "check",
        spec: report::SpecJson::new(spec),
        sampling: sampling_json(&sampling, file.check.depth),
        assumptions: report::AssumptionsJson::new(&rep.assumptions),
        theorems: report::CheckJson::theorems(&rep),
        derived_pde: derived_json(&pde),
        lemma31_check: candidate.as_ref().map(|(f, r)| lemma_json(f, r)),
        exit_code: code,
    };
    emit(o, report::to_json(&json), || {
        let mut s = summary_header(spec);
        s += &assumption_line(&rep);
        for (name, t) in rep.theorems() {
            s += &format!("{name:<12} {:<16}", t.verdict.as_str());
            if let Some(d) = t.depth_used {
                s += &format!(" depth {d}");
            }
            if let Some(r) = &t.reason {
                s += &format!(" {r}");
            }
            s.push('\n');
            for w in &t.warnings {
                s += &format!("{:<12} warning: {w}\n", "");
            }
        }
        s += &pde_line(&pde);
        if let Some((f, r)) = &candidate {
            s += &lemma_line(f, r);
        }
        s
    })?;
    Ok(code)
}

fn derived_json(pde: &Result<feq::DerivedPde, feq::DeriveError>) -> report::DerivedOrError {
    match pde {
        Ok(p) => report::DerivedOrError::Derived(report::DerivedPdeJson::new(p)),
        Err(e) => report::DerivedOrError::Error { error: e.to_string() },
    }
}

fn summary_header(spec: &FunctionalEquationSpec) -> String {
    let t0: Vec<String> = spec.t0().iter().map(|c| c.to_string()).collect();
    format!("equation: n={} r={} k={} t0=({})\n", spec.n(), spec.r(), spec.k(), t0.join(", "))
}

fn assumption_line(rep: &CheckReport) -> String {
    let a = &rep.assumptions;
    format!(
        "assumptions: shifts vanish at t0: {}; a_j(x,t0) {} ({} samples); a_j(x,t) {} ({} samples)\n",
        if a.anchor_ok() { "yes" } else { "no" },
        if a.positive_on_samples() {
            "positive on sampled set"
        } else {
            "not positive on sampled set"
        },
        a.positivity_samples,
        if a.nonnegative_on_samples() {
            "nonnegative on sampled set"
        } else {
            "negative on sampled set"
        },
        a.nonnegativity_samples,
    )
}

fn pde_line(pde: &Result<feq::DerivedPde, feq::DeriveError>) -> String {
    match pde {
        Ok(p) => format!("derived operator: {} = {}\n", p.operator_text(), p.g),
        Err(e) => format!("derived operator: {e}\n"),
    }
}

fn lemma_line(f: &Expr, r: &Result<Lemma31Report, VerifyError>) -> String {
    match r {
        Ok(r) => format!(
            "candidate {f}: {} (residual {}, fd deviation {}, symbolic deviation {})\n",
            r.label(),
            fmt_f64(r.max_residual),
            fmt_f64(r.max_fd),
            fmt_f64(r.max_symbolic)
        ),
        Err(e) => format!("candidate {f}: {e}\n"),
    }
}

fn cmd_derive(o: &Opts) -> Result<i32, Failure> {
    let file = load(o)?;
    let spec = require_spec(&file)?;
    let pde = derive_pde(spec);
    let code = if pde.is_ok() { EXIT_OK } else { EXIT_NEGATIVE };
    let json = report::DeriveJson {
        command: "derive",
        spec: report::SpecJson::new(spec),
        derived_pde: derived_json(&pde),
        exit_code: code,
    };
    emit(o, report::to_json(&json), || {
        let mut s = summary_header(spec);
        if let Ok(p) = &pde {
            for l in p.l_fields.iter().chain([&p.l0]) {
                s += &format!("{l}\n");
            }
            s += &format!("c = {}\ng = {}\n", p.c, p.g);
        }
        s + &pde_line(&pde)
    })?;
    Ok(code)
}

fn cmd_brackets(o: &Opts) -> Result<i32, Failure> {
    let file = load(o)?;
    if file.fields.is_empty() {
        return Err(Failure::input("spec file has no [[field]] entries"));
    }
    let n = file.fields[0].dim();
    let mut plan = SamplingPlan::grid(n, file.check.grid).with_extra(file.extra_points());
    if let Some(b) = &file.check.bounds {
        plan.bounds = b.clone();
    }
    let basis = generate_brackets(&file.fields, file.check.depth).map_err(|e| Failure::input(e.to_string()))?;
    let rank = check_spanning(&basis, &plan, file.check.eps_rank);
    let code = if rank.spanning_everywhere { EXIT_OK } else { EXIT_NEGATIVE };
    let json = report::BracketsJson::new(&basis, &rank, file.check.eps_rank, code);
    emit(o, report::to_json(&json), || {
        let mut s = String::new();
        for e in basis.entries() {
            s += &format!("depth {}  {}\n", e.depth, e.field);
        }
        s += &format!("rank test at {} point(s): {}", rank.points.len(), rank.verdict_text());
        if let Some(d) = rank.depth_used() {
            s += &format!(" (depth {d})");
        }
        s.push('\n');
        for &i in &rank.failing_points {
            let p = &rank.points[i];
            s += &format!("  rank {} at {}\n", p.rank, p.point);
        }
        s
    })?;
    Ok(code)
}

fn cmd_verify(o: &Opts) -> Result<i32, Failure> {
    let file = load(o)?;
    let spec = require_spec(&file)?;
    let f = file
        .candidate
        .as_ref()
        .ok_or_else(|| Failure::input("spec file has no [candidate] f"))?;
    let sampling = sampling_for(spec, &file);
    let plan = FdPlan::new(sampling.x_points()).with_h(file.check.h_fd).with_tol(file.check.tol_fd);
    let r = check_lemma31(spec, f, &plan);
    let code = match &r {
        Ok(rep) if rep.passed() => EXIT_OK,
        Ok(_) => EXIT_NEGATIVE,
        Err(VerifyError::Eval { .. }) => EXIT_EVAL,
        Err(VerifyError::BadStep(_)) | Err(VerifyError::BadOrder(_)) => EXIT_INPUT,
        Err(VerifyError::Derive(_)) => EXIT_NEGATIVE,
    };
    let json = report::VerifyJson {
        command: "verify",
        spec: report::SpecJson::new(spec),
        lemma31_check: lemma_json(f, &r),
        exit_code: code,
    };
    emit(o, report::to_json(&json), || summary_header(spec) + &lemma_line(f, &r))?;
    Ok(code)
}

struct IdentityCase {
    name: String,
    a: Expr,
    phi_prime: Vec<BigRational>,
    testfns: Vec<Expr>,
    points: Vec<Point>,
}

/// Random rational points in `bounds`, deterministic per seed.
fn random_points(bounds: &[(BigRational, BigRational)], count: usize, seed: u64) -> Vec<Point> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            Point::exact(
                bounds
                    .iter()
                    .map(|(lo, hi)| {
                        let den: i64 = rng.gen_range(1..=64);
                        let num: i64 = rng.gen_range(0..=den);
                        lo + (hi - lo) * BigRational::new(num.into(), den.into())
                    })
                    .collect(),
            )
        })
        .collect()
}

fn parse_all(src: &[&str]) -> Vec<Expr> {
    src.iter().map(|s| Expr::parse(s).expect("built-in expression parses")).collect()
}

fn builtin_cases() -> Vec<IdentityCase> {
    let one = BigRational::from_integer(1.into());
    let zero = BigRational::from_integer(0.into());
    let square = vec![(-one.clone(), one.clone()); 2];
    let plane = random_points(&square, 20, 7);
    let polys = parse_all(&["x1^2*x2", "x1^3 - 2*x2", "x1*x2^2 + x2", "x1^4 - 3*x1*x2 + 1", "7*x1*x2^3 + 1/2*x1^2"]);
    let mut cases: Vec<IdentityCase> = ["1", "exp(x1*x2)", "1 + x1^2"]
        .iter()
        .map(|a| IdentityCase {
            name: format!("a = {a}"),
            a: Expr::parse(a).expect("built-in expression parses"),
            phi_prime: vec![one.clone(), zero.clone()],
            testfns: polys.clone(),
            points: plane.clone(),
        })
        .collect();
    cases.push(IdentityCase {
        name: "a = x1^2, x1 > 0".into(),
        a: Expr::parse("x1^2").expect("built-in expression parses"),
        phi_prime: vec![one.clone()],
        testfns: parse_all(&["x1^3", "x1^2 - x1", "x1^5"]),
        points: random_points(&[(BigRational::new(1.into(), 64.into()), one)], 20, 11),
    });
    cases
}

fn spec_cases(spec: &FunctionalEquationSpec, file: &SpecFile) -> Result<Vec<IdentityCase>, Failure> {
    let n = spec.n();
    let bounds = file.check.bounds.clone().unwrap_or_else(|| SamplingPlan::default_for(n).bounds);
    let points = random_points(&bounds, 20, 13);
    let polys: Vec<Expr> = (1..=n)
        .flat_map(|l| [format!("x{l}^3"), format!("x{l}^2*x{}", n.min(l % n + 1))])
        .map(|s| Expr::parse(&s).expect("generated expression parses"))
        .collect();
    (0..spec.k())
        .map(|j| {
            let phi_prime = spec
                .phi_prime_at_anchor(j)
                .into_iter()
                .map(|c| match c.simplify() {
                    Expr::Const(q) => Ok(q),
                    other => Err(Failure::input(format!("phi{}'(t0) = {other} is not rational", j + 1))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(IdentityCase {
                name: format!("term {}", j + 1),
                a: spec.a_at_anchor(j),
                phi_prime,
                testfns: polys.clone(),
                points: points.clone(),
            })
        })
        .collect()
}

fn cmd_selftest(o: &Opts) -> Result<i32, Failure> {
    let mut cases = builtin_cases();
    if o.spec.is_some() {
        let file = load(o)?;
        let spec = require_spec(&file)?;
        cases.extend(spec_cases(spec, &file)?);
    }
    let mut code = EXIT_OK;
    let mut rows = Vec::new();
    let mut json_cases = Vec::new();
    for c in &cases {
        let r = verify_identity_34(&c.a, &c.phi_prime, &c.testfns, &c.points);
        match &r {
            Ok(rep) if rep.max_discrepancy <= SELFTEST_THRESHOLD => {}
            Ok(_) => code = code.max(EXIT_NEGATIVE),
            Err(_) => code = EXIT_EVAL,
        }
        rows.push(match &r {
            Ok(rep) => format!(
                "{:<24} max discrepancy {} over {} evaluations{}\n",
                c.name,
                fmt_f64(rep.max_discrepancy),
                rep.evaluations,
                if rep.exact { " (exact)" } else { "" }
            ),
            Err(e) => format!("{:<24} error: {e}\n", c.name),
        });
        json_cases.push(report::IdentityCaseJson::new(
            c.name.clone(),
            &c.a,
            c.phi_prime.iter().map(|q| q.to_string()).collect(),
            &c.testfns,
            c.points.len(),
            r.as_ref().map_err(|e| e.to_string()),
        ));
    }
    let json = report::SelftestJson {
        command: "selftest",
        threshold: fmt_f64(SELFTEST_THRESHOLD),
        cases: json_cases,
        exit_code: code,
    };
    emit(o, report::to_json(&json), || rows.concat())?;
    Ok(code)
}
