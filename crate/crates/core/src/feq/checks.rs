use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::FunctionalEquationSpec;
use crate::expr::{Env, EvalError, Expr, Point, Value, VarKind};
use crate::hormander::{check_points, generate_brackets_with, SamplingPlan, DEFAULT_EPS_RANK};
use crate::linalg::{greedy_rank, Arithmetic};
use crate::vfield::{build_l, build_l0};

/// Where the pointwise conditions are sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampling {
    /// Spatial grid for every "for each x" condition.
    pub x_plan: SamplingPlan,
    /// Parameter box used for the nonnegativity scan of `a_j(x,t)`.
    pub t_box: Vec<(BigRational, BigRational)>,
    pub eps_rank: f64,
}

impl Sampling {
    /// `[-1,1]^n` with 3 points per axis, parameters in `t0 +- 1`.
    pub fn default_for(spec: &FunctionalEquationSpec) -> Self {
        let one = BigRational::one();
        Sampling {
            x_plan: SamplingPlan::default_for(spec.n()),
            t_box: spec.t0().iter().map(|c| (c - &one, c + &one)).collect(),
            eps_rank: DEFAULT_EPS_RANK,
        }
    }

    pub fn with_grid(mut self, per_axis: usize) -> Self {
        self.x_plan.per_axis = per_axis;
        self
    }

    pub fn x_points(&self) -> Vec<Point> {
        self.x_plan.points()
    }

    /// Joint `(x, t)` grid over the spatial box times `t_box`, subject to
    /// the same total cap as the spatial grid.
    pub fn xt_points(&self) -> Vec<(Point, Point)> {
        let n = self.x_plan.dim();
        let mut bounds = self.x_plan.bounds.clone();
        bounds.extend(self.t_box.iter().cloned());
        let joint = SamplingPlan {
            bounds,
            per_axis: self.x_plan.per_axis,
            extra: Vec::new(),
        };
        joint
            .points()
            .into_iter()
            .map(|p| (Point::new(p.coords[..n].to_vec()), Point::new(p.coords[n..].to_vec())))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    FailOnSamples,
    NotApplicable,
    Error,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::FailOnSamples => "fail_on_samples",
            Verdict::NotApplicable => "not_applicable",
            Verdict::Error => "error",
        }
    }
}

/// `phi_j(t0)`; must vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorResidual {
    pub term: usize,
    pub residual: Vec<Value>,
    pub error: Option<EvalError>,
}

impl AnchorResidual {
    pub fn ok(&self) -> bool {
        self.error.is_none() && self.residual.iter().all(Value::is_zero)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleViolation {
    pub term: usize,
    pub x: Point,
    pub t: Point,
    /// The offending value, or `None` when evaluation failed.
    pub value: Option<Value>,
    pub error: Option<EvalError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport {
    pub anchor: Vec<AnchorResidual>,
    /// `a_j(x,t0) > 0` over the spatial grid.
    pub positivity: Vec<SampleViolation>,
    pub positivity_samples: usize,
    /// `a_j(x,t) >= 0` over the joint grid.
    pub nonnegativity: Vec<SampleViolation>,
    pub nonnegativity_samples: usize,
    pub constant_coefficients: bool,
}

impl AssumptionReport {
    pub fn anchor_ok(&self) -> bool {
        self.anchor.iter().all(AnchorResidual::ok)
    }

    pub fn positive_on_samples(&self) -> bool {
        self.positivity.is_empty()
    }

    pub fn nonnegative_on_samples(&self) -> bool {
        self.nonnegativity.is_empty()
    }

    /// Spatial points where some `a_j(x,t0)` is not positive.
    pub fn degenerate_points(&self) -> Vec<Point> {
        let mut pts: Vec<Point> = Vec::new();
        for v in &self.positivity {
            if !pts.contains(&v.x) {
                pts.push(v.x.clone());
            }
        }
        pts
    }
}

pub fn check_assumptions(spec: &FunctionalEquationSpec, sampling: &Sampling) -> AssumptionReport {
    let t0 = Point::exact(spec.t0().to_vec());
    let anchor = spec
        .terms()
        .iter()
        .enumerate()
        .map(|(j, term)| {
            let env = Env::new().with_point(VarKind::T, &t0);
            match term.phi.iter().map(|c| c.eval(&env)).collect::<Result<Vec<_>, _>>() {
                Ok(residual) => AnchorResidual {
                    term: j + 1,
                    residual,
                    error: None,
                },
                Err(e) => AnchorResidual {
                    term: j + 1,
                    residual: Vec::new(),
                    error: Some(e),
                },
            }
        })
        .collect();

    let x_points = sampling.x_points();
    let mut positivity = Vec::new();
    for (j, term) in spec.terms().iter().enumerate() {
        for x in &x_points {
            let env = Env::from_x(x).with_point(VarKind::T, &t0);
            match term.a.eval(&env) {
                Ok(v) if v.is_positive() => {}
                Ok(v) => positivity.push(SampleViolation {
                    term: j + 1,
                    x: x.clone(),
                    t: t0.clone(),
                    value: Some(v),
                    error: None,
                }),
                Err(e) => positivity.push(SampleViolation {
                    term: j + 1,
                    x: x.clone(),
                    t: t0.clone(),
                    value: None,
                    error: Some(e),
                }),
            }
        }
    }

    let xt_points = sampling.xt_points();
    let mut nonnegativity = Vec::new();
    for (j, term) in spec.terms().iter().enumerate() {
        for (x, t) in &xt_points {
            let env = Env::from_x(x).with_point(VarKind::T, t);
            match term.a.eval(&env) {
                Ok(v) if !v.is_negative() => {}
                Ok(v) => nonnegativity.push(SampleViolation {
                    term: j + 1,
                    x: x.clone(),
                    t: t.clone(),
                    value: Some(v),
                    error: None,
                }),
                Err(e) => nonnegativity.push(SampleViolation {
                    term: j + 1,
                    x: x.clone(),
                    t: t.clone(),
                    value: None,
                    error: Some(e),
                }),
            }
        }
    }

    AssumptionReport {
        anchor,
        positivity_samples: x_points.len() * spec.k(),
        positivity,
        nonnegativity_samples: xt_points.len() * spec.k(),
        nonnegativity,
        constant_coefficients: spec.has_constant_coefficients(),
    }
}

/// A maximal independent subset found at one point (or globally, for
/// constant vectors).
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub point: Option<Point>,
    pub rank: usize,
    pub vectors: Vec<String>,
    pub arithmetic: Arithmetic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremReport {
    pub verdict: Verdict,
    /// Why the verdict is not `pass`, in words.
    pub reason: Option<String>,
    pub witnesses: Vec<Witness>,
    pub failing_points: Vec<Point>,
    pub depth_used: Option<usize>,
    pub warnings: Vec<String>,
}

impl TheoremReport {
    fn new(verdict: Verdict) -> Self {
        TheoremReport {
            verdict,
            reason: None,
            witnesses: Vec::new(),
            failing_points: Vec::new(),
            depth_used: None,
            warnings: Vec::new(),
        }
    }

    fn not_applicable(reason: impl Into<String>) -> Self {
        TheoremReport {
            reason: Some(reason.into()),
            ..Self::new(Verdict::NotApplicable)
        }
    }

    fn error(reason: impl Into<String>) -> Self {
        TheoremReport {
            reason: Some(reason.into()),
            ..Self::new(Verdict::Error)
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn phi_prime_label(j: usize) -> String {
    format!("phi{}'(t0)", j + 1)
}

/// `phi_j'(t0)` for every term, evaluated.
fn phi_prime_rows(spec: &FunctionalEquationSpec) -> Result<Vec<Vec<Value>>, EvalError> {
    (0..spec.k())
        .map(|j| spec.phi_prime_at_anchor(j).iter().map(|c| c.eval(&Env::new())).collect())
        .collect()
}

fn constant_witness(rows: &[Vec<Value>], labels: &[String], eps: f64) -> Witness {
    let res = greedy_rank(rows, eps);
    Witness {
        point: None,
        rank: res.rank,
        vectors: res.pivots.iter().map(|&i| labels[i].clone()).collect(),
        arithmetic: res.arithmetic,
    }
}

fn anchor_reason(assumptions: &AssumptionReport) -> Option<String> {
    if assumptions.anchor_ok() {
        return None;
    }
    let bad: Vec<String> = assumptions
        .anchor
        .iter()
        .filter(|a| !a.ok())
        .map(|a| format!("phi{}", a.term))
        .collect();
    Some(format!("shift does not vanish at t0: {}", bad.join(", ")))
}

fn nonneg_reason(assumptions: &AssumptionReport) -> Option<String> {
    (!assumptions.nonnegative_on_samples()).then(|| "a_j takes negative values on sampled (x,t)".to_string())
}

/// Constant-direction criterion: every `a_j(x,t0)` positive and the first
/// shift derivatives span.
pub fn check_swiatak(spec: &FunctionalEquationSpec, assumptions: &AssumptionReport, eps: f64) -> TheoremReport {
    if let Some(r) = anchor_reason(assumptions).or_else(|| nonneg_reason(assumptions)) {
        return TheoremReport::not_applicable(r);
    }
    let rows = match phi_prime_rows(spec) {
        Ok(r) => r,
        Err(e) => return TheoremReport::error(format!("phi'(t0): {e}")),
    };
    let labels: Vec<String> = (0..spec.k()).map(phi_prime_label).collect();
    let w = constant_witness(&rows, &labels, eps);
    let mut report = TheoremReport::new(Verdict::Pass);
    let mut reasons = Vec::new();
    if !assumptions.positive_on_samples() {
        reasons.push("a_j(x,t0) not positive on sampled set".to_string());
        report.failing_points = assumptions.degenerate_points();
    }
    if w.rank < spec.n() {
        reasons.push(format!("phi'(t0) rank {} < n = {}", w.rank, spec.n()));
    }
    report.witnesses.push(w);
    if reasons.is_empty() {
        report.depth_used = Some(0);
    } else {
        report.verdict = Verdict::FailOnSamples;
        report.reason = Some(reasons.join("; "));
    }
    report
}

/// Constant-coefficient criterion: the first shift derivatives together with
/// `sum_j a_j phi_j''(t0)` span.
pub fn check_theorem23(spec: &FunctionalEquationSpec, assumptions: &AssumptionReport, eps: f64) -> TheoremReport {
    if let Some(r) = anchor_reason(assumptions) {
        return TheoremReport::not_applicable(r);
    }
    if !assumptions.constant_coefficients {
        return TheoremReport::not_applicable("some a_j is not constant");
    }
    let weights: Vec<Expr> = spec.terms().iter().map(|t| t.a.simplify()).collect();
    if let Some(j) = weights.iter().position(|a| a.as_const().is_none_or(|c| c <= &num_traits::Zero::zero())) {
        return TheoremReport::not_applicable(format!("a{} is not a positive constant", j + 1));
    }
    let mut rows = match phi_prime_rows(spec) {
        Ok(r) => r,
        Err(e) => return TheoremReport::error(format!("phi'(t0): {e}")),
    };
    let curvature: Result<Vec<Value>, EvalError> = (0..spec.n())
        .map(|l| {
            let sum = Expr::add(
                (0..spec.k())
                    .map(|j| Expr::mul(vec![weights[j].clone(), spec.phi_second_at_anchor(j)[l].clone()]))
                    .collect(),
            );
            sum.simplify().eval(&Env::new())
        })
        .collect();
    match curvature {
        Ok(c) => rows.push(c),
        Err(e) => return TheoremReport::error(format!("sum a_j phi_j''(t0): {e}")),
    }
    let mut labels: Vec<String> = (0..spec.k()).map(phi_prime_label).collect();
    labels.push("sum_j a_j phi_j''(t0)".into());
    let w = constant_witness(&rows, &labels, eps);
    let mut report = TheoremReport::new(Verdict::Pass);
    if w.rank < spec.n() {
        report.verdict = Verdict::FailOnSamples;
        report.reason = Some(format!("rank {} < n = {}", w.rank, spec.n()));
    } else {
        report.depth_used = Some(0);
    }
    report.witnesses.push(w);
    report
}

/// Drift criterion: at each sampled x, the first shift derivatives together
/// with `Psi(x,t0)` span. Points where some `a_j(x,t0)` vanishes are
/// excluded; if there are any, the criterion is not applicable.
pub fn check_corollary(spec: &FunctionalEquationSpec, assumptions: &AssumptionReport, sampling: &Sampling) -> TheoremReport {
    if let Some(r) = anchor_reason(assumptions).or_else(|| nonneg_reason(assumptions)) {
        return TheoremReport::not_applicable(r);
    }
    let base = match phi_prime_rows(spec) {
        Ok(r) => r,
        Err(e) => return TheoremReport::error(format!("phi'(t0): {e}")),
    };
    let psi = build_l0(spec);
    let degenerate = assumptions.degenerate_points();
    let mut labels: Vec<String> = (0..spec.k()).map(phi_prime_label).collect();
    labels.push("Psi(x,t0)".into());

    let mut report = TheoremReport::new(Verdict::Pass);
    let mut depth = 0;
    for x in sampling.x_points() {
        if degenerate.contains(&x) {
            continue;
        }
        let drift = match psi.eval(&Env::from_x(&x)) {
            Ok(v) => v,
            Err(e) => return TheoremReport::error(format!("Psi at {x}: {e}")),
        };
        let mut rows = base.clone();
        rows.push(drift);
        let res = greedy_rank(&rows, sampling.eps_rank);
        if res.rank < spec.n() {
            report.failing_points.push(x.clone());
        } else if res.pivots.contains(&spec.k()) {
            depth = 1;
        }
        report.witnesses.push(Witness {
            point: Some(x),
            rank: res.rank,
            vectors: res.pivots.iter().map(|&i| labels[i].clone()).collect(),
            arithmetic: res.arithmetic,
        });
    }
    if !degenerate.is_empty() {
        report.verdict = Verdict::NotApplicable;
        report.reason = Some(format!(
            "a_j(x,t0) not positive at {} sampled point(s); those points are excluded",
            degenerate.len()
        ));
    } else if !report.failing_points.is_empty() {
        report.verdict = Verdict::FailOnSamples;
        report.reason = Some(format!("rank < n at {} sampled point(s)", report.failing_points.len()));
    } else {
        // depth 1 marks that the drift vector was needed somewhere
        report.depth_used = Some(depth);
    }
    report
}

/// Bracket criterion: `L_1..L_k, L_0` and their iterated brackets up to
/// `max_depth` span at every sampled x.
pub fn check_theorem21(
    spec: &FunctionalEquationSpec,
    assumptions: &AssumptionReport,
    sampling: &Sampling,
    max_depth: usize,
) -> TheoremReport {
    if let Some(r) = anchor_reason(assumptions).or_else(|| nonneg_reason(assumptions)) {
        return TheoremReport::not_applicable(r);
    }
    let mut generators: Vec<_> = (0..spec.k()).map(|j| build_l(spec, j)).collect();
    generators.push(build_l0(spec));
    let basis = match generate_brackets_with(&generators, max_depth, &spec.simplifier()) {
        Ok(b) => b,
        Err(e) => return TheoremReport::error(e.to_string()),
    };
    let rank = check_points(&basis, &sampling.x_points(), sampling.eps_rank);

    let mut report = TheoremReport::new(Verdict::Pass);
    if !assumptions.positive_on_samples() {
        report.warnings.push(format!(
            "a_j(x,t0) vanishes at {} sampled point(s); sqrt(a_j) is taken as 0 there",
            assumptions.degenerate_points().len()
        ));
    }
    for &i in &rank.undefined_points {
        let pr = &rank.points[i];
        let names: Vec<&str> = pr.undefined.iter().map(|(e, _)| basis.entries()[*e].trace()).collect();
        report
            .warnings
            .push(format!("at {}: undefined and skipped: {}", pr.point, names.join(", ")));
    }
    for pr in &rank.points {
        report.witnesses.push(Witness {
            point: Some(pr.point.clone()),
            rank: pr.rank,
            vectors: pr.witness.iter().map(|&e| basis.entries()[e].trace().to_string()).collect(),
            arithmetic: pr.arithmetic,
        });
    }
    report.failing_points = rank.failing_points.iter().map(|&i| rank.points[i].point.clone()).collect();
    if rank.spanning_everywhere {
        report.depth_used = rank.depth_used();
    } else {
        report.verdict = Verdict::FailOnSamples;
        report.reason = Some(rank.verdict_text());
    }
    report
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub assumptions: AssumptionReport,
    pub swiatak: TheoremReport,
    pub corollary22: TheoremReport,
    pub theorem23: TheoremReport,
    pub theorem21: TheoremReport,
}

impl CheckReport {
    /// In report order.
    pub fn theorems(&self) -> [(&'static str, &TheoremReport); 4] {
        [
            ("swiatak", &self.swiatak),
            ("corollary22", &self.corollary22),
            ("theorem23", &self.theorem23),
            ("theorem21", &self.theorem21),
        ]
    }

    pub fn any_pass(&self) -> bool {
        self.theorems().iter().any(|(_, t)| t.passed())
    }

    pub fn any_error(&self) -> bool {
        self.theorems().iter().any(|(_, t)| t.verdict == Verdict::Error)
    }
}

pub fn check_all(spec: &FunctionalEquationSpec, sampling: &Sampling, max_depth: usize) -> CheckReport {
    let assumptions = check_assumptions(spec, sampling);
    CheckReport {
        swiatak: check_swiatak(spec, &assumptions, sampling.eps_rank),
        corollary22: check_corollary(spec, &assumptions, sampling),
        theorem23: check_theorem23(spec, &assumptions, sampling.eps_rank),
        theorem21: check_theorem21(spec, &assumptions, sampling, max_depth),
        assumptions,
    }
}

/// `sum_j a_j(x,t) f(x + phi_j(t)) - F(x, f(lambda(x))) - b(x,t)`.
pub fn residual(spec: &FunctionalEquationSpec, f: &Expr, x: &Point, t: &Point) -> Result<Value, EvalError> {
    let env = Env::from_x(x).with_point(VarKind::T, t);
    let mut total = Value::zero();
    for term in spec.terms() {
        let weight = term.a.eval(&env)?;
        let shifted = term
            .phi
            .iter()
            .zip(&x.coords)
            .map(|(c, xl)| Ok(xl.add(&c.eval(&env)?)))
            .collect::<Result<Vec<_>, EvalError>>()?;
        let value = f.eval(&Env::from_x(&Point::new(shifted)))?;
        total = total.add(&weight.mul(&value));
    }
    if let Some(rhs) = spec.rhs() {
        let mut rhs_env = Env::from_x(x);
        for (i, lambda) in rhs.lambdas.iter().enumerate() {
            let y = lambda.iter().map(|c| c.eval(&env)).collect::<Result<Vec<_>, _>>()?;
            let z = f.eval(&Env::from_x(&Point::new(y)))?;
            rhs_env.set(crate::expr::Var::z(i as u32 + 1), z);
        }
        total = total.sub(&rhs.f.eval(&rhs_env)?);
    }
    Ok(total.sub(&spec.b().eval(&env)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feq::fixtures;
    use num_bigint::BigInt;

    fn rational(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn run(spec: &FunctionalEquationSpec) -> CheckReport {
        check_all(spec, &Sampling::default_for(spec), 4)
    }

    fn x(v: &[i64]) -> Point {
        Point::exact(v.iter().map(|&c| rational(c)).collect())
    }

    #[test]
    fn assumption_examples() {
        let jensen = fixtures::jensen();
        let a = check_assumptions(&jensen, &Sampling::default_for(&jensen));
        assert!(a.anchor_ok() && a.positive_on_samples() && a.nonnegative_on_samples());

        let shifted = FunctionalEquationSpec::from_strs(1, 1, &[("1", &["t1 + 1"])], "0", &["0"]).unwrap();
        let a = check_assumptions(&shifted, &Sampling::default_for(&shifted));
        assert!(!a.anchor_ok());
        assert_eq!(a.anchor[0].residual, vec![Value::int(1)]);

        let degenerate = fixtures::degenerate();
        let a = check_assumptions(&degenerate, &Sampling::default_for(&degenerate));
        assert!(a.nonnegative_on_samples());
        assert_eq!(a.degenerate_points(), vec![x(&[0])]);
    }

    #[test]
    fn shift_rank_examples() {
        assert_eq!(run(&fixtures::jensen()).swiatak.verdict, Verdict::Pass);
        let heat = run(&fixtures::heat_mean_value());
        assert_eq!(heat.swiatak.verdict, Verdict::FailOnSamples);
        assert_eq!(heat.swiatak.witnesses[0].rank, 1);
        assert_eq!(heat.swiatak.witnesses[0].arithmetic, Arithmetic::Exact);
        assert_eq!(run(&fixtures::two_axis()).swiatak.verdict, Verdict::Pass);
    }

    #[test]
    fn constant_coefficient_examples() {
        let heat = run(&fixtures::heat_mean_value()).theorem23;
        assert_eq!(heat.verdict, Verdict::Pass);
        assert_eq!(heat.witnesses[0].vectors, vec!["phi1'(t0)", "sum_j a_j phi_j''(t0)"]);
        assert_eq!(run(&fixtures::parabolic_shift()).theorem23.verdict, Verdict::Pass);
        assert_eq!(run(&fixtures::jensen()).theorem23.verdict, Verdict::Pass);
        assert_eq!(run(&fixtures::exp_weight()).theorem23.verdict, Verdict::NotApplicable);
    }

    #[test]
    fn drift_rank_examples() {
        assert_eq!(run(&fixtures::heat_mean_value()).corollary22.verdict, Verdict::Pass);
        let exp = run(&fixtures::exp_weight()).corollary22;
        assert_eq!(exp.verdict, Verdict::FailOnSamples);
        assert_eq!(exp.failing_points.len(), 9);
        assert_eq!(run(&fixtures::jensen()).corollary22.verdict, Verdict::Pass);
        let drift = run(&fixtures::bracket_drift()).corollary22;
        assert_eq!(drift.verdict, Verdict::FailOnSamples);
        assert_eq!(drift.failing_points.len(), 6);
    }

    #[test]
    fn bracket_condition_examples() {
        let jensen = run(&fixtures::jensen()).theorem21;
        assert_eq!(jensen.verdict, Verdict::Pass);
        assert_eq!(jensen.depth_used, Some(0));
        let heat = run(&fixtures::heat_mean_value()).theorem21;
        assert_eq!(heat.verdict, Verdict::Pass);
        assert_eq!(heat.depth_used, Some(0));
        assert_eq!(heat.witnesses[0].vectors, vec!["L1", "L0"]);
        let single = run(&fixtures::single_direction());
        assert!(!single.any_pass());
        assert_eq!(single.theorem21.failing_points.len(), 9);
        let drift = run(&fixtures::bracket_drift()).theorem21;
        assert_eq!(drift.verdict, Verdict::Pass);
        assert_eq!(drift.depth_used, Some(1));
        let degenerate = run(&fixtures::degenerate());
        assert_eq!(degenerate.theorem21.verdict, Verdict::Pass);
        assert_eq!(degenerate.swiatak.verdict, Verdict::FailOnSamples);
        assert_eq!(degenerate.corollary22.verdict, Verdict::NotApplicable);
        assert!(!degenerate.theorem21.warnings.is_empty());
    }

    #[test]
    fn residual_examples() {
        let jensen = fixtures::jensen();
        let t = x(&[1]);
        for xv in [-2, 0, 3] {
            let r = residual(&jensen, &Expr::parse("x1").unwrap(), &x(&[xv]), &t).unwrap();
            assert!(r.is_zero());
        }
        let quad = fixtures::quadratic();
        for (xv, tv) in [(1, 2), (-3, 1), (0, 5)] {
            let r = residual(&quad, &Expr::parse("x1^2").unwrap(), &x(&[xv]), &x(&[tv])).unwrap();
            assert!(r.is_zero());
        }
        let r = residual(&jensen, &Expr::parse("x1^3").unwrap(), &x(&[1]), &x(&[1])).unwrap();
        assert_eq!(r, Value::int(6));
    }

    #[test]
    fn caloric_solution_of_heat_fixture() {
        // brute-force search over quadratics with small integer coefficients
        let heat = fixtures::heat_mean_value();
        let monomials = ["x1^2", "x1*x2", "x2^2", "x1", "x2"];
        let pts: Vec<(Point, Point)> = [(-1, 2, 1), (0, 1, -1), (2, -1, 2), (1, 1, 3)]
            .iter()
            .map(|&(a, b, t)| (x(&[a, b]), x(&[t])))
            .collect();
        let mut found = Vec::new();
        let range = -2..=2i64;
        for c0 in range.clone() {
            for c1 in range.clone() {
                for c2 in range.clone() {
                    for c3 in range.clone() {
                        for c4 in range.clone() {
                            let cs = [c0, c1, c2, c3, c4];
                            if cs.iter().all(|&c| c == 0) {
                                continue;
                            }
                            let src: Vec<String> =
                                cs.iter().zip(monomials).map(|(c, m)| format!("({c})*{m}")).collect();
                            let f = Expr::parse(&src.join(" + ")).unwrap();
                            if pts.iter().all(|(p, t)| residual(&heat, &f, p, t).unwrap().is_zero()) {
                                found.push(cs);
                            }
                        }
                    }
                }
            }
        }
        assert!(found.contains(&[1, 0, 0, 0, -1]));
        assert!(found.iter().all(|c| c[0] == -c[4] && c[1] == 0 && c[2] == 0));
    }
}
