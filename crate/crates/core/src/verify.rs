//! Finite-difference cross-checks of the symbolic derivation.
//!
//! Step sizes are converted to short decimal rationals, so on polynomial
//! input with rational points the stencils are evaluated exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::expr::{Env, EvalError, Expr, Point, Value, Var, VarKind};
use crate::feq::{derive_pde, residual, DeriveError, FunctionalEquationSpec};

pub const DEFAULT_H: f64 = 1e-3;
pub const DEFAULT_TOL: f64 = 1e-6;
/// Residual above which a candidate is not treated as a solution.
pub const SOLUTION_THRESHOLD: f64 = 1e-9;
pub const VACUOUS_LABEL: &str = "vacuous: f is not a solution";

#[derive(Debug, Clone, PartialEq)]
pub struct FdPlan {
    pub h: f64,
    pub tol: f64,
    pub points: Vec<Point>,
}

impl FdPlan {
    pub fn new(points: Vec<Point>) -> Self {
        FdPlan {
            h: DEFAULT_H,
            tol: DEFAULT_TOL,
            points,
        }
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VerifyError {
    #[error("step size must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("derivative order must be 1 or 2, got {0}")]
    BadOrder(u8),
    #[error(transparent)]
    Derive(#[from] DeriveError),
    #[error("evaluation failed at {point}: {source}")]
    Eval {
        point: Point,
        #[source]
        source: EvalError,
    },
}

/// Shortest decimal representation of `h` as an exact rational.
pub fn decimal_rational(h: f64) -> Option<BigRational> {
    if !h.is_finite() {
        return None;
    }
    let s = format!("{h:e}");
    let (mantissa, exp) = s.split_once('e')?;
    let exp: i32 = exp.parse().ok()?;
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(digits);
    if shift >= 0 {
        q *= BigRational::from_integer(num_traits::pow(ten, shift as usize));
    } else {
        q /= BigRational::from_integer(num_traits::pow(ten, (-shift) as usize));
    }
    Some(if neg { -q } else { q })
}

fn step(h: f64) -> Result<Value, VerifyError> {
    match decimal_rational(h) {
        Some(q) if h > 0.0 => Ok(Value::Exact(q)),
        _ => Err(VerifyError::BadStep(h)),
    }
}

/// Parameter point `t0 + s * direction`.
pub fn parameter_at(spec: &FunctionalEquationSpec, s: &Value) -> Point {
    Point::new(
        spec.t0()
            .iter()
            .zip(spec.direction())
            .map(|(t, d)| Value::Exact(t.clone()).add(&Value::Exact(d.clone()).mul(s)))
            .collect(),
    )
}

fn lhs_at(spec: &FunctionalEquationSpec, f: &Expr, x: &Point, s: &Value) -> Result<Value, EvalError> {
    let t = parameter_at(spec, s);
    let env = Env::from_x(x).with_point(VarKind::T, &t);
    let mut total = Value::zero();
    for term in spec.terms() {
        let shifted = term
            .phi
            .iter()
            .zip(&x.coords)
            .map(|(c, xl)| Ok(xl.add(&c.eval(&env)?)))
            .collect::<Result<Vec<_>, EvalError>>()?;
        let value = f.eval(&Env::from_x(&Point::new(shifted)))?;
        total = total.add(&term.a.eval(&env)?.mul(&value));
    }
    Ok(total)
}

fn central(order: u8, h: &Value, mut v: impl FnMut(&Value) -> Result<Value, EvalError>) -> Result<Value, EvalError> {
    let plus = v(h)?;
    let minus = v(&h.neg())?;
    match order {
        1 => plus.sub(&minus).div(&h.mul(&Value::int(2))),
        _ => {
            let mid = v(&Value::zero())?;
            plus.sub(&mid.mul(&Value::int(2))).add(&minus).div(&h.mul(h))
        }
    }
}

/// Central difference in the parameter, at the anchor, of
/// `sum_j a_j(x,t) f(x + phi_j(t))`.
pub fn fd_dt_lhs(spec: &FunctionalEquationSpec, f: &Expr, x: &Point, order: u8, plan: &FdPlan) -> Result<Value, VerifyError> {
    if order != 1 && order != 2 {
        return Err(VerifyError::BadOrder(order));
    }
    let h = step(plan.h)?;
    central(order, &h, |s| lhs_at(spec, f, x, s)).map_err(|source| VerifyError::Eval {
        point: x.clone(),
        source,
    })
}

fn fd_dt2_b(spec: &FunctionalEquationSpec, x: &Point, h: &Value) -> Result<Value, EvalError> {
    central(2, h, |s| spec.b().eval(&Env::from_x(x).with_point(VarKind::T, &parameter_at(spec, s))))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointDeviation {
    pub x: Point,
    /// Second parameter difference of the left side minus that of `b`.
    pub fd: Value,
    /// Derived operator applied to `f`, minus `g`.
    pub symbolic: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lemma31Report {
    /// Largest `|residual|` over the validation grid.
    pub max_residual: f64,
    pub vacuous: bool,
    pub points: Vec<PointDeviation>,
    pub max_fd: f64,
    pub max_symbolic: f64,
    pub tol: f64,
    pub h: f64,
}

impl Lemma31Report {
    pub fn passed(&self) -> bool {
        !self.vacuous && self.max_fd <= self.tol && self.max_symbolic <= self.tol
    }

    pub fn label(&self) -> &'static str {
        if self.vacuous {
            VACUOUS_LABEL
        } else if self.passed() {
            "pass"
        } else {
            "fail"
        }
    }
}

/// Check that a candidate solution `f` satisfies the derived PDE, once by
/// finite differences in the parameter and once symbolically.
pub fn check_lemma31(spec: &FunctionalEquationSpec, f: &Expr, plan: &FdPlan) -> Result<Lemma31Report, VerifyError> {
    let pde = derive_pde(spec)?;
    let h = step(plan.h)?;
    let applied = pde.apply_fields(f);
    let op_minus_g = spec.simplifier().run(&Expr::sub(applied, pde.g.clone()));

    let per_point = plan
        .points
        .par_iter()
        .map(|x| {
            let wrap = |source| VerifyError::Eval {
                point: x.clone(),
                source,
            };
            let mut worst = 0.0f64;
            for s in [h.neg(), Value::zero(), h.clone()] {
                let t = parameter_at(spec, &s);
                worst = worst.max(residual(spec, f, x, &t).map_err(wrap)?.abs().to_f64());
            }
            let fd = central(2, &h, |s| lhs_at(spec, f, x, s))
                .and_then(|v| Ok(v.sub(&fd_dt2_b(spec, x, &h)?)))
                .map_err(wrap)?;
            let symbolic = op_minus_g.eval(&Env::from_x(x)).map_err(wrap)?;
            Ok((worst, PointDeviation { x: x.clone(), fd, symbolic }))
        })
        .collect::<Result<Vec<_>, VerifyError>>()?;

    let max_residual = per_point.iter().map(|(r, _)| *r).fold(0.0, f64::max);
    let points: Vec<PointDeviation> = per_point.into_iter().map(|(_, d)| d).collect();
    Ok(Lemma31Report {
        max_residual,
        vacuous: max_residual > SOLUTION_THRESHOLD,
        max_fd: points.iter().map(|d| d.fd.abs().to_f64()).fold(0.0, f64::max),
        max_symbolic: points.iter().map(|d| d.symbolic.abs().to_f64()).fold(0.0, f64::max),
        points,
        tol: plan.tol,
        h: plan.h,
    })
}

/// Largest `|de/dv - central difference|` over `points`.
pub fn fd_gradient_check(e: &Expr, v: Var, points: &[Point], h: f64) -> Result<f64, VerifyError> {
    let hv = step(h)?;
    let de = e.diff(v);
    points
        .par_iter()
        .map(|p| {
            let base = Env::from_x(p);
            let wrap = |source| VerifyError::Eval {
                point: p.clone(),
                source,
            };
            let at = base.get(v).cloned().unwrap_or_else(Value::zero);
            let fd = central(1, &hv, |s| e.eval(&base.clone().with(v, at.add(s)))).map_err(wrap)?;
            let exact = de.eval(&base).map_err(wrap)?;
            Ok(exact.sub(&fd).abs().to_f64())
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feq::fixtures;

    fn e(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    fn rational(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    fn pt(v: &[(i64, i64)]) -> Point {
        Point::exact(v.iter().map(|&(n, d)| rational(n, d)).collect())
    }

    fn grid1() -> Vec<Point> {
        [-1, 0, 1].iter().map(|&c| pt(&[(c, 1)])).collect()
    }

    #[test]
    fn decimal_steps() {
        assert_eq!(decimal_rational(1e-3), Some(rational(1, 1000)));
        assert_eq!(decimal_rational(2.5e-4), Some(rational(1, 4000)));
        assert_eq!(decimal_rational(3.0), Some(rational(3, 1)));
        assert_eq!(decimal_rational(f64::NAN), None);
    }

    #[test]
    fn fd_lhs_examples() {
        let plan = FdPlan::new(Vec::new());
        let x = pt(&[(3, 10)]);
        let v = fd_dt_lhs(&fixtures::jensen(), &e("sin(x1)"), &x, 2, &plan).unwrap();
        assert!((v.to_f64() + 2.0 * 0.3f64.sin()).abs() <= 1e-6);

        let v = fd_dt_lhs(&fixtures::quadratic(), &e("x1^2"), &pt(&[(7, 3)]), 2, &plan).unwrap();
        assert_eq!(v, Value::int(4));

        let v = fd_dt_lhs(&fixtures::heat_mean_value(), &e("5"), &pt(&[(1, 2), (1, 3)]), 1, &plan).unwrap();
        assert!(v.is_zero());
        assert!(matches!(
            fd_dt_lhs(&fixtures::jensen(), &e("x1"), &x, 3, &plan),
            Err(VerifyError::BadOrder(3))
        ));
        assert!(matches!(
            fd_dt_lhs(&fixtures::jensen(), &e("x1"), &x, 2, &plan.clone().with_h(0.0)),
            Err(VerifyError::BadStep(_))
        ));
    }

    #[test]
    fn quadratic_solution_is_exact() {
        let r = check_lemma31(&fixtures::quadratic(), &e("x1^2"), &FdPlan::new(grid1())).unwrap();
        assert!(!r.vacuous && r.passed());
        assert_eq!((r.max_fd, r.max_symbolic), (0.0, 0.0));
        assert!(r.points.iter().all(|d| d.fd.is_exact() && d.symbolic.is_exact()));
    }

    #[test]
    fn affine_solves_jensen() {
        let r = check_lemma31(&fixtures::jensen(), &e("3*x1 + 5"), &FdPlan::new(grid1())).unwrap();
        assert!(r.passed());
        assert_eq!(r.max_fd, 0.0);
    }

    #[test]
    fn vacuity_gate() {
        let r = check_lemma31(&fixtures::quadratic(), &e("x1^2 + 1/100*x1^3"), &FdPlan::new(grid1())).unwrap();
        assert!(r.vacuous);
        assert_eq!(r.label(), VACUOUS_LABEL);

        let heat = fixtures::heat_mean_value();
        let grid = vec![pt(&[(0, 1), (0, 1)]), pt(&[(1, 2), (-1, 3)]), pt(&[(-1, 1), (1, 1)])];
        let r = check_lemma31(&heat, &e("x2 + x1^2/2"), &FdPlan::new(grid.clone())).unwrap();
        assert!(r.vacuous);
        let r = check_lemma31(&heat, &e("x1^2 - x2"), &FdPlan::new(grid)).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn gradient_examples() {
        let pts: Vec<Point> = (0..20).map(|i| pt(&[(i - 10, 10)])).collect();
        let err = fd_gradient_check(&e("sin(x1)"), Var::x(1), &pts, 1e-4).unwrap();
        assert!(err <= 1e-8, "{err}");
        assert_eq!(fd_gradient_check(&e("7/3"), Var::x(1), &pts, 1e-4).unwrap(), 0.0);
        // (x+h)^3 - (x-h)^3 over 2h is 3x^2 + h^2
        let err = fd_gradient_check(&e("x1^3"), Var::x(1), &pts, 1e-2).unwrap();
        assert_eq!(err, 1e-4);
    }

    #[test]
    fn second_order_convergence() {
        let x = pt(&[(3, 10)]);
        let exact = -2.0 * 0.3f64.sin();
        let err = |h: f64| {
            let plan = FdPlan::new(Vec::new()).with_h(h);
            (fd_dt_lhs(&fixtures::jensen(), &e("sin(x1)"), &x, 2, &plan).unwrap().to_f64() - exact).abs()
        };
        let ratio = err(1e-2) / err(5e-3);
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
    }
}
