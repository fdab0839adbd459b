use num_rational::BigRational;
use num_traits::Zero;

use crate::expr::{Expr, ParseError, Simplifier, Var, VarKind, VarSpace};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("{context}: {source}")]
    Parse {
        context: String,
        #[source]
        source: ParseError,
    },
    #[error("term {term}: phi has {found} components, expected n = {expected}")]
    PhiLength { term: usize, expected: usize, found: usize },
    #[error("term {term}: phi component {component} depends on x or z; shifts must depend on t only")]
    PhiNotParametric { term: usize, component: usize },
    #[error("{context}: z-variables are only allowed in the right-hand side F")]
    ZVariable { context: String },
    #[error("t0 has {found} coordinates, expected r = {expected}")]
    AnchorLength { expected: usize, found: usize },
    #[error("param_direction has {found} coordinates, expected r = {expected}")]
    DirectionLength { expected: usize, found: usize },
    #[error("param_direction must be nonzero")]
    ZeroDirection,
    #[error("F must not depend on t (found {0})")]
    RhsDependsOnT(String),
    #[error("lambda_{index} has {found} components, expected n = {expected}")]
    LambdaLength { index: usize, expected: usize, found: usize },
    #[error("lambda_{index} must depend on x only")]
    LambdaNotSpatial { index: usize },
    #[error("need n >= 1, r >= 1 and at least one term")]
    Empty,
}

/// One summand `a_j(x,t) f(x + phi_j(t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub a: Expr,
    pub phi: Vec<Expr>,
}

/// Nonlinear right-hand side `F(x, f(lambda_1(x)), ..., f(lambda_s(x)))`.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsSpec {
    pub f: Expr,
    pub lambdas: Vec<Vec<Expr>>,
}

impl RhsSpec {
    pub fn s(&self) -> usize {
        self.lambdas.len()
    }
}

/// A generalized mean-value functional equation
/// `sum_j a_j(x,t) f(x + phi_j(t)) = F(x, f(lambda_1(x)), ...) + b(x,t)`
/// together with the anchor parameter `t0` and the direction along which
/// parameter derivatives are taken.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalEquationSpec {
    n: usize,
    r: usize,
    terms: Vec<Term>,
    b: Expr,
    t0: Vec<BigRational>,
    direction: Vec<BigRational>,
    rhs: Option<RhsSpec>,
}

fn parse_ctx(src: &str, space: &VarSpace, context: impl Into<String>) -> Result<Expr, SpecError> {
    Expr::parse_in(src, space).map_err(|source| SpecError::Parse {
        context: context.into(),
        source,
    })
}

fn parse_rational(src: &str, context: impl Into<String>) -> Result<BigRational, SpecError> {
    let context = context.into();
    let e = parse_ctx(src, &VarSpace::default(), context.clone())?.simplify();
    match e {
        Expr::Const(c) => Ok(c),
        _ => Err(SpecError::Parse {
            context,
            source: ParseError {
                offset: 0,
                kind: crate::expr::ParseErrorKind::Syntax {
                    expected: vec!["rational constant".into()],
                    found: src.to_string(),
                },
            },
        }),
    }
}

impl FunctionalEquationSpec {
    /// Validate and build. The parameter direction defaults to the first
    /// t-axis.
    pub fn new(n: usize, r: usize, terms: Vec<Term>, b: Expr, t0: Vec<BigRational>) -> Result<Self, SpecError> {
        if n == 0 || r == 0 || terms.is_empty() {
            return Err(SpecError::Empty);
        }
        for (j, term) in terms.iter().enumerate() {
            if term.phi.len() != n {
                return Err(SpecError::PhiLength {
                    term: j + 1,
                    expected: n,
                    found: term.phi.len(),
                });
            }
            for (l, c) in term.phi.iter().enumerate() {
                if c.contains_kind(VarKind::X) || c.contains_kind(VarKind::Z) {
                    return Err(SpecError::PhiNotParametric {
                        term: j + 1,
                        component: l + 1,
                    });
                }
            }
            if term.a.contains_kind(VarKind::Z) {
                return Err(SpecError::ZVariable {
                    context: format!("term {} a", j + 1),
                });
            }
        }
        if b.contains_kind(VarKind::Z) {
            return Err(SpecError::ZVariable { context: "b".into() });
        }
        if t0.len() != r {
            return Err(SpecError::AnchorLength {
                expected: r,
                found: t0.len(),
            });
        }
        let mut direction = vec![BigRational::zero(); r];
        direction[0] = BigRational::from_integer(1.into());
        Ok(FunctionalEquationSpec {
            n,
            r,
            terms,
            b,
            t0,
            direction,
            rhs: None,
        })
    }

    /// Build from grammar strings: `terms` holds `(a_j, [phi_j1, ..., phi_jn])`.
    pub fn from_strs(
        n: usize,
        r: usize,
        terms: &[(&str, &[&str])],
        b: &str,
        t0: &[&str],
    ) -> Result<Self, SpecError> {
        let space = VarSpace::new(n as u32, r as u32, 0);
        let mut parsed = Vec::with_capacity(terms.len());
        for (j, (a, phi)) in terms.iter().enumerate() {
            let a = parse_ctx(a, &space, format!("term {} a", j + 1))?;
            let phi = phi
                .iter()
                .enumerate()
                .map(|(l, p)| parse_ctx(p, &space, format!("term {} phi[{}]", j + 1, l + 1)))
                .collect::<Result<Vec<_>, _>>()?;
            parsed.push(Term { a, phi });
        }
        let b = parse_ctx(b, &space, "b")?;
        let t0 = t0
            .iter()
            .enumerate()
            .map(|(i, s)| parse_rational(s, format!("t0[{}]", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(n, r, parsed, b, t0)
    }

    pub fn with_direction(mut self, direction: Vec<BigRational>) -> Result<Self, SpecError> {
        if direction.len() != self.r {
            return Err(SpecError::DirectionLength {
                expected: self.r,
                found: direction.len(),
            });
        }
        if direction.iter().all(Zero::is_zero) {
            return Err(SpecError::ZeroDirection);
        }
        self.direction = direction;
        Ok(self)
    }

    pub fn with_rhs(mut self, rhs: RhsSpec) -> Result<Self, SpecError> {
        if rhs.f.contains_kind(VarKind::T) {
            return Err(SpecError::RhsDependsOnT(rhs.f.to_string()));
        }
        for (i, lam) in rhs.lambdas.iter().enumerate() {
            if lam.len() != self.n {
                return Err(SpecError::LambdaLength {
                    index: i + 1,
                    expected: self.n,
                    found: lam.len(),
                });
            }
            if lam.iter().any(|c| c.contains_kind(VarKind::T) || c.contains_kind(VarKind::Z)) {
                return Err(SpecError::LambdaNotSpatial { index: i + 1 });
            }
        }
        self.rhs = Some(rhs);
        Ok(self)
    }

    /// Attach `F` and `lambda_1..lambda_s` given as grammar strings.
    pub fn with_rhs_strs(self, f: &str, lambdas: &[&[&str]]) -> Result<Self, SpecError> {
        let s = lambdas.len() as u32;
        let fspace = VarSpace::new(self.n as u32, 0, s);
        let xspace = VarSpace::new(self.n as u32, 0, 0);
        let f = parse_ctx(f, &fspace, "F")?;
        let lambdas = lambdas
            .iter()
            .enumerate()
            .map(|(i, lam)| {
                lam.iter()
                    .map(|c| parse_ctx(c, &xspace, format!("lambda_{}", i + 1)))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.with_rhs(RhsSpec { f, lambdas })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn b(&self) -> &Expr {
        &self.b
    }

    pub fn t0(&self) -> &[BigRational] {
        &self.t0
    }

    pub fn direction(&self) -> &[BigRational] {
        &self.direction
    }

    pub fn rhs(&self) -> Option<&RhsSpec> {
        self.rhs.as_ref()
    }

    pub fn var_space(&self) -> VarSpace {
        VarSpace::new(self.n as u32, self.r as u32, self.rhs.as_ref().map_or(0, |r| r.s() as u32))
    }

    /// Copy with every `a_j` and `b` multiplied by `c`.
    pub fn scaled(&self, c: &BigRational) -> Self {
        let k = Expr::Const(c.clone());
        let mut out = self.clone();
        for t in &mut out.terms {
            t.a = Expr::mul(vec![k.clone(), t.a.clone()]).simplify();
        }
        out.b = Expr::mul(vec![k, out.b.clone()]).simplify();
        out
    }

    /// Simplifier that knows every `a_j` is nonnegative,
    /// both with t free and frozen at the anchor.
    pub fn simplifier(&self) -> Simplifier {
        let mut s = Simplifier::new();
        for t in &self.terms {
            s.assume_nonnegative(&t.a);
            s.assume_nonnegative(&self.freeze_raw(&t.a));
        }
        s
    }

    fn freeze_raw(&self, e: &Expr) -> Expr {
        let subs: Vec<(Var, Expr)> = (0..self.r)
            .map(|i| (Var::t(i as u32 + 1), Expr::Const(self.t0[i].clone())))
            .collect();
        e.substitute_all(&subs)
    }

    /// Substitute `t = t0` and simplify.
    pub fn freeze(&self, e: &Expr) -> Expr {
        self.simplifier().run(&self.freeze_raw(e))
    }

    /// Directional parameter derivative `sum_i d_i * de/dt_i`.
    pub fn dt(&self, e: &Expr) -> Expr {
        let terms = (0..self.r)
            .filter(|i| !self.direction[*i].is_zero())
            .map(|i| Expr::mul(vec![Expr::Const(self.direction[i].clone()), e.diff(Var::t(i as u32 + 1))]))
            .collect();
        Expr::add(terms).simplify()
    }

    /// `phi_j'(t)` componentwise (t symbolic).
    pub fn phi_prime(&self, j: usize) -> Vec<Expr> {
        self.terms[j].phi.iter().map(|c| self.dt(c)).collect()
    }

    /// `phi_j''(t)` componentwise (t symbolic).
    pub fn phi_second(&self, j: usize) -> Vec<Expr> {
        self.terms[j].phi.iter().map(|c| self.dt(&self.dt(c))).collect()
    }

    pub fn phi_prime_at_anchor(&self, j: usize) -> Vec<Expr> {
        self.phi_prime(j).iter().map(|c| self.freeze(c)).collect()
    }

    pub fn phi_second_at_anchor(&self, j: usize) -> Vec<Expr> {
        self.phi_second(j).iter().map(|c| self.freeze(c)).collect()
    }

    pub fn a_at_anchor(&self, j: usize) -> Expr {
        self.freeze(&self.terms[j].a)
    }

    /// True when every `a_j` simplifies to a constant.
    pub fn has_constant_coefficients(&self) -> bool {
        self.terms.iter().all(|t| t.a.simplify().as_const().is_some())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_errors() {
        let err = FunctionalEquationSpec::from_strs(2, 1, &[("1", &["t1"])], "0", &["0"]).unwrap_err();
        assert!(matches!(err, SpecError::PhiLength { expected: 2, found: 1, .. }));
        let err = FunctionalEquationSpec::from_strs(1, 1, &[("1", &["x1*t1"])], "0", &["0"]).unwrap_err();
        assert!(matches!(err, SpecError::PhiNotParametric { .. }));
        let err = FunctionalEquationSpec::from_strs(1, 1, &[("1", &["t1"])], "0", &["0", "1"]).unwrap_err();
        assert!(matches!(err, SpecError::AnchorLength { .. }));
        let err = FunctionalEquationSpec::from_strs(1, 1, &[("x2", &["t1"])], "0", &["0"]).unwrap_err();
        assert!(matches!(err, SpecError::Parse { .. }));
        let spec = FunctionalEquationSpec::from_strs(1, 1, &[("1", &["t1"])], "0", &["0"]).unwrap();
        assert!(matches!(
            spec.clone().with_rhs_strs("2*z1 + t1", &[&["x1"]]),
            Err(SpecError::Parse { .. })
        ));
        assert!(spec.clone().with_rhs_strs("2*z1", &[&["x1"]]).is_ok());
        assert!(matches!(spec.with_direction(vec![BigRational::zero()]), Err(SpecError::ZeroDirection)));
    }

    #[test]
    fn directional_parameter_derivative() {
        let spec = FunctionalEquationSpec::from_strs(1, 2, &[("1", &["t1^2 + 3*t2"])], "0", &["0", "0"]).unwrap();
        assert_eq!(spec.phi_prime_at_anchor(0), vec![Expr::zero()]);
        let along_t2 = spec
            .with_direction(vec![BigRational::zero(), BigRational::from_integer(1.into())])
            .unwrap();
        assert_eq!(along_t2.phi_prime_at_anchor(0), vec![Expr::int(3)]);
        assert_eq!(along_t2.phi_second_at_anchor(0), vec![Expr::zero()]);
    }
}
