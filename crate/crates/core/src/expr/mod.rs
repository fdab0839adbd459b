//! Symbolic expressions over spatial variables `x1..xn`, parameter variables
//! `t1..tr` and right-hand-side slots `z1..zs`.
//!
//! Constants are exact rationals. Exponents are integers; fractional powers
//! are written with `sqrt`. Every operation is a pure function on an immutable
//! tree, so expressions can be shared freely between threads.

mod diff;
mod eval;
mod parse;
mod render;
mod simplify;

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use eval::{Env, EvalError, Point, Value};
pub use parse::{ParseError, ParseErrorKind};
pub use simplify::Simplifier;
pub(crate) use simplify::split_coeff;

/// Which family a variable belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    /// Spatial coordinate `x_i`.
    X,
    /// Parameter coordinate `t_i`.
    T,
    /// Argument slot `z_i` of the nonlinear right-hand side.
    Z,
}

impl VarKind {
    fn prefix(self) -> char {
        match self {
            VarKind::X => 'x',
            VarKind::T => 't',
            VarKind::Z => 'z',
        }
    }
}

/// A variable from the fixed namespace. Indices are 1-based, matching the
/// rendered names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub kind: VarKind,
    pub index: u32,
}

impl Var {
    pub fn x(index: u32) -> Self {
        Var { kind: VarKind::X, index }
    }

    pub fn t(index: u32) -> Self {
        Var { kind: VarKind::T, index }
    }

    pub fn z(index: u32) -> Self {
        Var { kind: VarKind::Z, index }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.prefix(), self.index)
    }
}

/// The declared sizes of the three variable families. An identifier is
/// accepted by the parser only if its index lies inside the declared range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VarSpace {
    pub n: u32,
    pub r: u32,
    pub s: u32,
}

impl VarSpace {
    pub fn new(n: u32, r: u32, s: u32) -> Self {
        VarSpace { n, r, s }
    }

    /// A namespace that accepts every index; used by `Expr::parse`.
    pub fn unbounded() -> Self {
        VarSpace {
            n: u32::MAX,
            r: u32::MAX,
            s: u32::MAX,
        }
    }

    pub fn contains(&self, v: Var) -> bool {
        let bound = match v.kind {
            VarKind::X => self.n,
            VarKind::T => self.r,
            VarKind::Z => self.s,
        };
        v.index >= 1 && v.index <= bound
    }

    pub fn xs(&self) -> impl Iterator<Item = Var> {
        (1..=self.n).map(Var::x)
    }

    pub fn ts(&self) -> impl Iterator<Item = Var> {
        (1..=self.r).map(Var::t)
    }
}

/// Expression tree.
///
/// The derived ordering is only used to sort operands into a canonical order
/// during simplification; it has no mathematical meaning.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Const(BigRational),
    Var(Var),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Pow(Box<Expr>, i64),
    Sqrt(Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Neg(Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn zero() -> Self {
        Expr::Const(BigRational::zero())
    }

    pub fn one() -> Self {
        Expr::Const(BigRational::one())
    }

    pub fn int(v: i64) -> Self {
        Expr::Const(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Expr::Const(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn constant(c: BigRational) -> Self {
        Expr::Const(c)
    }

    pub fn var(v: Var) -> Self {
        Expr::Var(v)
    }

    pub fn x(i: u32) -> Self {
        Expr::Var(Var::x(i))
    }

    pub fn t(i: u32) -> Self {
        Expr::Var(Var::t(i))
    }

    pub fn z(i: u32) -> Self {
        Expr::Var(Var::z(i))
    }

    pub fn add(terms: Vec<Expr>) -> Self {
        Expr::Add(terms)
    }

    pub fn mul(factors: Vec<Expr>) -> Self {
        Expr::Mul(factors)
    }

    pub fn pow(base: Expr, exp: i64) -> Self {
        Expr::Pow(Box::new(base), exp)
    }

    pub fn sqrt(arg: Expr) -> Self {
        Expr::Sqrt(Box::new(arg))
    }

    pub fn exp(arg: Expr) -> Self {
        Expr::Exp(Box::new(arg))
    }

    pub fn log(arg: Expr) -> Self {
        Expr::Log(Box::new(arg))
    }

    pub fn sin(arg: Expr) -> Self {
        Expr::Sin(Box::new(arg))
    }

    pub fn cos(arg: Expr) -> Self {
        Expr::Cos(Box::new(arg))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(arg: Expr) -> Self {
        Expr::Neg(Box::new(arg))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(num: Expr, den: Expr) -> Self {
        Expr::Div(Box::new(num), Box::new(den))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Self {
        Expr::Add(vec![a, Expr::neg(b)])
    }

    /// Parse with an unrestricted variable namespace.
    pub fn parse(source: &str) -> Result<Expr, ParseError> {
        parse::parse(source, &VarSpace::unbounded())
    }

    /// Parse, rejecting identifiers outside `space`.
    pub fn parse_in(source: &str, space: &VarSpace) -> Result<Expr, ParseError> {
        parse::parse(source, space)
    }

    pub fn as_const(&self) -> Option<&BigRational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Structural zero test. Call on simplified input.
    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Expr::Const(c) if c.is_one())
    }

    /// Immediate children, in order.
    pub fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Const(_) | Expr::Var(_) => Vec::new(),
            Expr::Add(v) | Expr::Mul(v) => v.iter().collect(),
            Expr::Pow(b, _) => vec![b],
            Expr::Sqrt(a) | Expr::Exp(a) | Expr::Log(a) | Expr::Sin(a) | Expr::Cos(a) | Expr::Neg(a) => {
                vec![a]
            }
            Expr::Div(a, b) => vec![a, b],
        }
    }

    /// Rebuild this node with every child passed through `f`.
    pub fn map_children(&self, mut f: impl FnMut(&Expr) -> Expr) -> Expr {
        match self {
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Add(v) => Expr::Add(v.iter().map(&mut f).collect()),
            Expr::Mul(v) => Expr::Mul(v.iter().map(&mut f).collect()),
            Expr::Pow(b, n) => Expr::Pow(Box::new(f(b)), *n),
            Expr::Sqrt(a) => Expr::Sqrt(Box::new(f(a))),
            Expr::Exp(a) => Expr::Exp(Box::new(f(a))),
            Expr::Log(a) => Expr::Log(Box::new(f(a))),
            Expr::Sin(a) => Expr::Sin(Box::new(f(a))),
            Expr::Cos(a) => Expr::Cos(Box::new(f(a))),
            Expr::Neg(a) => Expr::Neg(Box::new(f(a))),
            Expr::Div(a, b) => Expr::Div(Box::new(f(a)), Box::new(f(b))),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        if let Expr::Var(v) = self {
            out.insert(*v);
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    pub fn contains_kind(&self, kind: VarKind) -> bool {
        match self {
            Expr::Var(v) => v.kind == kind,
            _ => self.children().into_iter().any(|c| c.contains_kind(kind)),
        }
    }

    /// True when no transcendental or root node appears, so evaluation at an
    /// exact point stays exact.
    pub fn is_rational_closed(&self) -> bool {
        match self {
            Expr::Sqrt(_) | Expr::Exp(_) | Expr::Log(_) | Expr::Sin(_) | Expr::Cos(_) => false,
            _ => self.children().into_iter().all(Expr::is_rational_closed),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().into_iter().map(Expr::node_count).sum::<usize>()
    }

    /// Symbolic derivative, simplified.
    pub fn diff(&self, v: Var) -> Expr {
        simplify::simplify(&diff::diff(self, v))
    }

    /// Symbolic derivative straight from the differentiation rules, without
    /// any simplification pass.
    pub fn diff_raw(&self, v: Var) -> Expr {
        diff::diff(self, v)
    }

    /// Replace every occurrence of `v` with `replacement`, then simplify.
    pub fn substitute(&self, v: Var, replacement: &Expr) -> Expr {
        simplify::simplify(&self.substitute_raw(v, replacement))
    }

    pub fn substitute_raw(&self, v: Var, replacement: &Expr) -> Expr {
        match self {
            Expr::Var(w) if *w == v => replacement.clone(),
            _ => self.map_children(|c| c.substitute_raw(v, replacement)),
        }
    }

    /// Simultaneous substitution of several variables, then simplify.
    pub fn substitute_all(&self, subs: &[(Var, Expr)]) -> Expr {
        simplify::simplify(&self.substitute_all_raw(subs))
    }

    pub fn substitute_all_raw(&self, subs: &[(Var, Expr)]) -> Expr {
        match self {
            Expr::Var(w) => match subs.iter().find(|(v, _)| v == w) {
                Some((_, e)) => e.clone(),
                None => self.clone(),
            },
            _ => self.map_children(|c| c.substitute_all_raw(subs)),
        }
    }

    /// Simplify with no nonnegativity assumptions.
    pub fn simplify(&self) -> Expr {
        simplify::simplify(self)
    }

    pub fn eval(&self, env: &Env) -> Result<Value, EvalError> {
        eval::eval(self, env)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render::render(self))
    }
}

impl From<i64> for Expr {
    fn from(v: i64) -> Self {
        Expr::int(v)
    }
}

impl From<Var> for Expr {
    fn from(v: Var) -> Self {
        Expr::Var(v)
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expr::parse(s)
    }
}
