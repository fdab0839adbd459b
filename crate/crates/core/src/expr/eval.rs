use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use super::{Expr, Var, VarKind};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("variable {0} is not bound")]
    Unbound(Var),
    #[error("sqrt of negative value {0}")]
    NegativeSqrt(String),
    #[error("log of nonpositive value {0}")]
    NonPositiveLog(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("non-finite floating result")]
    NonFinite,
}

/// A number produced by evaluation: exact when every step stayed inside the
/// rationals, otherwise a 64-bit float (round-to-nearest).
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Float(f64),
}

impl Value {
    pub fn int(v: i64) -> Self {
        Value::Exact(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Value::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Self {
        Value::Exact(BigRational::zero())
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(q) => Some(q),
            Value::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => rational_to_f64(q),
            Value::Float(v) => *v,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Value::Exact(q) => q.is_zero(),
            Value::Float(v) => *v == 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Value::Exact(q) => q.is_negative(),
            Value::Float(v) => *v < 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Value::Exact(q) => q.is_positive(),
            Value::Float(v) => *v > 0.0,
        }
    }

    /// Convert a float to the exactly equal rational (every finite f64 is a
    /// dyadic rational).
    pub fn exact_from_f64(v: f64) -> Option<Value> {
        BigRational::from_f64(v).map(Value::Exact)
    }

    pub fn abs(&self) -> Value {
        match self {
            Value::Exact(q) => Value::Exact(q.abs()),
            Value::Float(v) => Value::Float(v.abs()),
        }
    }

    pub fn add(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a + b),
            _ => Value::Float(self.to_f64() + other.to_f64()),
        }
    }

    pub fn sub(&self, other: &Value) -> Value {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a * b),
            _ => Value::Float(self.to_f64() * other.to_f64()),
        }
    }

    pub fn neg(&self) -> Value {
        match self {
            Value::Exact(a) => Value::Exact(-a),
            Value::Float(v) => Value::Float(-v),
        }
    }

    pub fn recip(&self) -> Result<Value, EvalError> {
        if self.is_zero() {
            return Err(EvalError::DivisionByZero);
        }
        Ok(match self {
            Value::Exact(a) => Value::Exact(a.recip()),
            Value::Float(v) => Value::Float(1.0 / v),
        })
    }

    pub fn div(&self, other: &Value) -> Result<Value, EvalError> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn powi(&self, n: i64) -> Result<Value, EvalError> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        Ok(match self {
            Value::Exact(a) => {
                let mut acc = BigRational::one();
                for _ in 0..n {
                    acc *= a;
                }
                Value::Exact(acc)
            }
            Value::Float(v) => Value::Float(v.powi(n as i32)),
        })
    }

    pub fn sqrt(&self) -> Result<Value, EvalError> {
        if self.is_negative() {
            return Err(EvalError::NegativeSqrt(self.to_string()));
        }
        Ok(match self {
            Value::Exact(q) => match exact_sqrt(q) {
                Some(r) => Value::Exact(r),
                None => Value::Float(rational_to_f64(q).sqrt()),
            },
            Value::Float(v) => Value::Float(v.sqrt()),
        })
    }

    fn checked(v: f64) -> Result<Value, EvalError> {
        if v.is_finite() {
            Ok(Value::Float(v))
        } else {
            Err(EvalError::NonFinite)
        }
    }
}

impl fmt::Display for Value {
    /// Exact values print as `p` or `p/q`; floats print with 17 significant
    /// digits in scientific notation.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(q) => write!(f, "{q}"),
            Value::Float(v) => write!(f, "{v:.16e}"),
        }
    }
}

impl From<BigRational> for Value {
    fn from(q: BigRational) -> Self {
        Value::Exact(q)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // fall back for huge numerators/denominators
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Square root of a nonnegative rational when both numerator and denominator
/// are perfect squares.
pub(crate) fn exact_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Ordered coordinates of a point in x-space, t-space or the joint space.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub coords: Vec<Value>,
}

impl Point {
    pub fn new(coords: Vec<Value>) -> Self {
        Point { coords }
    }

    pub fn exact(coords: Vec<BigRational>) -> Self {
        Point {
            coords: coords.into_iter().map(Value::Exact).collect(),
        }
    }

    pub fn from_f64(coords: &[f64]) -> Self {
        Point {
            coords: coords.iter().copied().map(Value::Float).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_exact(&self) -> bool {
        self.coords.iter().all(Value::is_exact)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(Value::to_f64).collect()
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Variable bindings for evaluation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Env {
    values: BTreeMap<Var, Value>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    /// Bind `x1..xn` to the coordinates of `p`.
    pub fn from_x(p: &Point) -> Self {
        Env::new().with_point(VarKind::X, p)
    }

    pub fn with_point(mut self, kind: VarKind, p: &Point) -> Self {
        for (i, c) in p.coords.iter().enumerate() {
            self.values.insert(Var { kind, index: i as u32 + 1 }, c.clone());
        }
        self
    }

    pub fn with(mut self, v: Var, value: Value) -> Self {
        self.values.insert(v, value);
        self
    }

    pub fn set(&mut self, v: Var, value: Value) {
        self.values.insert(v, value);
    }

    pub fn get(&self, v: Var) -> Option<&Value> {
        self.values.get(&v)
    }
}

pub(super) fn eval(e: &Expr, env: &Env) -> Result<Value, EvalError> {
    match e {
        Expr::Const(c) => Ok(Value::Exact(c.clone())),
        Expr::Var(v) => env.get(*v).cloned().ok_or(EvalError::Unbound(*v)),
        Expr::Add(terms) => {
            let mut acc = Value::zero();
            for t in terms {
                acc = acc.add(&eval(t, env)?);
            }
            Ok(acc)
        }
        Expr::Mul(factors) => {
            let mut acc = Value::int(1);
            for f in factors {
                acc = acc.mul(&eval(f, env)?);
            }
            Ok(acc)
        }
        Expr::Pow(b, n) => eval(b, env)?.powi(*n),
        Expr::Sqrt(a) => eval(a, env)?.sqrt(),
        Expr::Exp(a) => {
            let v = eval(a, env)?;
            if v.is_zero() {
                return Ok(Value::int(1));
            }
            Value::checked(v.to_f64().exp())
        }
        Expr::Log(a) => {
            let v = eval(a, env)?;
            if !v.is_positive() {
                return Err(EvalError::NonPositiveLog(v.to_string()));
            }
            if let Value::Exact(q) = &v {
                if q.is_one() {
                    return Ok(Value::zero());
                }
            }
            Value::checked(v.to_f64().ln())
        }
        Expr::Sin(a) => {
            let v = eval(a, env)?;
            if v.is_zero() {
                return Ok(Value::zero());
            }
            Value::checked(v.to_f64().sin())
        }
        Expr::Cos(a) => {
            let v = eval(a, env)?;
            if v.is_zero() {
                return Ok(Value::int(1));
            }
            Value::checked(v.to_f64().cos())
        }
        Expr::Neg(a) => Ok(eval(a, env)?.neg()),
        Expr::Div(a, b) => {
            let num = eval(a, env)?;
            num.div(&eval(b, env)?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exact_arithmetic() {
        let e = Expr::parse("x1^2 + t1").unwrap();
        let env = Env::new()
            .with(Var::x(1), Value::int(3))
            .with(Var::t(1), Value::rational(1, 2));
        assert_eq!(e.eval(&env).unwrap(), Value::Exact(q(19, 2)));
    }

    #[test]
    fn domain_errors() {
        let env = Env::new().with(Var::x(1), Value::int(-1));
        assert!(matches!(
            Expr::parse("sqrt(x1)").unwrap().eval(&env),
            Err(EvalError::NegativeSqrt(_))
        ));
        assert!(matches!(
            Expr::parse("log(x1 + 1)").unwrap().eval(&env),
            Err(EvalError::NonPositiveLog(_))
        ));
        assert_eq!(
            Expr::parse("1/(x1 + 1)").unwrap().eval(&env),
            Err(EvalError::DivisionByZero)
        );
        assert_eq!(
            Expr::parse("(x1 + 1)^-2").unwrap().eval(&env),
            Err(EvalError::DivisionByZero)
        );
        assert_eq!(
            Expr::parse("x2").unwrap().eval(&env),
            Err(EvalError::Unbound(Var::x(2)))
        );
    }

    #[test]
    fn transcendental_special_values_stay_exact() {
        let env = Env::new().with(Var::x(1), Value::int(0));
        for (src, want) in [("exp(x1)", 1), ("cos(x1)", 1), ("sin(x1)", 0), ("log(x1 + 1)", 0)] {
            assert_eq!(Expr::parse(src).unwrap().eval(&env).unwrap(), Value::int(want), "{src}");
        }
        let v = Expr::parse("sqrt(9/4)").unwrap().eval(&env).unwrap();
        assert_eq!(v, Value::rational(3, 2));
        let v = Expr::parse("sqrt(2)").unwrap().eval(&env).unwrap();
        assert!(!v.is_exact());
        assert!((v.to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn value_display() {
        assert_eq!(Value::rational(-3, 6).to_string(), "-1/2");
        assert_eq!(Value::Float(0.1).to_string(), "1.0000000000000001e-1");
    }
}
