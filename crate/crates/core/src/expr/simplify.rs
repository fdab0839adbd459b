//! Rewrite-to-fixpoint simplification.
//!
//! One pass rewrites bottom-up with this fixed rule list:
//!
//! * `-a` becomes `(-1)*a`, `a/b` becomes `a*b^-1`;
//! * nested sums and products are flattened, constants folded;
//! * `0*a -> 0`, `1*a -> a`, `a + 0 -> a`, `a^0 -> 1`, `a^1 -> a`;
//! * product factors with the same base merge exponents, `(a^m)^n -> a^(mn)`,
//!   `(a*b)^n -> a^n*b^n`;
//! * sums collect like terms by their non-constant factor list;
//! * products of sums are distributed, and `(a+b)^n` with small positive `n`
//!   is expanded, so polynomial subtrees reach a canonical sum of monomials;
//! * `sqrt(c)` folds for perfect-square rationals, `sqrt(c*u) -> sqrt(c)*sqrt(u)`
//!   when `c` is a perfect square;
//! * `sqrt(u)^(2k) -> u^k` and `sqrt(u^(2k)) -> u^k` only when `u` is known
//!   nonnegative (flagged, or nonnegative by shape);
//! * `exp(0) -> 1`, `log(1) -> 0`, `log(exp(u)) -> u`, `sin(0) -> 0`,
//!   `cos(0) -> 1`.
//!
//! Operands of sums and products are kept sorted. Passes repeat until the
//! tree stops changing, which makes the result idempotent.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::eval::exact_sqrt;
use super::Expr;

const MAX_PASSES: usize = 64;
const EXPAND_POW_CAP: i64 = 12;
const EXPAND_TERM_CAP: usize = 4096;

/// Simplifier carrying the set of subexpressions asserted nonnegative.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Simplifier {
    nonneg: BTreeSet<Expr>,
}

pub(super) fn simplify(e: &Expr) -> Expr {
    Simplifier::default().run(e)
}

impl Simplifier {
    pub fn new() -> Self {
        Simplifier::default()
    }

    /// Flag `e` as nonnegative on the domain of interest. The flag is matched
    /// against simplified subtrees, so it is stored in simplified form.
    pub fn assume_nonnegative(&mut self, e: &Expr) {
        let s = self.run(e);
        self.nonneg.insert(s);
    }

    pub fn with_nonnegative<'a>(mut self, es: impl IntoIterator<Item = &'a Expr>) -> Self {
        for e in es {
            self.assume_nonnegative(e);
        }
        self
    }

    pub fn run(&self, e: &Expr) -> Expr {
        let mut cur = self.pass(e);
        for _ in 0..MAX_PASSES {
            let next = self.pass(&cur);
            if next == cur {
                break;
            }
            cur = next;
        }
        cur
    }

    fn pass(&self, e: &Expr) -> Expr {
        let e = e.map_children(|c| self.pass(c));
        match e {
            Expr::Const(_) | Expr::Var(_) => e,
            Expr::Neg(a) => self.mul_node(vec![Expr::int(-1), *a]),
            Expr::Div(a, b) => {
                let inv = self.pow_node(*b, -1);
                self.mul_node(vec![*a, inv])
            }
            Expr::Add(terms) => self.add_node(terms),
            Expr::Mul(factors) => self.mul_node(factors),
            Expr::Pow(b, n) => self.pow_node(*b, n),
            Expr::Sqrt(a) => self.sqrt_node(*a),
            Expr::Exp(a) => match *a {
                Expr::Const(ref c) if c.is_zero() => Expr::one(),
                a => Expr::exp(a),
            },
            Expr::Log(a) => match *a {
                Expr::Const(ref c) if c.is_one() => Expr::zero(),
                Expr::Exp(inner) => *inner,
                a => Expr::log(a),
            },
            Expr::Sin(a) => match *a {
                Expr::Const(ref c) if c.is_zero() => Expr::zero(),
                a => Expr::sin(a),
            },
            Expr::Cos(a) => match *a {
                Expr::Const(ref c) if c.is_zero() => Expr::one(),
                a => Expr::cos(a),
            },
        }
    }

    /// Nonnegativity by flag or by shape.
    fn is_nonneg(&self, e: &Expr) -> bool {
        if self.nonneg.contains(e) {
            return true;
        }
        match e {
            Expr::Const(c) => !c.is_negative(),
            Expr::Exp(_) | Expr::Sqrt(_) => true,
            Expr::Pow(b, n) => n % 2 == 0 || self.is_nonneg(b),
            Expr::Mul(fs) | Expr::Add(fs) => fs.iter().all(|f| self.is_nonneg(f)),
            _ => false,
        }
    }

    fn pow_node(&self, b: Expr, n: i64) -> Expr {
        if n == 0 {
            return Expr::one();
        }
        if n == 1 {
            return b;
        }
        match b {
            Expr::Const(c) => {
                if c.is_zero() && n < 0 {
                    Expr::pow(Expr::Const(c), n)
                } else {
                    Expr::Const(rational_pow(&c, n))
                }
            }
            Expr::Pow(inner, m) => match m.checked_mul(n) {
                Some(mn) => self.pow_node(*inner, mn),
                None => Expr::pow(Expr::Pow(inner, m), n),
            },
            Expr::Mul(fs) => {
                let powered = fs.into_iter().map(|f| self.pow_node(f, n)).collect();
                self.mul_node(powered)
            }
            Expr::Add(ref terms) if n > 1 && n <= EXPAND_POW_CAP => {
                let count = (terms.len() as f64).powi(n as i32);
                if count <= EXPAND_TERM_CAP as f64 {
                    self.distribute(BigRational::one(), Vec::new(), vec![b.clone(); n as usize])
                } else {
                    Expr::pow(b, n)
                }
            }
            Expr::Add(_) if (-EXPAND_POW_CAP..-1).contains(&n) => match self.pow_node(b, -n) {
                expanded @ Expr::Add(_) => Expr::pow(expanded, -1),
                other => self.pow_node(other, -1),
            },
            Expr::Sqrt(ref u) if n % 2 == 0 && self.is_nonneg(u) => {
                let Expr::Sqrt(u) = b else { unreachable!() };
                self.pow_node(*u, n / 2)
            }
            b => Expr::pow(b, n),
        }
    }

    fn sqrt_node(&self, a: Expr) -> Expr {
        match a {
            Expr::Const(ref c) => match exact_sqrt(c) {
                Some(r) => Expr::Const(r),
                None => Expr::sqrt(a),
            },
            Expr::Mul(ref fs) => {
                if let Some(Expr::Const(c)) = fs.first() {
                    if let Some(r) = exact_sqrt(c) {
                        let rest = self.mul_node(fs[1..].to_vec());
                        return self.mul_node(vec![Expr::Const(r), Expr::sqrt(rest)]);
                    }
                }
                Expr::sqrt(a)
            }
            Expr::Pow(ref u, n) if n % 2 == 0 && self.is_nonneg(u) => {
                let Expr::Pow(u, n) = a else { unreachable!() };
                self.pow_node(*u, n / 2)
            }
            a => Expr::sqrt(a),
        }
    }

    fn mul_node(&self, factors: Vec<Expr>) -> Expr {
        let mut coeff = BigRational::one();
        let mut exps: BTreeMap<Expr, i64> = BTreeMap::new();
        let mut stack = factors;
        while let Some(f) = stack.pop() {
            match f {
                Expr::Const(c) => coeff *= c,
                Expr::Mul(inner) => stack.extend(inner),
                Expr::Pow(b, n) if !matches!(*b, Expr::Const(_)) => {
                    let slot = exps.entry(*b).or_insert(0);
                    *slot = slot.saturating_add(n);
                }
                other => *exps.entry(other).or_insert(0) += 1,
            }
        }
        if coeff.is_zero() {
            return Expr::zero();
        }

        let mut plain = Vec::new();
        let mut sums = Vec::new();
        for (base, n) in exps {
            if n == 0 {
                continue;
            }
            let f = if n == 1 { base } else { self.pow_node(base, n) };
            match f {
                Expr::Const(c) => coeff *= c,
                Expr::Add(_) => sums.push(f),
                Expr::Mul(inner) => {
                    for g in inner {
                        match g {
                            Expr::Const(c) => coeff *= c,
                            Expr::Add(_) => sums.push(g),
                            g => plain.push(g),
                        }
                    }
                }
                f => plain.push(f),
            }
        }
        if coeff.is_zero() {
            return Expr::zero();
        }
        if !sums.is_empty() {
            let count: f64 = sums.iter().map(|s| s.children().len() as f64).product();
            if count <= EXPAND_TERM_CAP as f64 {
                return self.distribute(coeff, plain, sums);
            }
            plain.extend(sums);
        }
        build_product(coeff, plain)
    }

    /// Expand `coeff * prod(plain) * prod(sums)` into a sum of products.
    fn distribute(&self, coeff: BigRational, plain: Vec<Expr>, sums: Vec<Expr>) -> Expr {
        let mut partial: Vec<Vec<Expr>> = vec![plain];
        for s in sums {
            let Expr::Add(terms) = s else { unreachable!() };
            let mut next = Vec::with_capacity(partial.len() * terms.len());
            for p in &partial {
                for t in &terms {
                    let mut q = p.clone();
                    q.push(t.clone());
                    next.push(q);
                }
            }
            partial = next;
        }
        let terms = partial
            .into_iter()
            .map(|mut fs| {
                fs.push(Expr::Const(coeff.clone()));
                self.mul_node(fs)
            })
            .collect();
        self.add_node(terms)
    }

    fn add_node(&self, terms: Vec<Expr>) -> Expr {
        let mut constant = BigRational::zero();
        let mut like: BTreeMap<Vec<Expr>, BigRational> = BTreeMap::new();
        let mut stack = terms;
        while let Some(t) = stack.pop() {
            match t {
                Expr::Const(c) => constant += c,
                Expr::Add(inner) => stack.extend(inner),
                t => {
                    let (c, rest) = split_coeff(t);
                    *like.entry(rest).or_insert_with(BigRational::zero) += c;
                }
            }
        }
        let mut out = Vec::new();
        if !constant.is_zero() {
            out.push(Expr::Const(constant));
        }
        for (rest, c) in like {
            if !c.is_zero() {
                out.push(build_product(c, rest));
            }
        }
        match out.len() {
            0 => Expr::zero(),
            1 => out.pop().unwrap(),
            _ => {
                out.sort();
                Expr::Add(out)
            }
        }
    }
}

/// Split a simplified non-constant term into its rational coefficient and
/// sorted remaining factors.
pub(crate) fn split_coeff(t: Expr) -> (BigRational, Vec<Expr>) {
    match t {
        Expr::Mul(fs) => {
            let mut coeff = BigRational::one();
            let mut rest = Vec::with_capacity(fs.len());
            for f in fs {
                match f {
                    Expr::Const(c) => coeff *= c,
                    f => rest.push(f),
                }
            }
            rest.sort();
            (coeff, rest)
        }
        Expr::Const(c) => (c, Vec::new()),
        t => (BigRational::one(), vec![t]),
    }
}

fn build_product(coeff: BigRational, mut factors: Vec<Expr>) -> Expr {
    factors.sort();
    if factors.is_empty() {
        return Expr::Const(coeff);
    }
    if coeff.is_one() && factors.len() == 1 {
        return factors.pop().unwrap();
    }
    let mut out = Vec::with_capacity(factors.len() + 1);
    if !coeff.is_one() {
        out.push(Expr::Const(coeff));
    }
    out.extend(factors);
    Expr::Mul(out)
}

fn rational_pow(c: &BigRational, n: i64) -> BigRational {
    let base = if n < 0 { c.recip() } else { c.clone() };
    let mut acc = BigRational::one();
    for _ in 0..n.unsigned_abs() {
        acc *= &base;
    }
    acc
}
