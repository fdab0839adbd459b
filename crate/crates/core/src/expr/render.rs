//! Rendering into strings accepted by the parser.

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::Expr;

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

pub(super) fn render(e: &Expr) -> String {
    go(e).0
}

fn wrap(e: &Expr, min: u8) -> String {
    let (s, p) = go(e);
    if p >= min {
        s
    } else {
        format!("({s})")
    }
}

fn render_const(c: &BigRational) -> (String, u8) {
    let prec = if !c.is_integer() {
        PRODUCT
    } else if c.is_negative() {
        UNARY
    } else {
        ATOM
    };
    (c.to_string(), prec)
}

fn go(e: &Expr) -> (String, u8) {
    match e {
        Expr::Const(c) => render_const(c),
        Expr::Var(v) => (v.to_string(), ATOM),
        Expr::Add(terms) if terms.is_empty() => ("0".into(), ATOM),
        Expr::Add(terms) => {
            let mut out = wrap(&terms[0], SUM);
            for t in &terms[1..] {
                match negated(t) {
                    Some(pos) => {
                        out.push_str(" - ");
                        out.push_str(&wrap(&pos, PRODUCT));
                    }
                    None => {
                        out.push_str(" + ");
                        out.push_str(&wrap(t, PRODUCT));
                    }
                }
            }
            (out, SUM)
        }
        Expr::Mul(factors) if factors.is_empty() => ("1".into(), ATOM),
        Expr::Mul(factors) => render_product(factors),
        Expr::Pow(b, n) if *n < 0 => {
            let den = if *n == -1 {
                wrap(b, POWER + 1)
            } else {
                format!("{}^{}", wrap(b, ATOM), -n)
            };
            (format!("1/{den}"), PRODUCT)
        }
        Expr::Pow(b, n) => (format!("{}^{n}", wrap(b, ATOM)), POWER),
        Expr::Sqrt(a) => (format!("sqrt({})", render(a)), ATOM),
        Expr::Exp(a) => (format!("exp({})", render(a)), ATOM),
        Expr::Log(a) => (format!("log({})", render(a)), ATOM),
        Expr::Sin(a) => (format!("sin({})", render(a)), ATOM),
        Expr::Cos(a) => (format!("cos({})", render(a)), ATOM),
        Expr::Neg(a) => (format!("-{}", wrap(a, POWER)), UNARY),
        Expr::Div(a, b) => (format!("{}/{}", wrap(a, PRODUCT), wrap(b, UNARY)), PRODUCT),
    }
}

fn render_product(factors: &[Expr]) -> (String, u8) {
    let mut coeff: Option<&BigRational> = None;
    let mut num = Vec::new();
    let mut den = Vec::new();
    for (i, f) in factors.iter().enumerate() {
        match f {
            Expr::Const(c) if i == 0 => coeff = Some(c),
            Expr::Pow(b, n) if *n < 0 => den.push(if *n == -1 {
                wrap(b, UNARY)
            } else {
                format!("{}^{}", wrap(b, ATOM), -n)
            }),
            f => num.push(wrap(f, UNARY)),
        }
    }
    let mut out = String::new();
    match coeff {
        Some(c) if !num.is_empty() && c.is_one() => {}
        Some(c) if !num.is_empty() && (-c).is_one() => out.push('-'),
        Some(c) => {
            out.push_str(&c.to_string());
            if !num.is_empty() {
                out.push('*');
            }
        }
        None if num.is_empty() => out.push('1'),
        None => {}
    }
    out.push_str(&num.join("*"));
    for d in den {
        out.push('/');
        out.push_str(&d);
    }
    (out, PRODUCT)
}

/// If `t` reads naturally with a leading minus, return its negation.
fn negated(t: &Expr) -> Option<Expr> {
    match t {
        Expr::Const(c) if c.is_negative() => Some(Expr::Const(-c)),
        Expr::Neg(a) => Some((**a).clone()),
        Expr::Mul(fs) => match fs.first() {
            Some(Expr::Const(c)) if c.is_negative() => {
                let pos = -c;
                let mut rest: Vec<Expr> = fs[1..].to_vec();
                if !pos.is_one() || rest.is_empty() {
                    rest.insert(0, Expr::Const(pos));
                }
                Some(if rest.len() == 1 {
                    rest.pop().unwrap()
                } else {
                    Expr::Mul(rest)
                })
            }
            _ => None,
        },
        _ => None,
    }
}
