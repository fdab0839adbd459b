use super::{Expr, Var};

/// Differentiation rules, applied without simplification.
pub(super) fn diff(e: &Expr, v: Var) -> Expr {
    match e {
        Expr::Const(_) => Expr::zero(),
        Expr::Var(w) => {
            if *w == v {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Expr::Add(terms) => Expr::Add(terms.iter().map(|t| diff(t, v)).collect()),
        Expr::Mul(factors) => {
            let mut terms = Vec::with_capacity(factors.len());
            for i in 0..factors.len() {
                let mut prod = Vec::with_capacity(factors.len());
                for (j, f) in factors.iter().enumerate() {
                    prod.push(if i == j { diff(f, v) } else { f.clone() });
                }
                terms.push(Expr::Mul(prod));
            }
            Expr::Add(terms)
        }
        Expr::Pow(b, n) => Expr::mul(vec![
            Expr::int(*n),
            Expr::pow((**b).clone(), n - 1),
            diff(b, v),
        ]),
        Expr::Sqrt(a) => Expr::div(diff(a, v), Expr::mul(vec![Expr::int(2), e.clone()])),
        Expr::Exp(a) => Expr::mul(vec![diff(a, v), e.clone()]),
        Expr::Log(a) => Expr::div(diff(a, v), (**a).clone()),
        Expr::Sin(a) => Expr::mul(vec![diff(a, v), Expr::cos((**a).clone())]),
        Expr::Cos(a) => Expr::neg(Expr::mul(vec![diff(a, v), Expr::sin((**a).clone())])),
        Expr::Neg(a) => Expr::neg(diff(a, v)),
        Expr::Div(a, b) => Expr::div(
            Expr::sub(
                Expr::mul(vec![diff(a, v), (**b).clone()]),
                Expr::mul(vec![(**a).clone(), diff(b, v)]),
            ),
            Expr::pow((**b).clone(), 2),
        ),
    }
}
