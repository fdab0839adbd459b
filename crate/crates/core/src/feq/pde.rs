use std::fmt::Write as _;

use num_rational::BigRational;

use super::FunctionalEquationSpec;
use crate::expr::{Env, EvalError, Expr, Point, Simplifier, Value, Var, VarKind};
use crate::vfield::{build_l, build_l0, VectorField};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DeriveError {
    #[error("shift-at-anchor nonzero: Lemma 3.1 inapplicable (term {term})")]
    ShiftAtAnchor { term: usize },
}

/// Second-order operator obtained by differentiating the equation twice in
/// the parameter at the anchor, in both field form
/// `sum_j L_j^2 + L_0 + c` and coordinate form
/// `sum_pq A_pq d_p d_q + sum_p B_p d_p + c`, with right-hand side `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedPde {
    pub l_fields: Vec<VectorField>,
    pub l0: VectorField,
    pub c: Expr,
    pub g: Expr,
    pub a: Vec<Vec<Expr>>,
    pub b: Vec<Expr>,
    simp: Simplifier,
}

pub fn derive_pde(spec: &FunctionalEquationSpec) -> Result<DerivedPde, DeriveError> {
    let anchor = Env::new().with_point(VarKind::T, &Point::exact(spec.t0().to_vec()));
    for (j, term) in spec.terms().iter().enumerate() {
        let vanishes = term
            .phi
            .iter()
            .all(|c| matches!(c.eval(&anchor), Ok(Value::Exact(v)) if num_traits::Zero::is_zero(&v)));
        if !vanishes {
            return Err(DeriveError::ShiftAtAnchor { term: j + 1 });
        }
    }
    let simp = spec.simplifier();
    let n = spec.n();
    let l_fields: Vec<VectorField> = (0..spec.k()).map(|j| build_l(spec, j)).collect();
    let l0 = build_l0(spec);
    let c = simp.run(&Expr::add(
        spec.terms().iter().map(|t| spec.freeze(&spec.dt(&spec.dt(&t.a)))).collect(),
    ));
    let g = spec.freeze(&spec.dt(&spec.dt(spec.b())));

    let a = (0..n)
        .map(|p| {
            (0..n)
                .map(|q| {
                    let parts = l_fields
                        .iter()
                        .map(|l| Expr::mul(vec![l.coeffs()[p].clone(), l.coeffs()[q].clone()]))
                        .collect();
                    simp.run(&Expr::add(parts))
                })
                .collect()
        })
        .collect();
    let b = (0..n)
        .map(|q| {
            let mut parts: Vec<Expr> = l_fields
                .iter()
                .map(|l| l.apply_with(&l.coeffs()[q], &simp).expect("fields share the spatial dimension"))
                .collect();
            parts.push(l0.coeffs()[q].clone());
            simp.run(&Expr::add(parts))
        })
        .collect();
    Ok(DerivedPde {
        l_fields,
        l0,
        c,
        g,
        a,
        b,
        simp,
    })
}

impl DerivedPde {
    pub fn n(&self) -> usize {
        self.b.len()
    }

    /// `(sum_j L_j^2 + L_0 + c) f`.
    pub fn apply_fields(&self, f: &Expr) -> Expr {
        let mut parts: Vec<Expr> = self
            .l_fields
            .iter()
            .map(|l| {
                let once = l.apply_with(f, &self.simp).expect("dimension checked");
                l.apply_with(&once, &self.simp).expect("dimension checked")
            })
            .collect();
        parts.push(self.l0.apply_with(f, &self.simp).expect("dimension checked"));
        parts.push(Expr::mul(vec![self.c.clone(), f.clone()]));
        self.simp.run(&Expr::add(parts))
    }

    /// `(sum A_pq d_p d_q + sum B_p d_p + c) f`.
    pub fn apply_expansion(&self, f: &Expr) -> Expr {
        let n = self.n();
        let mut parts = Vec::new();
        for p in 0..n {
            let dp = f.diff(Var::x(p as u32 + 1));
            for q in 0..n {
                parts.push(Expr::mul(vec![self.a[p][q].clone(), dp.diff(Var::x(q as u32 + 1))]));
            }
            parts.push(Expr::mul(vec![self.b[p].clone(), dp]));
        }
        parts.push(Expr::mul(vec![self.c.clone(), f.clone()]));
        self.simp.run(&Expr::add(parts))
    }

    /// Coordinate form as text, e.g. `d1^2 + 2*d2`; symmetric off-diagonal
    /// pairs are combined.
    pub fn operator_text(&self) -> String {
        let n = self.n();
        let mut terms: Vec<(Expr, String)> = Vec::new();
        for p in 0..n {
            for q in p..n {
                let coeff = if p == q {
                    self.a[p][p].clone()
                } else {
                    self.simp.run(&Expr::add(vec![self.a[p][q].clone(), self.a[q][p].clone()]))
                };
                let op = if p == q {
                    format!("d{}^2", p + 1)
                } else {
                    format!("d{}*d{}", p + 1, q + 1)
                };
                terms.push((coeff, op));
            }
        }
        for p in 0..n {
            terms.push((self.b[p].clone(), format!("d{}", p + 1)));
        }
        terms.push((self.c.clone(), String::new()));
        let mut out = String::new();
        for (coeff, op) in terms.into_iter().filter(|(c, _)| !c.is_zero()) {
            if !out.is_empty() {
                out.push_str(" + ");
            }
            match (coeff.is_one(), op.is_empty()) {
                (true, false) => out.push_str(&op),
                (_, true) => {
                    let _ = write!(out, "({coeff})");
                }
                _ => {
                    let _ = write!(out, "({coeff})*{op}");
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    /// `A(x)` as floating-point numbers.
    pub fn principal_part_at(&self, x: &Point) -> Result<Vec<Vec<f64>>, EvalError> {
        let env = Env::from_x(x);
        self.a
            .iter()
            .map(|row| row.iter().map(|e| e.eval(&env).map(|v| v.to_f64())).collect())
            .collect()
    }

    /// Smallest eigenvalue of the symmetric part of `A(x)`.
    pub fn min_principal_eigenvalue(&self, x: &Point) -> Result<f64, EvalError> {
        let rows = self.principal_part_at(x)?;
        let n = rows.len();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| 0.5 * (rows[i][j] + rows[j][i]));
        Ok(m.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IdentityError {
    #[error("weight is negative at {0}")]
    NegativeWeight(Point),
    #[error("evaluation failed at {point}: {source}")]
    Eval {
        point: Point,
        #[source]
        source: EvalError,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    /// Largest discrepancy per test function.
    pub per_function: Vec<f64>,
    pub max_discrepancy: f64,
    pub evaluations: usize,
    /// Every comparison was carried out in exact arithmetic.
    pub exact: bool,
}

fn along(e: &Expr, dir: &[BigRational]) -> Expr {
    Expr::add(
        dir.iter()
            .enumerate()
            .map(|(l, d)| Expr::mul(vec![Expr::Const(d.clone()), e.diff_raw(Var::x(l as u32 + 1))]))
            .collect(),
    )
}

/// Compare `(sqrt(a) D)^2 f` with `a D^2 f + sqrt(a) (D sqrt(a)) D f`, where
/// `D = phi' . grad_x`, on every test function and point. Both sides are
/// built from unsimplified derivatives so the comparison is independent of
/// the simplifier.
pub fn verify_identity_34(
    a: &Expr,
    phi_prime: &[BigRational],
    testfns: &[Expr],
    points: &[Point],
) -> Result<IdentityReport, IdentityError> {
    let root = Expr::sqrt(a.clone());
    let d_root = along(&root, phi_prime);
    let mut per_function = Vec::with_capacity(testfns.len());
    let mut exact = true;
    let mut evaluations = 0;
    for f in testfns {
        let df = along(f, phi_prime);
        let lhs = Expr::mul(vec![root.clone(), along(&Expr::mul(vec![root.clone(), df.clone()]), phi_prime)]);
        let rhs = Expr::add(vec![
            Expr::mul(vec![a.clone(), along(&df, phi_prime)]),
            Expr::mul(vec![root.clone(), d_root.clone(), df.clone()]),
        ]);
        let mut worst = 0.0f64;
        for p in points {
            let env = Env::from_x(p);
            let err = |source| IdentityError::Eval {
                point: p.clone(),
                source,
            };
            if a.eval(&env).map_err(err)?.is_negative() {
                return Err(IdentityError::NegativeWeight(p.clone()));
            }
            let diff = lhs.eval(&env).map_err(err)?.sub(&rhs.eval(&env).map_err(err)?);
            exact &= diff.is_exact();
            worst = worst.max(diff.abs().to_f64());
            evaluations += 1;
        }
        per_function.push(worst);
    }
    Ok(IdentityReport {
        max_discrepancy: per_function.iter().cloned().fold(0.0, f64::max),
        per_function,
        evaluations,
        exact,
    })
}
