//! First-order homogeneous differential operators `sum_l c_l(x) d/dx_l` with
//! symbolic coefficients, their Lie brackets, and the operators `L_1..L_k`,
//! `L_0` attached to a functional equation.

use std::fmt;

use crate::expr::{Env, EvalError, Expr, Simplifier, Value, Var, VarKind};
use crate::feq::FunctionalEquationSpec;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FieldError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("coefficient {0} of field contains a z-variable")]
    ZVariable(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    coeffs: Vec<Expr>,
    label: String,
}

impl VectorField {
    pub fn new(label: impl Into<String>, coeffs: Vec<Expr>) -> Result<Self, FieldError> {
        if let Some(i) = coeffs.iter().position(|c| c.contains_kind(VarKind::Z)) {
            return Err(FieldError::ZVariable(i + 1));
        }
        Ok(VectorField {
            coeffs,
            label: label.into(),
        })
    }

    /// Parse each coefficient with an unrestricted namespace.
    pub fn parse(label: impl Into<String>, coeffs: &[&str]) -> Result<Self, Box<dyn std::error::Error>> {
        let coeffs = coeffs.iter().map(|s| Expr::parse(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(VectorField::new(label, coeffs)?)
    }

    pub fn zero(label: impl Into<String>, n: usize) -> Self {
        VectorField {
            coeffs: vec![Expr::zero(); n],
            label: label.into(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Structural zero test on simplified coefficients.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Expr::is_zero)
    }

    pub fn simplified(&self, simp: &Simplifier) -> VectorField {
        VectorField {
            coeffs: self.coeffs.iter().map(|c| simp.run(c)).collect(),
            label: self.label.clone(),
        }
    }

    /// Multiply every coefficient by `c`.
    pub fn scaled(&self, c: &Expr) -> VectorField {
        VectorField {
            coeffs: self
                .coeffs
                .iter()
                .map(|e| Expr::mul(vec![c.clone(), e.clone()]).simplify())
                .collect(),
            label: self.label.clone(),
        }
    }

    pub fn eval(&self, env: &Env) -> Result<Vec<Value>, EvalError> {
        self.coeffs.iter().map(|c| c.eval(env)).collect()
    }

    /// Directional derivative of `e` along this field.
    pub fn apply(&self, e: &Expr) -> Result<Expr, FieldError> {
        self.apply_with(e, &Simplifier::default())
    }

    pub fn apply_with(&self, e: &Expr, simp: &Simplifier) -> Result<Expr, FieldError> {
        let n = self.dim();
        if let Some(v) = e.free_vars().into_iter().find(|v| v.kind == VarKind::X && v.index as usize > n) {
            return Err(FieldError::DimensionMismatch {
                left: n,
                right: v.index as usize,
            });
        }
        let terms = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(l, c)| Expr::mul(vec![c.clone(), e.diff(Var::x(l as u32 + 1))]))
            .collect();
        Ok(simp.run(&Expr::add(terms)))
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = (", self.label)?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// `[X, Y]_l = X(Y_l) - Y(X_l)`, labelled `[labelX,labelY]`.
pub fn lie_bracket(x: &VectorField, y: &VectorField) -> Result<VectorField, FieldError> {
    lie_bracket_with(x, y, &Simplifier::default())
}

pub fn lie_bracket_with(x: &VectorField, y: &VectorField, simp: &Simplifier) -> Result<VectorField, FieldError> {
    if x.dim() != y.dim() {
        return Err(FieldError::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    let coeffs = (0..x.dim())
        .map(|l| {
            let xy = x.apply_with(&y.coeffs[l], simp)?;
            let yx = y.apply_with(&x.coeffs[l], simp)?;
            Ok(simp.run(&Expr::sub(xy, yx)))
        })
        .collect::<Result<Vec<_>, FieldError>>()?;
    Ok(VectorField {
        coeffs,
        label: format!("[{},{}]", x.label, y.label),
    })
}

/// `L_j = sqrt(a_j(x,t0)) phi_j'(t0) . grad_x` for a 0-based term index.
pub fn build_l(spec: &FunctionalEquationSpec, j: usize) -> VectorField {
    let simp = spec.simplifier();
    let root = Expr::sqrt(spec.a_at_anchor(j));
    let coeffs = spec
        .phi_prime_at_anchor(j)
        .into_iter()
        .map(|c| simp.run(&Expr::mul(vec![root.clone(), c])))
        .collect();
    VectorField {
        coeffs,
        label: format!("L{}", j + 1),
    }
}

/// The three summand groups contributed by one term to the drift vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiTermGroups {
    pub term: usize,
    /// `2 d_t a_j * phi_j'`
    pub rate: Vec<Expr>,
    /// `-sqrt(a_j) (phi_j' . grad_x sqrt(a_j)) * phi_j'`
    pub correction: Vec<Expr>,
    /// `a_j * phi_j''`
    pub curvature: Vec<Expr>,
}

/// Drift vector with its per-term decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiField {
    pub field: VectorField,
    pub groups: Vec<PsiTermGroups>,
    pub frozen: bool,
}

pub fn build_psi(spec: &FunctionalEquationSpec, t_frozen: bool) -> PsiField {
    let simp = spec.simplifier();
    let n = spec.n();
    let finish = |e: Expr| if t_frozen { spec.freeze(&e) } else { simp.run(&e) };
    let mut groups = Vec::with_capacity(spec.k());
    for (j, term) in spec.terms().iter().enumerate() {
        let d1 = spec.phi_prime(j);
        let d2 = spec.phi_second(j);
        let root = Expr::sqrt(term.a.clone());
        let along: Vec<Expr> = (0..n)
            .map(|l| Expr::mul(vec![d1[l].clone(), root.diff_raw(Var::x(l as u32 + 1))]))
            .collect();
        let correction_scalar = Expr::neg(Expr::mul(vec![root.clone(), Expr::add(along)]));
        let rate_scalar = Expr::mul(vec![Expr::int(2), spec.dt(&term.a)]);
        let rate = d1.iter().map(|c| finish(Expr::mul(vec![rate_scalar.clone(), c.clone()]))).collect();
        let correction = d1
            .iter()
            .map(|c| finish(Expr::mul(vec![correction_scalar.clone(), c.clone()])))
            .collect();
        let curvature = d2.iter().map(|c| finish(Expr::mul(vec![term.a.clone(), c.clone()]))).collect();
        groups.push(PsiTermGroups {
            term: j + 1,
            rate,
            correction,
            curvature,
        });
    }
    let coeffs = (0..n)
        .map(|l| {
            let parts = groups
                .iter()
                .flat_map(|g| [g.rate[l].clone(), g.correction[l].clone(), g.curvature[l].clone()])
                .collect();
            simp.run(&Expr::add(parts))
        })
        .collect();
    PsiField {
        field: VectorField {
            coeffs,
            label: "Psi".into(),
        },
        groups,
        frozen: t_frozen,
    }
}

/// `L_0 = Psi(x,t0) . grad_x`.
pub fn build_l0(spec: &FunctionalEquationSpec) -> VectorField {
    build_psi(spec, true).field.relabel("L0")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Point;
    use crate::feq::fixtures;

    fn field(coeffs: &[&str]) -> VectorField {
        VectorField::parse("X", coeffs).unwrap()
    }

    fn p(s: &str) -> Expr {
        Expr::parse(s).unwrap()
    }

    #[test]
    fn apply_examples() {
        assert_eq!(field(&["1", "0"]).apply(&p("x1*x2")).unwrap(), p("x2"));
        assert!(field(&["x2", "-x1"]).apply(&p("x1^2 + x2^2")).unwrap().is_zero());
        assert_eq!(field(&["2"]).apply(&p("x1^2")).unwrap(), p("4*x1").simplify());
        assert!(matches!(
            field(&["1"]).apply(&p("x2")),
            Err(FieldError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bracket_examples() {
        let x = field(&["1", "0"]).relabel("X1");
        let y = field(&["0", "x1"]).relabel("X2");
        let b = lie_bracket(&x, &y).unwrap();
        assert_eq!(b.coeffs(), &[Expr::zero(), Expr::one()]);
        assert_eq!(b.label(), "[X1,X2]");
        assert!(lie_bracket(&x, &x).unwrap().is_zero());
        assert!(lie_bracket(&x, &field(&["0", "1"])).unwrap().is_zero());
        assert!(lie_bracket(&x, &field(&["1"])).is_err());
        assert!(VectorField::parse("bad", &["z1"]).is_err());
    }

    #[test]
    fn l_fields_of_fixtures() {
        let jensen = fixtures::jensen();
        assert_eq!(build_l(&jensen, 0).coeffs(), &[Expr::one()]);
        assert_eq!(build_l(&jensen, 1).coeffs(), &[Expr::int(-1)]);

        let heat = fixtures::heat_mean_value();
        let l1 = build_l(&heat, 0);
        let v = l1.eval(&Env::from_x(&Point::from_f64(&[0.3, -0.2]))).unwrap();
        assert!((v[0].to_f64() - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(v[1].is_zero());

        let degenerate = FunctionalEquationSpec::from_strs(1, 1, &[("x1^2", &["t1"])], "0", &["0"]).unwrap();
        assert_eq!(build_l(&degenerate, 0).coeffs(), &[p("sqrt(x1^2)")]);
    }

    #[test]
    fn psi_examples() {
        assert!(build_l0(&fixtures::jensen()).is_zero());
        assert_eq!(build_l0(&fixtures::heat_mean_value()).coeffs(), &[Expr::zero(), Expr::int(2)]);
        let single = FunctionalEquationSpec::from_strs(1, 1, &[("1", &["t1^2"])], "0", &["0"]).unwrap();
        assert_eq!(build_l0(&single).coeffs(), &[Expr::int(2)]);

        // a = exp(x2 t), phi = (t, 0): Psi(x, 0) = (2 x2, 0)
        let ew = FunctionalEquationSpec::from_strs(2, 1, &[("exp(x2*t1)", &["t1", "0"])], "0", &["0"]).unwrap();
        assert_eq!(build_l0(&ew).coeffs(), &[p("2*x2").simplify(), Expr::zero()]);
    }

    #[test]
    fn psi_groups_sum_to_coefficients() {
        let spec = FunctionalEquationSpec::from_strs(
            2,
            1,
            &[("exp(x1*t1) + x2^2", &["t1", "t1^2"]), ("1 + x1^2*t1^2", &["-t1", "t1^3"])],
            "0",
            &["0"],
        )
        .unwrap();
        for frozen in [false, true] {
            let psi = build_psi(&spec, frozen);
            let env = Env::new()
                .with(Var::x(1), Value::rational(1, 3))
                .with(Var::x(2), Value::rational(-2, 7))
                .with(Var::t(1), Value::rational(1, 5));
            for l in 0..2 {
                let mut sum = 0.0;
                for g in &psi.groups {
                    for part in [&g.rate[l], &g.correction[l], &g.curvature[l]] {
                        sum += part.eval(&env).unwrap().to_f64();
                    }
                }
                let direct = psi.field.coeffs()[l].eval(&env).unwrap().to_f64();
                assert!((sum - direct).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_coefficients_give_weighted_curvature() {
        let heat = fixtures::heat_mean_value();
        let psi = build_psi(&heat, true);
        let mut expect = vec![Expr::zero(), Expr::zero()];
        for (j, t) in heat.terms().iter().enumerate() {
            for (l, c) in heat.phi_second_at_anchor(j).into_iter().enumerate() {
                expect[l] = Expr::add(vec![expect[l].clone(), Expr::mul(vec![t.a.clone(), c])]).simplify();
            }
        }
        assert_eq!(psi.field.coeffs(), expect.as_slice());
    }
}
