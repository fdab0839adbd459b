use hypocheck::expr::{Env, Expr, Point, Var};
use hypocheck::feq::{self, fixtures, Sampling, Verdict};
use hypocheck::verify::fd_gradient_check;
use hypocheck::vfield::{lie_bracket, VectorField};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

const TOL: f64 = 1e-10;
const MONOMIALS: [&str; 6] = ["1", "x1", "x2", "x1^2", "x1*x2", "x2^2"];

fn poly(coeffs: &[i64]) -> Expr {
    Expr::add(
        coeffs
            .iter()
            .zip(MONOMIALS)
            .map(|(c, m)| Expr::mul(vec![Expr::int(*c), Expr::parse(m).unwrap()]))
            .collect(),
    )
    .simplify()
}

fn coeffs() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, MONOMIALS.len())
}

fn field() -> impl Strategy<Value = VectorField> {
    (coeffs(), coeffs()).prop_map(|(a, b)| VectorField::new("X", vec![poly(&a), poly(&b)]).unwrap())
}

fn rational_point() -> impl Strategy<Value = Point> {
    prop::collection::vec((-8i64..=8, 1i64..=8), 2)
        .prop_map(|v| Point::exact(v.into_iter().map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d))).collect()))
}

fn float_point() -> impl Strategy<Value = Point> {
    prop::collection::vec(-1.0f64..1.0, 2).prop_map(|v| Point::from_f64(&v))
}

fn sum(parts: &[(VectorField, Expr)]) -> VectorField {
    let coeffs = (0..2)
        .map(|l| Expr::add(parts.iter().map(|(f, c)| Expr::mul(vec![c.clone(), f.coeffs()[l].clone()])).collect()))
        .collect();
    VectorField::new("sum", coeffs).unwrap()
}

fn assert_vanishes(f: &VectorField, p: &Point) -> Result<(), TestCaseError> {
    for v in f.eval(&Env::from_x(p)).unwrap() {
        prop_assert!(v.to_f64().abs() <= TOL, "component {} at {:?}", v, p);
    }
    Ok(())
}

fn expr_tree() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-4i64..=4).prop_map(Expr::int),
        (1i64..=5, 1i64..=5).prop_map(|(n, d)| Expr::rational(n, d)),
        Just(Expr::x(1)),
        Just(Expr::x(2)),
    ];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::add),
            prop::collection::vec(inner.clone(), 2..3).prop_map(Expr::mul),
            (inner.clone(), 0i64..=3).prop_map(|(b, k)| Expr::pow(b, k)),
            inner.clone().prop_map(Expr::neg),
            inner.clone().prop_map(Expr::sin),
            inner.clone().prop_map(Expr::cos),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::sub(a, b)),
        ]
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bracket_is_antisymmetric(x in field(), y in field(), p in rational_point()) {
        let s = sum(&[(lie_bracket(&x, &y).unwrap(), Expr::one()), (lie_bracket(&y, &x).unwrap(), Expr::one())]);
        assert_vanishes(&s, &p)?;
    }

    #[test]
    fn bracket_satisfies_jacobi(x in field(), y in field(), z in field(), p in rational_point()) {
        let b = |a: &VectorField, c: &VectorField| lie_bracket(a, c).unwrap();
        let s = sum(&[
            (b(&x, &b(&y, &z)), Expr::one()),
            (b(&y, &b(&z, &x)), Expr::one()),
            (b(&z, &b(&x, &y)), Expr::one()),
        ]);
        assert_vanishes(&s, &p)?;
    }

    #[test]
    fn bracket_satisfies_leibniz(x in field(), y in field(), c in coeffs(), p in rational_point()) {
        let f = poly(&c);
        let xf = x.apply(&f).unwrap();
        let s = sum(&[
            (lie_bracket(&x, &y.scaled(&f)).unwrap(), Expr::one()),
            (y.clone(), Expr::neg(xf)),
            (lie_bracket(&x, &y).unwrap(), Expr::neg(f)),
        ]);
        assert_vanishes(&s, &p)?;
    }

    #[test]
    fn diff_matches_central_difference(a in 1i64..=3, c in coeffs()) {
        let e = Expr::add(vec![
            Expr::mul(vec![Expr::sin(Expr::mul(vec![Expr::int(a), Expr::x(1)])), Expr::exp(Expr::x(2))]),
            Expr::mul(vec![poly(&c), Expr::pow(Expr::x(1), 3)]),
        ]);
        let points = [Point::from_f64(&[0.3, -0.2]), Point::from_f64(&[0.7, 0.4]), Point::from_f64(&[-0.5, 0.1])];
        let coarse = fd_gradient_check(&e, Var::x(1), &points, 1e-2).unwrap();
        let fine = fd_gradient_check(&e, Var::x(1), &points, 5e-3).unwrap();
        prop_assume!(coarse > 1e-9);
        let ratio = coarse / fine;
        prop_assert!((3.5..=4.5).contains(&ratio), "ratio {}", ratio);
    }

    #[test]
    fn simplify_preserves_value(e in expr_tree(), p in float_point()) {
        let env = Env::from_x(&p);
        let s = e.simplify();
        match (e.eval(&env), s.eval(&env)) {
            (Ok(a), Ok(b)) => prop_assert!(close(a.to_f64(), b.to_f64()), "{} -> {}: {} vs {}", e, s, a, b),
            (Err(_), _) => {}
            (Ok(a), Err(err)) => prop_assert!(false, "{} -> {} lost value {}: {}", e, s, a, err),
        }
    }

    #[test]
    fn simplify_is_idempotent(e in expr_tree()) {
        let once = e.simplify();
        prop_assert_eq!(once.simplify(), once);
    }

    #[test]
    fn derivation_scales_with_weights(num in 1i64..=9, den in 1i64..=4, idx in 0usize..10, p in float_point()) {
        let (name, spec) = fixtures::all().swap_remove(idx);
        let c = BigRational::new(BigInt::from(num), BigInt::from(den));
        let (Ok(base), Ok(scaled)) = (feq::derive_pde(&spec), feq::derive_pde(&spec.scaled(&c))) else {
            return Ok(());
        };
        let p = Point::from_f64(&p.to_f64()[..spec.n()]);
        let env = Env::from_x(&p);
        let k = num as f64 / den as f64;
        let at = |e: &Expr| e.eval(&env).unwrap().to_f64();
        let mut pairs = vec![(&base.c, &scaled.c), (&base.g, &scaled.g)];
        pairs.extend(base.b.iter().zip(&scaled.b));
        pairs.extend(base.a.iter().flatten().zip(scaled.a.iter().flatten()));
        for (e0, e1) in pairs {
            prop_assert!(close(k * at(e0), at(e1)), "{}: {} vs {}", name, e0, e1);
        }
    }

    #[test]
    fn principal_part_is_psd(idx in 0usize..10, p in float_point()) {
        let (name, spec) = fixtures::all().swap_remove(idx);
        let Ok(pde) = feq::derive_pde(&spec) else { return Ok(()); };
        let p = Point::from_f64(&p.to_f64()[..spec.n()]);
        let m = pde.min_principal_eigenvalue(&p).unwrap();
        prop_assert!(m >= -TOL, "{}: eigenvalue {}", name, m);
    }

    #[test]
    fn fields_match_expansion(idx in 0usize..10, c in coeffs(), p in rational_point()) {
        let (name, spec) = fixtures::all().swap_remove(idx);
        let Ok(pde) = feq::derive_pde(&spec) else { return Ok(()); };
        let f = if spec.n() == 1 { poly(&c).substitute(Var::x(2), &Expr::int(1)) } else { poly(&c) };
        let p = Point::new(p.coords[..spec.n()].to_vec());
        let env = Env::from_x(&p);
        let lhs = pde.apply_fields(&f).eval(&env).unwrap();
        let rhs = pde.apply_expansion(&f).eval(&env).unwrap();
        prop_assert!(close(lhs.to_f64(), rhs.to_f64()), "{}: {} vs {} for f = {}", name, lhs, rhs, f);
    }
}

#[test]
fn checkers_are_monotone_on_fixtures() {
    for grid in 2..=4 {
        for (name, spec) in fixtures::all() {
            let r = feq::check_all(&spec, &Sampling::default_for(&spec).with_grid(grid), 4);
            let pass = |v: Verdict| v == Verdict::Pass;
            assert!(!pass(r.swiatak.verdict) || pass(r.corollary22.verdict), "{name}, grid {grid}");
            assert!(!pass(r.corollary22.verdict) || pass(r.theorem21.verdict), "{name}, grid {grid}");
        }
    }
}

#[test]
fn constant_coefficient_checks_agree() {
    for (name, spec) in fixtures::all() {
        if !spec.has_constant_coefficients() {
            continue;
        }
        let r = feq::check_all(&spec, &Sampling::default_for(&spec), 4);
        assert_eq!(r.corollary22.verdict, r.theorem23.verdict, "{name}");
    }
}
