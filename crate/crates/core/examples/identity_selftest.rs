//! Check (sqrt(a) D)^2 f = a D^2 f + sqrt(a) (D sqrt(a)) D f with D = d1 for a
//! few weights and test polynomials.

use hypocheck::expr::{Expr, Point};
use hypocheck::feq::verify_identity_34;
use num_rational::BigRational;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let polys: Vec<Expr> = ["x1^2*x2", "x1^3 - 2*x2", "x1^4 - 3*x1*x2 + 1"]
        .iter()
        .map(|s| Expr::parse(s))
        .collect::<Result<_, _>>()?;
    let points: Vec<Point> = [[0.25, -0.5], [-0.75, 0.125], [0.5, 0.5]].iter().map(|p| Point::from_f64(p)).collect();
    let d = [BigRational::from_integer(1.into()), BigRational::from_integer(0.into())];
    for a in ["1", "exp(x1*x2)", "1 + x1^2"] {
        let r = verify_identity_34(&Expr::parse(a)?, &d, &polys, &points)?;
        println!("a = {a:<12} max discrepancy {:.2e} over {} evaluations", r.max_discrepancy, r.evaluations);
    }
    Ok(())
}
