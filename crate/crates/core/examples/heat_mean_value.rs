//! The parabolic mean-value equation
//! 1/2 f(x1+t, x2+t^2) + 1/2 f(x1-t, x2+t^2) = f(x1, x2).
//! The shifts alone are rank 1; the drift supplies the missing direction.

use hypocheck::feq::{check_all, derive_pde, fixtures, residual, Sampling};
use hypocheck::expr::{Expr, Point};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = fixtures::heat_mean_value();
    let report = check_all(&spec, &Sampling::default_for(&spec), 4);
    for (name, t) in report.theorems() {
        let why = t.reason.as_deref().unwrap_or("");
        println!("{name:<12} {:<16} {why}", t.verdict.as_str());
    }
    let pde = derive_pde(&spec)?;
    println!("operator: {} = 0", pde.operator_text());

    // a caloric polynomial solves the equation for every t
    let f = Expr::parse("x1^2 - x2")?;
    let r = residual(&spec, &f, &Point::from_f64(&[0.3, 0.8]), &Point::from_f64(&[0.7]))?;
    println!("residual of {f}: {r}");
    Ok(())
}
