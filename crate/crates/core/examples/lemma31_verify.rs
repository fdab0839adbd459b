//! Finite-difference check of the derived PDE on the quadratic equation
//! f(x+t) + f(x-t) = 2 f(x) + 2 t^2, with an exact solution and a perturbed
//! non-solution.

use hypocheck::expr::Expr;
use hypocheck::feq::{fixtures, Sampling};
use hypocheck::verify::{check_lemma31, FdPlan};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = fixtures::quadratic();
    let plan = FdPlan::new(Sampling::default_for(&spec).x_points());
    for src in ["x1^2", "x1^2 + 1/100*x1^3"] {
        let r = check_lemma31(&spec, &Expr::parse(src)?, &plan)?;
        println!(
            "{src:<20} {:<28} residual {:.3e}  fd {:.3e}  symbolic {:.3e}",
            r.label(),
            r.max_residual,
            r.max_fd,
            r.max_symbolic
        );
    }
    Ok(())
}
