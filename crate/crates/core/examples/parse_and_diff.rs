//! Parse an expression, differentiate it and compare against a central
//! difference.
//!
//!     cargo run --example parse_and_diff -- "sin(x1)*exp(x2)"

use hypocheck::expr::{Env, Expr, Point, Var};
use hypocheck::verify::fd_gradient_check;

fn main() {
    let src = std::env::args().nth(1).unwrap_or_else(|| "x1^3*x2 + sqrt(1 + x1^2)".into());
    let e = match Expr::parse(&src) {
        Ok(e) => e,
        Err(err) => {
            eprintln!("{err}");
            std::process::exit(2);
        }
    };
    let p = Point::from_f64(&[0.4, -0.3]);
    println!("f          = {e}");
    for v in [Var::x(1), Var::x(2)] {
        let d = e.diff(v);
        let value = d.eval(&Env::from_x(&p)).expect("derivative evaluates");
        let err = fd_gradient_check(&e, v, std::slice::from_ref(&p), 1e-4).expect("finite difference");
        println!("df/d{v:<6} = {d}");
        println!("  at {p}: {value}  (|FD - exact| = {err:.2e})");
    }
}
