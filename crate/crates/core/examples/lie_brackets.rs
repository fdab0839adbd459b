//! Lie brackets of polynomial vector fields, and the identities they obey.

use hypocheck::expr::{Env, Point};
use hypocheck::vfield::{lie_bracket, VectorField};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = VectorField::parse("X", &["x2", "-x1"])?;
    let y = VectorField::parse("Y", &["x1^2", "x1*x2"])?;
    let xy = lie_bracket(&x, &y)?;
    let yx = lie_bracket(&y, &x)?;
    println!("{x}\n{y}\n{xy}\n{yx}");

    let p = Point::from_f64(&[0.5, 2.0]);
    let env = Env::from_x(&p);
    let a = xy.eval(&env)?;
    let b = yx.eval(&env)?;
    // antisymmetry
    for (u, v) in a.iter().zip(&b) {
        assert!(u.add(v).is_zero());
    }
    println!("[X,Y] + [Y,X] = 0 at {p}");
    Ok(())
}
