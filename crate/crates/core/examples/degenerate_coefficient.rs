//! A weight that vanishes on x1 = 0. The diffusion field degenerates there,
//! so only the bracket condition applies.

use hypocheck::feq::{check_all, fixtures, Sampling};

fn main() {
    let spec = fixtures::degenerate();
    let report = check_all(&spec, &Sampling::default_for(&spec), 4);
    println!("degenerate points: {:?}", report.assumptions.degenerate_points().iter().map(|p| p.to_string()).collect::<Vec<_>>());
    for (name, t) in report.theorems() {
        println!("{name:<12} {}", t.verdict.as_str());
        for w in &t.warnings {
            println!("  warning: {w}");
        }
    }
}
