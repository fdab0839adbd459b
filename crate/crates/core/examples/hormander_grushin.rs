//! Bracket-generating check for the Grushin pair X1 = d1, X2 = x1 d2.
//! The pair spans everywhere except on x1 = 0; one bracket repairs that.

use hypocheck::hormander::{check_spanning, generate_brackets, SamplingPlan, DEFAULT_EPS_RANK};
use hypocheck::vfield::VectorField;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gens = [VectorField::parse("X1", &["1", "0"])?, VectorField::parse("X2", &["0", "x1"])?];
    let plan = SamplingPlan::grid(2, 5);
    for depth in 0..=1 {
        let basis = generate_brackets(&gens, depth)?;
        let report = check_spanning(&basis, &plan, DEFAULT_EPS_RANK);
        println!("depth {depth}: {} ({} fields)", report.verdict_text(), basis.entries().len());
        for &i in &report.failing_points {
            println!("  rank {} at {}", report.points[i].rank, report.points[i].point);
        }
        if let Some(origin) = report.points.iter().find(|p| p.point.coords.iter().all(|c| c.is_zero())) {
            let labels: Vec<_> = origin.witness.iter().map(|&i| basis.entries()[i].trace()).collect();
            println!("  witness at origin: {labels:?}");
        }
    }
    Ok(())
}
