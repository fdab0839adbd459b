//! Built-in equations used by the examples, the self-test and the test
//! suites. Each one has a TOML twin under `fixtures/`.

use super::FunctionalEquationSpec;

fn build(n: usize, r: usize, terms: &[(&str, &[&str])], b: &str, t0: &[&str], f: &str, lambdas: &[&[&str]]) -> FunctionalEquationSpec {
    FunctionalEquationSpec::from_strs(n, r, terms, b, t0)
        .and_then(|s| s.with_rhs_strs(f, lambdas))
        .expect("built-in fixture is well-formed")
}

/// `f(x+t) + f(x-t) = 2 f(x)`.
pub fn jensen() -> FunctionalEquationSpec {
    build(1, 1, &[("1", &["t1"]), ("1", &["-t1"])], "0", &["0"], "2*z1", &[&["x1"]])
}

/// `f(x+t) + f(x-t) = 2 f(x) + 2 t^2`.
pub fn quadratic() -> FunctionalEquationSpec {
    build(1, 1, &[("1", &["t1"]), ("1", &["-t1"])], "2*t1^2", &["0"], "2*z1", &[&["x1"]])
}

/// `1/2 f(x1+t, x2+t^2) + 1/2 f(x1-t, x2+t^2) = f(x1, x2)`.
pub fn heat_mean_value() -> FunctionalEquationSpec {
    build(
        2,
        1,
        &[("1/2", &["t1", "t1^2"]), ("1/2", &["-t1", "t1^2"])],
        "0",
        &["0"],
        "z1",
        &[&["x1", "x2"]],
    )
}

/// A single shift direction in the plane; nothing can span.
pub fn single_direction() -> FunctionalEquationSpec {
    build(2, 1, &[("1", &["t1", "0"])], "0", &["0"], "z1", &[&["x1", "x2"]])
}

pub fn two_axis() -> FunctionalEquationSpec {
    build(
        2,
        1,
        &[("1", &["t1", "0"]), ("1", &["0", "t1"])],
        "0",
        &["0"],
        "2*z1",
        &[&["x1", "x2"]],
    )
}

/// `f(x + t^2) = f(x)`: the first derivative of the shift vanishes at the anchor.
pub fn parabolic_shift() -> FunctionalEquationSpec {
    build(1, 1, &[("1", &["t1^2"])], "0", &["0"], "z1", &[&["x1"]])
}

/// `exp(x2 t) f(x1 + t, x2) = f(x)`: the drift stays on the x1-axis.
pub fn exp_weight() -> FunctionalEquationSpec {
    build(2, 1, &[("exp(x2*t1)", &["t1", "0"])], "0", &["0"], "z1", &[&["x1", "x2"]])
}

/// A weight vanishing at `x1 = 0`; only the bracket condition can apply.
pub fn degenerate() -> FunctionalEquationSpec {
    build(
        1,
        1,
        &[("x1^2", &["t1"]), ("1", &["t1^2"])],
        "0",
        &["0"],
        "(1 + x1^2)*z1",
        &[&["x1"]],
    )
}

/// Drift `(0, 2 x1^2 - 2)` vanishes on `x1 = +-1`, where a first bracket is
/// needed.
pub fn bracket_drift() -> FunctionalEquationSpec {
    build(
        2,
        1,
        &[
            ("1/2", &["t1", "0"]),
            ("1/2", &["-t1", "0"]),
            ("1 + x1^2", &["0", "t1^2"]),
            ("2", &["0", "-t1^2"]),
        ],
        "0",
        &["0"],
        "(4 + x1^2)*z1",
        &[&["x1", "x2"]],
    )
}

/// Two-dimensional parameter; derivatives run along the first axis.
pub fn multiparam() -> FunctionalEquationSpec {
    build(
        2,
        2,
        &[("1/2", &["t1", "t1^2 + t2"]), ("1/2", &["-t1", "t1^2 - t2"])],
        "0",
        &["0", "0"],
        "z1",
        &[&["x1", "x2"]],
    )
}

/// The full corpus, by fixture file stem.
pub fn all() -> Vec<(&'static str, FunctionalEquationSpec)> {
    vec![
        ("jensen", jensen()),
        ("quadratic", quadratic()),
        ("heatmv", heat_mean_value()),
        ("single-direction", single_direction()),
        ("two-axis", two_axis()),
        ("parabolic-shift", parabolic_shift()),
        ("exp-weight", exp_weight()),
        ("degenerate", degenerate()),
        ("bracket-drift", bracket_drift()),
        ("multiparam", multiparam()),
    ]
}
