//! Every theorem check on Jensen's equation f(x+t) + f(x-t) = 2 f(x).

use hypocheck::feq::{check_all, fixtures, Sampling};
use hypocheck::hormander::DEFAULT_MAX_DEPTH;

fn main() {
    let spec = fixtures::jensen();
    let report = check_all(&spec, &Sampling::default_for(&spec), DEFAULT_MAX_DEPTH);
    for (name, t) in report.theorems() {
        println!("{name:<12} {}", t.verdict.as_str());
        if let Some(w) = t.witnesses.first() {
            println!("             rank {} from {:?}", w.rank, w.vectors);
        }
    }
}
