//! Derive the second-order PDE a solution must satisfy, for a spec file or
//! every built-in equation.
//!
//!     cargo run --example derive_pde -- crates/core/fixtures/multiparam.toml

use hypocheck::cli::load_spec;
use hypocheck::feq::{derive_pde, fixtures, FunctionalEquationSpec};

fn show(name: &str, spec: &FunctionalEquationSpec) {
    match derive_pde(spec) {
        Ok(pde) => {
            println!("{name}:");
            for f in pde.l_fields.iter().chain([&pde.l0]) {
                println!("  {f}");
            }
            println!("  {} + ({})*f = {}", pde.operator_text(), pde.c, pde.g);
        }
        Err(e) => println!("{name}: {e}"),
    }
}

fn main() {
    if let Some(path) = std::env::args().nth(1) {
        match load_spec(path.as_ref()) {
            Ok(file) => match file.spec {
                Some(spec) => show(&path, &spec),
                None => eprintln!("{path}: no [equation] table"),
            },
            Err(e) => eprintln!("{e}"),
        }
        return;
    }
    for (name, spec) in fixtures::all() {
        show(name, &spec);
    }
}
