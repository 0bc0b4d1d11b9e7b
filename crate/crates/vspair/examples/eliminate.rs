//! Quantifier elimination on a tour of formulas, with the audit trace for
//! one of them.
//!
//! ```sh
//! cargo run --example eliminate
//! ```

use vspair::config::EngineConfig;
use vspair::parse::parse_formula;
use vspair::qe::{eliminate_all, QeConfig};

fn main() {
    let cfg = EngineConfig::rationals_integers();
    let qe = QeConfig::from_engine(&cfg);
    let formulas = [
        "exists x . G(x) /\\ G(x + c)",
        "exists x . G(x) /\\ ~(x = 0)",
        "exists x . 2*x = c",
        "exists x . ~Gl[1](x - c)",
        "forall x . (G(x) -> G(2*x))",
        "forall x . (G(2*x) -> G(x))",
        "exists x . G(x) /\\ Gl[2](x - d) /\\ Gl[3](x - d)",
        "exists x . exists y . G(x) /\\ G(y) /\\ x + y = c",
    ];
    for text in formulas {
        let f = parse_formula(text, &cfg.field).expect("corpus parses");
        let (out, _) = eliminate_all(&f, &qe).expect("elimination succeeds");
        println!("{text}\n  =>  {out}\n");
    }

    // the trace records each branch taken, clause by clause
    let f = parse_formula("exists x . G(x) /\\ ~Gl[2](x)", &cfg.field).unwrap();
    let (out, trace) = eliminate_all(&f, &qe).unwrap();
    println!("exists x . G(x) /\\ ~Gl[2](x)\n  =>  {out}");
    println!("trace:");
    for step in &trace.steps {
        println!("  [{}] {}: {}", step.variable, step.branch, step.detail);
    }
}
