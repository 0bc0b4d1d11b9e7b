//! A tour of the formula grammar: parsing, canonical printing, the JSON
//! form of the AST, and the errors the parser raises.
//!
//! ```sh
//! cargo run --example parse_print
//! ```

use vspair::config::EngineConfig;
use vspair::formula::formula_to_json;
use vspair::parse::parse_formula;

fn main() {
    let cfg =
        EngineConfig::parse("field = a^2 - 2\nring = integers\nordered = true\nroot_index = 1")
            .unwrap();
    let samples = [
        "exists x . G(x) /\\ ~G(x + c)",
        "forall x . (Gl[1, a](x) -> G(f[1, a; 1](x)))",
        "pp{1,0;0,1|2,0;0,2|0,0}(x, y)",
        "1/2*x - a*y + (1 + a)*z = 0",
        "c < x /\\ x < d",
        "G(x) -> G(y) -> G(z)",
    ];
    for text in samples {
        match parse_formula(text, &cfg.field) {
            Ok(ast) => {
                let printed = ast.to_string();
                let reparsed = parse_formula(&printed, &cfg.field).unwrap();
                println!("{text}\n  prints as: {printed}\n  round trip: {}\n", reparsed == ast);
            }
            Err(e) => println!("{text}\n  error: {e}\n"),
        }
    }

    // positioned diagnostics and the independence invariant
    for bad in ["exists . G(x)", "Gl[1, 2](x)", "x < y /\\"] {
        match parse_formula(bad, &cfg.field) {
            Ok(_) => println!("{bad}: unexpectedly parsed"),
            Err(e) => println!("{bad}\n  error: {e}"),
        }
    }

    // the canonical JSON form of an AST
    let ast = parse_formula("exists x . Gl[2](x - c)", &cfg.field).unwrap();
    println!(
        "\nJSON form of `exists x . Gl[2](x - c)`:\n{}",
        serde_json::to_string_pretty(&formula_to_json(&ast)).unwrap()
    );
}
