//! Sentence decision in the four shipped configurations.  The theory of the
//! pair is complete, so every closed sentence gets a truth value; constants
//! are resolved through a model snapshot.
//!
//! ```sh
//! cargo run --example decide
//! ```

use vspair::config::EngineConfig;
use vspair::parse::parse_formula;
use vspair::qe::{decide_sentence, QeConfig};
use vspair::suites::fixture_model;

fn main() {
    let configs = [
        ("Q, Z", EngineConfig::rationals_integers()),
        (
            "Q(a), a^2 = 2, Z",
            EngineConfig::parse("field = a^2 - 2\nring = integers\nroot_index = 1").unwrap(),
        ),
        (
            "Q, Z with 2 inverted",
            EngineConfig::parse("ring = invert 2").unwrap(),
        ),
        ("Q ordered, Z", EngineConfig::parse("ordered = true").unwrap()),
    ];
    let sentences = [
        "exists x . G(x)",
        "exists x . G(x) /\\ ~Gl[2](x)",
        "forall x . (G(x) -> G(2*x))",
        "forall x . (G(2*x) -> G(x))",
        "exists x . ~(x = x)",
    ];
    for (name, cfg) in &configs {
        println!("configuration: {name}");
        let qe = QeConfig::from_engine(cfg);
        for text in sentences {
            match parse_formula(text, &cfg.field) {
                Ok(f) => match decide_sentence(&f, &qe, None) {
                    Ok((verdict, _)) => println!("  {text}  =>  {verdict}"),
                    Err(e) => println!("  {text}  =>  error: {e}"),
                },
                Err(e) => println!("  {text}  =>  parse error: {e}"),
            }
        }
        println!();
    }

    // constants come from a model snapshot: c = h1, d = 2 h2, e generic
    let cfg = EngineConfig::rationals_integers();
    let qe = QeConfig::from_engine(&cfg);
    let model = fixture_model(&cfg);
    println!("with fixture bindings (c = h1, d = 2 h2, e generic):");
    for text in [
        "G(c)",
        "Gl[2](d)",
        "G(e)",
        "exists x . G(x) /\\ x + x = d",
        "exists x . G(x) /\\ x + x = c",
    ] {
        let f = parse_formula(text, &cfg.field).unwrap();
        let (verdict, _) = decide_sentence(&f, &qe, Some(&model)).unwrap();
        println!("  {text}  =>  {verdict}");
    }
}
