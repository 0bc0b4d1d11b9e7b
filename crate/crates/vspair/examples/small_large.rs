//! Small/large classification of one-variable definable sets and the
//! base-theory approximation up to a small symmetric difference.
//!
//! ```sh
//! cargo run --example small_large
//! ```

use vspair::config::EngineConfig;
use vspair::parse::parse_formula;
use vspair::qe::{is_small, large_approx, SizeClass};
use vspair::scalar::FieldElem;

fn main() {
    let cfg = EngineConfig::rationals_integers();
    let one = FieldElem::one(&cfg.field);
    for text in [
        "~(x = 0) /\\ G(x)",
        "~(x = c) /\\ ~G(x)",
        "Gl[2](x - d)",
        "x = c",
        "~G(x) \\/ G(x + d)",
        "false",
    ] {
        let f = if text == "false" {
            vspair::formula::FormulaExpr::False
        } else {
            parse_formula(text, &cfg.field).unwrap()
        };
        let class = is_small(&f, "x", &one).unwrap();
        let approx = large_approx(&f, "x", &one).unwrap();
        println!(
            "{text}\n  class: {:?}\n  base-theory approximation: {approx}\n",
            match class {
                SizeClass::Small => "small (inside span(params, G))",
                SizeClass::Large => "large",
            }
        );
    }
}
