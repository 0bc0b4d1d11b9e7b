//! Constructive witnesses for true existential sentences, validated by
//! exact evaluation, and candidate falsification for false ones.
//!
//! ```sh
//! cargo run --example witness_search
//! ```

use std::collections::BTreeMap;

use vspair::config::EngineConfig;
use vspair::parse::parse_formula;
use vspair::qe::{refutation_candidates, witness, QeConfig};
use vspair::suites::fixture_model;

fn main() {
    let cfg = EngineConfig::rationals_integers();
    let qe = QeConfig::from_engine(&cfg);

    for text in [
        "exists x . G(x) /\\ ~(x = c)",
        "exists x . 2*x = c",
        "exists x . ~Gl[1](x - c)",
        "exists x . G(x) /\\ Gl[2](x - d) /\\ Gl[3](x - d)",
        "exists x . pp{1|-2|0}(x) /\\ ~Gl[4](x)",
    ] {
        let mut model = fixture_model(&cfg);
        let f = parse_formula(text, &cfg.field).unwrap();
        match witness(&mut model, &f, &qe) {
            Ok(w) => println!("{text}\n  witness: {}\n", model.format_elem(&w)),
            Err(e) => println!("{text}\n  {e}\n"),
        }
    }

    // a false sentence: no witness, and sampled candidates all falsify
    let text = "exists x . G(x) /\\ Gl[2](x - c) /\\ Gl[4](x - d - c)";
    let mut model = fixture_model(&cfg);
    let f = parse_formula(text, &cfg.field).unwrap();
    println!("{text}");
    match witness(&mut model, &f, &qe) {
        Ok(w) => println!("  unexpected witness {}", model.format_elem(&w)),
        Err(e) => println!("  {e}"),
    }
    let body = parse_formula(
        "G(x) /\\ Gl[2](x - c) /\\ Gl[4](x - d - c)",
        &cfg.field,
    )
    .unwrap();
    let candidates = refutation_candidates(&mut model, &body, "x", 50);
    let mut satisfied = 0;
    for cand in &candidates {
        let mut asn = BTreeMap::new();
        asn.insert("x".to_string(), cand.clone());
        if model.eval_qfree(&body, &asn).unwrap_or(false) {
            satisfied += 1;
        }
    }
    println!(
        "  {} of {} falsification candidates satisfied the body",
        satisfied,
        candidates.len()
    );
}
