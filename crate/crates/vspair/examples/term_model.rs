//! The executable term model: fresh generators, exact evaluation, subgroup
//! membership and the decomposition functions.
//!
//! ```sh
//! cargo run --example term_model
//! ```

use std::collections::BTreeMap;

use vspair::config::EngineConfig;
use vspair::model::ModelHandle;
use vspair::parse::{parse_formula, parse_term};
use vspair::scalar::FieldElem;

fn main() {
    let cfg = EngineConfig::parse("field = a^2 - 2\nring = integers\nroot_index = 1").unwrap();
    let mut model = ModelHandle::new(cfg.field.clone(), cfg.ring.clone());
    let h = model.fresh_g(2);
    let v = model.fresh_generic(1);
    let sqrt2 = FieldElem::generator(&cfg.field).unwrap();

    // x = h1 + sqrt2 h2 decomposes along (1, sqrt2) with components (h1, h2)
    let x = model.elem(h[0]).add(&model.elem(h[1]).scale(&sqrt2));
    println!("x = {}", model.format_elem(&x));
    println!("x in G? {}", model.in_g(&x));
    println!(
        "x in G_(1, a)? {}",
        model.in_g_lambda(&x, &[FieldElem::one(&cfg.field), sqrt2.clone()])
    );

    let mut asn = BTreeMap::new();
    asn.insert("x".to_string(), x);
    asn.insert("u".to_string(), model.elem(v[0]));
    for text in ["f[1, a; 1](x)", "f[1, a; 2](x)", "f[1, a; 1](u)"] {
        let t = parse_term(text, &cfg.field).unwrap();
        let value = model.eval_term(&t, &asn).unwrap();
        println!("{text} = {}", model.format_elem(&value));
    }

    // quantifier-free evaluation
    for text in [
        "G(x) /\\ Gl[1, a](x)",
        "f[1, a; 2](x) = 0",
        "~G(u)",
        "G(x + x)",
    ] {
        let f = parse_formula(text, &cfg.field).unwrap();
        println!("{text}  =>  {}", model.eval_qfree(&f, &asn).unwrap());
    }

    // the snapshot serializes generators, positions and bindings
    model.bind("x0", model.elem(h[0]));
    let snapshot = vspair::model::snapshot_to_json(&model);
    println!("\nsnapshot:\n{}", serde_json::to_string_pretty(&snapshot).unwrap());
}
