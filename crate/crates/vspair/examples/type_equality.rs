//! Type equality of tuples: closures are compared through their base
//! relation-and-order data and the canonical pp-type of the module part,
//! and the verdict names the first distinguishing datum.
//!
//! ```sh
//! cargo run --example type_equality
//! ```

use vspair::config::EngineConfig;
use vspair::gmodule::{canonical_pp_type, GVector};
use vspair::model::ModelHandle;
use vspair::qe::types_equal;
use vspair::scalar::FieldElem;

fn main() {
    let cfg = EngineConfig::rationals_integers();
    let mut m = ModelHandle::new(cfg.field.clone(), cfg.ring.clone());
    let h = m.fresh_g(3);
    let v = m.fresh_generic(1);
    let two = FieldElem::from_int(&cfg.field, 2);

    let pairs = [
        ("h1 vs h2", vec![m.elem(h[0])], vec![m.elem(h[1])]),
        ("2 h1 vs h1", vec![m.elem(h[0]).scale(&two)], vec![m.elem(h[0])]),
        ("generic vs h1", vec![m.elem(v[0])], vec![m.elem(h[0])]),
        (
            "(h1, h2) vs (h3, h1)",
            vec![m.elem(h[0]), m.elem(h[1])],
            vec![m.elem(h[2]), m.elem(h[0])],
        ),
        (
            "h1 + 2 h2 vs h3 (a primitive vector is automorphic to a generator)",
            vec![m.elem(h[0]).add(&m.elem(h[1]).scale(&two))],
            vec![m.elem(h[2])],
        ),
        (
            "2 h1 + 2 h2 vs h3",
            vec![m.elem(h[0]).add(&m.elem(h[1])).scale(&two)],
            vec![m.elem(h[2])],
        ),
    ];
    for (name, a, b) in pairs {
        let (eq, why) = types_equal(&m, &a, &m, &b).unwrap();
        println!("{name}: {} ({why})", if eq { "equal" } else { "distinct" });
    }

    // the canonical pp-type datum itself: relation lattice plus divisibility
    // lattices up to a bound
    println!();
    for (name, tuple) in [
        ("(h1)", vec![GVector::generator(1)]),
        ("(2 h1)", vec![GVector::generator(1).scale_int(&2.into())]),
        ("(0)", vec![GVector::zero()]),
    ] {
        let t = canonical_pp_type(&tuple, m.ring(), Some(2.into())).unwrap();
        println!(
            "canonical pp-type of {name}: relation lattice {:?}, {} divisibility levels",
            t.relation_lattice,
            t.divisibility.len()
        );
    }
}
