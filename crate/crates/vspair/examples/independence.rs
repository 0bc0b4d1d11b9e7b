//! The three-condition independence relation: linear independence of
//! closures, the heir criterion for module conditions, and additivity of
//! the G-part across sums.
//!
//! ```sh
//! cargo run --example independence
//! ```

use vspair::config::EngineConfig;
use vspair::model::{closure, g_basis, g_independent, indep_g, ModelHandle};
use vspair::scalar::FieldElem;

fn main() {
    let cfg = EngineConfig::parse("field = a^2 - 2\nring = integers\nroot_index = 1").unwrap();
    let mut m = ModelHandle::new(cfg.field.clone(), cfg.ring.clone());
    let h = m.fresh_g(2);
    let v = m.fresh_generic(2);
    let sqrt2 = FieldElem::generator(&cfg.field).unwrap();

    // G-independence: closure adds nothing beyond the span
    let mixed = m.elem(h[0]).add(&m.elem(h[1]).scale(&sqrt2));
    println!(
        "{{h1, h2}} G-independent: {}",
        g_independent(&m, &[m.elem(h[0]), m.elem(h[1])])
    );
    println!(
        "{{h1 + a h2}} G-independent: {}",
        g_independent(&m, &[mixed.clone()])
    );
    let basis = g_basis(&m, &[mixed.clone()], &[]).unwrap();
    println!(
        "G-basis of (h1 + a h2) over the empty set: {}",
        basis
            .iter()
            .map(|e| m.format_elem(e))
            .collect::<Vec<_>>()
            .join(", ")
    );

    // the three fixture scenarios of the independence checker
    println!();
    {
        let v0 = closure(&m, &[]);
        let d = closure(&m, &[m.elem(v[0])]);
        let verdict = indep_g(&m, &[m.elem(v[1])], &v0, &d).unwrap();
        println!(
            "fresh generic over a generic base: independent = {}",
            verdict.independent
        );
    }
    {
        // a = v1 + h1 and d = -v1: the sum space catches h1 in G even though
        // neither side's G-part sees it
        let mut m = ModelHandle::new(cfg.field.clone(), cfg.ring.clone());
        let h = m.fresh_g(1);
        let v = m.fresh_generic(1);
        let a = m.elem(v[0]).add(&m.elem(h[0]));
        let d_elem = m.elem(v[0]).scale(&FieldElem::from_int(&cfg.field, -1));
        let v0 = closure(&m, &[]);
        let d = closure(&m, &[d_elem]);
        let verdict = indep_g(&m, &[a], &v0, &d).unwrap();
        println!(
            "coset scenario: independent = {}, failed condition = {:?}",
            verdict.independent, verdict.failed_condition
        );
    }
    {
        // a = h1 + 2 h2 over D = <h1>: the condition a in h1 + 2G has no
        // match with parameters from the empty base
        let mut m = ModelHandle::new(cfg.field.clone(), cfg.ring.clone());
        let h = m.fresh_g(2);
        let a = m
            .elem(h[0])
            .add(&m.elem(h[1]).scale(&FieldElem::from_int(&cfg.field, 2)));
        let v0 = closure(&m, &[]);
        let d = closure(&m, &[m.elem(h[0])]);
        let verdict = indep_g(&m, &[a], &v0, &d).unwrap();
        println!(
            "heir scenario: independent = {}, failed condition = {:?}",
            verdict.independent, verdict.failed_condition
        );
    }
}
