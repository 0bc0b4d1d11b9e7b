//! The Mordell-Lang reduction: an F-linear relation among elements of G is
//! equivalent, on G, to a system of R-linear relations obtained by greedy
//! basis extraction and denominator clearing.
//!
//! ```sh
//! cargo run --example mordell_reduction
//! ```

use vspair::mordell::mordell_lang_reduce;
use vspair::scalar::{rat, FieldElem, FieldSpec};

fn main() {
    let q = FieldSpec::rationals(false);
    let nf = FieldSpec::number_field(vec![(-2).into(), 0.into(), 1.into()], Some(1)).unwrap();
    let one = FieldElem::one(&nf);
    let sqrt2 = FieldElem::generator(&nf).unwrap();

    let show = |name: &str, lams: &[FieldElem]| {
        let sys = mordell_lang_reduce(lams).expect("reduction succeeds");
        println!("{name}:");
        for row in &sys.rows {
            let terms: Vec<String> = row
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.to_string().eq("0"))
                .map(|(i, c)| format!("{c}*x{i}"))
                .collect();
            println!("  {} = 0", terms.join(" + "));
        }
        println!();
    };

    // a dependent triple over Q(sqrt 2): 1 + sqrt2 = 1 * 1 + 1 * sqrt2
    show(
        "(1, a, 1 + a) over Q(a), a^2 = 2",
        &[one.clone(), sqrt2.clone(), one.add(&sqrt2)],
    );
    // independent scalars force every slot to zero
    show("(1, a)", &[one.clone(), sqrt2.clone()]);
    // denominators are cleared by least common multiples
    show(
        "(1/2, 1/3) over Q",
        &[
            FieldElem::from_rational(&q, rat(1, 2)),
            FieldElem::from_rational(&q, rat(1, 3)),
        ],
    );
    show(
        "(2/3, 1/2, 1/6) over Q",
        &[
            FieldElem::from_rational(&q, rat(2, 3)),
            FieldElem::from_rational(&q, rat(1, 2)),
            FieldElem::from_rational(&q, rat(1, 6)),
        ],
    );
}
