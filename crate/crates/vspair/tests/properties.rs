//! Property tests: printing and parsing are mutually inverse, boolean
//! normal forms preserve semantics under the evaluation oracle, substitution
//! commutes with evaluation, and fuzzed constructors enforce the
//! independence invariant.

use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use vspair::formula::{to_dnf, AtomExpr, FormulaExpr, TermExpr};
use vspair::model::{ModelHandle, VElem};
use vspair::parse::parse_formula;
use vspair::scalar::{rat, FieldElem, FieldSpec, RingSpec};

fn q() -> Arc<FieldSpec> {
    FieldSpec::rationals(false)
}

fn scalar_strategy() -> impl Strategy<Value = FieldElem> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, d)| FieldElem::from_rational(&q(), rat(p, d)))
}

fn term_strategy() -> impl Strategy<Value = TermExpr> {
    let leaf = prop_oneof![
        Just(TermExpr::Zero),
        prop_oneof![Just("x"), Just("y"), Just("z"), Just("c")]
            .prop_map(|v| TermExpr::var(v)),
    ];
    leaf.prop_recursive(3, 16, 4, |inner| {
        prop_oneof![
            (scalar_strategy(), inner.clone())
                .prop_map(|(s, t)| TermExpr::scale(s, t)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TermExpr::sum(a, b)),
        ]
    })
}

fn atom_strategy() -> impl Strategy<Value = AtomExpr> {
    prop_oneof![
        (term_strategy(), term_strategy()).prop_map(|(a, b)| AtomExpr::Eq(a, b)),
        term_strategy().prop_map(AtomExpr::InG),
        term_strategy().prop_map(|t| {
            AtomExpr::in_g_lambda(vec![FieldElem::from_int(&q(), 2)], t).expect("independent")
        }),
    ]
}

fn formula_strategy() -> impl Strategy<Value = FormulaExpr> {
    let leaf = prop_oneof![
        Just(FormulaExpr::True),
        Just(FormulaExpr::False),
        atom_strategy().prop_map(FormulaExpr::Atom),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|f| FormulaExpr::Not(Box::new(f))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| FormulaExpr::And(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| FormulaExpr::Or(Box::new(a), Box::new(b))),
            inner.clone().prop_map(|f| FormulaExpr::exists("x", f)),
        ]
    })
}

fn assignment_strategy(model: &ModelHandle) -> impl Strategy<Value = BTreeMap<String, VElem>> {
    let gens: Vec<VElem> = model
        .h_generators()
        .chain(model.v_generators())
        .map(|g| model.elem(g))
        .collect();
    let field = model.field().clone();
    let elem = move |seed_parts: Vec<(usize, i64)>| {
        let mut v = VElem::zero();
        for (i, c) in seed_parts {
            let idx = i % gens.len();
            v = v.add(&gens[idx].scale(&FieldElem::from_int(&field, c)));
        }
        v
    };
    proptest::collection::vec(
        proptest::collection::vec((0usize..5, -3i64..=3), 1..3),
        4,
    )
    .prop_map(move |seeds| {
        let mut out = BTreeMap::new();
        for (name, seed) in ["x", "y", "z", "c"].iter().zip(seeds) {
            out.insert(name.to_string(), elem(seed));
        }
        out
    })
}

fn fixture_model() -> ModelHandle {
    let mut m = ModelHandle::new(q(), RingSpec::integers());
    m.fresh_g(3);
    m.fresh_generic(2);
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    /// parse . print is the identity on normalized formulas
    #[test]
    fn print_then_parse_is_identity(f in formula_strategy()) {
        let normalized = f.alpha_normalize();
        let printed = normalized.to_string();
        let reparsed = parse_formula(&printed, &q())
            .unwrap_or_else(|e| panic!("reparse failed for `{printed}`: {e}"));
        prop_assert_eq!(reparsed, normalized);
    }

    /// the disjunctive normal form is equivalent under exact evaluation
    #[test]
    fn dnf_preserves_semantics(
        f in formula_strategy().prop_filter("quantifier-free", |f| f.is_quantifier_free()),
        assignments in proptest::collection::vec(assignment_strategy(&fixture_model()), 8)
    ) {
        let model = fixture_model();
        if let Ok(d) = to_dnf(&f) {
            for asn in &assignments {
                let a = model.eval_qfree(&f, asn).unwrap();
                let b = model.eval_qfree(&d, asn).unwrap();
                prop_assert_eq!(a, b, "formula {} vs dnf {}", f, d);
            }
        }
    }

    /// substituting then evaluating equals evaluating under the extended
    /// assignment
    #[test]
    fn substitution_commutes_with_evaluation(
        f in formula_strategy().prop_filter("quantifier-free", |f| f.is_quantifier_free()),
        t in term_strategy(),
        asn in assignment_strategy(&fixture_model()),
    ) {
        let model = fixture_model();
        let substituted = f.substitute("x", &t);
        let direct = model.eval_qfree(&substituted, &asn).unwrap();
        let mut extended = asn.clone();
        let tv = model.eval_term(&t, &asn).unwrap();
        extended.insert("x".to_string(), tv);
        let via_assignment = model.eval_qfree(&f, &extended).unwrap();
        prop_assert_eq!(direct, via_assignment);
    }

    /// dependent scalar tuples can never enter a constructor
    #[test]
    fn constructors_enforce_independence(p in -4i64..=4, q_den in 1i64..=3) {
        let one = FieldElem::one(&q());
        let lam = FieldElem::from_rational(&q(), rat(p, q_den));
        let tuple = vec![one, lam.clone()];
        let fapp = TermExpr::fapp(tuple.clone(), 1, TermExpr::var("x"));
        let atom = AtomExpr::in_g_lambda(tuple, TermExpr::var("x"));
        // over the rationals any pair is dependent
        prop_assert!(fapp.is_err());
        prop_assert!(atom.is_err());
        // a singleton is independent exactly when nonzero
        let single = AtomExpr::in_g_lambda(vec![lam.clone()], TermExpr::var("x"));
        prop_assert_eq!(single.is_ok(), !lam.is_zero());
    }
}
