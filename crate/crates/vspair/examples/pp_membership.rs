//! Positive-primitive reasoning inside the free module: evaluation, exact
//! single-variable solution sets, joint satisfiability with the
//! fresh-generator escape, and index sentences.
//!
//! ```sh
//! cargo run --example pp_membership
//! ```

use num_bigint::BigInt;
use vspair::formula::PPConstraint;
use vspair::gmodule::{
    decide_pp_sentence, eval_pp, pp_solution_set, sat_constraints, GVector, PPArg, PPInstance,
    PPSentence, PPSolutions, SatOutcome,
};
use vspair::linalg::IntMatrix;
use vspair::scalar::RingSpec;

fn in_dg(d: i64) -> PPConstraint {
    // x in dG:  exists y . x - d y = 0
    PPConstraint::new(
        IntMatrix::from_i64(&[&[1]]),
        IntMatrix::from_i64(&[&[-d]]),
        vec![BigInt::from(0)],
    )
    .unwrap()
}

fn in_coset(d: i64) -> PPConstraint {
    // x in anchor + dG:  exists y . x - d y = anchor
    PPConstraint::new(
        IntMatrix::from_i64(&[&[1]]),
        IntMatrix::from_i64(&[&[-d]]),
        vec![BigInt::from(1)],
    )
    .unwrap()
}

fn main() {
    let ring = RingSpec::integers();
    let h1 = GVector::generator(1);

    // evaluation decomposes over the generator coordinates
    println!(
        "2 h1 in 2G: {}",
        eval_pp(&in_dg(2), &[h1.scale_int(&BigInt::from(2))], &ring).unwrap()
    );
    println!("h1 in 2G: {}", eval_pp(&in_dg(2), &[h1.clone()], &ring).unwrap());

    // the solution set of x in h1 + 2G pins every coordinate mod 2
    let inst = PPInstance::new(in_coset(2), vec![PPArg::Var, PPArg::Param(h1.clone())]).unwrap();
    match pp_solution_set(&inst, &ring).unwrap() {
        PPSolutions::Set(s) => {
            println!(
                "x in h1 + 2G: modulus {}, residues {:?}, free directions: {}",
                s.modulus,
                s.residues,
                s.free_directions()
            );
        }
        PPSolutions::Empty => println!("empty"),
    }

    // positive cosets intersect by congruence; a strictly finer negative
    // coset is escaped along a fresh generator
    let pos = vec![PPInstance::new(in_dg(2), vec![PPArg::Var]).unwrap()];
    let neg = vec![PPInstance::new(in_dg(4), vec![PPArg::Var]).unwrap()];
    match sat_constraints(&pos, &neg, &ring, 99).unwrap() {
        SatOutcome::Sat(w) => println!("x in 2G, x not in 4G: witness {w:?}"),
        SatOutcome::Unsat => println!("unsat"),
    }
    let pos = vec![
        PPInstance::new(in_coset(2), vec![PPArg::Var, PPArg::Param(h1.clone())]).unwrap(),
        PPInstance::new(in_dg(4), vec![PPArg::Var]).unwrap(),
    ];
    match sat_constraints(&pos, &[], &ring, 99).unwrap() {
        SatOutcome::Sat(w) => println!("unexpected witness {w:?}"),
        SatOutcome::Unsat => println!("x in h1 + 2G and x in 4G: unsat (parity clash)"),
    }

    // index sentences against the infinite-rank profile
    for (ring, label) in [
        (RingSpec::integers(), "over Z"),
        (RingSpec::localization([2]).unwrap(), "with 2 inverted"),
    ] {
        let s = PPSentence::Index { num: in_dg(1), den: in_dg(2), at_least: 2 };
        println!(
            "[G : 2G] >= 2 {label}: {}",
            decide_pp_sentence(&s, &ring).unwrap()
        );
    }
}
