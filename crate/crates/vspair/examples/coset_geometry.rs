//! The integer-lattice backbone: Hermite and Smith normal forms, integer
//! system solving, coset containment and finite covers.
//!
//! ```sh
//! cargo run --example coset_geometry
//! ```

use num_bigint::BigInt;
use vspair::linalg::{
    coset_finite_cover, coset_subset, hnf, lattice_index, snf, solve_integer, CosetDesc,
    IntMatrix, LatticeIndex,
};

fn main() {
    let m = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
    let (s, u, v) = snf(&m).unwrap();
    println!("snf of [[2,4],[6,8]]: diag({}, {})", s[(0, 0)], s[(1, 1)]);
    println!("recomposition U*M*V = S: {}", u.mul(&m).mul(&v) == s);
    let (h, uu) = hnf(&m).unwrap();
    println!("hnf rows: [{}, {}; {}, {}]", h[(0, 0)], h[(0, 1)], h[(1, 0)], h[(1, 1)]);
    println!("recomposition U*M = H: {}\n", uu.mul(&m) == h);

    // Bezout-style solving
    let a = IntMatrix::from_i64(&[&[2, 3]]);
    let x = solve_integer(&a, &[BigInt::from(1)]).unwrap().unwrap();
    println!("2 x0 + 3 x1 = 1 has integer solution ({}, {})", x[0], x[1]);
    let a2 = IntMatrix::from_i64(&[&[2]]);
    println!(
        "2 x = 1 over the integers: {:?}\n",
        solve_integer(&a2, &[BigInt::from(1)]).unwrap()
    );

    // cosets of integer lattices
    let z = CosetDesc::new(vec![BigInt::from(0)], IntMatrix::from_i64(&[&[1]])).unwrap();
    let even = CosetDesc::new(vec![BigInt::from(0)], IntMatrix::from_i64(&[&[2]])).unwrap();
    let odd = CosetDesc::new(vec![BigInt::from(1)], IntMatrix::from_i64(&[&[2]])).unwrap();
    let one_mod4 = CosetDesc::new(vec![BigInt::from(1)], IntMatrix::from_i64(&[&[4]])).unwrap();
    println!("2Z inside Z: {}", coset_subset(&even, &z).unwrap());
    println!(
        "Z covered by 2Z and 1 + 2Z: {}",
        coset_finite_cover(&z, &[even.clone(), odd]).unwrap()
    );
    println!(
        "Z covered by 2Z and 1 + 4Z: {}",
        coset_finite_cover(&z, &[even, one_mod4]).unwrap()
    );

    // indices of sublattices
    match lattice_index(&IntMatrix::from_i64(&[&[1]]), &IntMatrix::from_i64(&[&[6]])).unwrap() {
        LatticeIndex::Finite(n) => println!("[Z : 6Z] = {n}"),
        LatticeIndex::Infinite => println!("[Z : 6Z] infinite"),
    }
    match lattice_index(
        &IntMatrix::from_i64(&[&[1, 0], &[0, 1]]),
        &IntMatrix::from_i64(&[&[1], &[0]]),
    )
    .unwrap()
    {
        LatticeIndex::Finite(n) => println!("[Z^2 : line] = {n}"),
        LatticeIndex::Infinite => println!("[Z^2 : a line] is infinite"),
    }
}
