//! Reasoning inside the generic module `G`, fixed to the profile of a free
//! R-module of infinite rank: evaluation of positive-primitive constraints on
//! concrete elements, exact solution sets for a single variable, joint
//! satisfiability of positive and negative constraint sets, closed pp and
//! index sentences, and canonical pp-types of finite tuples.
//!
//! Everything decomposes per generator coordinate because `G` is free, so
//! each operation reduces to integer (or localized-integer) linear algebra.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::formula::PPConstraint;
use crate::linalg::{kernel_int, lattice_canon, snf_diagonal, solve_over_ring, IntMatrix};
use crate::scalar::{Rat, RingSpec};

pub type GenId = u64;

/// An element of the free module `G`: a finite-support map from generator
/// ids to ring coefficients.  Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GVector {
    coeffs: BTreeMap<GenId, Rat>,
}

impl GVector {
    pub fn zero() -> GVector {
        GVector::default()
    }

    pub fn generator(id: GenId) -> GVector {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(id, Rat::one());
        GVector { coeffs }
    }

    pub fn from_coeffs(entries: impl IntoIterator<Item = (GenId, Rat)>) -> GVector {
        let mut v = GVector::zero();
        for (g, c) in entries {
            v.set(g, c);
        }
        v
    }

    pub fn set(&mut self, g: GenId, c: Rat) {
        if c.is_zero() {
            self.coeffs.remove(&g);
        } else {
            self.coeffs.insert(g, c);
        }
    }

    pub fn coeff(&self, g: GenId) -> Rat {
        self.coeffs.get(&g).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = GenId> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn coeffs(&self) -> &BTreeMap<GenId, Rat> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, rhs: &GVector) -> GVector {
        let mut out = self.clone();
        for (g, c) in &rhs.coeffs {
            let v = out.coeff(*g) + c;
            out.set(*g, v);
        }
        out
    }

    pub fn sub(&self, rhs: &GVector) -> GVector {
        let mut out = self.clone();
        for (g, c) in &rhs.coeffs {
            let v = out.coeff(*g) - c;
            out.set(*g, v);
        }
        out
    }

    pub fn scale(&self, q: &Rat) -> GVector {
        if q.is_zero() {
            return GVector::zero();
        }
        GVector {
            coeffs: self.coeffs.iter().map(|(g, c)| (*g, c * q)).collect(),
        }
    }

    pub fn scale_int(&self, n: &BigInt) -> GVector {
        self.scale(&Rat::from(n.clone()))
    }

    pub fn in_ring(&self, ring: &RingSpec) -> bool {
        self.coeffs.values().all(|c| ring.contains(c))
    }
}

/// Argument slot of a pp instance: the single free variable or a concrete
/// parameter from `G`.
#[derive(Debug, Clone)]
pub enum PPArg {
    Var,
    Param(GVector),
}

/// A pp constraint together with bound arguments.
#[derive(Debug, Clone)]
pub struct PPInstance {
    pub constraint: PPConstraint,
    pub args: Vec<PPArg>,
}

impl PPInstance {
    pub fn new(constraint: PPConstraint, args: Vec<PPArg>) -> Result<PPInstance> {
        if constraint.arity() != args.len() {
            return Err(Error::ArityMismatch { expected: constraint.arity(), got: args.len() });
        }
        Ok(PPInstance { constraint, args })
    }

    /// Coefficient column of argument slot `j`, folding the anchor column in
    /// with a sign flip (the anchor sits on the right-hand side).
    fn column(&self, j: usize) -> Vec<BigInt> {
        let k = self.constraint.var_mat.cols;
        if j < k {
            self.constraint.var_mat.col(j)
        } else {
            self.constraint.rhs.iter().map(|c| -c.clone()).collect()
        }
    }

    fn var_slots(&self) -> Vec<usize> {
        self.args
            .iter()
            .enumerate()
            .filter(|(_, a)| matches!(a, PPArg::Var))
            .map(|(i, _)| i)
            .collect()
    }

    /// Per-generator right-hand side from the parameter slots:
    /// B y = -(sum of col_j * param_j) on each coordinate.
    fn param_rhs(&self) -> BTreeMap<GenId, Vec<Rat>> {
        let n = self.constraint.rows();
        let mut support: BTreeSet<GenId> = BTreeSet::new();
        for a in &self.args {
            if let PPArg::Param(v) = a {
                support.extend(v.support());
            }
        }
        let mut out = BTreeMap::new();
        for g in support {
            let mut row = vec![Rat::zero(); n];
            for (j, a) in self.args.iter().enumerate() {
                if let PPArg::Param(v) = a {
                    let c = v.coeff(g);
                    if c.is_zero() {
                        continue;
                    }
                    for (i, e) in self.column(j).iter().enumerate() {
                        row[i] -= Rat::from(e.clone()) * &c;
                    }
                }
            }
            out.insert(g, row);
        }
        out
    }
}

/// Evaluate a pp constraint on concrete module elements.
pub fn eval_pp(constraint: &PPConstraint, args: &[GVector], ring: &RingSpec) -> Result<bool> {
    let inst = PPInstance::new(
        constraint.clone(),
        args.iter().map(|v| PPArg::Param(v.clone())).collect(),
    )?;
    let rhs = inst.param_rhs();
    for row in rhs.values() {
        if solve_over_ring(&constraint.exist_mat, row, ring)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// single-variable solution sets
// ---------------------------------------------------------------------------

/// Exact solution set of a single-variable pp instance over `G`: on every
/// generator coordinate the variable's coefficient is confined to a residue
/// class modulo one global modulus (modulus zero pins exact values).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PPSolutionSet {
    /// Canonical nonnegative modulus; 0 means each coordinate is pinned
    /// exactly, 1 means unconstrained.
    pub modulus: BigInt,
    /// Residues on the parameter support; unseen generators default to 0.
    pub residues: BTreeMap<GenId, Rat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PPSolutions {
    Empty,
    Set(PPSolutionSet),
}

impl PPSolutionSet {
    pub fn full() -> PPSolutionSet {
        PPSolutionSet { modulus: BigInt::one(), residues: BTreeMap::new() }
    }

    /// Are unseen generator directions unconstrained?
    pub fn free_directions(&self) -> bool {
        self.modulus.is_one()
    }

    pub fn member(&self, x: &GVector, ring: &RingSpec) -> bool {
        let mut support: BTreeSet<GenId> = x.support().collect();
        support.extend(self.residues.keys().copied());
        for g in support {
            let val = x.coeff(g);
            let rho = self.residues.get(&g).cloned().unwrap_or_else(Rat::zero);
            if self.modulus.is_zero() {
                if val != rho {
                    return false;
                }
            } else {
                let diff = &val - &rho;
                if !ring.contains(&(diff / Rat::from(self.modulus.clone()))) {
                    return false;
                }
            }
        }
        true
    }

    /// A canonical base point of the set.
    pub fn base_point(&self) -> GVector {
        GVector::from_coeffs(self.residues.iter().map(|(g, r)| (*g, r.clone())))
    }

    fn canonicalize(&mut self, ring: &RingSpec) {
        if self.modulus.is_zero() {
            self.residues.retain(|_, r| !r.is_zero());
            return;
        }
        let m = self.modulus.clone();
        let mut out = BTreeMap::new();
        for (g, r) in &self.residues {
            let red = reduce_mod(r, &m, ring);
            if !red.is_zero() {
                out.insert(*g, red);
            }
        }
        self.residues = out;
    }

    pub fn intersect(&self, other: &PPSolutionSet, ring: &RingSpec) -> PPSolutions {
        let modulus = if self.modulus.is_zero() || other.modulus.is_zero() {
            BigInt::zero()
        } else {
            ring.canonical_modulus(&self.modulus.lcm(&other.modulus))
        };
        let mut keys: BTreeSet<GenId> = self.residues.keys().copied().collect();
        keys.extend(other.residues.keys().copied());
        let mut residues = BTreeMap::new();
        for g in keys {
            let r1 = self.residues.get(&g).cloned().unwrap_or_else(Rat::zero);
            let r2 = other.residues.get(&g).cloned().unwrap_or_else(Rat::zero);
            let combined = match combine_congruence(
                &r1,
                &self.modulus,
                &r2,
                &other.modulus,
                ring,
            ) {
                Some(c) => c,
                None => return PPSolutions::Empty,
            };
            residues.insert(g, combined);
        }
        let mut set = PPSolutionSet { modulus, residues };
        set.canonicalize(ring);
        PPSolutions::Set(set)
    }
}

/// Solve x ≡ r1 (mod m1) and x ≡ r2 (mod m2); m = 0 means exact value.
fn combine_congruence(r1: &Rat, m1: &BigInt, r2: &Rat, m2: &BigInt, ring: &RingSpec) -> Option<Rat> {
    if m1.is_zero() && m2.is_zero() {
        return (r1 == r2).then(|| r1.clone());
    }
    if m1.is_zero() {
        let diff = r1 - r2;
        return ring
            .contains(&(diff / Rat::from(m2.clone())))
            .then(|| r1.clone());
    }
    if m2.is_zero() {
        return combine_congruence(r2, m2, r1, m1, ring);
    }
    // both moduli nonzero: integer residues after reduction
    let a1 = reduce_mod(r1, m1, ring).to_integer();
    let a2 = reduce_mod(r2, m2, ring).to_integer();
    let g = m1.gcd(m2);
    if !((&a1 - &a2) % &g).is_zero() {
        return None;
    }
    let l = m1.lcm(m2);
    // x = a1 + m1 * t with t ≡ (a2 - a1)/g * inv(m1/g) (mod m2/g)
    let m1g = m1 / &g;
    let m2g = m2 / &g;
    let diff = (&a2 - &a1) / &g;
    let inv = mod_inverse(&m1g.mod_floor(&m2g), &m2g)?;
    let t = (diff * inv).mod_floor(&m2g);
    let x = (&a1 + m1 * t).mod_floor(&l);
    Some(Rat::from(x))
}

/// Reduce an R-element to its canonical residue modulo a nonzero integer
/// whose prime support is disjoint from the inverted primes.
fn reduce_mod(x: &Rat, modulus: &BigInt, _ring: &RingSpec) -> Rat {
    if modulus.is_zero() {
        return x.clone();
    }
    let m = modulus.abs();
    if m.is_one() {
        return Rat::zero();
    }
    let p = x.numer().mod_floor(&m);
    let q = x.denom().mod_floor(&m);
    // denominators of R-elements are units modulo a canonical modulus
    let qinv = mod_inverse(&q, &m).expect("denominator invertible modulo canonical modulus");
    Rat::from((p * qinv).mod_floor(&m))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// Modulus of one argument slot of an anchor-free pp constraint: the
/// variable's coefficient is confined to a coset of `delta * R` on every
/// generator coordinate, where delta generates the projection of the kernel
/// of the glued system to that slot.
pub fn pp_var_modulus(pp: &PPConstraint, slot: usize, ring: &RingSpec) -> Result<BigInt> {
    assert!(!pp.has_anchor(), "normalize the anchor away first");
    assert!(slot < pp.var_mat.cols);
    let n = pp.rows();
    let b = &pp.exist_mat;
    let mut glued = IntMatrix::zero(n, 1 + b.cols);
    for i in 0..n {
        glued[(i, 0)] = pp.var_mat[(i, slot)].clone();
        for j in 0..b.cols {
            glued[(i, 1 + j)] = b[(i, j)].clone();
        }
    }
    let mut delta = BigInt::zero();
    for k in kernel_int(&glued)? {
        delta = delta.gcd(&k[0]);
    }
    Ok(ring.canonical_modulus(&delta))
}

/// The exact solution set of a pp instance with at most one variable slot.
pub fn pp_solution_set(inst: &PPInstance, ring: &RingSpec) -> Result<PPSolutions> {
    let vars = inst.var_slots();
    if vars.len() > 1 {
        return Err(Error::MultiVariable);
    }
    let b = &inst.constraint.exist_mat;
    let rhs = inst.param_rhs();
    if vars.is_empty() {
        // closed instance: either the full space or empty
        for row in rhs.values() {
            if solve_over_ring(b, row, ring)?.is_none() {
                return Ok(PPSolutions::Empty);
            }
        }
        return Ok(PPSolutions::Set(PPSolutionSet::full()));
    }
    let var_col = inst.column(vars[0]);
    let n = inst.constraint.rows();
    // glued system [a | B] over (xi, eta)
    let mut glued = IntMatrix::zero(n, 1 + b.cols);
    for i in 0..n {
        glued[(i, 0)] = var_col[i].clone();
        for j in 0..b.cols {
            glued[(i, 1 + j)] = b[(i, j)].clone();
        }
    }
    // modulus: the projection of the kernel lattice to the xi coordinate
    let mut delta = BigInt::zero();
    for k in kernel_int(&glued)? {
        delta = delta.gcd(&k[0]);
    }
    let delta = ring.canonical_modulus(&delta);
    let mut residues = BTreeMap::new();
    for (g, row) in rhs {
        match solve_over_ring(&glued, &row, ring)? {
            Some(sol) => {
                residues.insert(g, sol[0].clone());
            }
            None => return Ok(PPSolutions::Empty),
        }
    }
    let mut set = PPSolutionSet { modulus: delta, residues };
    set.canonicalize(ring);
    Ok(PPSolutions::Set(set))
}

// ---------------------------------------------------------------------------
// satisfiability of positive/negative constraint sets
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatOutcome {
    Sat(GVector),
    Unsat,
}

/// Joint satisfiability over x in G of positive pp instances and negated pp
/// instances, all in one variable.  The positive sets intersect to a coset
/// `w0 + m G`; a negative set can only exclude everything when it contains
/// that coset, and otherwise a shift along one fresh generator (scaled by
/// the positive modulus, mirroring the divisible-element shift) escapes
/// every remaining negative constraint at once.
pub fn sat_constraints(
    pos: &[PPInstance],
    neg: &[PPInstance],
    ring: &RingSpec,
    fresh: GenId,
) -> Result<SatOutcome> {
    let mut current = PPSolutionSet::full();
    for p in pos {
        match pp_solution_set(p, ring)? {
            PPSolutions::Empty => return Ok(SatOutcome::Unsat),
            PPSolutions::Set(s) => match current.intersect(&s, ring) {
                PPSolutions::Empty => return Ok(SatOutcome::Unsat),
                PPSolutions::Set(next) => current = next,
            },
        }
    }
    let w0 = current.base_point();
    let mut neg_sets = Vec::new();
    for nconstraint in neg {
        match pp_solution_set(nconstraint, ring)? {
            PPSolutions::Empty => {} // vacuously avoided
            PPSolutions::Set(s) => neg_sets.push(s),
        }
    }
    if current.modulus.is_zero() {
        // the positive part pins a single point
        if neg_sets.iter().any(|s| s.member(&w0, ring)) {
            return Ok(SatOutcome::Unsat);
        }
        return Ok(SatOutcome::Sat(w0));
    }
    for s in &neg_sets {
        let divides = !s.modulus.is_zero()
            && ring
                .canonical_modulus(&current.modulus.lcm(&s.modulus))
                == ring.canonical_modulus(&current.modulus);
        if divides && s.member(&w0, ring) {
            // the whole positive coset lies inside this negative set
            return Ok(SatOutcome::Unsat);
        }
    }
    if neg_sets.is_empty() {
        return Ok(SatOutcome::Sat(w0));
    }
    let witness = w0.add(&GVector::generator(fresh).scale_int(&current.modulus));
    debug_assert!(current.member(&witness, ring));
    debug_assert!(neg_sets.iter().all(|s| !s.member(&witness, ring)));
    Ok(SatOutcome::Sat(witness))
}

// ---------------------------------------------------------------------------
// closed pp and index sentences
// ---------------------------------------------------------------------------

/// A parameter-free sentence about `G`: a closed pp sentence, or an index
/// comparison between two pp-definable subgroups in one variable.
#[derive(Debug, Clone)]
pub enum PPSentence {
    Closed(PPConstraint),
    /// `[num(G) : num(G) ∩ den(G)] >= at_least`
    Index { num: PPConstraint, den: PPConstraint, at_least: u64 },
}

/// Modulus of a parameter-free single-variable pp subgroup: its solution set
/// is exactly `delta * G`.
pub fn subgroup_modulus(pp: &PPConstraint, ring: &RingSpec) -> Result<BigInt> {
    if pp.has_anchor() || pp.var_mat.cols != 1 {
        return Err(Error::NotClosed);
    }
    let inst = PPInstance::new(pp.clone(), vec![PPArg::Var])?;
    match pp_solution_set(&inst, ring)? {
        PPSolutions::Set(s) => Ok(s.modulus),
        PPSolutions::Empty => unreachable!("parameter-free pp sets contain zero"),
    }
}

/// Decide a parameter-free sentence against the fixed profile of the free
/// module of infinite rank: the module is torsion free, and a pp subgroup of
/// strictly smaller solution lattice has infinite index.
pub fn decide_pp_sentence(s: &PPSentence, ring: &RingSpec) -> Result<bool> {
    match s {
        PPSentence::Closed(pp) => {
            if pp.arity() != 0 {
                return Err(Error::NotClosed);
            }
            // homogeneous closed pp sentences hold with the zero witness
            let zero = vec![Rat::zero(); pp.rows()];
            Ok(solve_over_ring(&pp.exist_mat, &zero, ring)?.is_some())
        }
        PPSentence::Index { num, den, at_least } => {
            let d1 = subgroup_modulus(num, ring)?;
            let d2 = subgroup_modulus(den, ring)?;
            // joint subgroup is lcm(d1, d2) * G
            let joint = if d1.is_zero() || d2.is_zero() {
                BigInt::zero()
            } else {
                ring.canonical_modulus(&d1.lcm(&d2))
            };
            let equal = joint == d1 || (d1.is_zero() && joint.is_zero());
            if equal {
                Ok(*at_least <= 1) // index one
            } else {
                Ok(true) // strict inclusion has infinite index at infinite rank
            }
        }
    }
}

// ---------------------------------------------------------------------------
// canonical pp-types
// ---------------------------------------------------------------------------

/// Canonical pp-type datum of a tuple: the relation lattice together with
/// the divisibility lattices { r : sum r_i t_i in s G } for every level
/// s up to the bound.  Two tuples carry the same pp-conditions up to that
/// bound exactly when their canonical data agree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalPPType {
    pub bound: BigInt,
    pub relation_lattice: IntMatrix,
    pub divisibility: Vec<(BigInt, IntMatrix)>,
}

const MAX_PP_TYPE_BOUND: u64 = 4096;

/// Integer coordinate matrix of a tuple: one row per support generator
/// (rows scaled to integers by ring units, which leaves every pp datum
/// unchanged).
fn coordinate_matrix(tuple: &[GVector]) -> IntMatrix {
    let mut support: BTreeSet<GenId> = BTreeSet::new();
    for v in tuple {
        support.extend(v.support());
    }
    let n = tuple.len();
    let mut rows = Vec::new();
    for g in support {
        let mut lcm = BigInt::one();
        for v in tuple {
            lcm = lcm.lcm(v.coeff(g).denom());
        }
        let row: Vec<BigInt> = tuple
            .iter()
            .map(|v| (v.coeff(g) * Rat::from(lcm.clone())).to_integer())
            .collect();
        rows.push(row);
    }
    if rows.is_empty() {
        IntMatrix::zero(0, n)
    } else {
        IntMatrix::from_rows(rows)
    }
}

/// Default divisibility bound: the product of the nonzero Smith diagonal of
/// the coordinate matrix (the smallest bound its constraints distinguish).
pub fn default_pp_bound(tuple: &[GVector], ring: &RingSpec) -> Result<BigInt> {
    let t = coordinate_matrix(tuple);
    let mut bound = BigInt::one();
    for d in snf_diagonal(&t)? {
        if !d.is_zero() {
            bound *= ring.canonical_modulus(&d).max(BigInt::one());
        }
    }
    Ok(bound)
}

pub fn canonical_pp_type(
    tuple: &[GVector],
    ring: &RingSpec,
    bound: Option<BigInt>,
) -> Result<CanonicalPPType> {
    let t = coordinate_matrix(tuple);
    let n = tuple.len();
    let bound = match bound {
        Some(b) => b,
        None => default_pp_bound(tuple, ring)?,
    };
    if bound > BigInt::from(MAX_PP_TYPE_BOUND) {
        return Err(Error::ResourceLimit("pp-type divisibility bound".into()));
    }
    let relation_lattice = lattice_from_vectors(kernel_int(&t)?, n)?;
    let mut divisibility = Vec::new();
    let mut s = BigInt::one();
    while s <= bound {
        divisibility.push((s.clone(), congruence_kernel(&t, &s, n)?));
        s += 1;
    }
    Ok(CanonicalPPType { bound, relation_lattice, divisibility })
}

/// Lattice { r : T r ≡ 0 (mod s) } in canonical form.
fn congruence_kernel(t: &IntMatrix, s: &BigInt, n: usize) -> Result<IntMatrix> {
    if t.rows == 0 {
        return lattice_from_vectors(
            (0..n)
                .map(|i| {
                    let mut e = vec![BigInt::zero(); n];
                    e[i] = BigInt::one();
                    e
                })
                .collect(),
            n,
        );
    }
    // kernel of [T | s I] projected to the r part
    let mut glued = IntMatrix::zero(t.rows, n + t.rows);
    for i in 0..t.rows {
        for j in 0..n {
            glued[(i, j)] = t[(i, j)].clone();
        }
        glued[(i, n + i)] = s.clone();
    }
    let gens: Vec<Vec<BigInt>> = kernel_int(&glued)?
        .into_iter()
        .map(|k| k[..n].to_vec())
        .collect();
    lattice_from_vectors(gens, n)
}

fn lattice_from_vectors(gens: Vec<Vec<BigInt>>, dim: usize) -> Result<IntMatrix> {
    if gens.is_empty() {
        return Ok(IntMatrix::zero(dim, 0));
    }
    lattice_canon(&IntMatrix::from_rows(gens).transpose())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};
    use num_traits::One;

    fn zz() -> RingSpec {
        RingSpec::integers()
    }

    /// pp "x in d G": exists y, x - d y = 0.
    fn in_dg(d: i64) -> PPConstraint {
        PPConstraint::new(
            IntMatrix::from_i64(&[&[1]]),
            IntMatrix::from_i64(&[&[-d]]),
            vec![BigInt::zero()],
        )
        .unwrap()
    }

    /// pp "x in anchor + d G": exists y, x - d y = anchor.
    fn in_coset_dg(d: i64) -> PPConstraint {
        PPConstraint::new(
            IntMatrix::from_i64(&[&[1]]),
            IntMatrix::from_i64(&[&[-d]]),
            vec![BigInt::one()],
        )
        .unwrap()
    }

    /// pp "d x = anchor".
    fn dx_eq_anchor(d: i64) -> PPConstraint {
        PPConstraint::new(
            IntMatrix::from_i64(&[&[d]]),
            IntMatrix::zero(1, 0),
            vec![BigInt::one()],
        )
        .unwrap()
    }

    #[test]
    fn eval_pp_examples() {
        let h1 = GVector::generator(1);
        let h2 = GVector::generator(2);
        // x = 2 h1 lies in 2G
        assert!(eval_pp(&in_dg(2), &[h1.scale_int(&BigInt::from(2))], &zz()).unwrap());
        // x = h1 does not
        assert!(!eval_pp(&in_dg(2), &[h1.clone()], &zz()).unwrap());
        // x = h1 + 3 h2 fails "x in 3G" on the h1 coordinate
        let x = h1.add(&h2.scale_int(&BigInt::from(3)));
        assert!(!eval_pp(&in_dg(3), &[x], &zz()).unwrap());
    }

    #[test]
    fn eval_pp_brute_force_agreement() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(31);
        for _ in 0..150 {
            let rows = rng.gen_range(1..=2);
            let m = rng.gen_range(0..=2usize);
            let a = IntMatrix::from_rows(
                (0..rows).map(|_| vec![BigInt::from(rng.gen_range(-3..=3i64))]).collect(),
            );
            let b = if m == 0 {
                IntMatrix::zero(rows, 0)
            } else {
                IntMatrix::from_rows(
                    (0..rows)
                        .map(|_| (0..m).map(|_| BigInt::from(rng.gen_range(-3..=3i64))).collect())
                        .collect(),
                )
            };
            let pp = PPConstraint::new(a.clone(), b.clone(), vec![BigInt::zero(); rows]).unwrap();
            let x = GVector::from_coeffs([
                (1, rat_int(rng.gen_range(-3..=3))),
                (2, rat_int(rng.gen_range(-3..=3))),
            ]);
            let fast = eval_pp(&pp, &[x.clone()], &zz()).unwrap();
            // brute force per coordinate over a complete box
            let mut slow = true;
            for g in [1u64, 2] {
                let target: Vec<BigInt> = (0..rows)
                    .map(|i| (x.coeff(g) * Rat::from(a[(i, 0)].clone())).to_integer())
                    .map(|t| -t)
                    .collect();
                let mut found = m == 0 && target.iter().all(|t| t.is_zero());
                if m > 0 {
                    'outer: for y0 in -60i64..=60 {
                        for y1 in -(60 * (m as i64 - 1))..=(60 * (m as i64 - 1)).max(0) {
                            let y = if m == 1 {
                                vec![BigInt::from(y0)]
                            } else {
                                vec![BigInt::from(y0), BigInt::from(y1)]
                            };
                            if b.mul_vec(&y) == target {
                                found = true;
                                break 'outer;
                            }
                        }
                    }
                }
                if !found {
                    slow = false;
                    break;
                }
            }
            assert_eq!(fast, slow, "pp {pp:?} on {x:?}");
        }
    }

    #[test]
    fn solution_set_parity_empty() {
        // 2x = h1 has no solution
        let inst = PPInstance::new(
            dx_eq_anchor(2),
            vec![PPArg::Var, PPArg::Param(GVector::generator(1))],
        )
        .unwrap();
        assert_eq!(pp_solution_set(&inst, &zz()).unwrap(), PPSolutions::Empty);
    }

    #[test]
    fn solution_set_coset() {
        // x in h1 + 2G fixes every coordinate mod 2
        let inst = PPInstance::new(
            in_coset_dg(2),
            vec![PPArg::Var, PPArg::Param(GVector::generator(1))],
        )
        .unwrap();
        match pp_solution_set(&inst, &zz()).unwrap() {
            PPSolutions::Set(s) => {
                assert_eq!(s.modulus, BigInt::from(2));
                assert_eq!(s.residues[&1], rat_int(1));
                assert!(!s.free_directions());
                // cross-check membership against evaluation on candidates
                for k in -10i64..=10 {
                    for g in [1u64, 5] {
                        let cand = GVector::from_coeffs([(g, rat_int(k))]);
                        let direct = eval_pp(
                            &in_coset_dg(2),
                            &[cand.clone(), GVector::generator(1)],
                            &zz(),
                        )
                        .unwrap();
                        assert_eq!(s.member(&cand, &zz()), direct, "k={k} g={g}");
                    }
                }
            }
            PPSolutions::Empty => panic!("expected a nonempty set"),
        }
    }

    #[test]
    fn solution_set_closed_instance_full_space() {
        // "0 in G" with no variable slot: the full space
        let pp = PPConstraint::new(
            IntMatrix::zero(1, 0),
            IntMatrix::from_i64(&[&[1]]),
            vec![BigInt::zero()],
        )
        .unwrap();
        let inst = PPInstance::new(pp, vec![]).unwrap();
        assert_eq!(
            pp_solution_set(&inst, &zz()).unwrap(),
            PPSolutions::Set(PPSolutionSet::full())
        );
    }

    #[test]
    fn sat_constraints_examples() {
        let h1 = GVector::generator(1);
        // pos { x in h1 + 2G, x in 4G } is unsatisfiable: odd and 0 mod 4
        let pos = vec![
            PPInstance::new(in_coset_dg(2), vec![PPArg::Var, PPArg::Param(h1.clone())]).unwrap(),
            PPInstance::new(in_dg(4), vec![PPArg::Var]).unwrap(),
        ];
        assert_eq!(sat_constraints(&pos, &[], &zz(), 99).unwrap(), SatOutcome::Unsat);

        // pos { x in 2G }, neg { x in 4G }: witness 2 * fresh
        let pos = vec![PPInstance::new(in_dg(2), vec![PPArg::Var]).unwrap()];
        let neg = vec![PPInstance::new(in_dg(4), vec![PPArg::Var]).unwrap()];
        match sat_constraints(&pos, &neg, &zz(), 99).unwrap() {
            SatOutcome::Sat(w) => {
                assert_eq!(w, GVector::generator(99).scale_int(&BigInt::from(2)));
                assert!(eval_pp(&in_dg(2), &[w.clone()], &zz()).unwrap());
                assert!(!eval_pp(&in_dg(4), &[w], &zz()).unwrap());
            }
            SatOutcome::Unsat => panic!("expected satisfiable"),
        }

        // no constraints at all: witness 0
        assert_eq!(
            sat_constraints(&[], &[], &zz(), 99).unwrap(),
            SatOutcome::Sat(GVector::zero())
        );
    }

    #[test]
    fn sat_constraints_brute_force_confirmation() {
        // the unsat example is confirmed by searching coefficients in [-8, 8]
        let h1 = GVector::generator(1);
        for c_h1 in -8i64..=8 {
            for c_f in -8i64..=8 {
                let x = GVector::from_coeffs([(1, rat_int(c_h1)), (7, rat_int(c_f))]);
                let in_coset =
                    eval_pp(&in_coset_dg(2), &[x.clone(), h1.clone()], &zz()).unwrap();
                let in_4g = eval_pp(&in_dg(4), &[x.clone()], &zz()).unwrap();
                assert!(!(in_coset && in_4g), "x = {x:?} satisfies both");
            }
        }
    }

    #[test]
    fn sat_constraints_fuzz_against_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(61);
        let ring = zz();
        for _ in 0..200 {
            // random pos/neg coset constraints over parameters on two
            // generators
            let mut mk = |rng: &mut rand::rngs::StdRng| -> PPInstance {
                let d = rng.gen_range(0..=4i64);
                let anchor_coeff = rng.gen_range(0..=1i64);
                let constraint = PPConstraint::new(
                    IntMatrix::from_i64(&[&[rng.gen_range(1..=2i64)]]),
                    if d == 0 { IntMatrix::zero(1, 0) } else { IntMatrix::from_i64(&[&[-d]]) },
                    vec![BigInt::from(anchor_coeff)],
                )
                .unwrap();
                let mut args = vec![PPArg::Var];
                if anchor_coeff != 0 {
                    let param = GVector::from_coeffs([
                        (1, rat_int(rng.gen_range(-2..=2))),
                        (2, rat_int(rng.gen_range(-2..=2))),
                    ]);
                    args.push(PPArg::Param(param));
                }
                PPInstance::new(constraint, args).unwrap()
            };
            let pos: Vec<PPInstance> = (0..rng.gen_range(0..=2)).map(|_| mk(&mut rng)).collect();
            let neg: Vec<PPInstance> = (0..rng.gen_range(0..=2)).map(|_| mk(&mut rng)).collect();
            let eval_inst = |inst: &PPInstance, x: &GVector| -> bool {
                let concrete: Vec<GVector> = inst
                    .args
                    .iter()
                    .map(|a| match a {
                        PPArg::Var => x.clone(),
                        PPArg::Param(p) => p.clone(),
                    })
                    .collect();
                eval_pp(&inst.constraint, &concrete, &ring).unwrap()
            };
            match sat_constraints(&pos, &neg, &ring, 77).unwrap() {
                SatOutcome::Sat(w) => {
                    assert!(pos.iter().all(|p| eval_inst(p, &w)), "positive check");
                    assert!(neg.iter().all(|n| !eval_inst(n, &w)), "negative check");
                }
                SatOutcome::Unsat => {
                    // brute force over a box on the parameter support plus
                    // one fresh generator
                    for c1 in -6i64..=6 {
                        for c2 in -6i64..=6 {
                            for cf in -6i64..=6 {
                                let x = GVector::from_coeffs([
                                    (1, rat_int(c1)),
                                    (2, rat_int(c2)),
                                    (77, rat_int(cf)),
                                ]);
                                let ok = pos.iter().all(|p| eval_inst(p, &x))
                                    && neg.iter().all(|n| !eval_inst(n, &x));
                                assert!(!ok, "missed witness at ({c1}, {c2}, {cf})");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pp_sentences() {
        // [G : 2G] >= 2 over Z: infinite index, so true
        let g_full = in_dg(1);
        let s = PPSentence::Index { num: g_full.clone(), den: in_dg(2), at_least: 2 };
        assert!(decide_pp_sentence(&s, &zz()).unwrap());
        // with 2 inverted, 2 is a unit and 2G = G
        let z2 = RingSpec::localization([2]).unwrap();
        let s = PPSentence::Index { num: g_full.clone(), den: in_dg(2), at_least: 2 };
        assert!(!decide_pp_sentence(&s, &z2).unwrap());
        // exists y (0 = 2y): closed homogeneous sentence, true
        let closed = PPConstraint::new(
            IntMatrix::zero(1, 0),
            IntMatrix::from_i64(&[&[2]]),
            vec![BigInt::zero()],
        )
        .unwrap();
        assert!(decide_pp_sentence(&PPSentence::Closed(closed), &zz()).unwrap());
        // [psi : psi] >= 2 is false for every psi
        for d in [1i64, 2, 3, 6] {
            let s = PPSentence::Index { num: in_dg(d), den: in_dg(d), at_least: 2 };
            assert!(!decide_pp_sentence(&s, &zz()).unwrap());
        }
    }

    #[test]
    fn canonical_types_distinguish_divisibility() {
        let ring = zz();
        let h1 = GVector::generator(1);
        let h2 = GVector::generator(2);
        let t_h1 = canonical_pp_type(&[h1.clone()], &ring, Some(BigInt::from(2))).unwrap();
        let t_h2 = canonical_pp_type(&[h2.clone()], &ring, Some(BigInt::from(2))).unwrap();
        assert_eq!(t_h1, t_h2); // generator symmetry
        let t_2h1 = canonical_pp_type(
            &[h1.scale_int(&BigInt::from(2))],
            &ring,
            Some(BigInt::from(2)),
        )
        .unwrap();
        assert_ne!(t_h1, t_2h1); // divisibility by 2 differs
        // zero tuple: relation lattice is everything
        let t_zero = canonical_pp_type(&[GVector::zero()], &ring, Some(BigInt::one())).unwrap();
        assert_eq!(t_zero.relation_lattice, IntMatrix::from_i64(&[&[1]]));
    }

    #[test]
    fn canonical_type_invariant_under_permutation() {
        let ring = zz();
        // tuple over generators (1, 2) versus the same shape over (5, 3)
        let a = vec![
            GVector::from_coeffs([(1, rat_int(2)), (2, rat_int(1))]),
            GVector::from_coeffs([(2, rat_int(3))]),
        ];
        let b = vec![
            GVector::from_coeffs([(5, rat_int(2)), (3, rat_int(1))]),
            GVector::from_coeffs([(3, rat_int(3))]),
        ];
        let bound = default_pp_bound(&a, &ring).unwrap();
        let ta = canonical_pp_type(&a, &ring, Some(bound.clone())).unwrap();
        let tb = canonical_pp_type(&b, &ring, Some(bound)).unwrap();
        assert_eq!(ta, tb);
    }

    #[test]
    fn localized_ring_solution_sets() {
        let z2 = RingSpec::localization([2]).unwrap();
        // over Z with 2 inverted, "x in 2G" is the whole module
        let inst = PPInstance::new(in_dg(2), vec![PPArg::Var]).unwrap();
        match pp_solution_set(&inst, &z2).unwrap() {
            PPSolutions::Set(s) => {
                assert!(s.free_directions());
                assert!(s.member(&GVector::from_coeffs([(1, rat(1, 2))]), &z2));
            }
            PPSolutions::Empty => panic!(),
        }
        // "x in 6G" collapses to "x in 3G"
        let inst = PPInstance::new(in_dg(6), vec![PPArg::Var]).unwrap();
        match pp_solution_set(&inst, &z2).unwrap() {
            PPSolutions::Set(s) => assert_eq!(s.modulus, BigInt::from(3)),
            PPSolutions::Empty => panic!(),
        }
    }
}
