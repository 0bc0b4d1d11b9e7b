//! Abstract syntax for terms and formulas of the expanded language: linear
//! combinations, decomposition functions `f[lams; i]`, membership predicates
//! `G(...)` and `Gl[lams](...)`, positive-primitive module constraints, and
//! the boolean/quantifier layer, together with structural transformations
//! (substitution, free variables, negation and disjunctive normal forms).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;
use crate::scalar::{fmt_rat, is_rhat_independent, FieldElem, Rat};

/// Clause cap for the naive DNF expansion.
pub const MAX_DNF_CLAUSES: usize = 10_000;

// ---------------------------------------------------------------------------
// terms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TermExpr {
    Var(String),
    /// A named constant bound by a model snapshot; parsing never produces
    /// these, they enter through bindings and witness substitution.
    Const(String),
    Zero,
    Scale(FieldElem, Box<TermExpr>),
    Sum(Box<TermExpr>, Box<TermExpr>),
    FApp {
        lams: Vec<FieldElem>,
        /// 1-based coordinate index into `lams`.
        index: usize,
        arg: Box<TermExpr>,
    },
}

impl TermExpr {
    pub fn var(name: impl Into<String>) -> TermExpr {
        TermExpr::Var(name.into())
    }

    /// Normalizing sum: drops zero operands.
    pub fn sum(a: TermExpr, b: TermExpr) -> TermExpr {
        match (a, b) {
            (TermExpr::Zero, t) => t,
            (t, TermExpr::Zero) => t,
            (a, b) => TermExpr::Sum(Box::new(a), Box::new(b)),
        }
    }

    pub fn sum_all(terms: impl IntoIterator<Item = TermExpr>) -> TermExpr {
        let mut acc = TermExpr::Zero;
        for t in terms {
            acc = TermExpr::sum(acc, t);
        }
        acc
    }

    /// Normalizing scalar multiple: merges nested scales, absorbs 0 and 1.
    pub fn scale(lam: FieldElem, t: TermExpr) -> TermExpr {
        if lam.is_zero() {
            return TermExpr::Zero;
        }
        match t {
            TermExpr::Zero => TermExpr::Zero,
            TermExpr::Scale(mu, inner) => {
                let prod = lam.mul(&mu);
                TermExpr::scale(prod, *inner)
            }
            other => {
                if lam.is_one() {
                    other
                } else {
                    TermExpr::Scale(lam, Box::new(other))
                }
            }
        }
    }

    pub fn neg(t: TermExpr, one: &FieldElem) -> TermExpr {
        TermExpr::scale(one.neg(), t)
    }

    /// Decomposition function application; the scalar tuple must be
    /// independent over the fraction field.
    pub fn fapp(lams: Vec<FieldElem>, index: usize, arg: TermExpr) -> Result<TermExpr> {
        if lams.is_empty() || !is_rhat_independent(&lams) {
            return Err(Error::DependentTuple(
                lams.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", "),
            ));
        }
        if index == 0 || index > lams.len() {
            return Err(Error::Config(format!(
                "f index {index} out of range 1..={}",
                lams.len()
            )));
        }
        Ok(TermExpr::FApp { lams, index, arg: Box::new(arg) })
    }

    pub fn free_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            TermExpr::Var(v) => {
                out.insert(v.clone());
            }
            TermExpr::Const(_) | TermExpr::Zero => {}
            TermExpr::Scale(_, t) => t.free_vars(out),
            TermExpr::Sum(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            TermExpr::FApp { arg, .. } => arg.free_vars(out),
        }
    }

    pub fn consts(&self, out: &mut BTreeSet<String>) {
        match self {
            TermExpr::Const(c) => {
                out.insert(c.clone());
            }
            TermExpr::Var(_) | TermExpr::Zero => {}
            TermExpr::Scale(_, t) => t.consts(out),
            TermExpr::Sum(a, b) => {
                a.consts(out);
                b.consts(out);
            }
            TermExpr::FApp { arg, .. } => arg.consts(out),
        }
    }

    pub fn substitute(&self, var: &str, replacement: &TermExpr) -> TermExpr {
        match self {
            TermExpr::Var(v) if v == var => replacement.clone(),
            TermExpr::Var(_) | TermExpr::Const(_) | TermExpr::Zero => self.clone(),
            TermExpr::Scale(l, t) => TermExpr::scale(l.clone(), t.substitute(var, replacement)),
            TermExpr::Sum(a, b) => {
                TermExpr::sum(a.substitute(var, replacement), b.substitute(var, replacement))
            }
            TermExpr::FApp { lams, index, arg } => TermExpr::FApp {
                lams: lams.clone(),
                index: *index,
                arg: Box::new(arg.substitute(var, replacement)),
            },
        }
    }

    pub fn mentions(&self, var: &str) -> bool {
        let mut fv = BTreeSet::new();
        self.free_vars(&mut fv);
        fv.contains(var)
    }
}

/// A syntactically distinct decomposition-function atom inside a term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FAtom {
    pub lams: Vec<FieldElem>,
    pub index: usize,
    pub arg: TermExpr,
}

impl FAtom {
    pub fn to_term(&self) -> TermExpr {
        TermExpr::FApp {
            lams: self.lams.clone(),
            index: self.index,
            arg: Box::new(self.arg.clone()),
        }
    }
}

/// A term flattened into coefficients on variables, constants and f-atoms.
#[derive(Debug, Clone)]
pub struct LinearForm {
    pub var_coeffs: BTreeMap<String, FieldElem>,
    pub const_coeffs: BTreeMap<String, FieldElem>,
    pub fapp_terms: Vec<(FieldElem, FAtom)>,
}

impl LinearForm {
    pub fn new() -> LinearForm {
        LinearForm {
            var_coeffs: BTreeMap::new(),
            const_coeffs: BTreeMap::new(),
            fapp_terms: Vec::new(),
        }
    }

    pub fn of(term: &TermExpr, one: &FieldElem) -> LinearForm {
        let mut lf = LinearForm::new();
        lf.accumulate(term, one);
        lf.prune();
        lf
    }

    fn accumulate(&mut self, term: &TermExpr, mult: &FieldElem) {
        match term {
            TermExpr::Zero => {}
            TermExpr::Var(v) => {
                let e = self
                    .var_coeffs
                    .entry(v.clone())
                    .or_insert_with(|| FieldElem::zero(mult.spec()));
                *e = e.add(mult);
            }
            TermExpr::Const(c) => {
                let e = self
                    .const_coeffs
                    .entry(c.clone())
                    .or_insert_with(|| FieldElem::zero(mult.spec()));
                *e = e.add(mult);
            }
            TermExpr::Scale(l, t) => self.accumulate(t, &mult.mul(l)),
            TermExpr::Sum(a, b) => {
                self.accumulate(a, mult);
                self.accumulate(b, mult);
            }
            TermExpr::FApp { lams, index, arg } => {
                let atom = FAtom { lams: lams.clone(), index: *index, arg: (**arg).clone() };
                if let Some(slot) = self.fapp_terms.iter_mut().find(|(_, a)| *a == atom) {
                    slot.0 = slot.0.add(mult);
                } else {
                    self.fapp_terms.push((mult.clone(), atom));
                }
            }
        }
    }

    fn prune(&mut self) {
        self.var_coeffs.retain(|_, c| !c.is_zero());
        self.const_coeffs.retain(|_, c| !c.is_zero());
        self.fapp_terms.retain(|(c, _)| !c.is_zero());
    }

    pub fn coeff_of_var(&self, v: &str) -> Option<&FieldElem> {
        self.var_coeffs.get(v)
    }

    pub fn has_fapp_mentioning(&self, v: &str) -> bool {
        self.fapp_terms.iter().any(|(_, a)| a.arg.mentions(v))
    }

    /// Rebuild a term in a canonical order: variables, constants, f-atoms.
    pub fn to_term(&self) -> TermExpr {
        let mut parts = Vec::new();
        for (v, c) in &self.var_coeffs {
            parts.push(TermExpr::scale(c.clone(), TermExpr::Var(v.clone())));
        }
        for (k, c) in &self.const_coeffs {
            parts.push(TermExpr::scale(c.clone(), TermExpr::Const(k.clone())));
        }
        for (c, a) in &self.fapp_terms {
            parts.push(TermExpr::scale(c.clone(), a.to_term()));
        }
        TermExpr::sum_all(parts)
    }

    /// Everything except the named variable, as a term.
    pub fn without_var(&self, v: &str) -> LinearForm {
        let mut lf = self.clone();
        lf.var_coeffs.remove(v);
        lf
    }

    pub fn is_constant_zero(&self) -> bool {
        self.var_coeffs.is_empty() && self.const_coeffs.is_empty() && self.fapp_terms.is_empty()
    }
}

// ---------------------------------------------------------------------------
// positive-primitive constraints
// ---------------------------------------------------------------------------

/// A positive-primitive module condition with integer matrices:
///
/// `exists y in G^m :  A * args + B * y = c * anchor`
///
/// where `A` is n x k over the first k argument slots and `c` is a length-n
/// coefficient column on one designated trailing anchor argument; when `c`
/// is zero no anchor slot exists and the right-hand side is 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PPConstraint {
    pub var_mat: IntMatrix,
    pub exist_mat: IntMatrix,
    pub rhs: Vec<BigInt>,
}

impl PPConstraint {
    pub fn new(var_mat: IntMatrix, exist_mat: IntMatrix, rhs: Vec<BigInt>) -> Result<PPConstraint> {
        if exist_mat.rows != var_mat.rows || rhs.len() != var_mat.rows {
            return Err(Error::DimensionMismatch(
                "pp constraint rows must agree across A, B and c".into(),
            ));
        }
        Ok(PPConstraint { var_mat, exist_mat, rhs })
    }

    /// Build from rational rows by clearing denominators row by row.
    pub fn from_rational(
        var_rows: &[Vec<Rat>],
        exist_rows: &[Vec<Rat>],
        rhs: &[Rat],
    ) -> Result<PPConstraint> {
        let n = var_rows.len();
        if exist_rows.len() != n || rhs.len() != n {
            return Err(Error::DimensionMismatch("pp row count mismatch".into()));
        }
        let k = var_rows.first().map_or(0, |r| r.len());
        let m = exist_rows.first().map_or(0, |r| r.len());
        let mut a = IntMatrix::zero(n, k);
        let mut b = IntMatrix::zero(n, m);
        let mut c = vec![BigInt::zero(); n];
        for i in 0..n {
            let mut lcm = BigInt::one();
            for q in var_rows[i].iter().chain(exist_rows[i].iter()).chain([&rhs[i]]) {
                lcm = lcm.lcm(q.denom());
            }
            let lcm_rat = Rat::from(lcm);
            for (j, q) in var_rows[i].iter().enumerate() {
                a[(i, j)] = (q * &lcm_rat).to_integer();
            }
            for (j, q) in exist_rows[i].iter().enumerate() {
                b[(i, j)] = (q * &lcm_rat).to_integer();
            }
            c[i] = (&rhs[i] * &lcm_rat).to_integer();
        }
        PPConstraint::new(a, b, c)
    }

    pub fn has_anchor(&self) -> bool {
        self.rhs.iter().any(|x| !x.is_zero())
    }

    pub fn arity(&self) -> usize {
        self.var_mat.cols + usize::from(self.has_anchor())
    }

    pub fn rows(&self) -> usize {
        self.var_mat.rows
    }
}

// ---------------------------------------------------------------------------
// atoms and formulas
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomExpr {
    Eq(TermExpr, TermExpr),
    /// Strict order; only valid in ordered configurations.
    Lt(TermExpr, TermExpr),
    InG(TermExpr),
    InGLambda { lams: Vec<FieldElem>, term: TermExpr },
    PP { constraint: PPConstraint, args: Vec<TermExpr> },
}

impl AtomExpr {
    pub fn in_g_lambda(lams: Vec<FieldElem>, term: TermExpr) -> Result<AtomExpr> {
        if lams.is_empty() || !is_rhat_independent(&lams) {
            return Err(Error::DependentTuple(
                lams.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", "),
            ));
        }
        Ok(AtomExpr::InGLambda { lams, term })
    }

    pub fn pp(constraint: PPConstraint, args: Vec<TermExpr>) -> Result<AtomExpr> {
        if constraint.arity() != args.len() {
            return Err(Error::ArityMismatch { expected: constraint.arity(), got: args.len() });
        }
        Ok(AtomExpr::PP { constraint, args })
    }

    pub fn terms(&self) -> Vec<&TermExpr> {
        match self {
            AtomExpr::Eq(a, b) | AtomExpr::Lt(a, b) => vec![a, b],
            AtomExpr::InG(t) | AtomExpr::InGLambda { term: t, .. } => vec![t],
            AtomExpr::PP { args, .. } => args.iter().collect(),
        }
    }

    pub fn map_terms(&self, f: &mut impl FnMut(&TermExpr) -> TermExpr) -> AtomExpr {
        match self {
            AtomExpr::Eq(a, b) => AtomExpr::Eq(f(a), f(b)),
            AtomExpr::Lt(a, b) => AtomExpr::Lt(f(a), f(b)),
            AtomExpr::InG(t) => AtomExpr::InG(f(t)),
            AtomExpr::InGLambda { lams, term } => {
                AtomExpr::InGLambda { lams: lams.clone(), term: f(term) }
            }
            AtomExpr::PP { constraint, args } => AtomExpr::PP {
                constraint: constraint.clone(),
                args: args.iter().map(|t| f(t)).collect(),
            },
        }
    }

    pub fn mentions(&self, var: &str) -> bool {
        self.terms().iter().any(|t| t.mentions(var))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormulaExpr {
    True,
    False,
    Atom(AtomExpr),
    Not(Box<FormulaExpr>),
    And(Box<FormulaExpr>, Box<FormulaExpr>),
    Or(Box<FormulaExpr>, Box<FormulaExpr>),
    Exists(String, Box<FormulaExpr>),
    Forall(String, Box<FormulaExpr>),
}

/// A literal: an atom with a polarity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal {
    pub positive: bool,
    pub atom: AtomExpr,
}

impl Literal {
    pub fn pos(atom: AtomExpr) -> Literal {
        Literal { positive: true, atom }
    }
    pub fn neg(atom: AtomExpr) -> Literal {
        Literal { positive: false, atom }
    }
    pub fn to_formula(&self) -> FormulaExpr {
        let a = FormulaExpr::Atom(self.atom.clone());
        if self.positive {
            a
        } else {
            FormulaExpr::not(a)
        }
    }
}

impl FormulaExpr {
    pub fn atom(a: AtomExpr) -> FormulaExpr {
        FormulaExpr::Atom(a)
    }

    pub fn not(f: FormulaExpr) -> FormulaExpr {
        match f {
            FormulaExpr::True => FormulaExpr::False,
            FormulaExpr::False => FormulaExpr::True,
            FormulaExpr::Not(inner) => *inner,
            other => FormulaExpr::Not(Box::new(other)),
        }
    }

    pub fn and(a: FormulaExpr, b: FormulaExpr) -> FormulaExpr {
        match (a, b) {
            (FormulaExpr::False, _) | (_, FormulaExpr::False) => FormulaExpr::False,
            (FormulaExpr::True, f) => f,
            (f, FormulaExpr::True) => f,
            (a, b) => FormulaExpr::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: FormulaExpr, b: FormulaExpr) -> FormulaExpr {
        match (a, b) {
            (FormulaExpr::True, _) | (_, FormulaExpr::True) => FormulaExpr::True,
            (FormulaExpr::False, f) => f,
            (f, FormulaExpr::False) => f,
            (a, b) => FormulaExpr::Or(Box::new(a), Box::new(b)),
        }
    }

    pub fn implies(a: FormulaExpr, b: FormulaExpr) -> FormulaExpr {
        FormulaExpr::or(FormulaExpr::not(a), b)
    }

    pub fn and_all(fs: impl IntoIterator<Item = FormulaExpr>) -> FormulaExpr {
        let mut acc = FormulaExpr::True;
        for f in fs {
            acc = FormulaExpr::and(acc, f);
        }
        acc
    }

    pub fn or_all(fs: impl IntoIterator<Item = FormulaExpr>) -> FormulaExpr {
        let mut acc = FormulaExpr::False;
        for f in fs {
            acc = FormulaExpr::or(acc, f);
        }
        acc
    }

    pub fn exists(var: impl Into<String>, body: FormulaExpr) -> FormulaExpr {
        FormulaExpr::Exists(var.into(), Box::new(body))
    }

    pub fn forall(var: impl Into<String>, body: FormulaExpr) -> FormulaExpr {
        FormulaExpr::Forall(var.into(), Box::new(body))
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            FormulaExpr::True | FormulaExpr::False | FormulaExpr::Atom(_) => true,
            FormulaExpr::Not(f) => f.is_quantifier_free(),
            FormulaExpr::And(a, b) | FormulaExpr::Or(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            FormulaExpr::Exists(..) | FormulaExpr::Forall(..) => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out, &mut BTreeSet::new());
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>, bound: &mut BTreeSet<String>) {
        match self {
            FormulaExpr::True | FormulaExpr::False => {}
            FormulaExpr::Atom(a) => {
                let mut fv = BTreeSet::new();
                for t in a.terms() {
                    t.free_vars(&mut fv);
                }
                for v in fv {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            FormulaExpr::Not(f) => f.collect_free(out, bound),
            FormulaExpr::And(a, b) | FormulaExpr::Or(a, b) => {
                a.collect_free(out, bound);
                b.collect_free(out, bound);
            }
            FormulaExpr::Exists(v, f) | FormulaExpr::Forall(v, f) => {
                let fresh = bound.insert(v.clone());
                f.collect_free(out, bound);
                if fresh {
                    bound.remove(v);
                }
            }
        }
    }

    pub fn consts(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk_atoms(&mut |a| {
            for t in a.terms() {
                t.consts(&mut out);
            }
        });
        out
    }

    pub fn walk_atoms(&self, f: &mut impl FnMut(&AtomExpr)) {
        match self {
            FormulaExpr::True | FormulaExpr::False => {}
            FormulaExpr::Atom(a) => f(a),
            FormulaExpr::Not(x) => x.walk_atoms(f),
            FormulaExpr::And(a, b) | FormulaExpr::Or(a, b) => {
                a.walk_atoms(f);
                b.walk_atoms(f);
            }
            FormulaExpr::Exists(_, x) | FormulaExpr::Forall(_, x) => x.walk_atoms(f),
        }
    }

    /// Capture-avoiding substitution of a term for a free variable.
    pub fn substitute(&self, var: &str, replacement: &TermExpr) -> FormulaExpr {
        let mut repl_vars = BTreeSet::new();
        replacement.free_vars(&mut repl_vars);
        self.subst_inner(var, replacement, &repl_vars)
    }

    fn subst_inner(
        &self,
        var: &str,
        replacement: &TermExpr,
        repl_vars: &BTreeSet<String>,
    ) -> FormulaExpr {
        match self {
            FormulaExpr::True | FormulaExpr::False => self.clone(),
            FormulaExpr::Atom(a) => {
                FormulaExpr::Atom(a.map_terms(&mut |t| t.substitute(var, replacement)))
            }
            FormulaExpr::Not(f) => {
                FormulaExpr::not(f.subst_inner(var, replacement, repl_vars))
            }
            FormulaExpr::And(a, b) => FormulaExpr::and(
                a.subst_inner(var, replacement, repl_vars),
                b.subst_inner(var, replacement, repl_vars),
            ),
            FormulaExpr::Or(a, b) => FormulaExpr::or(
                a.subst_inner(var, replacement, repl_vars),
                b.subst_inner(var, replacement, repl_vars),
            ),
            FormulaExpr::Exists(v, f) | FormulaExpr::Forall(v, f) => {
                let is_exists = matches!(self, FormulaExpr::Exists(..));
                if v == var {
                    return self.clone(); // shadowed
                }
                let (v2, body) = if repl_vars.contains(v) {
                    // rename the binder away from the replacement's variables
                    let mut used: BTreeSet<String> = repl_vars.clone();
                    used.extend(f.free_vars());
                    used.insert(var.to_string());
                    let fresh = fresh_name(v, &used);
                    let renamed = f.substitute(v, &TermExpr::Var(fresh.clone()));
                    (fresh, renamed)
                } else {
                    (v.clone(), (**f).clone())
                };
                let new_body = body.subst_inner(var, replacement, repl_vars);
                if is_exists {
                    FormulaExpr::exists(v2, new_body)
                } else {
                    FormulaExpr::forall(v2, new_body)
                }
            }
        }
    }

    /// Rename bound variables so that they are distinct from each other and
    /// from every free variable.
    pub fn alpha_normalize(&self) -> FormulaExpr {
        let mut used = self.free_vars();
        self.alpha_inner(&mut used)
    }

    fn alpha_inner(&self, used: &mut BTreeSet<String>) -> FormulaExpr {
        match self {
            FormulaExpr::True | FormulaExpr::False | FormulaExpr::Atom(_) => self.clone(),
            FormulaExpr::Not(f) => FormulaExpr::not(f.alpha_inner(used)),
            FormulaExpr::And(a, b) => {
                let x = a.alpha_inner(used);
                let y = b.alpha_inner(used);
                FormulaExpr::and(x, y)
            }
            FormulaExpr::Or(a, b) => {
                let x = a.alpha_inner(used);
                let y = b.alpha_inner(used);
                FormulaExpr::or(x, y)
            }
            FormulaExpr::Exists(v, f) | FormulaExpr::Forall(v, f) => {
                let is_exists = matches!(self, FormulaExpr::Exists(..));
                let (name, body) = if used.contains(v) {
                    let fresh = fresh_name(v, used);
                    used.insert(fresh.clone());
                    (fresh.clone(), f.substitute(v, &TermExpr::Var(fresh)))
                } else {
                    used.insert(v.clone());
                    (v.clone(), (**f).clone())
                };
                let inner = body.alpha_inner(used);
                if is_exists {
                    FormulaExpr::exists(name, inner)
                } else {
                    FormulaExpr::forall(name, inner)
                }
            }
        }
    }
}

pub fn fresh_name(base: &str, used: &BTreeSet<String>) -> String {
    let stem = base.split('_').next().unwrap_or(base);
    for k in 1usize.. {
        let cand = format!("{stem}_{k}");
        if !used.contains(&cand) {
            return cand;
        }
    }
    unreachable!()
}

// ---------------------------------------------------------------------------
// negation and disjunctive normal forms
// ---------------------------------------------------------------------------

/// Clauses of the disjunctive normal form of a quantifier-free formula.
pub fn dnf_clauses(f: &FormulaExpr) -> Result<Vec<Vec<Literal>>> {
    if !f.is_quantifier_free() {
        return Err(Error::QuantifierPresent);
    }
    let clauses = dnf_rec(f, true)?;
    Ok(clauses)
}

fn dnf_rec(f: &FormulaExpr, positive: bool) -> Result<Vec<Vec<Literal>>> {
    match (f, positive) {
        (FormulaExpr::True, true) | (FormulaExpr::False, false) => Ok(vec![Vec::new()]),
        (FormulaExpr::True, false) | (FormulaExpr::False, true) => Ok(Vec::new()),
        (FormulaExpr::Atom(a), pos) => Ok(vec![vec![Literal { positive: pos, atom: a.clone() }]]),
        (FormulaExpr::Not(g), pos) => dnf_rec(g, !pos),
        (FormulaExpr::And(a, b), true) | (FormulaExpr::Or(a, b), false) => {
            let left = dnf_rec(a, positive)?;
            let right = dnf_rec(b, positive)?;
            if left.len().saturating_mul(right.len()) > MAX_DNF_CLAUSES {
                return Err(Error::ResourceLimit("DNF clause cap exceeded".into()));
            }
            let mut out = Vec::new();
            for l in &left {
                for r in &right {
                    let mut clause = l.clone();
                    clause.extend(r.iter().cloned());
                    out.push(clause);
                }
            }
            Ok(out)
        }
        (FormulaExpr::Or(a, b), true) | (FormulaExpr::And(a, b), false) => {
            let mut out = dnf_rec(a, positive)?;
            out.extend(dnf_rec(b, positive)?);
            if out.len() > MAX_DNF_CLAUSES {
                return Err(Error::ResourceLimit("DNF clause cap exceeded".into()));
            }
            Ok(out)
        }
        (FormulaExpr::Exists(..), _) | (FormulaExpr::Forall(..), _) => {
            Err(Error::QuantifierPresent)
        }
    }
}

pub fn clauses_to_formula(clauses: &[Vec<Literal>]) -> FormulaExpr {
    FormulaExpr::or_all(
        clauses
            .iter()
            .map(|c| FormulaExpr::and_all(c.iter().map(|l| l.to_formula()))),
    )
}

/// Disjunctive normal form of a quantifier-free formula.
pub fn to_dnf(f: &FormulaExpr) -> Result<FormulaExpr> {
    Ok(clauses_to_formula(&dnf_clauses(f)?))
}

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

impl fmt::Display for FormulaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_formula(self, 0, f)
    }
}

// precedence: or = 1, and = 2, not = 3
fn fmt_formula(x: &FormulaExpr, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match x {
        FormulaExpr::True => write!(f, "true"),
        FormulaExpr::False => write!(f, "false"),
        FormulaExpr::Atom(a) => write!(f, "{a}"),
        FormulaExpr::Not(inner) => {
            write!(f, "~")?;
            match &**inner {
                FormulaExpr::Exists(..) | FormulaExpr::Forall(..) => {
                    write!(f, "(")?;
                    fmt_formula(inner, 0, f)?;
                    write!(f, ")")
                }
                // relational atoms read badly bare under a negation
                FormulaExpr::Atom(AtomExpr::Eq(..) | AtomExpr::Lt(..)) => {
                    write!(f, "(")?;
                    fmt_formula(inner, 0, f)?;
                    write!(f, ")")
                }
                _ => fmt_formula(inner, 3, f),
            }
        }
        FormulaExpr::And(a, b) => {
            let need = prec > 2;
            if need {
                write!(f, "(")?;
            }
            fmt_operand(a, 2, false, f)?;
            write!(f, " /\\ ")?;
            fmt_operand(b, 3, true, f)?;
            if need {
                write!(f, ")")?;
            }
            Ok(())
        }
        FormulaExpr::Or(a, b) => {
            let need = prec > 1;
            if need {
                write!(f, "(")?;
            }
            fmt_operand(a, 1, false, f)?;
            write!(f, " \\/ ")?;
            fmt_operand(b, 2, true, f)?;
            if need {
                write!(f, ")")?;
            }
            Ok(())
        }
        FormulaExpr::Exists(v, body) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            write!(f, "exists {v} . ")?;
            fmt_formula(body, 0, f)?;
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
        FormulaExpr::Forall(v, body) => {
            if prec > 0 {
                write!(f, "(")?;
            }
            write!(f, "forall {v} . ")?;
            fmt_formula(body, 0, f)?;
            if prec > 0 {
                write!(f, ")")?;
            }
            Ok(())
        }
    }
}

// binary operands: quantifiers on the left always need parens; on the right
// they extend maximally and need none
fn fmt_operand(x: &FormulaExpr, prec: u8, rightmost: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match x {
        FormulaExpr::Exists(..) | FormulaExpr::Forall(..) if rightmost => fmt_formula(x, 0, f),
        FormulaExpr::Exists(..) | FormulaExpr::Forall(..) => {
            write!(f, "(")?;
            fmt_formula(x, 0, f)?;
            write!(f, ")")
        }
        _ => fmt_formula(x, prec, f),
    }
}

impl fmt::Display for AtomExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AtomExpr::Eq(a, b) => write!(f, "{a} = {b}"),
            AtomExpr::Lt(a, b) => write!(f, "{a} < {b}"),
            AtomExpr::InG(t) => write!(f, "G({t})"),
            AtomExpr::InGLambda { lams, term } => {
                write!(f, "Gl[{}]({term})", scalar_list(lams))
            }
            AtomExpr::PP { constraint, args } => {
                write!(
                    f,
                    "pp{{{}|{}|{}}}({})",
                    int_matrix_str(&constraint.var_mat),
                    int_matrix_str(&constraint.exist_mat),
                    int_vec_str(&constraint.rhs),
                    args.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
                )
            }
        }
    }
}

fn scalar_list(lams: &[FieldElem]) -> String {
    lams.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ")
}

fn int_matrix_str(m: &IntMatrix) -> String {
    (0..m.rows)
        .map(|i| {
            (0..m.cols)
                .map(|j| m[(i, j)].to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(";")
}

fn int_vec_str(v: &[BigInt]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for TermExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_term(self, 0, f)
    }
}

// term precedence: sum = 1, scale/neg = 2, atoms = 3
fn fmt_term(t: &TermExpr, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match t {
        TermExpr::Zero => write!(f, "0"),
        TermExpr::Var(v) | TermExpr::Const(v) => write!(f, "{v}"),
        TermExpr::Sum(a, b) => {
            let need = prec > 1;
            if need {
                write!(f, "(")?;
            }
            fmt_term(a, 1, f)?;
            // print additive inverses as subtraction
            match &**b {
                TermExpr::Scale(l, inner) if syntactic_negative(l) => {
                    write!(f, " - ")?;
                    let flipped = TermExpr::scale(l.neg(), (**inner).clone());
                    fmt_term(&flipped, 2, f)?;
                }
                other => {
                    write!(f, " + ")?;
                    fmt_term(other, 2, f)?;
                }
            }
            if need {
                write!(f, ")")?;
            }
            Ok(())
        }
        TermExpr::Scale(l, inner) => {
            let need = prec > 2;
            if need {
                write!(f, "(")?;
            }
            if syntactic_negative(l) {
                write!(f, "-")?;
                let flipped = TermExpr::scale(l.neg(), (**inner).clone());
                fmt_term(&flipped, 2, f)?;
            } else {
                write!(f, "{}", scalar_factor(l))?;
                fmt_term(inner, 3, f)?;
            }
            if need {
                write!(f, ")")?;
            }
            Ok(())
        }
        TermExpr::FApp { lams, index, arg } => {
            write!(f, "f[{}; {index}]({arg})", scalar_list(lams))
        }
    }
}

/// First nonzero power-basis coordinate is negative.
fn syntactic_negative(l: &FieldElem) -> bool {
    l.coords()
        .iter()
        .find(|c| !c.is_zero())
        .map_or(false, |c| c.is_negative())
}

/// `lam * ...` prefix for a syntactically positive scalar.  Plain rationals
/// and pure powers of the generator print bare; composite scalars are
/// parenthesized.
fn scalar_factor(l: &FieldElem) -> String {
    let nz: Vec<usize> = l
        .coords()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, _)| i)
        .collect();
    if nz.len() == 1 {
        let k = nz[0];
        let c = &l.coords()[k];
        if k == 0 {
            return format!("{}*", fmt_rat(c));
        }
        let power = if k == 1 { "a".to_string() } else { format!("a^{k}") };
        if c.is_one() {
            return format!("{power}*");
        }
        return format!("{}*{}*", fmt_rat(c), power);
    }
    format!("({l})*")
}

// ---------------------------------------------------------------------------
// canonical JSON form
// ---------------------------------------------------------------------------

pub fn term_to_json(t: &TermExpr) -> serde_json::Value {
    use serde_json::json;
    match t {
        TermExpr::Zero => json!({"kind": "zero"}),
        TermExpr::Var(v) => json!({"kind": "var", "name": v}),
        TermExpr::Const(c) => json!({"kind": "const", "name": c}),
        TermExpr::Scale(l, inner) => {
            json!({"kind": "scale", "scalar": l.to_string(), "child": term_to_json(inner)})
        }
        TermExpr::Sum(a, b) => {
            json!({"kind": "sum", "children": [term_to_json(a), term_to_json(b)]})
        }
        TermExpr::FApp { lams, index, arg } => json!({
            "kind": "fapp",
            "scalars": lams.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            "index": index,
            "child": term_to_json(arg),
        }),
    }
}

pub fn atom_to_json(a: &AtomExpr) -> serde_json::Value {
    use serde_json::json;
    match a {
        AtomExpr::Eq(x, y) => json!({"kind": "eq", "children": [term_to_json(x), term_to_json(y)]}),
        AtomExpr::Lt(x, y) => json!({"kind": "lt", "children": [term_to_json(x), term_to_json(y)]}),
        AtomExpr::InG(t) => json!({"kind": "in_g", "child": term_to_json(t)}),
        AtomExpr::InGLambda { lams, term } => json!({
            "kind": "in_g_lambda",
            "scalars": lams.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            "child": term_to_json(term),
        }),
        AtomExpr::PP { constraint, args } => json!({
            "kind": "pp",
            "a": int_matrix_json(&constraint.var_mat),
            "b": int_matrix_json(&constraint.exist_mat),
            "c": constraint.rhs.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "args": args.iter().map(term_to_json).collect::<Vec<_>>(),
        }),
    }
}

fn int_matrix_json(m: &IntMatrix) -> serde_json::Value {
    serde_json::Value::Array(
        (0..m.rows)
            .map(|i| {
                serde_json::Value::Array(
                    (0..m.cols)
                        .map(|j| serde_json::Value::String(m[(i, j)].to_string()))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn formula_to_json(f: &FormulaExpr) -> serde_json::Value {
    use serde_json::json;
    match f {
        FormulaExpr::True => json!({"kind": "true"}),
        FormulaExpr::False => json!({"kind": "false"}),
        FormulaExpr::Atom(a) => json!({"kind": "atom", "atom": atom_to_json(a)}),
        FormulaExpr::Not(x) => json!({"kind": "not", "child": formula_to_json(x)}),
        FormulaExpr::And(a, b) => {
            json!({"kind": "and", "children": [formula_to_json(a), formula_to_json(b)]})
        }
        FormulaExpr::Or(a, b) => {
            json!({"kind": "or", "children": [formula_to_json(a), formula_to_json(b)]})
        }
        FormulaExpr::Exists(v, body) => {
            json!({"kind": "exists", "var": v, "child": formula_to_json(body)})
        }
        FormulaExpr::Forall(v, body) => {
            json!({"kind": "forall", "var": v, "child": formula_to_json(body)})
        }
    }
}
