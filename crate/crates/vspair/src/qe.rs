//! The quantifier-elimination engine, sentence decision, type equality,
//! small/large classification and witness construction.
//!
//! Elimination works clause by clause over the disjunctive normal form.
//! An equation pins the variable and substitutes it away; a positive
//! membership literal forces the witness into the span of G and the
//! parameters, so the variable is traded for fresh G-variables; a
//! G-classified variable is eliminated through the module layer (membership
//! and equation literals become positive-primitive conditions with
//! decomposition-function parameters, and the negative side is discharged
//! coset by coset, using the infinite index of strict pp subgroups to
//! escape along a fresh generator); a variable free of positive membership
//! constraints is witnessed outside the span of G by codensity, leaving only
//! the base-theory residue (trivial for pure vector spaces, an interval
//! condition after Fourier-Motzkin in ordered mode).

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{
    clauses_to_formula, dnf_clauses, AtomExpr, FormulaExpr, LinearForm, Literal, PPConstraint,
    TermExpr,
};
use crate::gmodule::{decide_pp_sentence, pp_var_modulus, PPSentence};
use crate::linalg::{snf, IntMatrix};
use crate::model::{ModelHandle, VElem};
// closure lives with the model arithmetic but belongs to this module's
// public surface as well
pub use crate::model::{closure, g_basis, g_independent, ClosedSet};
use crate::mordell::{moduleize_literal, normalize_term, Classification, ModTarget, VarClass};
use crate::scalar::{FieldElem, FieldSpec, Rat, RingSpec};

// ---------------------------------------------------------------------------
// engine configuration and trace
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct QeConfig {
    pub field: Arc<FieldSpec>,
    pub ring: RingSpec,
    pub max_clauses: usize,
}

impl QeConfig {
    pub fn new(field: Arc<FieldSpec>, ring: RingSpec) -> QeConfig {
        QeConfig { field, ring, max_clauses: 10_000 }
    }

    pub fn from_engine(cfg: &crate::config::EngineConfig) -> QeConfig {
        QeConfig {
            field: cfg.field.clone(),
            ring: cfg.ring.clone(),
            max_clauses: cfg.limits.max_clauses,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceStep {
    pub variable: String,
    pub branch: String,
    pub detail: String,
}

/// Audit record of an elimination run.  The final formula is stored in the
/// grammar's text form; replaying parses it back.
#[derive(Debug, Clone, Default, Serialize)]
pub struct EliminationTrace {
    pub steps: Vec<TraceStep>,
    pub output: String,
}

impl EliminationTrace {
    pub fn replay(&self, field: &Arc<FieldSpec>) -> Result<FormulaExpr> {
        crate::parse::parse_formula(&self.output, field)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("trace serializes")
    }
}

// ---------------------------------------------------------------------------
// the engine
// ---------------------------------------------------------------------------

pub struct QeEngine {
    cfg: QeConfig,
    one: FieldElem,
    classes: Classification,
    fresh: usize,
    trace: Vec<TraceStep>,
}

impl QeEngine {
    pub fn new(cfg: QeConfig) -> QeEngine {
        let one = FieldElem::one(&cfg.field);
        QeEngine { cfg, one, classes: Classification::new(), fresh: 0, trace: Vec::new() }
    }

    fn log(&mut self, variable: &str, branch: &str, detail: String) {
        self.trace.push(TraceStep {
            variable: variable.to_string(),
            branch: branch.to_string(),
            detail,
        });
    }

    fn fresh_var(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("_{prefix}{}", self.fresh)
    }

    /// Innermost-first elimination of every quantifier.
    pub fn eliminate(&mut self, f: &FormulaExpr) -> Result<FormulaExpr> {
        let out = self.elim_rec(f)?;
        Ok(normalize_qf(&out, &self.one, &self.cfg.ring))
    }

    fn elim_rec(&mut self, f: &FormulaExpr) -> Result<FormulaExpr> {
        match f {
            FormulaExpr::True | FormulaExpr::False | FormulaExpr::Atom(_) => Ok(f.clone()),
            FormulaExpr::Not(g) => Ok(FormulaExpr::not(self.elim_rec(g)?)),
            FormulaExpr::And(a, b) => {
                Ok(FormulaExpr::and(self.elim_rec(a)?, self.elim_rec(b)?))
            }
            FormulaExpr::Or(a, b) => Ok(FormulaExpr::or(self.elim_rec(a)?, self.elim_rec(b)?)),
            FormulaExpr::Exists(v, body) => {
                let inner = self.elim_rec(body)?;
                self.classes.insert(v.clone(), VarClass::Unknown);
                self.eliminate_exists(v, &inner)
            }
            FormulaExpr::Forall(v, body) => {
                let inner = self.elim_rec(body)?;
                self.classes.insert(v.clone(), VarClass::Unknown);
                let neg = FormulaExpr::not(inner);
                Ok(FormulaExpr::not(self.eliminate_exists(v, &neg)?))
            }
        }
    }

    /// Eliminate one existential over a quantifier-free body.
    fn eliminate_exists(&mut self, var: &str, body: &FormulaExpr) -> Result<FormulaExpr> {
        let clauses = self.preprocess(body)?;
        let mut parts = Vec::new();
        for clause in clauses {
            parts.push(self.eliminate_clause(var, clause)?);
        }
        Ok(FormulaExpr::or_all(parts))
    }

    /// DNF plus literal-level expansion: pp literals carry the membership of
    /// their arguments, and negated order atoms split into the mirrored
    /// strict atom and the equation.
    fn preprocess(&self, body: &FormulaExpr) -> Result<Vec<Vec<Literal>>> {
        let raw = dnf_clauses(body)?;
        let mut out = Vec::new();
        for clause in raw {
            let mut expanded = vec![Vec::new()];
            for lit in clause {
                let variants = self.expand_literal(&lit)?;
                let mut next = Vec::new();
                for base in &expanded {
                    for v in &variants {
                        let mut c: Vec<Literal> = base.clone();
                        c.extend(v.iter().cloned());
                        next.push(c);
                    }
                }
                if next.len() > self.cfg.max_clauses {
                    return Err(Error::ResourceLimit("clause expansion cap".into()));
                }
                expanded = next;
            }
            out.extend(expanded);
        }
        Ok(out)
    }

    fn expand_literal(&self, lit: &Literal) -> Result<Vec<Vec<Literal>>> {
        match (&lit.atom, lit.positive) {
            (AtomExpr::PP { args, .. }, true) => {
                let mut lits = vec![lit.clone()];
                for t in args {
                    lits.push(Literal::pos(AtomExpr::InG(t.clone())));
                }
                Ok(vec![lits])
            }
            (AtomExpr::PP { args, .. }, false) => {
                let mut variants: Vec<Vec<Literal>> = args
                    .iter()
                    .map(|t| vec![Literal::neg(AtomExpr::InG(t.clone()))])
                    .collect();
                let mut all_in = vec![lit.clone()];
                for t in args {
                    all_in.push(Literal::pos(AtomExpr::InG(t.clone())));
                }
                variants.push(all_in);
                Ok(variants)
            }
            (AtomExpr::Lt(a, b), false) => Ok(vec![
                vec![Literal::pos(AtomExpr::Lt(b.clone(), a.clone()))],
                vec![Literal::pos(AtomExpr::Eq(a.clone(), b.clone()))],
            ]),
            _ => Ok(vec![vec![lit.clone()]]),
        }
    }

    // ----- clause elimination ---------------------------------------------

    fn eliminate_clause(&mut self, var: &str, lits: Vec<Literal>) -> Result<FormulaExpr> {
        // simplify and flatten terms first; flattening may split the clause
        let mut flat_clauses = self.flatten_clause(lits)?;
        if flat_clauses.len() > 1 {
            let mut parts = Vec::new();
            for c in flat_clauses.drain(..) {
                parts.push(self.dispatch_clause(var, c)?);
            }
            return Ok(FormulaExpr::or_all(parts));
        }
        match flat_clauses.pop() {
            Some(c) => self.dispatch_clause(var, c),
            None => Ok(FormulaExpr::False),
        }
    }

    /// Normalize every term of every literal; guard splits multiply clauses.
    fn flatten_clause(&mut self, lits: Vec<Literal>) -> Result<Vec<Vec<Literal>>> {
        let mut clauses: Vec<Vec<Literal>> = vec![Vec::new()];
        for lit in lits {
            let cases = self.flatten_literal(&lit)?;
            let mut next = Vec::new();
            for base in &clauses {
                for (guards, new_lit) in &cases {
                    let mut c = base.clone();
                    c.extend(guards.iter().cloned());
                    c.push(new_lit.clone());
                    next.push(c);
                }
            }
            if next.len() > self.cfg.max_clauses {
                return Err(Error::ResourceLimit("flattening clause cap".into()));
            }
            clauses = next;
        }
        Ok(clauses)
    }

    fn flatten_literal(&self, lit: &Literal) -> Result<Vec<(Vec<Literal>, Literal)>> {
        let terms: Vec<TermExpr> = lit.atom.terms().into_iter().cloned().collect();
        let mut cases: Vec<(Vec<Literal>, Vec<TermExpr>)> = vec![(Vec::new(), Vec::new())];
        for t in &terms {
            let normalized = normalize_term(t, &self.classes, &self.one, &self.cfg.ring)?;
            let mut next = Vec::new();
            for (guards, done) in &cases {
                for case in &normalized.cases {
                    let mut g = guards.clone();
                    g.extend(case.guard.iter().cloned());
                    let mut d = done.clone();
                    d.push(case.term());
                    next.push((g, d));
                }
            }
            cases = next;
        }
        let mut out = Vec::new();
        for (guards, new_terms) in cases {
            let mut idx = 0usize;
            let rebuilt = lit.atom.map_terms(&mut |_| {
                let t = new_terms[idx].clone();
                idx += 1;
                t
            });
            out.push((guards, Literal { positive: lit.positive, atom: rebuilt }));
        }
        Ok(out)
    }

    fn dispatch_clause(&mut self, var: &str, lits: Vec<Literal>) -> Result<FormulaExpr> {
        // decided literals
        let mut clause = Vec::new();
        for lit in lits {
            match simplify_literal(&lit, &self.one, &self.cfg.ring) {
                SimplifiedLiteral::True => {}
                SimplifiedLiteral::False => return Ok(FormulaExpr::False),
                SimplifiedLiteral::Keep(l) => clause.push(l),
            }
        }
        // 1. an f-atom whose argument mentions the variable: split on its
        //    membership guard.  If the positive guard is already present the
        //    span branch below will substitute the variable away; a negative
        //    guard zeroes the atom outright.
        for atom in self.fatoms_with_var(&clause, var) {
            let guard = AtomExpr::in_g_lambda(atom.lams.clone(), atom.arg.clone())?;
            let pos_present = clause
                .iter()
                .any(|l| l.positive && l.atom == guard);
            let neg_present = clause
                .iter()
                .any(|l| !l.positive && l.atom == guard);
            if pos_present {
                continue;
            }
            if neg_present {
                let zeroed: Vec<Literal> = clause
                    .iter()
                    .map(|l| Literal {
                        positive: l.positive,
                        atom: l.atom.map_terms(&mut |t| replace_fatom(t, &atom, &TermExpr::Zero)),
                    })
                    .collect();
                self.log(var, "guard-zero", format!("function atom vanished outside {guard}"));
                return self.eliminate_clause(var, zeroed);
            }
            self.log(var, "guard-split", format!("on {guard}"));
            let mut pos_clause = clause.clone();
            pos_clause.push(Literal::pos(guard.clone()));
            let mut neg_clause: Vec<Literal> = clause
                .iter()
                .map(|l| Literal {
                    positive: l.positive,
                    atom: l.atom.map_terms(&mut |t| replace_fatom(t, &atom, &TermExpr::Zero)),
                })
                .collect();
            neg_clause.push(Literal::neg(guard));
            let a = self.eliminate_clause(var, pos_clause)?;
            let b = self.eliminate_clause(var, neg_clause)?;
            return Ok(FormulaExpr::or(a, b));
        }
        // 2. substitution: an equation pins the variable
        if let Some((idx, solved)) = self.find_substitution(&clause, var)? {
            self.log(var, "substitution", format!("{var} := {}", solved));
            let mut rest = clause;
            rest.remove(idx);
            let mut new_lits: Vec<Literal> = rest
                .iter()
                .map(|l| Literal {
                    positive: l.positive,
                    atom: l.atom.map_terms(&mut |t| t.substitute(var, &solved)),
                })
                .collect();
            if self.classes.get(var) == Some(&VarClass::InG) {
                new_lits.push(Literal::pos(AtomExpr::InG(solved.clone())));
            }
            return self.finish_varfree(new_lits);
        }
        let class = self.classes.get(var).copied().unwrap_or(VarClass::Unknown);
        // 3. a positive membership literal forces the witness into the span
        //    of G and the parameters
        if class == VarClass::Unknown {
            if let Some((idx, mus, alpha, rest)) = self.find_positive_membership(&clause, var) {
                let ys: Vec<String> = (0..mus.len()).map(|_| self.fresh_var("y")).collect();
                for y in &ys {
                    self.classes.insert(y.clone(), VarClass::InG);
                }
                self.log(
                    var,
                    "span-branch",
                    format!("witness shape over {} fresh G-variables", ys.len()),
                );
                let sum = TermExpr::sum_all(
                    mus.iter()
                        .zip(&ys)
                        .map(|(mu, y)| TermExpr::scale(mu.clone(), TermExpr::var(y.clone()))),
                );
                let solved = TermExpr::scale(
                    alpha.inv()?,
                    TermExpr::sum(sum, TermExpr::neg(rest, &self.one)),
                );
                let mut new_lits = clause;
                new_lits.remove(idx);
                let substituted: Vec<Literal> = new_lits
                    .iter()
                    .map(|l| Literal {
                        positive: l.positive,
                        atom: l.atom.map_terms(&mut |t| t.substitute(var, &solved)),
                    })
                    .collect();
                let mut formula = FormulaExpr::and_all(substituted.iter().map(|l| l.to_formula()));
                for y in ys.iter().rev() {
                    formula = self.eliminate_exists(y, &formula)?;
                }
                return Ok(formula);
            }
        }
        match class {
            VarClass::InG => self.eliminate_g_var(var, clause),
            _ => self.eliminate_generic(var, clause),
        }
    }

    /// When the remaining literals no longer mention any variable under
    /// elimination, assemble them into a conjunction.
    fn finish_varfree(&mut self, lits: Vec<Literal>) -> Result<FormulaExpr> {
        Ok(FormulaExpr::and_all(lits.iter().map(|l| l.to_formula())))
    }

    fn fatoms_with_var(&self, clause: &[Literal], var: &str) -> Vec<crate::formula::FAtom> {
        let mut out: Vec<crate::formula::FAtom> = Vec::new();
        for lit in clause {
            for term in lit.atom.terms() {
                let form = LinearForm::of(term, &self.one);
                for (_, atom) in &form.fapp_terms {
                    // the argument must genuinely depend on the variable
                    let arg_form = LinearForm::of(&atom.arg, &self.one);
                    let depends =
                        arg_form.coeff_of_var(var).map_or(false, |c| !c.is_zero());
                    if depends && !out.contains(atom) {
                        out.push(atom.clone());
                    }
                }
            }
        }
        out
    }

    fn find_substitution(
        &self,
        clause: &[Literal],
        var: &str,
    ) -> Result<Option<(usize, TermExpr)>> {
        for (i, lit) in clause.iter().enumerate() {
            if !lit.positive {
                continue;
            }
            let AtomExpr::Eq(a, b) = &lit.atom else { continue };
            let diff = TermExpr::sum(a.clone(), TermExpr::neg(b.clone(), &self.one));
            let form = LinearForm::of(&diff, &self.one);
            let Some(lam) = form.coeff_of_var(var) else { continue };
            if lam.is_zero() || form.has_fapp_mentioning(var) {
                continue;
            }
            let rest = form.without_var(var);
            let solved = TermExpr::scale(
                lam.inv()?.neg(),
                rest.to_term(),
            );
            return Ok(Some((i, solved)));
        }
        Ok(None)
    }

    fn find_positive_membership(
        &self,
        clause: &[Literal],
        var: &str,
    ) -> Option<(usize, Vec<FieldElem>, FieldElem, TermExpr)> {
        for (i, lit) in clause.iter().enumerate() {
            if !lit.positive {
                continue;
            }
            let (mus, term) = match &lit.atom {
                AtomExpr::InG(t) => (vec![self.one.clone()], t),
                AtomExpr::InGLambda { lams, term } => (lams.clone(), term),
                _ => continue,
            };
            let form = LinearForm::of(term, &self.one);
            let Some(alpha) = form.coeff_of_var(var) else { continue };
            if alpha.is_zero() || form.has_fapp_mentioning(var) {
                continue;
            }
            let rest = form.without_var(var).to_term();
            return Some((i, mus, alpha.clone(), rest));
        }
        None
    }

    // ----- the G-classified branch ----------------------------------------

    fn eliminate_g_var(&mut self, var: &str, clause: Vec<Literal>) -> Result<FormulaExpr> {
        // pre-pass: a negated literal whose moduleization needs parameter
        // guards splits the clause; either some guard fails (the literal
        // holds vacuously) or all guards hold and the pp part is negated
        for (i, lit) in clause.iter().enumerate() {
            if lit.positive || !self.literal_mentions_linearly(lit, var) {
                continue;
            }
            let spec = match &lit.atom {
                AtomExpr::InG(_) | AtomExpr::InGLambda { .. } | AtomExpr::Eq(..) => {
                    Some(self.moduleize_membership(&lit.atom, var)?)
                }
                AtomExpr::PP { constraint, args } => {
                    Some(self.pp_to_moduleized(constraint, args, var)?)
                }
                AtomExpr::Lt(..) => None,
            };
            if let Some((guards, c, a)) = spec {
                if guards.is_empty() {
                    continue;
                }
                let rest: Vec<Literal> = clause
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, l)| l.clone())
                    .collect();
                let mut parts = Vec::new();
                for g in &guards {
                    let mut sub = rest.clone();
                    sub.push(Literal::neg(g.clone()));
                    parts.push(self.eliminate_clause(var, sub)?);
                }
                let mut main = rest;
                for g in &guards {
                    main.push(Literal::pos(g.clone()));
                }
                main.push(Literal::neg(AtomExpr::pp(c, a)?));
                parts.push(self.eliminate_clause(var, main)?);
                return Ok(FormulaExpr::or_all(parts));
            }
        }

        let mut passthrough: Vec<Literal> = Vec::new();
        let mut bounds_lits: Vec<Literal> = Vec::new();
        let mut pos_pps: Vec<(PPConstraint, Vec<TermExpr>)> = Vec::new();
        let mut neg_pps: Vec<(PPConstraint, Vec<TermExpr>)> = Vec::new();
        let mut guard_lits: Vec<Literal> = Vec::new();

        for lit in &clause {
            if !self.literal_mentions_linearly(lit, var) {
                passthrough.push(lit.clone());
                continue;
            }
            match (&lit.atom, lit.positive) {
                (AtomExpr::Lt(..), true) => bounds_lits.push(lit.clone()),
                (AtomExpr::InG(_) | AtomExpr::InGLambda { .. } | AtomExpr::Eq(..), _) => {
                    let (guards, c, a) = self.moduleize_membership(&lit.atom, var)?;
                    if lit.positive {
                        for g in &guards {
                            guard_lits.push(Literal::pos(g.clone()));
                        }
                        pos_pps.push((c, a));
                    } else {
                        debug_assert!(guards.is_empty(), "handled by the pre-pass");
                        neg_pps.push((c, a));
                    }
                }
                (AtomExpr::PP { constraint, args }, positive) => {
                    let (guards, c, a) = self.pp_to_moduleized(constraint, args, var)?;
                    if positive {
                        for g in &guards {
                            guard_lits.push(Literal::pos(g.clone()));
                        }
                        pos_pps.push((c, a));
                    } else {
                        debug_assert!(guards.is_empty(), "handled by the pre-pass");
                        neg_pps.push((c, a));
                    }
                }
                (AtomExpr::Lt(..), false) => {
                    return Err(Error::UnsupportedBaseAtom(
                        "negated order atom survived expansion".into(),
                    ))
                }
            }
        }

        // combine the positive side over the variable slot
        let base_item = trivial_pp_over(var);
        let mut items = vec![base_item];
        items.extend(pos_pps.iter().cloned());
        let (combined, combined_args) = pp_conj(&items)?;
        let slot = pp_slot_of_var(&combined_args, var).expect("variable slot present");
        let delta = pp_var_modulus(&combined, slot, &self.cfg.ring)?;

        if delta.is_zero() {
            // the positive side pins the variable to a definite parameter
            // expression; substitute it back into the whole clause
            let pinned = pinned_expression(&combined, &combined_args, slot, &self.one)?;
            self.log(var, "module-pinned", format!("{var} := {}", pinned));
            let mut new_lits: Vec<Literal> = clause
                .iter()
                .map(|l| Literal {
                    positive: l.positive,
                    atom: l.atom.map_terms(&mut |t| t.substitute(var, &pinned)),
                })
                .collect();
            new_lits.push(Literal::pos(AtomExpr::InG(pinned)));
            return self.finish_varfree(new_lits);
        }

        let mut out_lits: Vec<Literal> = passthrough;
        out_lits.extend(guard_lits);
        // solvability of the positive side as a parameter condition
        if !pos_pps.is_empty() {
            let (folded, folded_args) = pp_fold_slot(&combined, &combined_args, slot);
            if !pp_is_tautology(&folded, &self.cfg.ring)? {
                out_lits.push(Literal::pos(AtomExpr::pp(folded, folded_args)?));
            }
        }
        // negative side: only cosets of modulus dividing the positive one
        // can swallow the whole solution coset; everything else is escaped
        // along a fresh generator (the index of a strictly finer pp subgroup
        // is infinite at infinite rank)
        for (nc, na) in &neg_pps {
            let nslot = match pp_slot_of_var(na, var) {
                Some(s) => s,
                None => {
                    // variable vanished from the negated condition
                    out_lits.push(Literal::neg(AtomExpr::pp(nc.clone(), na.clone())?));
                    continue;
                }
            };
            let dprime = pp_var_modulus(nc, nslot, &self.cfg.ring)?;
            let escape = decide_pp_sentence(
                &PPSentence::Index {
                    num: in_dg_pp(&delta),
                    den: in_dg_pp(&dprime),
                    at_least: 2,
                },
                &self.cfg.ring,
            )?;
            if escape {
                self.log(
                    var,
                    "module-escape",
                    format!("negative coset of modulus {dprime} escaped (positive modulus {delta})"),
                );
                continue;
            }
            let (joint, joint_args) = pp_conj(&[
                (combined.clone(), combined_args.clone()),
                (nc.clone(), na.clone()),
            ])?;
            let jslot = pp_slot_of_var(&joint_args, var).expect("slot");
            let (folded, folded_args) = pp_fold_slot(&joint, &joint_args, jslot);
            if pp_is_tautology(&folded, &self.cfg.ring)? {
                return Ok(FormulaExpr::False);
            }
            out_lits.push(Literal::neg(AtomExpr::pp(folded, folded_args)?));
        }
        // ordered base part: Fourier-Motzkin residue of the strict bounds
        if !bounds_lits.is_empty() {
            let residue = self.fourier_motzkin(var, &bounds_lits)?;
            self.log(var, "module-with-order", "interval residue conjoined".into());
            let module_part = FormulaExpr::and_all(out_lits.iter().map(|l| l.to_formula()));
            return Ok(FormulaExpr::and(residue, module_part));
        }
        self.log(var, "module", format!("positive modulus {delta}"));
        self.finish_varfree(out_lits)
    }

    /// Membership and equation literals over a G-classified variable become
    /// guard conditions plus a pp atom, through the R-module decomposition.
    fn moduleize_membership(
        &self,
        atom: &AtomExpr,
        var: &str,
    ) -> Result<(Vec<AtomExpr>, PPConstraint, Vec<TermExpr>)> {
        let (target, term) = match atom {
            AtomExpr::InG(t) => (ModTarget::Lambda(vec![self.one.clone()]), t.clone()),
            AtomExpr::InGLambda { lams, term } => (ModTarget::Lambda(lams.clone()), term.clone()),
            AtomExpr::Eq(a, b) => (
                ModTarget::Zero,
                TermExpr::sum(a.clone(), TermExpr::neg(b.clone(), &self.one)),
            ),
            other => {
                return Err(Error::UnsupportedBaseAtom(format!(
                    "{other} is not a module literal"
                )))
            }
        };
        let g_vars = self.g_vars_of_term(&term, var);
        let form = LinearForm::of(&term, &self.one);
        let out = moduleize_literal(&form, &target, &g_vars, &self.one, &self.cfg.ring)?;
        Ok((out.guards, out.constraint, out.args))
    }

    /// Rows of a pp atom become equations over the classified variables; the
    /// constraint's own existential block joins the fresh G-variables and is
    /// folded back into the existential side after moduleization.
    fn pp_to_moduleized(
        &mut self,
        constraint: &PPConstraint,
        args: &[TermExpr],
        var: &str,
    ) -> Result<(Vec<AtomExpr>, PPConstraint, Vec<TermExpr>)> {
        let (c0, args0) = pp_normalize_anchor(constraint, args);
        let m = c0.exist_mat.cols;
        let ws: Vec<String> = (0..m).map(|_| self.fresh_var("w")).collect();
        let mut guards = Vec::new();
        let mut row_items: Vec<(PPConstraint, Vec<TermExpr>)> = Vec::new();
        for r in 0..c0.rows() {
            let mut term = TermExpr::Zero;
            for (j, arg) in args0.iter().enumerate() {
                let coeff = FieldElem::from_rational(
                    &self.cfg.field,
                    Rat::from(c0.var_mat[(r, j)].clone()),
                );
                term = TermExpr::sum(term, TermExpr::scale(coeff, arg.clone()));
            }
            for (j, w) in ws.iter().enumerate() {
                let coeff = FieldElem::from_rational(
                    &self.cfg.field,
                    Rat::from(c0.exist_mat[(r, j)].clone()),
                );
                term = TermExpr::sum(term, TermExpr::scale(coeff, TermExpr::var(w.clone())));
            }
            let mut g_vars = self.g_vars_of_term(&term, var);
            for w in &ws {
                if !g_vars.contains(w) {
                    g_vars.push(w.clone());
                }
            }
            let form = LinearForm::of(&term, &self.one);
            let out =
                moduleize_literal(&form, &ModTarget::Zero, &g_vars, &self.one, &self.cfg.ring)?;
            guards.extend(out.guards);
            row_items.push((out.constraint, out.args));
        }
        let (mut joint, mut joint_args) = pp_conj(&row_items)?;
        // fold the pp's own existential variables back in
        for w in &ws {
            if let Some(slot) = pp_slot_of_var(&joint_args, w) {
                let (c, a) = pp_fold_slot(&joint, &joint_args, slot);
                joint = c;
                joint_args = a;
            }
            self.classes.remove(w);
        }
        Ok((guards, joint, joint_args))
    }

    /// The classified variables occurring linearly in a term: the variable
    /// under elimination plus every fresh G-variable.
    fn g_vars_of_term(&self, term: &TermExpr, var: &str) -> Vec<String> {
        let form = LinearForm::of(term, &self.one);
        let mut out = Vec::new();
        for v in form.var_coeffs.keys() {
            if v == var || self.classes.get(v) == Some(&VarClass::InG) {
                out.push(v.clone());
            }
        }
        if !out.contains(&var.to_string()) && form.var_coeffs.contains_key(var) {
            out.push(var.to_string());
        }
        out
    }

    fn literal_mentions_linearly(&self, lit: &Literal, var: &str) -> bool {
        for term in lit.atom.terms() {
            let form = LinearForm::of(term, &self.one);
            if form.coeff_of_var(var).map_or(false, |c| !c.is_zero()) {
                return true;
            }
            if form.has_fapp_mentioning(var) {
                return true;
            }
        }
        false
    }

    // ----- the generic branch ---------------------------------------------

    /// No positive membership forces the variable into the span of G: by
    /// codensity a witness exists outside that span, negative membership
    /// literals hold there, inequations are absorbed by density of the base
    /// theory, and only the order residue survives.
    fn eliminate_generic(&mut self, var: &str, clause: Vec<Literal>) -> Result<FormulaExpr> {
        let mut passthrough = Vec::new();
        let mut bounds = Vec::new();
        for lit in clause {
            if !self.literal_mentions_linearly(&lit, var) {
                passthrough.push(lit);
                continue;
            }
            match (&lit.atom, lit.positive) {
                (AtomExpr::InG(_) | AtomExpr::InGLambda { .. } | AtomExpr::PP { .. }, false) => {
                    // discharged by the codensity witness
                }
                (AtomExpr::Eq(..), false) => {
                    // finitely many excluded points cannot pin a generic
                }
                (AtomExpr::Lt(..), true) => bounds.push(lit),
                (a, p) => {
                    return Err(Error::UnsupportedBaseAtom(format!(
                        "{}{a} in the generic branch",
                        if p { "" } else { "~" }
                    )))
                }
            }
        }
        let residue = if bounds.is_empty() {
            FormulaExpr::True
        } else {
            self.fourier_motzkin(var, &bounds)?
        };
        self.log(var, "generic", "codensity witness".into());
        Ok(FormulaExpr::and(
            residue,
            FormulaExpr::and_all(passthrough.iter().map(|l| l.to_formula())),
        ))
    }

    /// Strict-bound Fourier-Motzkin residue: one `lower < upper` condition
    /// per bound pair; a side without bounds leaves the interval unbounded.
    fn fourier_motzkin(&mut self, var: &str, bounds: &[Literal]) -> Result<FormulaExpr> {
        let mut lowers: Vec<TermExpr> = Vec::new();
        let mut uppers: Vec<TermExpr> = Vec::new();
        let mut residue = Vec::new();
        for lit in bounds {
            let AtomExpr::Lt(a, b) = &lit.atom else {
                return Err(Error::UnsupportedBaseAtom("expected an order atom".into()));
            };
            // a < b  <=>  0 < b - a = lam var + rest
            let diff = TermExpr::sum(b.clone(), TermExpr::neg(a.clone(), &self.one));
            let form = LinearForm::of(&diff, &self.one);
            let lam = form.coeff_of_var(var).cloned().unwrap_or_else(|| {
                FieldElem::zero(&self.cfg.field)
            });
            if lam.is_zero() {
                residue.push(FormulaExpr::Atom(AtomExpr::Lt(TermExpr::Zero, diff)));
                continue;
            }
            let rest = form.without_var(var).to_term();
            // 0 < lam var + rest  <=>  var > -rest/lam (lam > 0), else var < ...
            let bound = TermExpr::scale(lam.inv()?.neg(), rest);
            if lam.sign()? > 0 {
                lowers.push(bound);
            } else {
                uppers.push(bound);
            }
        }
        for lo in &lowers {
            for up in &uppers {
                residue.push(FormulaExpr::Atom(AtomExpr::Lt(lo.clone(), up.clone())));
            }
        }
        self.log(var, "interval", format!("{} lower, {} upper bounds", lowers.len(), uppers.len()));
        Ok(FormulaExpr::and_all(residue))
    }

    pub fn take_trace(&mut self, output: &FormulaExpr) -> EliminationTrace {
        EliminationTrace { steps: std::mem::take(&mut self.trace), output: output.to_string() }
    }
}

// ---------------------------------------------------------------------------
// pp-atom plumbing
// ---------------------------------------------------------------------------

/// Replace every occurrence of one specific function atom inside a term.
fn replace_fatom(t: &TermExpr, target: &crate::formula::FAtom, with: &TermExpr) -> TermExpr {
    match t {
        TermExpr::Zero | TermExpr::Var(_) | TermExpr::Const(_) => t.clone(),
        TermExpr::Scale(l, inner) => TermExpr::scale(l.clone(), replace_fatom(inner, target, with)),
        TermExpr::Sum(a, b) => {
            TermExpr::sum(replace_fatom(a, target, with), replace_fatom(b, target, with))
        }
        TermExpr::FApp { lams, index, arg } => {
            if *lams == target.lams && *index == target.index && **arg == target.arg {
                with.clone()
            } else {
                TermExpr::FApp {
                    lams: lams.clone(),
                    index: *index,
                    arg: Box::new(replace_fatom(arg, target, with)),
                }
            }
        }
    }
}

/// Fold the anchor column into the regular argument columns (right-hand side
/// becomes zero).
fn pp_normalize_anchor(c: &PPConstraint, args: &[TermExpr]) -> (PPConstraint, Vec<TermExpr>) {
    if !c.has_anchor() {
        return (c.clone(), args.to_vec());
    }
    let n = c.rows();
    let k = c.var_mat.cols;
    let mut var_mat = IntMatrix::zero(n, k + 1);
    for i in 0..n {
        for j in 0..k {
            var_mat[(i, j)] = c.var_mat[(i, j)].clone();
        }
        var_mat[(i, k)] = -c.rhs[i].clone();
    }
    (
        PPConstraint::new(var_mat, c.exist_mat.clone(), vec![BigInt::zero(); n])
            .expect("dimensions preserved"),
        args.to_vec(),
    )
}

/// Conjunction of anchor-free pp atoms: arguments are merged by structural
/// equality, rows are stacked, existential blocks sit block-diagonally.
fn pp_conj(items: &[(PPConstraint, Vec<TermExpr>)]) -> Result<(PPConstraint, Vec<TermExpr>)> {
    let normalized: Vec<(PPConstraint, Vec<TermExpr>)> = items
        .iter()
        .map(|(c, a)| pp_normalize_anchor(c, a))
        .collect();
    let mut args: Vec<TermExpr> = Vec::new();
    for (_, a) in &normalized {
        for t in a {
            if !args.contains(t) {
                args.push(t.clone());
            }
        }
    }
    let total_rows: usize = normalized.iter().map(|(c, _)| c.rows()).sum();
    let total_exists: usize = normalized.iter().map(|(c, _)| c.exist_mat.cols).sum();
    let mut var_mat = IntMatrix::zero(total_rows, args.len());
    let mut exist_mat = IntMatrix::zero(total_rows, total_exists);
    let mut row_off = 0usize;
    let mut ex_off = 0usize;
    for (c, a) in &normalized {
        let slot_map: Vec<usize> = a
            .iter()
            .map(|t| args.iter().position(|u| u == t).expect("merged"))
            .collect();
        for r in 0..c.rows() {
            for (j, &slot) in slot_map.iter().enumerate() {
                if !c.var_mat[(r, j)].is_zero() {
                    var_mat[(row_off + r, slot)] =
                        &var_mat[(row_off + r, slot)] + &c.var_mat[(r, j)];
                }
            }
            for j in 0..c.exist_mat.cols {
                exist_mat[(row_off + r, ex_off + j)] = c.exist_mat[(r, j)].clone();
            }
        }
        row_off += c.rows();
        ex_off += c.exist_mat.cols;
    }
    let rows = var_mat.rows;
    Ok((
        PPConstraint::new(var_mat, exist_mat, vec![BigInt::zero(); rows])?,
        args,
    ))
}

/// Move one argument slot into the existential block.
fn pp_fold_slot(
    c: &PPConstraint,
    args: &[TermExpr],
    slot: usize,
) -> (PPConstraint, Vec<TermExpr>) {
    let n = c.rows();
    let k = c.var_mat.cols;
    let mut var_mat = IntMatrix::zero(n, k - 1);
    let mut exist_mat = IntMatrix::zero(n, c.exist_mat.cols + 1);
    for i in 0..n {
        let mut jj = 0;
        for j in 0..k {
            if j == slot {
                continue;
            }
            var_mat[(i, jj)] = c.var_mat[(i, j)].clone();
            jj += 1;
        }
        exist_mat[(i, 0)] = c.var_mat[(i, slot)].clone();
        for j in 0..c.exist_mat.cols {
            exist_mat[(i, j + 1)] = c.exist_mat[(i, j)].clone();
        }
    }
    let mut new_args = args.to_vec();
    new_args.remove(slot);
    (
        PPConstraint::new(var_mat, exist_mat, vec![BigInt::zero(); n]).expect("dims"),
        new_args,
    )
}

fn pp_slot_of_var(args: &[TermExpr], var: &str) -> Option<usize> {
    args.iter().position(|t| matches!(t, TermExpr::Var(v) if v == var))
}

/// The trivial condition `var in G` as a pp atom (zero rows, one slot).
fn trivial_pp_over(var: &str) -> (PPConstraint, Vec<TermExpr>) {
    (
        PPConstraint::new(IntMatrix::zero(0, 1), IntMatrix::zero(0, 0), Vec::new())
            .expect("trivial"),
        vec![TermExpr::var(var)],
    )
}

/// `x in d G` as a parameter-free single-variable pp constraint; `d = 0`
/// pins x to zero.
fn in_dg_pp(d: &BigInt) -> PPConstraint {
    if d.is_zero() {
        PPConstraint::new(
            IntMatrix::from_rows(vec![vec![BigInt::one()]]),
            IntMatrix::zero(1, 0),
            vec![BigInt::zero()],
        )
        .expect("dims")
    } else {
        PPConstraint::new(
            IntMatrix::from_rows(vec![vec![BigInt::one()]]),
            IntMatrix::from_rows(vec![vec![-d.clone()]]),
            vec![BigInt::zero()],
        )
        .expect("dims")
    }
}

/// Does the (anchor-free) pp condition hold for all argument values in G?
/// True exactly when every argument column lies in the existential column
/// lattice over the ring.
fn pp_is_tautology(c: &PPConstraint, ring: &RingSpec) -> Result<bool> {
    for j in 0..c.var_mat.cols {
        let col: Vec<Rat> = (0..c.rows()).map(|i| Rat::from(c.var_mat[(i, j)].clone())).collect();
        if crate::linalg::solve_over_ring(&c.exist_mat, &col, ring)?.is_none() {
            return Ok(false);
        }
    }
    // with no argument columns the system is homogeneous and holds
    Ok(true)
}

/// When the variable's modulus is zero the positive system pins it to a
/// definite rational combination of the parameter slots.
fn pinned_expression(
    c: &PPConstraint,
    args: &[TermExpr],
    slot: usize,
    one: &FieldElem,
) -> Result<TermExpr> {
    let n = c.rows();
    let m = c.exist_mat.cols;
    let mut glued = IntMatrix::zero(n, 1 + m);
    for i in 0..n {
        glued[(i, 0)] = c.var_mat[(i, slot)].clone();
        for j in 0..m {
            glued[(i, 1 + j)] = c.exist_mat[(i, j)].clone();
        }
    }
    let (s, u, v) = snf(&glued)?;
    // x0 = sum_i V[0,i] (U rhs)_i / d_i over the nonzero diagonal
    let mut rho = vec![Rat::zero(); n];
    let rank_dim = n.min(1 + m);
    for i in 0..rank_dim {
        if s[(i, i)].is_zero() {
            continue;
        }
        let scale = Rat::new(v[(0, i)].clone(), s[(i, i)].clone());
        if scale.is_zero() {
            continue;
        }
        for r in 0..n {
            rho[r] += &scale * Rat::from(u[(i, r)].clone());
        }
    }
    // rows: col_slot * x + sum_j col_j arg_j + B eta = 0, so
    // x = sum_j (-rho . col_j) arg_j
    let mut out = TermExpr::Zero;
    for (j, arg) in args.iter().enumerate() {
        if j == slot {
            continue;
        }
        let mut coeff = Rat::zero();
        for r in 0..n {
            coeff -= &rho[r] * Rat::from(c.var_mat[(r, j)].clone());
        }
        if !coeff.is_zero() {
            out = TermExpr::sum(
                out,
                TermExpr::scale(FieldElem::from_rational(one.spec(), coeff), arg.clone()),
            );
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// literal and formula simplification
// ---------------------------------------------------------------------------

enum SimplifiedLiteral {
    True,
    False,
    Keep(Literal),
}

fn simplify_literal(lit: &Literal, one: &FieldElem, ring: &RingSpec) -> SimplifiedLiteral {
    let decided = match &lit.atom {
        AtomExpr::Eq(a, b) => {
            let diff = LinearForm::of(
                &TermExpr::sum(a.clone(), TermExpr::neg(b.clone(), one)),
                one,
            );
            if diff.is_constant_zero() {
                Some(true)
            } else {
                None
            }
        }
        AtomExpr::Lt(a, b) => {
            let diff = LinearForm::of(
                &TermExpr::sum(b.clone(), TermExpr::neg(a.clone(), one)),
                one,
            );
            if diff.is_constant_zero() {
                Some(false) // x < x
            } else {
                None
            }
        }
        AtomExpr::InG(t) | AtomExpr::InGLambda { term: t, .. } => {
            let form = LinearForm::of(t, one);
            if form.is_constant_zero() {
                Some(true) // 0 lies in every subgroup
            } else {
                None
            }
        }
        AtomExpr::PP { constraint, args } => {
            let (c, _) = pp_normalize_anchor(constraint, args);
            match pp_is_tautology(&c, ring) {
                Ok(true) => Some(true),
                _ => None,
            }
        }
    };
    match decided {
        Some(v) => {
            if v == lit.positive {
                SimplifiedLiteral::True
            } else {
                SimplifiedLiteral::False
            }
        }
        None => SimplifiedLiteral::Keep(lit.clone()),
    }
}

/// Canonical form of a quantifier-free formula: disjunctive normal form with
/// decided literals removed, literals sorted and deduplicated, clauses
/// sorted and deduplicated.
pub fn normalize_qf(f: &FormulaExpr, one: &FieldElem, ring: &RingSpec) -> FormulaExpr {
    let Ok(clauses) = dnf_clauses(f) else {
        return f.clone();
    };
    let mut keep: Vec<Vec<Literal>> = Vec::new();
    'clause: for clause in clauses {
        let mut lits = Vec::new();
        for lit in clause {
            match simplify_literal(&lit, one, ring) {
                SimplifiedLiteral::True => {}
                SimplifiedLiteral::False => continue 'clause,
                SimplifiedLiteral::Keep(l) => lits.push(l),
            }
        }
        // complementary pair kills the clause
        for l in &lits {
            let flipped = Literal { positive: !l.positive, atom: l.atom.clone() };
            if lits.contains(&flipped) {
                continue 'clause;
            }
        }
        lits.sort_by_key(|l| format!("{}{}", if l.positive { "+" } else { "-" }, l.to_formula()));
        lits.dedup();
        keep.push(lits);
    }
    keep.sort_by_key(|c| {
        c.iter()
            .map(|l| l.to_formula().to_string())
            .collect::<Vec<_>>()
            .join(" & ")
    });
    keep.dedup();
    clauses_to_formula(&keep)
}

// ---------------------------------------------------------------------------
// public entry points
// ---------------------------------------------------------------------------

/// Eliminate a single existential quantifier over a quantifier-free body.
pub fn eliminate_one(
    f: &FormulaExpr,
    cfg: &QeConfig,
) -> Result<(FormulaExpr, EliminationTrace)> {
    let FormulaExpr::Exists(var, body) = f else {
        return Err(Error::Config("eliminate_one expects an existential formula".into()));
    };
    if !body.is_quantifier_free() {
        return Err(Error::QuantifierPresent);
    }
    let mut engine = QeEngine::new(cfg.clone());
    engine.classes.insert(var.clone(), VarClass::Unknown);
    let raw = engine.eliminate_exists(var, body)?;
    let out = normalize_qf(&raw, &engine.one, &engine.cfg.ring);
    let trace = engine.take_trace(&out);
    Ok((out, trace))
}

/// Eliminate every quantifier, innermost first.
pub fn eliminate_all(
    f: &FormulaExpr,
    cfg: &QeConfig,
) -> Result<(FormulaExpr, EliminationTrace)> {
    let mut engine = QeEngine::new(cfg.clone());
    let out = engine.eliminate(&f.alpha_normalize())?;
    let trace = engine.take_trace(&out);
    Ok((out, trace))
}

/// Decide a sentence: eliminate, then evaluate the residual quantifier-free
/// formula, in the given model when constants must be bound.
pub fn decide_sentence(
    f: &FormulaExpr,
    cfg: &QeConfig,
    model: Option<&ModelHandle>,
) -> Result<(bool, EliminationTrace)> {
    let (qf, trace) = eliminate_all(f, cfg)?;
    let verdict = match model {
        Some(m) => m
            .eval_qfree(&qf, &BTreeMap::new())
            .map_err(|e| match e {
                Error::UnboundVariable(v) => Error::UnboundConstant(v),
                other => other,
            })?,
        None => {
            let empty = ModelHandle::new(cfg.field.clone(), cfg.ring.clone());
            empty
                .eval_qfree(&qf, &BTreeMap::new())
                .map_err(|e| match e {
                    Error::UnboundVariable(v) => Error::UnboundConstant(v),
                    other => other,
                })?
        }
    };
    Ok((verdict, trace))
}

// ---------------------------------------------------------------------------
// type equality
// ---------------------------------------------------------------------------

/// Canonical, generator-name-free description of a tuple's type: the
/// rational relation lattice of the closure enumeration, G-membership flags,
/// the order data in ordered mode, and the canonical pp-type of the G-part.
#[derive(Debug, Clone, PartialEq, Eq)]
struct TypeDatum {
    enumeration_len: usize,
    relation_basis: Vec<Vec<Rat>>,
    g_flags: Vec<bool>,
    order_signs: Vec<i8>,
    /// pp-type of the G-members of the tuple itself (the module type the
    /// pair induces on the tuple)
    tuple_g_pp: crate::gmodule::CanonicalPPType,
    /// pp-type of the full closure G-part
    pp_type: crate::gmodule::CanonicalPPType,
}

/// Generator order determined by the tuple alone: sort the support by the
/// coefficient signature across the tuple elements (ids only break exact
/// ties, which connect generators that an automorphism interchanges).
fn canonical_support(model: &ModelHandle, tuple: &[VElem]) -> Vec<crate::gmodule::GenId> {
    let mut seen = std::collections::BTreeSet::new();
    for e in tuple {
        seen.extend(e.support());
    }
    let mut support: Vec<crate::gmodule::GenId> = seen.into_iter().collect();
    let signature = |g: crate::gmodule::GenId| -> Vec<Vec<Rat>> {
        tuple
            .iter()
            .map(|e| e.coeff(g, model.field()).coords().to_vec())
            .collect()
    };
    support.sort_by(|a, b| signature(*a).cmp(&signature(*b)).then(a.cmp(b)));
    support
}

/// Closure enumeration with the G-part in a tuple-relative canonical order:
/// the G-part lattice is put in Hermite form over the canonical support.
fn closure_enumeration(model: &ModelHandle, tuple: &[VElem]) -> (Vec<VElem>, Vec<VElem>) {
    let closed = closure(model, tuple);
    let support = canonical_support(model, tuple);
    let g_part: Vec<VElem> = if closed.g_part.is_empty() || support.is_empty() {
        closed.g_part.clone()
    } else {
        let cols: Vec<Vec<BigInt>> = closed
            .g_part
            .iter()
            .map(|v| {
                support
                    .iter()
                    .map(|g| {
                        v.coeff(*g, model.field())
                            .as_rational()
                            .map(|q| q.numer().clone())
                            .unwrap_or_else(BigInt::zero)
                    })
                    .collect()
            })
            .collect();
        let m = IntMatrix::from_rows(cols).transpose();
        match crate::linalg::lattice_canon(&m) {
            Ok(canon) => (0..canon.cols)
                .map(|j| {
                    let mut v = VElem::zero();
                    for (i, g) in support.iter().enumerate() {
                        if !canon[(i, j)].is_zero() {
                            v.set(
                                *g,
                                FieldElem::from_rational(
                                    model.field(),
                                    Rat::from(canon[(i, j)].clone()),
                                ),
                            );
                        }
                    }
                    v
                })
                .collect(),
            Err(_) => closed.g_part.clone(),
        }
    };
    let mut enumeration = tuple.to_vec();
    for g in &g_part {
        enumeration.push(g.clone());
    }
    (enumeration, g_part)
}

fn type_datum(
    model: &ModelHandle,
    tuple: &[VElem],
    bound: Option<BigInt>,
) -> Result<TypeDatum> {
    let (enumeration, g_part) = closure_enumeration(model, tuple);
    let deg = model.field().degree();
    // rational relation lattice of the enumeration over the Q-grid, with
    // rows in the tuple-relative canonical generator order
    let mut support = canonical_support(model, tuple);
    let mut seen: std::collections::BTreeSet<_> = support.iter().copied().collect();
    for e in &enumeration {
        for g in e.support() {
            if seen.insert(g) {
                support.push(g);
            }
        }
    }
    let mut powers = vec![FieldElem::one(model.field())];
    if deg > 1 {
        let gen = FieldElem::generator(model.field()).expect("number field");
        for _ in 1..deg {
            let last = powers.last().unwrap().clone();
            powers.push(last.mul(&gen));
        }
    }
    // columns: for each enumeration element and power, its grid vector;
    // relations are kernel vectors over the (element, power) index set
    let mut cols: Vec<Vec<Rat>> = Vec::new();
    for e in &enumeration {
        for p in &powers {
            let scaled = e.scale(p);
            let mut grid = vec![Rat::zero(); support.len() * deg];
            for (g, c) in scaled.coeffs() {
                let gi = support.iter().position(|x| x == g).unwrap();
                for k in 0..deg {
                    grid[gi * deg + k] = c.coords()[k].clone();
                }
            }
            cols.push(grid);
        }
    }
    let rows = support.len() * deg;
    let mut mat = crate::linalg::RatMatrix::zero(rows, cols.len());
    for (j, col) in cols.iter().enumerate() {
        for i in 0..rows {
            mat[(i, j)] = col[i].clone();
        }
    }
    let kernel = crate::linalg::kernel_basis(&mat);
    // canonical reduced basis of the kernel space
    let relation_basis = if kernel.is_empty() {
        Vec::new()
    } else {
        let m = crate::linalg::RatMatrix::from_rows(kernel);
        let (r, pivots) = crate::linalg::rref(&m);
        (0..pivots.len())
            .map(|i| (0..r.cols).map(|j| r[(i, j)].clone()).collect())
            .collect()
    };
    let g_flags: Vec<bool> = enumeration.iter().map(|e| model.in_g(e)).collect();
    let mut order_signs = Vec::new();
    if model.is_ordered() {
        for (i, a) in enumeration.iter().enumerate() {
            order_signs.push(match model.compare(a, &VElem::zero())? {
                std::cmp::Ordering::Less => -1,
                std::cmp::Ordering::Equal => 0,
                std::cmp::Ordering::Greater => 1,
            });
            for b in enumeration.iter().skip(i + 1) {
                order_signs.push(match model.compare(a, b)? {
                    std::cmp::Ordering::Less => -1,
                    std::cmp::Ordering::Equal => 0,
                    std::cmp::Ordering::Greater => 1,
                });
            }
        }
    }
    let g_vectors: Vec<crate::gmodule::GVector> = g_part
        .iter()
        .map(|v| model.to_gvector(v).expect("G-part lies in G"))
        .collect();
    let pp_type = crate::gmodule::canonical_pp_type(&g_vectors, model.ring(), bound.clone())?;
    let tuple_g: Vec<crate::gmodule::GVector> = tuple
        .iter()
        .filter_map(|v| model.to_gvector(v))
        .collect();
    let tuple_g_pp = crate::gmodule::canonical_pp_type(&tuple_g, model.ring(), bound)?;
    Ok(TypeDatum {
        enumeration_len: enumeration.len(),
        relation_basis,
        g_flags,
        order_signs,
        tuple_g_pp,
        pp_type,
    })
}

/// Are two tuples of the same length indistinguishable?  Both are closed
/// under the decomposition functions; equality then reduces to the base
/// relation-and-order data of the closure enumerations together with the
/// module type of the G-parts.
pub fn types_equal(
    model_a: &ModelHandle,
    tuple_a: &[VElem],
    model_b: &ModelHandle,
    tuple_b: &[VElem],
) -> Result<(bool, String)> {
    if tuple_a.len() != tuple_b.len() {
        return Ok((false, "tuple lengths differ".into()));
    }
    // common divisibility bound so the pp data are comparable
    let mut bound = BigInt::one();
    for (model, tuple) in [(model_a, tuple_a), (model_b, tuple_b)] {
        let closure_g: Vec<crate::gmodule::GVector> = closure_enumeration(model, tuple)
            .1
            .iter()
            .map(|v| model.to_gvector(v).expect("in G"))
            .collect();
        let tuple_g: Vec<crate::gmodule::GVector> =
            tuple.iter().filter_map(|v| model.to_gvector(v)).collect();
        bound = bound
            .max(crate::gmodule::default_pp_bound(&closure_g, model.ring())?)
            .max(crate::gmodule::default_pp_bound(&tuple_g, model.ring())?);
    }
    let da = type_datum(model_a, tuple_a, Some(bound.clone()))?;
    let db = type_datum(model_b, tuple_b, Some(bound))?;
    // G-membership of the tuple positions themselves comes first: it is the
    // most direct distinguishing atom
    let n = tuple_a.len();
    if da.g_flags[..n] != db.g_flags[..n] {
        let i = da.g_flags[..n]
            .iter()
            .zip(&db.g_flags[..n])
            .position(|(x, y)| x != y)
            .unwrap();
        return Ok((false, format!("atom G(x) differs at tuple position {i}")));
    }
    if da.enumeration_len != db.enumeration_len {
        return Ok((false, "closure sizes differ".into()));
    }
    if da.g_flags != db.g_flags {
        let i = da.g_flags.iter().zip(&db.g_flags).position(|(x, y)| x != y).unwrap();
        return Ok((false, format!("atom G(x) differs at enumeration position {i}")));
    }
    let name_pp_difference = |da: &crate::gmodule::CanonicalPPType,
                              db: &crate::gmodule::CanonicalPPType|
     -> String {
        if da.relation_lattice != db.relation_lattice {
            return "module relation lattice differs".into();
        }
        for ((s, la), (_, lb)) in da.divisibility.iter().zip(&db.divisibility) {
            if la != lb {
                return format!("pp datum: divisibility by {s} differs");
            }
        }
        "module type differs".into()
    };
    if da.tuple_g_pp != db.tuple_g_pp {
        return Ok((false, name_pp_difference(&da.tuple_g_pp, &db.tuple_g_pp)));
    }
    if da.relation_basis != db.relation_basis {
        return Ok((false, "linear relation lattice differs".into()));
    }
    if da.order_signs != db.order_signs {
        return Ok((false, "order type differs".into()));
    }
    if da.pp_type != db.pp_type {
        return Ok((false, name_pp_difference(&da.pp_type, &db.pp_type)));
    }
    Ok((true, "types agree".into()))
}

// ---------------------------------------------------------------------------
// small / large classification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeClass {
    Small,
    Large,
}

fn clause_is_small(clause: &[Literal], var: &str, one: &FieldElem) -> bool {
    for lit in clause {
        if !lit.positive {
            continue;
        }
        match &lit.atom {
            AtomExpr::Eq(a, b) => {
                let diff = LinearForm::of(
                    &TermExpr::sum(a.clone(), TermExpr::neg(b.clone(), one)),
                    one,
                );
                if diff.coeff_of_var(var).map_or(false, |c| !c.is_zero()) {
                    return true; // pinned into the parameter span
                }
            }
            AtomExpr::InG(t) | AtomExpr::InGLambda { term: t, .. } => {
                let form = LinearForm::of(t, one);
                if form.coeff_of_var(var).map_or(false, |c| !c.is_zero()) {
                    return true; // pinned into span(params, G)
                }
            }
            AtomExpr::PP { args, .. } => {
                for t in args {
                    let form = LinearForm::of(t, one);
                    if form.coeff_of_var(var).map_or(false, |c| !c.is_zero()) {
                        return true;
                    }
                }
            }
            AtomExpr::Lt(..) => {}
        }
    }
    false
}

/// Is every point of the (quantifier-free, one-variable) definable set inside
/// the span of the parameters and G?
pub fn is_small(f: &FormulaExpr, var: &str, one: &FieldElem) -> Result<SizeClass> {
    let clauses = dnf_clauses(f)?;
    for clause in &clauses {
        if !clause_is_small(clause, var, one) {
            return Ok(SizeClass::Large);
        }
    }
    Ok(SizeClass::Small)
}

/// Base-theory approximation: small clauses contribute nothing, large
/// clauses contribute their order-and-equation part; the symmetric
/// difference with the input is contained in the span of parameters and G.
pub fn large_approx(f: &FormulaExpr, var: &str, one: &FieldElem) -> Result<FormulaExpr> {
    let clauses = dnf_clauses(f)?;
    let mut parts = Vec::new();
    for clause in &clauses {
        if clause_is_small(clause, var, one) {
            continue;
        }
        let base: Vec<FormulaExpr> = clause
            .iter()
            .filter(|l| matches!(l.atom, AtomExpr::Eq(..) | AtomExpr::Lt(..)))
            .map(|l| l.to_formula())
            .collect();
        parts.push(FormulaExpr::and_all(base));
    }
    Ok(FormulaExpr::or_all(parts))
}

// ---------------------------------------------------------------------------
// witnesses and refutation sampling
// ---------------------------------------------------------------------------

/// Constructive witness for a true existential: candidates follow the
/// elimination branches (solved equations, module witnesses shifted along a
/// fresh generator, span combinations, fresh generic directions) and every
/// candidate is validated by exact evaluation before it is returned.
pub fn witness(
    model: &mut ModelHandle,
    f: &FormulaExpr,
    cfg: &QeConfig,
) -> Result<VElem> {
    let FormulaExpr::Exists(var, body) = f else {
        return Err(Error::Config("witness expects an existential formula".into()));
    };
    if !body.is_quantifier_free() {
        return Err(Error::QuantifierPresent);
    }
    let (verdict, _) = decide_sentence(f, cfg, Some(model))?;
    if !verdict {
        return Err(Error::NoWitness);
    }
    let one = FieldElem::one(&cfg.field);
    for cand in witness_candidates(model, var, body, cfg)? {
        let mut asn = BTreeMap::new();
        asn.insert(var.clone(), cand.clone());
        if model.eval_qfree(body, &asn).unwrap_or(false) {
            return Ok(cand);
        }
    }
    let _ = one;
    Err(Error::Model("no validated witness among the recipe candidates".into()))
}

fn witness_candidates(
    model: &mut ModelHandle,
    var: &str,
    body: &FormulaExpr,
    cfg: &QeConfig,
) -> Result<Vec<VElem>> {
    let one = FieldElem::one(&cfg.field);
    let mut out: Vec<VElem> = Vec::new();
    let push = |v: VElem, out: &mut Vec<VElem>| {
        if !out.contains(&v) {
            out.push(v);
        }
    };
    // parameter values
    let mut params: Vec<VElem> = Vec::new();
    let mut names: std::collections::BTreeSet<String> = body.free_vars();
    names.remove(var);
    names.extend(body.consts());
    for n in &names {
        if let Ok(v) = model.eval_term(&TermExpr::var(n.clone()), &BTreeMap::new()) {
            params.push(v);
        }
    }
    push(VElem::zero(), &mut out);
    for p in &params {
        push(p.clone(), &mut out);
        push(p.scale(&FieldElem::from_int(&cfg.field, -1)), &mut out);
        push(
            p.scale(&FieldElem::from_rational(&cfg.field, Rat::new(BigInt::one(), BigInt::from(2)))),
            &mut out,
        );
    }
    let clauses = {
        let engine = QeEngine::new(cfg.clone());
        engine.preprocess(body)?
    };
    let mut engine = QeEngine::new(cfg.clone());
    engine.classes.insert(var.to_string(), VarClass::Unknown);
    let fm_interval = |model: &mut ModelHandle, clause: &[Literal]| -> Option<(Option<VElem>, Option<VElem>)> {
        if !model.is_ordered() {
            return None;
        }
        let mut lo: Option<VElem> = None;
        let mut hi: Option<VElem> = None;
        for lit in clause {
            if !lit.positive {
                continue;
            }
            let AtomExpr::Lt(a, b) = &lit.atom else { continue };
            let diff = TermExpr::sum(b.clone(), TermExpr::neg(a.clone(), &one));
            let form = LinearForm::of(&diff, &one);
            let lam = form.coeff_of_var(var)?.clone();
            if lam.is_zero() {
                continue;
            }
            let rest = form.without_var(var).to_term();
            let bound_term = TermExpr::scale(lam.inv().ok()?.neg(), rest);
            let bound = model.eval_term(&bound_term, &BTreeMap::new()).ok()?;
            let positive = lam.sign().ok()? > 0;
            if positive {
                lo = Some(match lo {
                    None => bound,
                    Some(cur) => {
                        if model.compare(&bound, &cur).ok()? == std::cmp::Ordering::Greater {
                            bound
                        } else {
                            cur
                        }
                    }
                });
            } else {
                hi = Some(match hi {
                    None => bound,
                    Some(cur) => {
                        if model.compare(&bound, &cur).ok()? == std::cmp::Ordering::Less {
                            bound
                        } else {
                            cur
                        }
                    }
                });
            }
        }
        Some((lo, hi))
    };
    for clause in &clauses {
        // solved equations
        for lit in clause {
            if !lit.positive {
                continue;
            }
            if let AtomExpr::Eq(a, b) = &lit.atom {
                let diff = TermExpr::sum(a.clone(), TermExpr::neg(b.clone(), &one));
                let form = LinearForm::of(&diff, &one);
                if let Some(lam) = form.coeff_of_var(var) {
                    if !lam.is_zero() && !form.has_fapp_mentioning(var) {
                        let solved = TermExpr::scale(
                            lam.inv()?.neg(),
                            form.without_var(var).to_term(),
                        );
                        if let Ok(v) = model.eval_term(&solved, &BTreeMap::new()) {
                            push(v, &mut out);
                        }
                    }
                }
            }
        }
        // module witnesses under the assumption var in G
        if let Some(w) = module_witness(model, var, clause, cfg)? {
            push(w.clone(), &mut out);
        }
        // span shapes: positive membership literals
        for lit in clause {
            if !lit.positive {
                continue;
            }
            let (mus, term) = match &lit.atom {
                AtomExpr::InG(t) => (vec![one.clone()], t.clone()),
                AtomExpr::InGLambda { lams, term } => (lams.clone(), term.clone()),
                _ => continue,
            };
            let form = LinearForm::of(&term, &one);
            let Some(alpha) = form.coeff_of_var(var) else { continue };
            if alpha.is_zero() {
                continue;
            }
            let rest = form.without_var(var).to_term();
            let Ok(rest_v) = model.eval_term(&rest, &BTreeMap::new()) else { continue };
            // components: fresh generators and decompositions of parameters
            let fresh = model.fresh_g(mus.len());
            for scalemul in [0i64, 1, 2, -1] {
                let mut acc = VElem::zero();
                for (mu, g) in mus.iter().zip(&fresh) {
                    acc = acc.add(
                        &model.elem(*g).scale(mu).scale(&FieldElem::from_int(&cfg.field, scalemul)),
                    );
                }
                let v = acc.sub(&rest_v).scale(&alpha.inv()?);
                push(v, &mut out);
            }
        }
        // generic directions, placed inside the interval residue if ordered
        match fm_interval(model, clause) {
            Some((lo, hi)) => {
                let bounds_ok = |m: &ModelHandle, w: &VElem| -> bool {
                    if let Some(l) = &lo {
                        if m.compare(l, w).map(|o| o != std::cmp::Ordering::Less).unwrap_or(true) {
                            return false;
                        }
                    }
                    if let Some(h) = &hi {
                        if m.compare(w, h).map(|o| o != std::cmp::Ordering::Less).unwrap_or(true) {
                            return false;
                        }
                    }
                    true
                };
                // a midpoint of the interval, then fresh directions near it
                let anchor = match (&lo, &hi) {
                    (Some(l), Some(h)) => l.add(h).scale(&FieldElem::from_rational(
                        &cfg.field,
                        Rat::new(BigInt::one(), BigInt::from(2)),
                    )),
                    (Some(l), None) => l.add(&model.elem(model.h_generators().next().unwrap_or(1))),
                    (None, Some(h)) => h.sub(&model.elem(model.h_generators().next().unwrap_or(1))),
                    (None, None) => VElem::zero(),
                };
                push(anchor.clone(), &mut out);
                if let (Some(l), Some(h)) = (&lo, &hi) {
                    let pl = model.eval_position(l);
                    let ph = model.eval_position(h);
                    if pl != ph {
                        if let Ok(q) = crate::scalar::rational_between(&pl, &ph) {
                            let gfresh = model.fresh_generic_at(q);
                            let w = model.elem(gfresh);
                            if bounds_ok(model, &w) {
                                push(w, &mut out);
                            }
                            let hfresh = model.fresh_g_at(
                                crate::scalar::rational_between(&pl, &ph).unwrap_or_default(),
                            );
                            push(model.elem(hfresh), &mut out);
                        }
                    }
                } else {
                    let v = model.fresh_generic(1)[0];
                    let w = model.elem(v);
                    if bounds_ok(model, &w) {
                        push(w, &mut out);
                    }
                }
            }
            None => {
                let v = model.fresh_generic(1)[0];
                push(model.elem(v), &mut out);
                let g = model.fresh_g(1)[0];
                push(model.elem(g), &mut out);
                for p in &params {
                    push(p.add(&model.elem(v)), &mut out);
                }
            }
        }
    }
    Ok(out)
}

/// Run the single-variable module satisfiability machinery on a clause under
/// the assumption that the variable ranges over G, with parameters bound in
/// the model.
fn module_witness(
    model: &mut ModelHandle,
    var: &str,
    clause: &[Literal],
    cfg: &QeConfig,
) -> Result<Option<VElem>> {
    use crate::gmodule::{sat_constraints, PPArg, PPInstance, SatOutcome};
    let one = FieldElem::one(&cfg.field);
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    let mut engine = QeEngine::new(cfg.clone());
    engine.classes.insert(var.to_string(), VarClass::InG);
    for lit in clause {
        let (target, term) = match &lit.atom {
            AtomExpr::InG(t) => (ModTarget::Lambda(vec![one.clone()]), t.clone()),
            AtomExpr::InGLambda { lams, term } => (ModTarget::Lambda(lams.clone()), term.clone()),
            AtomExpr::Eq(a, b) => (
                ModTarget::Zero,
                TermExpr::sum(a.clone(), TermExpr::neg(b.clone(), &one)),
            ),
            _ => continue,
        };
        let form = LinearForm::of(&term, &one);
        if form.coeff_of_var(var).map_or(true, |c| c.is_zero()) {
            continue;
        }
        let m = moduleize_literal(&form, &target, &[var.to_string()], &one, &cfg.ring)?;
        // concrete parameters: guards must hold, argument terms must land in G
        let mut args = Vec::new();
        let mut ok = true;
        for g in &m.guards {
            if !model.eval_atom(g, &BTreeMap::new()).unwrap_or(false) {
                ok = false;
                break;
            }
        }
        if !ok {
            if lit.positive {
                return Ok(None); // positive literal cannot hold at all
            }
            continue; // negative literal holds vacuously
        }
        for t in &m.args {
            match t {
                TermExpr::Var(v) if v == var => args.push(PPArg::Var),
                other => {
                    let Ok(val) = model.eval_term(other, &BTreeMap::new()) else {
                        ok = false;
                        break;
                    };
                    match model.to_gvector(&val) {
                        Some(gv) => args.push(PPArg::Param(gv)),
                        None => {
                            ok = false;
                            break;
                        }
                    }
                }
            }
        }
        if !ok {
            if lit.positive {
                return Ok(None);
            }
            continue;
        }
        let inst = PPInstance::new(m.constraint, args)?;
        if lit.positive {
            pos.push(inst);
        } else {
            neg.push(inst);
        }
    }
    let fresh = model.fresh_g(1)[0];
    match sat_constraints(&pos, &neg, &cfg.ring, fresh)? {
        SatOutcome::Sat(w) => Ok(Some(VElem::from_gvector(&w, model.field()))),
        SatOutcome::Unsat => Ok(None),
    }
}

/// Deterministic falsification candidates: parameter span points, G-points
/// and fresh generic directions.
pub fn refutation_candidates(
    model: &mut ModelHandle,
    body: &FormulaExpr,
    var: &str,
    count: usize,
) -> Vec<VElem> {
    let field = model.field().clone();
    let mut out = Vec::new();
    let mut names: std::collections::BTreeSet<String> = body.free_vars();
    names.remove(var);
    names.extend(body.consts());
    let mut params = Vec::new();
    for n in &names {
        if let Ok(v) = model.eval_term(&TermExpr::var(n.clone()), &BTreeMap::new()) {
            params.push(v);
        }
    }
    out.push(VElem::zero());
    let h: Vec<_> = model.h_generators().collect();
    let v: Vec<_> = model.v_generators().collect();
    for g in h.iter().chain(v.iter()) {
        out.push(model.elem(*g));
    }
    for p in &params {
        out.push(p.clone());
        out.push(p.scale(&FieldElem::from_int(&field, -1)));
        out.push(p.scale(&FieldElem::from_int(&field, 2)));
        out.push(p.scale(&FieldElem::from_rational(&field, Rat::new(BigInt::one(), BigInt::from(2)))));
        for g in &h {
            out.push(p.add(&model.elem(*g)));
        }
    }
    for (i, p) in params.iter().enumerate() {
        for q in params.iter().skip(i + 1) {
            out.push(p.add(q));
            out.push(p.sub(q));
        }
    }
    let fresh_h = model.fresh_g(1)[0];
    let fresh_v = model.fresh_generic(1)[0];
    out.push(model.elem(fresh_h));
    out.push(model.elem(fresh_v));
    for p in &params {
        out.push(p.add(&model.elem(fresh_v)));
        out.push(p.add(&model.elem(fresh_h)));
    }
    let mut k = 2i64;
    while out.len() < count {
        out.push(model.elem(fresh_h).scale(&FieldElem::from_int(&field, k)));
        out.push(model.elem(fresh_v).scale(&FieldElem::from_int(&field, k)));
        k += 1;
    }
    out.truncate(count.max(1));
    out
}
