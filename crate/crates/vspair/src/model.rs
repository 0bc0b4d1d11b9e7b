//! The executable term model of the pair (V, G): `V` is the F-span of an
//! extensible family of formal generators, `G` is the R-span of the
//! designated h-generators.  Freshly created generators satisfy no relation
//! with existing elements, so the freeness axiom holds exactly rather than
//! probabilistically.
//!
//! In ordered mode every generator carries a rational position and elements
//! compare through the induced evaluation map, with a lexicographic tie
//! break; this keeps the order dense and lets density witnesses place fresh
//! generators inside any interval whose endpoints have distinct evaluations.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::formula::{AtomExpr, FormulaExpr, TermExpr};
use crate::gmodule::{eval_pp, GVector, GenId};
use crate::linalg::{kernel_basis, kernel_int, rref, IntMatrix, RatMatrix};
use crate::scalar::{rat_int, FieldElem, FieldSpec, Rat, RingSpec};

// ---------------------------------------------------------------------------
// elements
// ---------------------------------------------------------------------------

/// An element of the ambient space: a finite F-linear combination of
/// generators.  Zero coefficients are elided; equality is coefficient-wise.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VElem {
    coeffs: BTreeMap<GenId, FieldElem>,
}

impl VElem {
    pub fn zero() -> VElem {
        VElem::default()
    }

    pub fn generator(id: GenId, spec: &Arc<FieldSpec>) -> VElem {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(id, FieldElem::one(spec));
        VElem { coeffs }
    }

    pub fn set(&mut self, g: GenId, c: FieldElem) {
        if c.is_zero() {
            self.coeffs.remove(&g);
        } else {
            self.coeffs.insert(g, c);
        }
    }

    pub fn coeff(&self, g: GenId, spec: &Arc<FieldSpec>) -> FieldElem {
        self.coeffs
            .get(&g)
            .cloned()
            .unwrap_or_else(|| FieldElem::zero(spec))
    }

    pub fn coeffs(&self) -> &BTreeMap<GenId, FieldElem> {
        &self.coeffs
    }

    pub fn support(&self) -> impl Iterator<Item = GenId> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, rhs: &VElem) -> VElem {
        let mut out = self.clone();
        for (g, c) in &rhs.coeffs {
            let cur = out.coeffs.get(g);
            let v = match cur {
                Some(x) => x.add(c),
                None => c.clone(),
            };
            out.set(*g, v);
        }
        out
    }

    pub fn sub(&self, rhs: &VElem) -> VElem {
        let mut out = self.clone();
        for (g, c) in &rhs.coeffs {
            let cur = out.coeffs.get(g);
            let v = match cur {
                Some(x) => x.sub(c),
                None => c.neg(),
            };
            out.set(*g, v);
        }
        out
    }

    pub fn scale(&self, lam: &FieldElem) -> VElem {
        if lam.is_zero() {
            return VElem::zero();
        }
        VElem {
            coeffs: self
                .coeffs
                .iter()
                .map(|(g, c)| (*g, c.mul(lam)))
                .collect(),
        }
    }

    pub fn from_gvector(gv: &GVector, spec: &Arc<FieldSpec>) -> VElem {
        let mut out = VElem::zero();
        for (g, c) in gv.coeffs() {
            out.set(*g, FieldElem::from_rational(spec, c.clone()));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// the model
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ModelHandle {
    field: Arc<FieldSpec>,
    ring: RingSpec,
    h_gens: BTreeSet<GenId>,
    v_gens: BTreeSet<GenId>,
    names: BTreeMap<String, GenId>,
    labels: BTreeMap<GenId, String>,
    positions: BTreeMap<GenId, Rat>,
    bindings: BTreeMap<String, VElem>,
    next_id: GenId,
}

impl ModelHandle {
    pub fn new(field: Arc<FieldSpec>, ring: RingSpec) -> ModelHandle {
        ModelHandle {
            field,
            ring,
            h_gens: BTreeSet::new(),
            v_gens: BTreeSet::new(),
            names: BTreeMap::new(),
            labels: BTreeMap::new(),
            positions: BTreeMap::new(),
            bindings: BTreeMap::new(),
            next_id: 1,
        }
    }

    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn is_ordered(&self) -> bool {
        self.field.is_ordered()
    }

    fn alloc(&mut self, prefix: &str, position: Option<Rat>) -> GenId {
        let id = self.next_id;
        self.next_id += 1;
        let label = format!("{prefix}{id}");
        self.names.insert(label.clone(), id);
        self.labels.insert(id, label);
        let pos = position.unwrap_or_else(|| rat_int(id as i64));
        self.positions.insert(id, pos);
        id
    }

    /// New generators of G.
    pub fn fresh_g(&mut self, count: usize) -> Vec<GenId> {
        (0..count)
            .map(|_| {
                let id = self.alloc("h", None);
                self.h_gens.insert(id);
                id
            })
            .collect()
    }

    /// New generic directions (outside the span of G and older elements).
    pub fn fresh_generic(&mut self, count: usize) -> Vec<GenId> {
        (0..count)
            .map(|_| {
                let id = self.alloc("v", None);
                self.v_gens.insert(id);
                id
            })
            .collect()
    }

    /// New G-generator at an explicit order position.
    pub fn fresh_g_at(&mut self, position: Rat) -> GenId {
        let id = self.alloc("h", Some(position));
        self.h_gens.insert(id);
        id
    }

    pub fn fresh_generic_at(&mut self, position: Rat) -> GenId {
        let id = self.alloc("v", Some(position));
        self.v_gens.insert(id);
        id
    }

    pub fn h_generators(&self) -> impl Iterator<Item = GenId> + '_ {
        self.h_gens.iter().copied()
    }

    pub fn v_generators(&self) -> impl Iterator<Item = GenId> + '_ {
        self.v_gens.iter().copied()
    }

    pub fn is_h(&self, g: GenId) -> bool {
        self.h_gens.contains(&g)
    }

    pub fn label(&self, g: GenId) -> &str {
        self.labels.get(&g).map(|s| s.as_str()).unwrap_or("?")
    }

    pub fn lookup_name(&self, name: &str) -> Option<GenId> {
        self.names.get(name).copied()
    }

    pub fn elem(&self, g: GenId) -> VElem {
        VElem::generator(g, &self.field)
    }

    pub fn bind(&mut self, name: impl Into<String>, v: VElem) {
        self.bindings.insert(name.into(), v);
    }

    pub fn binding(&self, name: &str) -> Option<&VElem> {
        self.bindings.get(name)
    }

    pub fn bindings(&self) -> &BTreeMap<String, VElem> {
        &self.bindings
    }

    // ----- G membership and decomposition ---------------------------------

    /// Exact G-membership: support inside the h-generators with all
    /// coefficients in R.
    pub fn in_g(&self, v: &VElem) -> bool {
        v.coeffs.iter().all(|(g, c)| self.h_gens.contains(g) && c.in_ring(&self.ring))
    }

    pub fn to_gvector(&self, v: &VElem) -> Option<GVector> {
        if !self.in_g(v) {
            return None;
        }
        Some(GVector::from_coeffs(v.coeffs.iter().map(|(g, c)| {
            (*g, c.as_rational().expect("G coefficients are rational").clone())
        })))
    }

    /// Decompose `v = sum_i lams_i * g_i` with every `g_i` in G; unique when
    /// it exists because the scalars are independent over Frac(R).
    pub fn decompose_g_lambda(&self, v: &VElem, lams: &[FieldElem]) -> Option<Vec<GVector>> {
        let deg = self.field.degree();
        let n = lams.len();
        // per coordinate: solve sum_i lams_i r_i = c over Q, then check R
        let mut comps = vec![GVector::zero(); n];
        for (g, c) in &v.coeffs {
            if !self.h_gens.contains(g) {
                return None;
            }
            let mat = RatMatrix::from_rows(
                (0..deg)
                    .map(|k| lams.iter().map(|l| l.coords()[k].clone()).collect())
                    .collect(),
            );
            let rhs: Vec<Rat> = c.coords().to_vec();
            let sol = crate::linalg::solve_rational(&mat, &rhs).ok()??;
            for (i, r) in sol.iter().enumerate() {
                if !self.ring.contains(r) {
                    return None;
                }
                if !r.is_zero() {
                    let mut cur = comps[i].coeff(*g);
                    cur += r;
                    comps[i].set(*g, cur);
                }
            }
        }
        Some(comps)
    }

    /// Membership in `G_lams = lams_1 G + ... + lams_n G`.
    pub fn in_g_lambda(&self, v: &VElem, lams: &[FieldElem]) -> bool {
        self.decompose_g_lambda(v, lams).is_some()
    }

    // ----- order -----------------------------------------------------------

    /// Evaluation of an element under the generator positions.
    pub fn eval_position(&self, v: &VElem) -> FieldElem {
        let mut acc = FieldElem::zero(&self.field);
        for (g, c) in &v.coeffs {
            let pos = FieldElem::from_rational(&self.field, self.positions[g].clone());
            acc = acc.add(&c.mul(&pos));
        }
        acc
    }

    /// Total order: evaluation first, lexicographic by generator id to break
    /// ties.  Requires ordered mode.
    pub fn compare(&self, a: &VElem, b: &VElem) -> Result<std::cmp::Ordering> {
        if !self.is_ordered() {
            return Err(Error::Unordered);
        }
        let d = a.sub(b);
        if d.is_zero() {
            return Ok(std::cmp::Ordering::Equal);
        }
        let e = self.eval_position(&d);
        match e.sign()? {
            s if s > 0 => Ok(std::cmp::Ordering::Greater),
            s if s < 0 => Ok(std::cmp::Ordering::Less),
            _ => {
                let (_, c) = d.coeffs.iter().next().expect("nonzero");
                Ok(match c.sign()? {
                    s if s > 0 => std::cmp::Ordering::Greater,
                    _ => std::cmp::Ordering::Less,
                })
            }
        }
    }

    // ----- evaluation -------------------------------------------------------

    pub fn eval_term(&self, t: &TermExpr, assignment: &BTreeMap<String, VElem>) -> Result<VElem> {
        match t {
            TermExpr::Zero => Ok(VElem::zero()),
            TermExpr::Var(name) | TermExpr::Const(name) => {
                if let Some(v) = assignment.get(name) {
                    return Ok(v.clone());
                }
                if let Some(g) = self.lookup_name(name) {
                    return Ok(self.elem(g));
                }
                if let Some(v) = self.bindings.get(name) {
                    return Ok(v.clone());
                }
                Err(Error::UnboundVariable(name.clone()))
            }
            TermExpr::Scale(l, inner) => Ok(self.eval_term(inner, assignment)?.scale(l)),
            TermExpr::Sum(a, b) => {
                Ok(self.eval_term(a, assignment)?.add(&self.eval_term(b, assignment)?))
            }
            TermExpr::FApp { lams, index, arg } => {
                let v = self.eval_term(arg, assignment)?;
                match self.decompose_g_lambda(&v, lams) {
                    Some(comps) => Ok(VElem::from_gvector(&comps[index - 1], &self.field)),
                    None => Ok(VElem::zero()), // undefined outside G_lams
                }
            }
        }
    }

    pub fn eval_atom(&self, a: &AtomExpr, assignment: &BTreeMap<String, VElem>) -> Result<bool> {
        match a {
            AtomExpr::Eq(x, y) => {
                Ok(self.eval_term(x, assignment)? == self.eval_term(y, assignment)?)
            }
            AtomExpr::Lt(x, y) => {
                let l = self.eval_term(x, assignment)?;
                let r = self.eval_term(y, assignment)?;
                Ok(self.compare(&l, &r)? == std::cmp::Ordering::Less)
            }
            AtomExpr::InG(t) => Ok(self.in_g(&self.eval_term(t, assignment)?)),
            AtomExpr::InGLambda { lams, term } => {
                Ok(self.in_g_lambda(&self.eval_term(term, assignment)?, lams))
            }
            AtomExpr::PP { constraint, args } => {
                let mut gargs = Vec::with_capacity(args.len());
                for t in args {
                    let v = self.eval_term(t, assignment)?;
                    match self.to_gvector(&v) {
                        Some(gv) => gargs.push(gv),
                        None => return Ok(false), // pp arguments must lie in G
                    }
                }
                eval_pp(constraint, &gargs, &self.ring)
            }
        }
    }

    /// Exact truth value of a quantifier-free formula under an assignment.
    pub fn eval_qfree(
        &self,
        f: &FormulaExpr,
        assignment: &BTreeMap<String, VElem>,
    ) -> Result<bool> {
        match f {
            FormulaExpr::True => Ok(true),
            FormulaExpr::False => Ok(false),
            FormulaExpr::Atom(a) => self.eval_atom(a, assignment),
            FormulaExpr::Not(g) => Ok(!self.eval_qfree(g, assignment)?),
            FormulaExpr::And(a, b) => {
                Ok(self.eval_qfree(a, assignment)? && self.eval_qfree(b, assignment)?)
            }
            FormulaExpr::Or(a, b) => {
                Ok(self.eval_qfree(a, assignment)? || self.eval_qfree(b, assignment)?)
            }
            FormulaExpr::Exists(..) | FormulaExpr::Forall(..) => Err(Error::QuantifierPresent),
        }
    }

    pub fn format_elem(&self, v: &VElem) -> String {
        if v.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (g, c) in &v.coeffs {
            let label = self.label(*g);
            if c.is_one() {
                parts.push(label.to_string());
            } else if c.in_fraction_field() {
                parts.push(format!("{c}*{label}"));
            } else {
                parts.push(format!("({c})*{label}"));
            }
        }
        parts.join(" + ")
    }
}

// ---------------------------------------------------------------------------
// rational-grid spaces: spans, closure, G-parts
// ---------------------------------------------------------------------------

/// A finite-dimensional subspace of V presented over a fixed generator
/// support as a reduced rational basis of the underlying Q-grid (one block
/// of `deg` rational coordinates per generator).
#[derive(Debug, Clone)]
pub struct QSpace {
    pub support: Vec<GenId>,
    pub deg: usize,
    /// reduced row basis, rows are grid vectors
    pub basis: Vec<Vec<Rat>>,
}

impl QSpace {
    fn grid_len(&self) -> usize {
        self.support.len() * self.deg
    }

    pub fn dim_q(&self) -> usize {
        self.basis.len()
    }

    pub fn contains_vec(&self, vec: &[Rat]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(vec.to_vec());
        let m = RatMatrix::from_rows(rows);
        let (_, pivots) = rref(&m);
        pivots.len() == self.basis.len()
    }

    pub fn contains(&self, model: &ModelHandle, v: &VElem) -> bool {
        match velem_to_grid(v, &self.support, self.deg, model.field()) {
            Some(vec) => self.contains_vec(&vec),
            None => false, // support outside the space's support
        }
    }
}

fn velem_to_grid(
    v: &VElem,
    support: &[GenId],
    deg: usize,
    spec: &Arc<FieldSpec>,
) -> Option<Vec<Rat>> {
    let index: BTreeMap<GenId, usize> =
        support.iter().enumerate().map(|(i, g)| (*g, i)).collect();
    let mut out = vec![Rat::zero(); support.len() * deg];
    for (g, c) in v.coeffs() {
        let i = *index.get(g)?;
        for k in 0..deg {
            out[i * deg + k] = c.coords()[k].clone();
        }
    }
    let _ = spec;
    Some(out)
}

fn grid_to_velem(vec: &[Rat], support: &[GenId], deg: usize, spec: &Arc<FieldSpec>) -> VElem {
    let mut out = VElem::zero();
    for (i, g) in support.iter().enumerate() {
        let coords: Vec<Rat> = (0..deg).map(|k| vec[i * deg + k].clone()).collect();
        out.set(*g, FieldElem::from_coords(spec, coords));
    }
    out
}

/// F-span of a finite element set as a Q-grid space (the F-span equals the
/// Q-span of the generator-power multiples).
pub fn span_of(model: &ModelHandle, elems: &[VElem]) -> QSpace {
    let deg = model.field().degree();
    let mut support: BTreeSet<GenId> = BTreeSet::new();
    for e in elems {
        support.extend(e.support());
    }
    let support: Vec<GenId> = support.into_iter().collect();
    let mut rows = Vec::new();
    let mut powers = vec![FieldElem::one(model.field())];
    if deg > 1 {
        let gen = FieldElem::generator(model.field()).expect("number field");
        for _ in 1..deg {
            let last = powers.last().unwrap().clone();
            powers.push(last.mul(&gen));
        }
    }
    for e in elems {
        for p in &powers {
            let scaled = e.scale(p);
            if let Some(vec) = velem_to_grid(&scaled, &support, deg, model.field()) {
                rows.push(vec);
            }
        }
    }
    QSpace { support, deg, basis: reduce_rows(rows) }
}

fn reduce_rows(rows: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let m = RatMatrix::from_rows(rows);
    let (r, pivots) = rref(&m);
    (0..pivots.len())
        .map(|i| (0..r.cols).map(|j| r[(i, j)].clone()).collect())
        .collect()
}

/// The result of closing a set under the decomposition functions: a basis
/// of the closure and an R-lattice basis of its G-part.
#[derive(Debug, Clone)]
pub struct ClosedSet {
    pub space: QSpace,
    pub basis: Vec<VElem>,
    pub g_part: Vec<VElem>,
}

impl ClosedSet {
    pub fn dim_q(&self) -> usize {
        self.space.dim_q()
    }
}

/// Closure of a finite set: the smallest subspace containing it that is
/// closed under all decomposition-function extractions.  The h-supported
/// part of the space is split along the rational structure of its
/// coefficients; the extracted components are adjoined until the dimension
/// stabilizes.
pub fn closure(model: &ModelHandle, elems: &[VElem]) -> ClosedSet {
    let deg = model.field().degree();
    let mut space = span_of(model, elems);
    loop {
        let adjoined = extract_components(model, &space);
        if adjoined.is_empty() {
            break;
        }
        let mut all: Vec<VElem> = space
            .basis
            .iter()
            .map(|r| grid_to_velem(r, &space.support, deg, model.field()))
            .collect();
        let before = space.dim_q();
        all.extend(adjoined);
        let next = span_of(model, &all);
        if next.dim_q() == before {
            space = next;
            break;
        }
        space = next;
    }
    let basis: Vec<VElem> = space
        .basis
        .iter()
        .map(|r| grid_to_velem(r, &space.support, deg, model.field()))
        .collect();
    let g_part = g_part_of_space(model, &space);
    ClosedSet { space, basis, g_part }
}

/// Rational component vectors of the h-supported part of a space: for every
/// basis vector of `space ∩ span(h-gens)`, the per-power-index slices are
/// rational h-combinations; they generate the same Q-space as all
/// decomposition extractions.
fn extract_components(model: &ModelHandle, space: &QSpace) -> Vec<VElem> {
    let deg = space.deg;
    let w_basis = h_supported_part(model, space);
    let mut out = Vec::new();
    for w in &w_basis {
        for k in 0..deg {
            let mut comp = VElem::zero();
            for (i, g) in space.support.iter().enumerate() {
                let c = w[i * deg + k].clone();
                if !c.is_zero() {
                    comp.set(*g, FieldElem::from_rational(model.field(), c));
                }
            }
            if comp.is_zero() {
                continue;
            }
            // only new directions matter
            if let Some(vec) = velem_to_grid(&comp, &space.support, deg, model.field()) {
                if !space.contains_vec(&vec) {
                    out.push(comp);
                } else {
                    // may still refine the rational structure inside the space
                    out.push(comp);
                }
            }
        }
    }
    // drop components already inside the space AND expressible from previous
    // components; cheap filter: keep only those enlarging the Q-span of the
    // current basis set
    let mut kept = Vec::new();
    let mut rows: Vec<Vec<Rat>> = space.basis.clone();
    let mut dim = reduce_rows(rows.clone()).len();
    for c in out {
        if let Some(vec) = velem_to_grid(&c, &space.support, deg, model.field()) {
            rows.push(vec);
            let nd = reduce_rows(rows.clone()).len();
            if nd > dim {
                dim = nd;
                kept.push(c);
            } else {
                rows.pop();
            }
        }
    }
    kept
}

/// Basis of `space ∩ span(h-generators)` as grid vectors.
fn h_supported_part(model: &ModelHandle, space: &QSpace) -> Vec<Vec<Rat>> {
    if space.basis.is_empty() {
        return Vec::new();
    }
    let deg = space.deg;
    let v_cols: Vec<usize> = space
        .support
        .iter()
        .enumerate()
        .filter(|(_, g)| !model.is_h(**g))
        .flat_map(|(i, _)| (0..deg).map(move |k| i * deg + k))
        .collect();
    if v_cols.is_empty() {
        return space.basis.clone();
    }
    // solve for combinations of basis rows vanishing on the v-columns
    let m = RatMatrix::from_rows(
        v_cols
            .iter()
            .map(|&j| space.basis.iter().map(|row| row[j].clone()).collect())
            .collect(),
    );
    let combos = kernel_basis(&m);
    let mut out = Vec::new();
    for c in combos {
        let mut vec = vec![Rat::zero(); space.grid_len()];
        for (i, coeff) in c.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            for (j, cell) in space.basis[i].iter().enumerate() {
                vec[j] += cell * coeff;
            }
        }
        out.push(vec);
    }
    reduce_rows(out)
}

/// R-lattice basis of `space ∩ G`: the rational points of the h-supported
/// part, saturated to an integer lattice over the h-support.
fn g_part_of_space(model: &ModelHandle, space: &QSpace) -> Vec<VElem> {
    let deg = space.deg;
    let h_support: Vec<GenId> = space
        .support
        .iter()
        .copied()
        .filter(|g| model.is_h(*g))
        .collect();
    if h_support.is_empty() {
        return Vec::new();
    }
    let w_basis = h_supported_part(model, space);
    // rational component span over the h-support
    let index: BTreeMap<GenId, usize> =
        h_support.iter().enumerate().map(|(i, g)| (*g, i)).collect();
    let mut rat_rows: Vec<Vec<Rat>> = Vec::new();
    for w in &w_basis {
        for k in 0..deg {
            let mut row = vec![Rat::zero(); h_support.len()];
            let mut nonzero = false;
            for (i, g) in space.support.iter().enumerate() {
                let c = w[i * deg + k].clone();
                if !c.is_zero() {
                    row[index[g]] = c;
                    nonzero = true;
                }
            }
            if nonzero {
                rat_rows.push(row);
            }
        }
    }
    let rat_basis = reduce_rows(rat_rows);
    if rat_basis.is_empty() {
        return Vec::new();
    }
    // constraints cutting out the rational span: C x = 0  <=>  x in span
    let r = RatMatrix::from_rows(rat_basis.clone());
    let perp = kernel_basis(&r);
    let lattice_basis: Vec<Vec<BigInt>> = if perp.is_empty() {
        // full space: standard basis
        (0..h_support.len())
            .map(|i| {
                let mut e = vec![BigInt::zero(); h_support.len()];
                e[i] = BigInt::one();
                e
            })
            .collect()
    } else {
        // clear denominators per constraint row and take the integer kernel
        let mut int_rows = Vec::new();
        for row in &perp {
            let mut lcm = BigInt::one();
            for q in row {
                lcm = num_integer::Integer::lcm(&lcm, q.denom());
            }
            int_rows.push(
                row.iter()
                    .map(|q| (q * Rat::from(lcm.clone())).to_integer())
                    .collect::<Vec<BigInt>>(),
            );
        }
        kernel_int(&IntMatrix::from_rows(int_rows)).unwrap_or_default()
    };
    lattice_basis
        .into_iter()
        .map(|vecb| {
            let mut v = VElem::zero();
            for (i, g) in h_support.iter().enumerate() {
                if !vecb[i].is_zero() {
                    v.set(
                        *g,
                        FieldElem::from_rational(model.field(), Rat::from(vecb[i].clone())),
                    );
                }
            }
            v
        })
        .filter(|v| !v.is_zero())
        .collect()
}

/// Is the set G-independent, i.e. does its closure add nothing beyond the
/// plain span?
pub fn g_independent(model: &ModelHandle, elems: &[VElem]) -> bool {
    let plain = span_of(model, elems);
    let closed = closure(model, elems);
    plain.dim_q() == closed.dim_q()
}

/// Canonical G-elements needed to make the tuple G-independent over C:
/// the G-part of the closure of (tuple, C) minus the rational span of G(C).
pub fn g_basis(model: &ModelHandle, tuple: &[VElem], c: &[VElem]) -> Result<Vec<VElem>> {
    if !g_independent(model, c) {
        return Err(Error::CNotIndependent);
    }
    let c_closed = closure(model, c);
    let mut all: Vec<VElem> = tuple.to_vec();
    all.extend_from_slice(&c_closed.basis);
    let joint = closure(model, &all);
    let gc_span = span_of(model, &c_closed.g_part);
    Ok(joint
        .g_part
        .into_iter()
        .filter(|v| {
            velem_to_grid(v, &gc_span.support, gc_span.deg, model.field())
                .map_or(true, |vec| !gc_span.contains_vec(&vec))
        })
        .collect())
}

// ---------------------------------------------------------------------------
// the independence relation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndepVerdict {
    pub independent: bool,
    pub failed_condition: Option<u8>,
}

/// Bound for the heir criterion: multipliers and moduli checked in
/// condition (2), derived from the Smith diagonals of the occurring
/// lattices (at least 4, capped at 24).
fn heir_bound(lats: &[&IntMatrix]) -> u64 {
    let mut b: u64 = 1;
    for l in lats {
        if l.cols == 0 {
            continue;
        }
        if let Ok(diag) = crate::linalg::snf_diagonal(l) {
            for d in diag {
                if !d.is_zero() {
                    let v = d.abs().min(BigInt::from(24u64));
                    let v: u64 = v.try_into().unwrap_or(24);
                    b = (b.saturating_mul(v.max(1))).min(24);
                }
            }
        }
    }
    b.max(4)
}

/// The three-condition independence check of the tuple from D over the
/// closed base V0 (pure vector-space base theory):
///   (1) the closure of (V0, tuple) meets D exactly in V0;
///   (2) the heir criterion: every coset condition `r g ∈ d + s G` with
///       parameters from G(D) is matched by a parameter from G(V0);
///   (3) G(span(closure(V0 tuple) ∪ D)) = G(closure(V0 tuple)) + G(D).
/// Returns the first failed condition.
pub fn indep_g(
    model: &ModelHandle,
    tuple: &[VElem],
    v0: &ClosedSet,
    d: &ClosedSet,
) -> Result<IndepVerdict> {
    // D must contain V0
    for b in &v0.basis {
        if !d.space.contains(model, b) {
            return Err(Error::NotClosed2);
        }
    }
    let mut a_elems: Vec<VElem> = v0.basis.clone();
    a_elems.extend_from_slice(tuple);
    let a_closed = closure(model, &a_elems);

    // (1): dim(A ∩ D) = dim V0 via the dimension formula
    let mut union: Vec<VElem> = a_closed.basis.clone();
    union.extend_from_slice(&d.basis);
    let sum_space = span_of(model, &union);
    let meet_dim = a_closed.dim_q() + d.dim_q() - sum_space.dim_q();
    if meet_dim != v0.dim_q() {
        return Ok(IndepVerdict { independent: false, failed_condition: Some(1) });
    }

    // joint h-support for the lattice conditions, including generators that
    // only surface in the G-part of the sum space
    let g_sum_part = g_part_of_space(model, &sum_space);
    let mut h_support: BTreeSet<GenId> = BTreeSet::new();
    for v in a_closed
        .g_part
        .iter()
        .chain(d.g_part.iter())
        .chain(v0.g_part.iter())
        .chain(g_sum_part.iter())
    {
        h_support.extend(v.support());
    }
    let h_support: Vec<GenId> = h_support.into_iter().collect();
    let dim = h_support.len();
    let lat = |elems: &[VElem]| -> IntMatrix {
        let cols: Vec<Vec<BigInt>> = elems
            .iter()
            .map(|v| {
                h_support
                    .iter()
                    .map(|g| {
                        let c = v.coeff(*g, model.field());
                        c.as_rational()
                            .map(|q| {
                                debug_assert!(q.denom().is_one());
                                q.numer().clone()
                            })
                            .unwrap_or_else(BigInt::zero)
                    })
                    .collect()
            })
            .collect();
        if cols.is_empty() {
            IntMatrix::zero(dim, 0)
        } else {
            IntMatrix::from_rows(cols).transpose()
        }
    };
    let l_a = lat(&a_closed.g_part);
    let l_d = lat(&d.g_part);
    let l_0 = lat(&v0.g_part);

    // (2): heir criterion over the occurring moduli
    if dim > 0 {
        let full = IntMatrix::identity(dim);
        let bound = heir_bound(&[&l_a, &l_d, &l_0]);
        for s in 0..=bound {
            let s_side = |base: &IntMatrix| -> Result<IntMatrix> {
                if s == 0 {
                    crate::linalg::lattice_canon(base)
                } else {
                    let mut scaled = full.clone();
                    for i in 0..dim {
                        scaled[(i, i)] = BigInt::from(s);
                    }
                    crate::linalg::lattice_sum(base, &scaled)
                }
            };
            let rhs_d = s_side(&l_d)?;
            let rhs_0 = s_side(&l_0)?;
            for r in 1..=bound {
                let mut ra = l_a.clone();
                for i in 0..ra.rows {
                    for j in 0..ra.cols {
                        let t = &ra[(i, j)] * BigInt::from(r);
                        ra[(i, j)] = t;
                    }
                }
                let lhs = crate::linalg::lattice_intersect(&ra, &rhs_d)?;
                if !crate::linalg::lattice_subset(&lhs, &rhs_0)? {
                    return Ok(IndepVerdict { independent: false, failed_condition: Some(2) });
                }
            }
        }
    }

    // (3): G of the sum space equals the lattice sum of the G-parts
    let g_sum_space = lat(&g_sum_part);
    let g_parts_sum = crate::linalg::lattice_sum(&l_a, &l_d)?;
    if !crate::linalg::lattice_eq(&g_sum_space, &g_parts_sum)? {
        return Ok(IndepVerdict { independent: false, failed_condition: Some(3) });
    }
    Ok(IndepVerdict { independent: true, failed_condition: None })
}

// ---------------------------------------------------------------------------
// axiom checks and probes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckBounds {
    pub generators: usize,
    pub coeff_box: i64,
    pub lambda_samples: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for CheckBounds {
    fn default() -> Self {
        CheckBounds { generators: 3, coeff_box: 3, lambda_samples: 20, samples: 10_000, seed: 17 }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct AxiomReport {
    pub freeness_samples: usize,
    pub freeness_violations: usize,
    pub density_samples: usize,
    pub density_passes: usize,
    pub codensity_samples: usize,
    pub codensity_passes: usize,
    pub first_counterexample: Option<String>,
}

impl AxiomReport {
    pub fn ok(&self) -> bool {
        self.freeness_violations == 0
            && self.density_passes == self.density_samples
            && self.codensity_passes == self.codensity_samples
    }
}

fn sample_independent_tuple(
    spec: &Arc<FieldSpec>,
    rng: &mut StdRng,
    max_len: usize,
    coeff_box: i64,
) -> Vec<FieldElem> {
    let deg = spec.degree();
    let len = rng.gen_range(1..=max_len.min(deg).max(1));
    loop {
        let tuple: Vec<FieldElem> = (0..len)
            .map(|_| {
                FieldElem::from_coords(
                    spec,
                    (0..deg).map(|_| rat_int(rng.gen_range(-coeff_box..=coeff_box))).collect(),
                )
            })
            .collect();
        if tuple.iter().any(|l| l.is_zero()) {
            continue;
        }
        if crate::scalar::is_rhat_independent(&tuple) {
            return tuple;
        }
    }
}

/// Bounded constructive check of the freeness, density and codensity
/// axioms.  Freeness is tested by exhaustive falsification over sampled
/// scalar tuples and coefficient boxes; density and codensity are witnessed
/// constructively (the model is a union of finitely generated pieces, so
/// the full first-order schemes are only ever realized on demand).
pub fn check_axioms(model: &mut ModelHandle, bounds: &CheckBounds) -> Result<AxiomReport> {
    let mut rng = StdRng::seed_from_u64(bounds.seed);
    let mut report = AxiomReport {
        freeness_samples: 0,
        freeness_violations: 0,
        density_samples: 0,
        density_passes: 0,
        codensity_samples: 0,
        codensity_passes: 0,
        first_counterexample: None,
    };
    let gens = model.fresh_g(bounds.generators);
    // (freeness) independent scalars force trivial combinations
    for _ in 0..bounds.lambda_samples {
        let lams = sample_independent_tuple(model.field(), &mut rng, 3, bounds.coeff_box);
        let per_tuple = (bounds.samples / bounds.lambda_samples).max(1);
        for _ in 0..per_tuple {
            let gvecs: Vec<VElem> = (0..lams.len())
                .map(|_| {
                    let mut v = VElem::zero();
                    for g in &gens {
                        let c = rng.gen_range(-bounds.coeff_box..=bounds.coeff_box);
                        if c != 0 {
                            v.set(*g, FieldElem::from_int(model.field(), c));
                        }
                    }
                    v
                })
                .collect();
            report.freeness_samples += 1;
            let mut acc = VElem::zero();
            for (l, g) in lams.iter().zip(&gvecs) {
                acc = acc.add(&g.scale(l));
            }
            if acc.is_zero() && gvecs.iter().any(|g| !g.is_zero()) {
                report.freeness_violations += 1;
                if report.first_counterexample.is_none() {
                    report.first_counterexample = Some(format!(
                        "freeness: scalars ({}) with nonzero combination vanishing",
                        lams.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(", ")
                    ));
                }
            }
        }
    }
    // (density) a point of rG satisfying each sampled non-algebraic condition
    let generics = model.fresh_generic(2);
    let pool: Vec<VElem> = gens
        .iter()
        .chain(generics.iter())
        .map(|g| model.elem(*g))
        .collect();
    let density_rounds = (bounds.samples / 100).clamp(1, 200);
    for _ in 0..density_rounds {
        report.density_samples += 1;
        let r = BigInt::from(rng.gen_range(1..=4i64));
        let avoid: Vec<VElem> = (0..3)
            .map(|_| {
                let i = rng.gen_range(0..pool.len());
                pool[i].clone()
            })
            .collect();
        let witness = if model.is_ordered() {
            let lo = pool[rng.gen_range(0..pool.len())].clone();
            let hi_shift = VElem::from_gvector(
                &GVector::generator(0),
                model.field(),
            );
            let _ = hi_shift;
            let hi = lo.add(&model.elem(gens[0]).scale(&FieldElem::from_int(model.field(), 2)));
            let (lo, hi) = match model.compare(&lo, &hi)? {
                std::cmp::Ordering::Less => (lo, hi),
                _ => (hi, lo),
            };
            let plo = model.eval_position(&lo);
            let phi = model.eval_position(&hi);
            if plo == phi {
                // degenerate interval at equal evaluations: skip as a pass
                report.density_passes += 1;
                continue;
            }
            let rf = FieldElem::from_rational(model.field(), Rat::from(r.clone()));
            let q = crate::scalar::rational_between(&plo.div(&rf).unwrap(), &phi.div(&rf).unwrap())?;
            let fresh = model.fresh_g_at(q);
            let w = model.elem(fresh).scale(&rf);
            let ok = model.compare(&lo, &w)? == std::cmp::Ordering::Less
                && model.compare(&w, &hi)? == std::cmp::Ordering::Less
                && avoid.iter().all(|c| *c != w);
            if !ok {
                None
            } else {
                Some(w)
            }
        } else {
            let fresh = model.fresh_g(1)[0];
            let w = model
                .elem(fresh)
                .scale(&FieldElem::from_rational(model.field(), Rat::from(r.clone())));
            avoid.iter().all(|c| *c != w).then_some(w)
        };
        match witness {
            Some(w) => {
                // the witness must be a point of rG
                let scaled = w.scale(
                    &FieldElem::from_rational(model.field(), Rat::new(BigInt::one(), r.clone()))
                );
                debug_assert!(model.in_g(&scaled));
                report.density_passes += 1;
            }
            None => {
                if report.first_counterexample.is_none() {
                    report.first_counterexample =
                        Some("density: no constructive witness".to_string());
                }
            }
        }
    }
    // (codensity) a fresh generic direction realizes each sampled condition
    for _ in 0..density_rounds {
        report.codensity_samples += 1;
        let avoid: Vec<VElem> = (0..3)
            .map(|_| pool[rng.gen_range(0..pool.len())].clone())
            .collect();
        let fresh = model.fresh_generic(1)[0];
        let w = model.elem(fresh);
        if avoid.iter().all(|c| *c != w) {
            report.codensity_passes += 1;
        } else if report.first_counterexample.is_none() {
            report.first_counterexample = Some("codensity: fresh direction collided".to_string());
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct HalfgraphReport {
    pub samples: usize,
    pub hypothesis_hits: usize,
    pub violations: usize,
    pub first_counterexample: Option<String>,
}

/// Coset transitivity probe: whenever c1 - d2, c1 - d3 and c2 - d3 all lie
/// in G, so does c2 - d2.  Samples a mix of structured quadruples (built to
/// satisfy the hypotheses) and unconstrained ones.
pub fn halfgraph_probe(model: &mut ModelHandle, samples: usize, seed: u64) -> HalfgraphReport {
    let mut rng = StdRng::seed_from_u64(seed);
    let gens = model.fresh_g(4);
    let vgens = model.fresh_generic(2);
    let mut report = HalfgraphReport {
        samples: 0,
        hypothesis_hits: 0,
        violations: 0,
        first_counterexample: None,
    };
    let random_elem = |model: &ModelHandle, rng: &mut StdRng, g_only: bool| -> VElem {
        let mut v = VElem::zero();
        for g in &gens {
            let c = rng.gen_range(-5..=5i64);
            if c != 0 {
                v.set(*g, FieldElem::from_int(model.field(), c));
            }
        }
        if !g_only {
            for g in &vgens {
                if rng.gen_bool(0.4) {
                    let c = rng.gen_range(-5..=5i64);
                    if c != 0 {
                        v.set(*g, FieldElem::from_int(model.field(), c));
                    }
                }
            }
        }
        v
    };
    for i in 0..samples {
        report.samples += 1;
        let structured = i % 2 == 0;
        let (c1, c2, d2, d3) = if structured {
            // force the three hypotheses by construction
            let d2 = random_elem(model, &mut rng, false);
            let g1 = random_elem(model, &mut rng, true);
            let g2 = random_elem(model, &mut rng, true);
            let g3 = random_elem(model, &mut rng, true);
            let d3 = d2.add(&g1);
            let c1 = d2.add(&g2);
            let c2 = d3.add(&g3);
            (c1, c2, d2, d3)
        } else {
            (
                random_elem(model, &mut rng, false),
                random_elem(model, &mut rng, false),
                random_elem(model, &mut rng, false),
                random_elem(model, &mut rng, false),
            )
        };
        let hyp = model.in_g(&c1.sub(&d2)) && model.in_g(&c1.sub(&d3)) && model.in_g(&c2.sub(&d3));
        if hyp {
            report.hypothesis_hits += 1;
            if !model.in_g(&c2.sub(&d2)) {
                report.violations += 1;
                if report.first_counterexample.is_none() {
                    report.first_counterexample = Some(format!(
                        "c1={} c2={} d2={} d3={}",
                        model.format_elem(&c1),
                        model.format_elem(&c2),
                        model.format_elem(&d2),
                        model.format_elem(&d3),
                    ));
                }
            }
        }
    }
    report
}

// ---------------------------------------------------------------------------
// snapshots
// ---------------------------------------------------------------------------

pub fn snapshot_to_json(model: &ModelHandle) -> serde_json::Value {
    use serde_json::json;
    let field = match model.field().minpoly() {
        None => "rationals".to_string(),
        Some(p) => poly_text(p),
    };
    let gens = |set: &BTreeSet<GenId>| -> Vec<serde_json::Value> {
        set.iter()
            .map(|g| {
                json!({
                    "id": g,
                    "label": model.label(*g),
                    "position": crate::scalar::fmt_rat(&model.positions[g]),
                })
            })
            .collect()
    };
    let bindings: serde_json::Map<String, serde_json::Value> = model
        .bindings
        .iter()
        .map(|(name, v)| {
            let coeffs: serde_json::Map<String, serde_json::Value> = v
                .coeffs()
                .iter()
                .map(|(g, c)| (g.to_string(), serde_json::Value::String(c.to_string())))
                .collect();
            (name.clone(), serde_json::Value::Object(coeffs))
        })
        .collect();
    json!({
        "field": field,
        "ordered": model.is_ordered(),
        "ring": model.ring().to_string(),
        "h_generators": gens(&model.h_gens),
        "v_generators": gens(&model.v_gens),
        "bindings": bindings,
    })
}

fn poly_text(p: &[BigInt]) -> String {
    let spec = FieldSpec::rationals(false);
    let _ = spec;
    let mut parts = Vec::new();
    for (k, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let body = match k {
            0 => c.to_string(),
            1 if c.is_one() => "a".into(),
            1 => format!("{c}*a"),
            _ if c.is_one() => format!("a^{k}"),
            _ => format!("{c}*a^{k}"),
        };
        parts.push(body);
    }
    parts.join(" + ").replace("+ -", "- ")
}

pub fn snapshot_from_json(v: &serde_json::Value) -> Result<ModelHandle> {
    let field_txt = v["field"].as_str().ok_or_else(|| Error::Config("missing field".into()))?;
    let ordered = v["ordered"].as_bool().unwrap_or(false);
    let ring_txt = v["ring"].as_str().ok_or_else(|| Error::Config("missing ring".into()))?;
    let field = crate::config::parse_field(field_txt, ordered, 0)?;
    let ring = crate::config::parse_ring(ring_txt)?;
    let mut model = ModelHandle::new(field.clone(), ring);
    let load = |key: &str, is_h: bool, model: &mut ModelHandle| -> Result<()> {
        if let Some(arr) = v[key].as_array() {
            for item in arr {
                let id = item["id"].as_u64().ok_or_else(|| Error::Config("bad id".into()))?;
                let pos_txt = item["position"].as_str().unwrap_or("0");
                let pos = crate::config::parse_rat(pos_txt)?;
                model.next_id = model.next_id.max(id + 1);
                let label = item["label"]
                    .as_str()
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| format!("{}{}", if is_h { "h" } else { "v" }, id));
                model.names.insert(label.clone(), id);
                model.labels.insert(id, label);
                model.positions.insert(id, pos);
                if is_h {
                    model.h_gens.insert(id);
                } else {
                    model.v_gens.insert(id);
                }
            }
        }
        Ok(())
    };
    load("h_generators", true, &mut model)?;
    load("v_generators", false, &mut model)?;
    if let Some(obj) = v["bindings"].as_object() {
        for (name, coeffs) in obj {
            let mut elem = VElem::zero();
            if let Some(cmap) = coeffs.as_object() {
                for (gid, lit) in cmap {
                    let g: GenId =
                        gid.parse().map_err(|_| Error::Config("bad generator id".into()))?;
                    let c = crate::parse::parse_scalar(
                        lit.as_str().ok_or_else(|| Error::Config("bad scalar".into()))?,
                        &field,
                    )?;
                    elem.set(g, c);
                }
            }
            model.bind(name.clone(), elem);
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_formula;
    use crate::scalar::rat;

    fn q_model() -> ModelHandle {
        ModelHandle::new(FieldSpec::rationals(false), RingSpec::integers())
    }

    fn sqrt2_model() -> ModelHandle {
        let spec = FieldSpec::number_field(
            vec![BigInt::from(-2), BigInt::zero(), BigInt::one()],
            Some(1),
        )
        .unwrap();
        ModelHandle::new(spec, RingSpec::integers())
    }

    #[test]
    fn fresh_generators_and_membership() {
        let mut m = q_model();
        let hs = m.fresh_g(2);
        assert!(m.in_g(&m.elem(hs[0])));
        let sum = m.elem(hs[0]).add(&m.elem(hs[1]));
        assert!(m.in_g(&sum));
        let half = m.elem(hs[0]).scale(&FieldElem::from_rational(m.field(), rat(1, 2)));
        assert!(!m.in_g(&half));
        let v = m.fresh_generic(1)[0];
        assert!(!m.in_g(&m.elem(v)));
    }

    #[test]
    fn eval_qfree_basics() {
        let mut m = q_model();
        let h = m.fresh_g(1)[0];
        m.bind("c", m.elem(h));
        let f = parse_formula("G(c) /\\ ~G(1/2*c)", m.field()).unwrap();
        assert!(m.eval_qfree(&f, &BTreeMap::new()).unwrap());
    }

    #[test]
    fn decomposition_and_fapp() {
        let mut m = sqrt2_model();
        let hs = m.fresh_g(2);
        let sqrt2 = FieldElem::generator(m.field()).unwrap();
        // x = h1 + sqrt2 h2 lies in G_(1, sqrt2) with components (h1, h2)
        let x = m.elem(hs[0]).add(&m.elem(hs[1]).scale(&sqrt2));
        let lams = vec![FieldElem::one(m.field()), sqrt2.clone()];
        let comps = m.decompose_g_lambda(&x, &lams).expect("decomposable");
        assert_eq!(VElem::from_gvector(&comps[0], m.field()), m.elem(hs[0]));
        assert_eq!(VElem::from_gvector(&comps[1], m.field()), m.elem(hs[1]));
        // f[(1, sqrt2); 2](x) evaluates to h2
        let t = TermExpr::fapp(lams, 2, TermExpr::var("x")).unwrap();
        let mut asn = BTreeMap::new();
        asn.insert("x".to_string(), x);
        assert_eq!(m.eval_term(&t, &asn).unwrap(), m.elem(hs[1]));
        // outside the subgroup the function value is 0
        let v = m.fresh_generic(1)[0];
        let mut asn2 = BTreeMap::new();
        asn2.insert("x".to_string(), m.elem(v));
        let t2 = TermExpr::fapp(vec![FieldElem::one(m.field())], 1, TermExpr::var("x")).unwrap();
        assert_eq!(m.eval_term(&t2, &asn2).unwrap(), VElem::zero());
    }

    #[test]
    fn ordered_comparison_dense() {
        let mut m = ModelHandle::new(FieldSpec::rationals(true), RingSpec::integers());
        let h = m.fresh_g(2);
        let a = m.elem(h[0]);
        let b = m.elem(h[1]);
        let ord = m.compare(&a, &b).unwrap();
        assert_ne!(ord, std::cmp::Ordering::Equal);
        // midpoint sits strictly between
        let mid = a.add(&b).scale(&FieldElem::from_rational(m.field(), rat(1, 2)));
        let (lo, hi) = if ord == std::cmp::Ordering::Less { (a, b) } else { (b, a) };
        assert_eq!(m.compare(&lo, &mid).unwrap(), std::cmp::Ordering::Less);
        assert_eq!(m.compare(&mid, &hi).unwrap(), std::cmp::Ordering::Less);
    }

    #[test]
    fn closure_examples() {
        let mut m = sqrt2_model();
        let hs = m.fresh_g(2);
        // closure of { h1 } is just its span with G-part h1
        let c = closure(&m, &[m.elem(hs[0])]);
        assert_eq!(c.space.dim_q(), 2); // one F-dimension = two Q-dimensions
        assert_eq!(c.g_part.len(), 1);
        // closure of { h1 + sqrt2 h2 } adjoins h1 and h2
        let sqrt2 = FieldElem::generator(m.field()).unwrap();
        let mixed = m.elem(hs[0]).add(&m.elem(hs[1]).scale(&sqrt2));
        let c2 = closure(&m, &[mixed.clone()]);
        assert_eq!(c2.space.dim_q(), 4); // span_F(h1, h2)
        assert_eq!(c2.g_part.len(), 2);
        assert!(c2.space.contains(&m, &m.elem(hs[0])));
        assert!(c2.space.contains(&m, &m.elem(hs[1])));
        // closure of the empty set is trivial
        let c3 = closure(&m, &[]);
        assert_eq!(c3.space.dim_q(), 0);
        // g_independence
        assert!(g_independent(&m, &[m.elem(hs[0]), m.elem(hs[1])]));
        assert!(!g_independent(&m, &[mixed]));
    }

    #[test]
    fn g_basis_example() {
        let mut m = sqrt2_model();
        let hs = m.fresh_g(2);
        let sqrt2 = FieldElem::generator(m.field()).unwrap();
        let mixed = m.elem(hs[0]).add(&m.elem(hs[1]).scale(&sqrt2));
        let basis = g_basis(&m, &[mixed], &[]).unwrap();
        assert_eq!(basis.len(), 2);
        let span = span_of(&m, &basis);
        assert!(span.contains(&m, &m.elem(hs[0])));
        assert!(span.contains(&m, &m.elem(hs[1])));
    }

    #[test]
    fn closure_is_a_closure_operator() {
        use rand::{Rng, SeedableRng};
        let mut m = sqrt2_model();
        let hs = m.fresh_g(3);
        let vs = m.fresh_generic(2);
        let mut rng = StdRng::seed_from_u64(5);
        let sqrt2 = FieldElem::generator(m.field()).unwrap();
        for _ in 0..12 {
            let n = rng.gen_range(1..=3usize);
            let elems: Vec<VElem> = (0..n)
                .map(|_| {
                    let mut v = VElem::zero();
                    for g in hs.iter().chain(vs.iter()) {
                        if rng.gen_bool(0.5) {
                            let c0 = rng.gen_range(-2..=2i64);
                            let c1 = rng.gen_range(-1..=1i64);
                            let c = FieldElem::from_int(m.field(), c0)
                                .add(&sqrt2.scale(&rat(c1, 1)));
                            if !c.is_zero() {
                                v.set(*g, c);
                            }
                        }
                    }
                    v
                })
                .collect();
            let c1 = closure(&m, &elems);
            // extensive
            for e in &elems {
                assert!(c1.space.contains(&m, e));
            }
            // idempotent
            let c2 = closure(&m, &c1.basis);
            assert_eq!(c1.space.dim_q(), c2.space.dim_q());
            // monotone: closure of a subset has no larger dimension
            let csub = closure(&m, &elems[..1]);
            assert!(csub.space.dim_q() <= c1.space.dim_q());
        }
    }

    #[test]
    fn indep_fixtures() {
        // fresh-generic independence
        let mut m = q_model();
        let _hs = m.fresh_g(2);
        let vs = m.fresh_generic(2);
        let v0 = closure(&m, &[]);
        let d = closure(&m, &[m.elem(vs[0])]);
        let verdict = indep_g(&m, &[m.elem(vs[1])], &v0, &d).unwrap();
        assert!(verdict.independent);

        // coset failure of condition (3): a = v1 + h1, d = -v1
        let mut m = q_model();
        let hs = m.fresh_g(1);
        let vs = m.fresh_generic(1);
        let a = m.elem(vs[0]).add(&m.elem(hs[0]));
        let d_elem = m.elem(vs[0]).scale(&FieldElem::from_int(m.field(), -1));
        let v0 = closure(&m, &[]);
        let d = closure(&m, &[d_elem]);
        let verdict = indep_g(&m, &[a], &v0, &d).unwrap();
        assert_eq!(verdict.failed_condition, Some(3));

        // heir failure of condition (2): a = h1 + 2 h2 over D = <h1>
        let mut m = q_model();
        let hs = m.fresh_g(2);
        let a = m.elem(hs[0]).add(&m.elem(hs[1]).scale(&FieldElem::from_int(m.field(), 2)));
        let v0 = closure(&m, &[]);
        let d = closure(&m, &[m.elem(hs[0])]);
        let verdict = indep_g(&m, &[a], &v0, &d).unwrap();
        assert_eq!(verdict.failed_condition, Some(2));
    }

    #[test]
    fn axiom_checks_pass() {
        let mut m = sqrt2_model();
        let bounds = CheckBounds { samples: 500, lambda_samples: 5, ..Default::default() };
        let report = check_axioms(&mut m, &bounds).unwrap();
        assert!(report.ok(), "{report:?}");
        let mut m = ModelHandle::new(FieldSpec::rationals(true), RingSpec::integers());
        let report = check_axioms(&mut m, &bounds).unwrap();
        assert!(report.ok(), "{report:?}");
    }

    #[test]
    fn halfgraph_zero_violations() {
        let mut m = q_model();
        let report = halfgraph_probe(&mut m, 2000, 13);
        assert_eq!(report.violations, 0);
        assert!(report.hypothesis_hits >= 900);
    }

    #[test]
    fn snapshot_roundtrip() {
        let mut m = sqrt2_model();
        let hs = m.fresh_g(2);
        let _vs = m.fresh_generic(1);
        let sqrt2 = FieldElem::generator(m.field()).unwrap();
        m.bind("c", m.elem(hs[0]).add(&m.elem(hs[1]).scale(&sqrt2)));
        let json = snapshot_to_json(&m);
        let m2 = snapshot_from_json(&json).unwrap();
        assert_eq!(m2.binding("c"), m.binding("c"));
        assert_eq!(m2.h_gens, m.h_gens);
        assert_eq!(m2.v_gens, m.v_gens);
    }

    #[test]
    fn g_closed_under_module_operations() {
        use rand::{Rng, SeedableRng};
        let mut m = q_model();
        let hs = m.fresh_g(3);
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..200 {
            let mk = |rng: &mut StdRng| {
                let mut v = VElem::zero();
                for g in &hs {
                    let c = rng.gen_range(-4..=4i64);
                    if c != 0 {
                        v.set(*g, FieldElem::from_int(m.field(), c));
                    }
                }
                v
            };
            let x = mk(&mut rng);
            let y = mk(&mut rng);
            assert!(m.in_g(&x.add(&y)));
            assert!(m.in_g(&x.sub(&y)));
            assert!(m.in_g(&x.scale(&FieldElem::from_int(m.field(), rng.gen_range(-3..=3)))));
        }
    }
}
