//! Exact scalar arithmetic for the coefficient field `F` and the scalar ring `R`.
//!
//! The field is either the rationals or a number field `Q(a)` presented by a
//! monic integer minimal polynomial of degree at most four.  The ring is
//! either the integers or a localization of the integers at a finite set of
//! primes, so the fraction field of `R` is always `Q`.  Elements of `F` are
//! stored as rational coordinate vectors in the power basis of `a`, and all
//! arithmetic is performed exactly.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

// ---------------------------------------------------------------------------
// dense univariate polynomials over Q, little-endian coefficients
// ---------------------------------------------------------------------------

fn poly_trim(p: &mut Vec<Rat>) {
    while p.last().map_or(false, |c| c.is_zero()) {
        p.pop();
    }
}

fn poly_deg(p: &[Rat]) -> Option<usize> {
    if p.is_empty() {
        None
    } else {
        Some(p.len() - 1)
    }
}

fn poly_add(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    poly_trim(&mut out);
    out
}

fn poly_neg(a: &[Rat]) -> Vec<Rat> {
    a.iter().map(|c| -c.clone()).collect()
}

fn poly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    poly_trim(&mut out);
    out
}

/// Euclidean division, returns (quotient, remainder).
fn poly_divmod(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut rem: Vec<Rat> = a.to_vec();
    poly_trim(&mut rem);
    let db = b.len() - 1;
    let lead = b[db].clone();
    let mut quot = vec![Rat::zero(); rem.len().saturating_sub(db)];
    while rem.len() > db || (rem.len() == b.len() && !rem.is_empty() && db == 0) {
        if rem.len() < b.len() {
            break;
        }
        let dr = rem.len() - 1;
        let c = &rem[dr] / &lead;
        let shift = dr - db;
        quot[shift] = c.clone();
        for (i, bc) in b.iter().enumerate() {
            let tmp = bc * &c;
            rem[shift + i] -= tmp;
        }
        poly_trim(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    poly_trim(&mut quot);
    (quot, rem)
}

fn poly_rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    poly_divmod(a, b).1
}

fn poly_derivative(p: &[Rat]) -> Vec<Rat> {
    if p.len() <= 1 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(p.len() - 1);
    for (i, c) in p.iter().enumerate().skip(1) {
        out.push(c * Rat::from(BigInt::from(i)));
    }
    poly_trim(&mut out);
    out
}

fn poly_eval(p: &[Rat], x: &Rat) -> Rat {
    let mut acc = Rat::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Extended gcd over Q[x]: returns (g, u, v) with u*a + v*b = g, g monic or zero.
fn poly_ext_gcd(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>, Vec<Rat>) {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    poly_trim(&mut r0);
    poly_trim(&mut r1);
    let mut s0 = vec![Rat::one()];
    let mut s1: Vec<Rat> = Vec::new();
    let mut t0: Vec<Rat> = Vec::new();
    let mut t1 = vec![Rat::one()];
    while !r1.is_empty() {
        let (q, r) = poly_divmod(&r0, &r1);
        let s = poly_add(&s0, &poly_neg(&poly_mul(&q, &s1)));
        let t = poly_add(&t0, &poly_neg(&poly_mul(&q, &t1)));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
        t0 = std::mem::replace(&mut t1, t);
    }
    if let Some(d) = poly_deg(&r0) {
        let lead = r0[d].clone();
        if !lead.is_one() {
            for c in r0.iter_mut().chain(s0.iter_mut()).chain(t0.iter_mut()) {
                *c = &*c / &lead;
            }
        }
    }
    (r0, s0, t0)
}

/// Signed interval evaluation of a polynomial by interval Horner.
fn poly_eval_interval(p: &[Rat], lo: &Rat, hi: &Rat) -> (Rat, Rat) {
    let mut alo = Rat::zero();
    let mut ahi = Rat::zero();
    for c in p.iter().rev() {
        // multiply interval [alo,ahi] by [lo,hi]
        let cands = [&alo * lo, &alo * hi, &ahi * lo, &ahi * hi];
        let mut mn = cands[0].clone();
        let mut mx = cands[0].clone();
        for v in &cands[1..] {
            if *v < mn {
                mn = v.clone();
            }
            if *v > mx {
                mx = v.clone();
            }
        }
        alo = mn + c;
        ahi = mx + c;
    }
    (alo, ahi)
}

// ---------------------------------------------------------------------------
// Sturm sequences and real root isolation
// ---------------------------------------------------------------------------

fn sturm_chain(p: &[Rat]) -> Vec<Vec<Rat>> {
    let mut chain = vec![p.to_vec(), poly_derivative(p)];
    loop {
        let n = chain.len();
        if chain[n - 1].is_empty() {
            chain.pop();
            break;
        }
        let rem = poly_rem(&chain[n - 2], &chain[n - 1]);
        if rem.is_empty() {
            break;
        }
        chain.push(poly_neg(&rem));
    }
    chain
}

fn sign_changes(chain: &[Vec<Rat>], x: &Rat) -> usize {
    let mut prev = 0i8;
    let mut changes = 0usize;
    for p in chain {
        let v = poly_eval(p, x);
        let s = if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        };
        if s != 0 {
            if prev != 0 && s != prev {
                changes += 1;
            }
            prev = s;
        }
    }
    changes
}

/// Number of distinct real roots in the half-open interval (lo, hi].
fn roots_between(chain: &[Vec<Rat>], lo: &Rat, hi: &Rat) -> usize {
    sign_changes(chain, lo) - sign_changes(chain, hi)
}

/// Isolating intervals (lo, hi] for every real root, sorted increasingly.
/// Assumes p is squarefree with no rational roots (true for an irreducible
/// minimal polynomial of degree >= 2).
fn isolate_real_roots(p: &[Rat]) -> Vec<(Rat, Rat)> {
    let chain = sturm_chain(p);
    let deg = p.len() - 1;
    let lead = p[deg].abs();
    let mut maxc = Rat::zero();
    for c in &p[..deg] {
        let a = c.abs();
        if a > maxc {
            maxc = a;
        }
    }
    let bound = Rat::one() + maxc / lead;
    let mut stack = vec![(-bound.clone(), bound)];
    let mut found = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        match roots_between(&chain, &lo, &hi) {
            0 => {}
            1 => found.push((lo, hi)),
            _ => {
                let mid = (&lo + &hi) / rat_int(2);
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    found.sort_by(|a, b| a.0.cmp(&b.0));
    found
}

// ---------------------------------------------------------------------------
// integer factoring helpers (desk scale, trial division)
// ---------------------------------------------------------------------------

/// Prime factorization of |n| by trial division.  Desk-scale inputs only.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn bigint_to_u64_abs(n: &BigInt) -> Result<u64> {
    let a = n.abs();
    u64::try_from(&a).map_err(|_| Error::ResourceLimit("integer too large to factor".into()))
}

fn is_prime_u64(n: u64) -> bool {
    n >= 2 && factor_u64(n) == vec![(n, 1)]
}

/// All positive divisors of |n| (n nonzero).
fn divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    let m = bigint_to_u64_abs(n)?;
    let fac = factor_u64(m);
    let mut out = vec![BigInt::one()];
    for (p, e) in fac {
        let mut next = Vec::new();
        for d in &out {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= BigInt::from(p);
            }
        }
        out = next;
    }
    out.sort();
    out.dedup();
    Ok(out)
}

// ---------------------------------------------------------------------------
// RingSpec
// ---------------------------------------------------------------------------

/// The scalar ring `R`: the integers, or the rationals whose denominator is
/// supported on a fixed finite set of primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingSpec {
    Integers,
    /// `R = { a/b : every prime factor of b lies in `inverted` }`.
    Localization { inverted: BTreeSet<u64> },
}

impl RingSpec {
    pub fn integers() -> Self {
        RingSpec::Integers
    }

    pub fn localization(primes: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for p in primes {
            if !is_prime_u64(p) {
                return Err(Error::Config(format!("{p} is not prime")));
            }
            set.insert(p);
        }
        Ok(RingSpec::Localization { inverted: set })
    }

    fn inverted(&self) -> Option<&BTreeSet<u64>> {
        match self {
            RingSpec::Integers => None,
            RingSpec::Localization { inverted } => Some(inverted),
        }
    }

    /// Membership of a rational in R.
    pub fn contains(&self, q: &Rat) -> bool {
        let den = q.denom();
        match self.inverted() {
            None => den.is_one(),
            Some(set) => {
                let Ok(mut d) = bigint_to_u64_abs(den) else {
                    return false;
                };
                for p in set {
                    while d % p == 0 {
                        d /= p;
                    }
                }
                d == 1
            }
        }
    }

    /// Units of R: +-1 for the integers, +-(products of inverted primes) otherwise.
    pub fn is_unit(&self, q: &Rat) -> bool {
        if q.is_zero() {
            return false;
        }
        self.contains(q) && self.contains(&(Rat::one() / q))
    }

    /// Strip unit prime factors from a nonzero integer, returning the
    /// canonical nonnegative modulus it represents in R.  Zero stays zero.
    pub fn canonical_modulus(&self, n: &BigInt) -> BigInt {
        if n.is_zero() {
            return BigInt::zero();
        }
        let mut m = n.abs();
        if let Some(set) = self.inverted() {
            for p in set {
                let p = BigInt::from(*p);
                loop {
                    let (q, r) = num_integer::Integer::div_rem(&m, &p);
                    if r.is_zero() {
                        m = q;
                    } else {
                        break;
                    }
                }
            }
        }
        m
    }

    /// Does a divide b inside R (a nonzero)?
    pub fn divides(&self, a: &Rat, b: &Rat) -> bool {
        assert!(!a.is_zero());
        self.contains(&(b / a))
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingSpec::Integers => write!(f, "integers"),
            RingSpec::Localization { inverted } => {
                let list: Vec<String> = inverted.iter().map(|p| p.to_string()).collect();
                write!(f, "invert {}", list.join(","))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// FieldSpec
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum FieldKind {
    Rationals,
    /// Monic integer minimal polynomial, little-endian, degree 2..=4.
    NumberField { minpoly: Vec<BigInt> },
}

/// The coefficient field `F`, optionally ordered.  In the number-field case
/// the order is induced by a designated real root of the minimal polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec {
    kind: FieldKind,
    ordered: bool,
    root_index: usize,
    /// Isolating interval for the designated real root, when ordered.
    root_interval: Option<(Rat, Rat)>,
}

impl FieldSpec {
    pub fn rationals(ordered: bool) -> Arc<FieldSpec> {
        Arc::new(FieldSpec {
            kind: FieldKind::Rationals,
            ordered,
            root_index: 0,
            root_interval: None,
        })
    }

    /// A number field Q(a) with `minpoly` monic over the integers
    /// (little-endian coefficients, degree 2..=4, irreducible over Q).
    /// `ordered_root` selects the real root of the minimal polynomial that
    /// realizes `a`, counting real roots by increasing value.
    pub fn number_field(minpoly: Vec<BigInt>, ordered_root: Option<usize>) -> Result<Arc<FieldSpec>> {
        let deg = minpoly.len().saturating_sub(1);
        if deg < 2 {
            return Err(Error::Config(
                "minimal polynomial must have degree at least 2 (use rationals otherwise)".into(),
            ));
        }
        if deg > 4 {
            return Err(Error::Config(
                "minimal polynomials of degree above 4 are not supported".into(),
            ));
        }
        if !minpoly[deg].is_one() {
            return Err(Error::Config("minimal polynomial must be monic".into()));
        }
        if !irreducible_over_q(&minpoly)? {
            return Err(Error::Config("minimal polynomial is reducible over Q".into()));
        }
        let ratpoly: Vec<Rat> = minpoly.iter().map(|c| Rat::from(c.clone())).collect();
        let mut spec = FieldSpec {
            kind: FieldKind::NumberField { minpoly },
            ordered: false,
            root_index: 0,
            root_interval: None,
        };
        if let Some(idx) = ordered_root {
            let roots = isolate_real_roots(&ratpoly);
            if roots.is_empty() {
                return Err(Error::Config(
                    "ordered mode requires the minimal polynomial to have a real root".into(),
                ));
            }
            if idx >= roots.len() {
                return Err(Error::Config(format!(
                    "root index {idx} out of range: {} real roots",
                    roots.len()
                )));
            }
            spec.ordered = true;
            spec.root_index = idx;
            spec.root_interval = Some(roots[idx].clone());
        }
        Ok(Arc::new(spec))
    }

    pub fn degree(&self) -> usize {
        match &self.kind {
            FieldKind::Rationals => 1,
            FieldKind::NumberField { minpoly } => minpoly.len() - 1,
        }
    }

    pub fn is_rationals(&self) -> bool {
        matches!(self.kind, FieldKind::Rationals)
    }

    pub fn is_ordered(&self) -> bool {
        match &self.kind {
            FieldKind::Rationals => self.ordered,
            FieldKind::NumberField { .. } => self.ordered,
        }
    }

    pub fn minpoly(&self) -> Option<&[BigInt]> {
        match &self.kind {
            FieldKind::Rationals => None,
            FieldKind::NumberField { minpoly } => Some(minpoly),
        }
    }

    fn minpoly_rat(&self) -> Vec<Rat> {
        self.minpoly()
            .map(|p| p.iter().map(|c| Rat::from(c.clone())).collect())
            .unwrap_or_default()
    }
}

/// Irreducibility over Q of a monic integer polynomial of degree <= 4:
/// rational-root tests catch linear factors, and for quartics the integer
/// quadratic factorizations are enumerated directly (Gauss's lemma).
fn irreducible_over_q(p: &[BigInt]) -> Result<bool> {
    let deg = p.len() - 1;
    if deg == 1 {
        return Ok(true);
    }
    if p[0].is_zero() {
        return Ok(false); // x divides
    }
    // monic, so rational roots are integer divisors of the constant term
    for d in divisors(&p[0])? {
        for cand in [d.clone(), -d] {
            let mut acc = BigInt::zero();
            for c in p.iter().rev() {
                acc = acc * &cand + c;
            }
            if acc.is_zero() {
                return Ok(false);
            }
        }
    }
    if deg < 4 {
        return Ok(true); // degree 2 or 3 with no rational root
    }
    // x^4 + p3 x^3 + p2 x^2 + p1 x + p0 = (x^2 + a x + b)(x^2 + c x + d)
    let (p3, p2, p1, p0) = (&p[3], &p[2], &p[1], &p[0]);
    for b in divisors(p0)? {
        for b in [b.clone(), -b] {
            let d = p0 / &b;
            // a + c = p3, a*c = p2 - b - d, a*d + b*c = p1
            let s = p3.clone();
            let prod = p2 - &b - &d;
            let disc = &s * &s - BigInt::from(4) * &prod;
            if disc.sign() == num_bigint::Sign::Minus {
                continue;
            }
            let sq = disc.sqrt();
            if &sq * &sq != disc {
                continue;
            }
            for root in [(&s + &sq), (&s - &sq)] {
                if (&root % 2i32).is_zero() {
                    let a = root / 2;
                    let c = &s - &a;
                    if &a * &d + &b * &c == *p1 {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// FieldElem
// ---------------------------------------------------------------------------

/// An element of F, stored as rational coordinates in the power basis of the
/// field generator (a single coordinate when F = Q).
#[derive(Debug, Clone)]
pub struct FieldElem {
    spec: Arc<FieldSpec>,
    coords: Vec<Rat>,
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}
impl Eq for FieldElem {}

impl FieldElem {
    pub fn zero(spec: &Arc<FieldSpec>) -> FieldElem {
        FieldElem {
            spec: spec.clone(),
            coords: vec![Rat::zero(); spec.degree()],
        }
    }

    pub fn one(spec: &Arc<FieldSpec>) -> FieldElem {
        let mut e = Self::zero(spec);
        e.coords[0] = Rat::one();
        e
    }

    pub fn from_rational(spec: &Arc<FieldSpec>, q: Rat) -> FieldElem {
        let mut e = Self::zero(spec);
        e.coords[0] = q;
        e
    }

    pub fn from_int(spec: &Arc<FieldSpec>, n: i64) -> FieldElem {
        Self::from_rational(spec, rat_int(n))
    }

    /// The field generator `a`; an error for F = Q.
    pub fn generator(spec: &Arc<FieldSpec>) -> Result<FieldElem> {
        if spec.degree() < 2 {
            return Err(Error::Config("the rationals have no field generator".into()));
        }
        let mut e = Self::zero(spec);
        e.coords[1] = Rat::one();
        Ok(e)
    }

    pub fn from_coords(spec: &Arc<FieldSpec>, mut coords: Vec<Rat>) -> FieldElem {
        coords.resize(spec.degree(), Rat::zero());
        FieldElem { spec: spec.clone(), coords }
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn coords(&self) -> &[Rat] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }

    /// Is this element in the fraction field of R, i.e. a plain rational?
    pub fn in_fraction_field(&self) -> bool {
        self.coords[1..].iter().all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        if self.in_fraction_field() {
            Some(&self.coords[0])
        } else {
            None
        }
    }

    /// Membership in the scalar ring R (requires membership in Frac(R) = Q).
    pub fn in_ring(&self, ring: &RingSpec) -> bool {
        self.as_rational().map_or(false, |q| ring.contains(q))
    }

    pub fn add(&self, rhs: &FieldElem) -> FieldElem {
        let coords = self
            .coords
            .iter()
            .zip(&rhs.coords)
            .map(|(a, b)| a + b)
            .collect();
        FieldElem { spec: self.spec.clone(), coords }
    }

    pub fn sub(&self, rhs: &FieldElem) -> FieldElem {
        let coords = self
            .coords
            .iter()
            .zip(&rhs.coords)
            .map(|(a, b)| a - b)
            .collect();
        FieldElem { spec: self.spec.clone(), coords }
    }

    pub fn neg(&self) -> FieldElem {
        FieldElem {
            spec: self.spec.clone(),
            coords: self.coords.iter().map(|c| -c.clone()).collect(),
        }
    }

    pub fn mul(&self, rhs: &FieldElem) -> FieldElem {
        if self.spec.is_rationals() {
            return FieldElem {
                spec: self.spec.clone(),
                coords: vec![&self.coords[0] * &rhs.coords[0]],
            };
        }
        let prod = poly_mul(&self.coords, &rhs.coords);
        let rem = poly_rem(&prod, &self.spec.minpoly_rat());
        Self::from_coords(&self.spec, rem)
    }

    pub fn scale(&self, q: &Rat) -> FieldElem {
        FieldElem {
            spec: self.spec.clone(),
            coords: self.coords.iter().map(|c| c * q).collect(),
        }
    }

    pub fn inv(&self) -> Result<FieldElem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.spec.is_rationals() {
            return Ok(FieldElem {
                spec: self.spec.clone(),
                coords: vec![Rat::one() / &self.coords[0]],
            });
        }
        let mut me = self.coords.clone();
        poly_trim(&mut me);
        let (g, u, _) = poly_ext_gcd(&me, &self.spec.minpoly_rat());
        debug_assert!(poly_deg(&g) == Some(0), "minimal polynomial must be irreducible");
        let ginv = Rat::one() / &g[0];
        let scaled: Vec<Rat> = u.iter().map(|c| c * &ginv).collect();
        let rem = poly_rem(&scaled, &self.spec.minpoly_rat());
        Ok(Self::from_coords(&self.spec, rem))
    }

    pub fn div(&self, rhs: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(&rhs.inv()?))
    }

    /// Exact sign of the element under the designated real embedding.
    /// Requires an ordered field spec.
    pub fn sign(&self) -> Result<i8> {
        if !self.spec.is_ordered() {
            return Err(Error::Unordered);
        }
        if self.is_zero() {
            return Ok(0);
        }
        if let Some(q) = self.as_rational() {
            return Ok(if q.is_positive() { 1 } else { -1 });
        }
        let minpoly = self.spec.minpoly_rat();
        let (mut lo, mut hi) = self
            .spec
            .root_interval
            .clone()
            .expect("ordered number field carries a root interval");
        let mut q = self.coords.clone();
        poly_trim(&mut q);
        // q(alpha) != 0 because q mod minpoly is nonzero; refine until decisive.
        loop {
            let (vlo, vhi) = poly_eval_interval(&q, &lo, &hi);
            if vlo.is_positive() {
                return Ok(1);
            }
            if vhi.is_negative() {
                return Ok(-1);
            }
            let mid = (&lo + &hi) / rat_int(2);
            // the minimal polynomial has no rational roots, so p(mid) != 0
            let plo = poly_eval(&minpoly, &lo);
            let pmid = poly_eval(&minpoly, &mid);
            if plo.is_positive() != pmid.is_positive() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }

    pub fn cmp_ordered(&self, rhs: &FieldElem) -> Result<std::cmp::Ordering> {
        let d = self.sub(rhs);
        Ok(match d.sign()? {
            0 => std::cmp::Ordering::Equal,
            s if s > 0 => std::cmp::Ordering::Greater,
            _ => std::cmp::Ordering::Less,
        })
    }
}

impl fmt::Display for FieldElem {
    /// Canonical literal in the grammar's scalar syntax: `p/q`, `a`,
    /// `1 + 2*a - a^2`, ...
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let coeff_is_one = mag.is_one();
            if k == 0 {
                write!(f, "{}", fmt_rat(&mag))?;
            } else {
                if !coeff_is_one {
                    write!(f, "{}*", fmt_rat(&mag))?;
                }
                if k == 1 {
                    write!(f, "a")?;
                } else {
                    write!(f, "a^{k}")?;
                }
            }
        }
        Ok(())
    }
}

/// An exact rational strictly between two ordered field elements with
/// `a < b`, found by refining the interval around the designated root until
/// the two enclosures separate.
pub fn rational_between(a: &FieldElem, b: &FieldElem) -> Result<Rat> {
    let spec = a.spec().clone();
    if !spec.is_ordered() {
        return Err(Error::Unordered);
    }
    if let (Some(qa), Some(qb)) = (a.as_rational(), b.as_rational()) {
        return Ok((qa + qb) / rat_int(2));
    }
    let minpoly = spec.minpoly_rat();
    let (mut lo, mut hi) = spec
        .root_interval
        .clone()
        .expect("ordered number field carries a root interval");
    loop {
        let (alo, ahi) = poly_eval_interval(a.coords(), &lo, &hi);
        let (blo, bhi) = poly_eval_interval(b.coords(), &lo, &hi);
        let _ = (alo, bhi);
        if ahi < blo {
            return Ok((&ahi + &blo) / rat_int(2));
        }
        let mid = (&lo + &hi) / rat_int(2);
        let plo = poly_eval(&minpoly, &lo);
        let pmid = poly_eval(&minpoly, &mid);
        if plo.is_positive() != pmid.is_positive() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

pub fn fmt_rat(q: &Rat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

// ---------------------------------------------------------------------------
// independence over the fraction field
// ---------------------------------------------------------------------------

/// Outcome of the independence test over Frac(R) = Q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndependenceOutcome {
    /// All elements independent; the indices are the whole input.
    Independent { basis: Vec<usize> },
    /// The first dependent element (left to right) and its expression over
    /// the greedily extracted basis prefix.
    Dependent {
        index: usize,
        basis: Vec<usize>,
        coefficients: Vec<Rat>,
    },
}

/// Greedy left-to-right independence test of scalars over Frac(R) = Q,
/// performed on power-basis coordinates.
pub fn rhat_independent(lams: &[FieldElem]) -> IndependenceOutcome {
    assert!(!lams.is_empty(), "independence test over an empty tuple");
    let mut basis: Vec<usize> = Vec::new();
    for (i, lam) in lams.iter().enumerate() {
        let basis_elems: Vec<&FieldElem> = basis.iter().map(|&j| &lams[j]).collect();
        match express_over(lam, &basis_elems) {
            Some(coeffs) => {
                return IndependenceOutcome::Dependent {
                    index: i,
                    basis,
                    coefficients: coeffs,
                };
            }
            None => basis.push(i),
        }
    }
    IndependenceOutcome::Independent { basis }
}

pub fn is_rhat_independent(lams: &[FieldElem]) -> bool {
    matches!(rhat_independent(lams), IndependenceOutcome::Independent { .. })
}

/// Rational coordinates of `target` over an independent `basis`, or None
/// when the target lies outside the span.
pub fn rhat_coordinates(target: &FieldElem, basis: &[&FieldElem]) -> Result<Option<Vec<Rat>>> {
    let owned: Vec<FieldElem> = basis.iter().map(|&b| b.clone()).collect();
    if !owned.is_empty() && !is_rhat_independent(&owned) {
        return Err(Error::NotIndependentBasis);
    }
    Ok(express_over(target, basis))
}

/// Solve `target = sum q_j basis_j` over Q via Gaussian elimination on the
/// coordinate matrix; None when unsolvable.  Empty basis spans only zero.
fn express_over(target: &FieldElem, basis: &[&FieldElem]) -> Option<Vec<Rat>> {
    let deg = target.spec.degree();
    if basis.is_empty() {
        return if target.is_zero() { Some(Vec::new()) } else { None };
    }
    // rows: power-basis coordinates; cols: basis elements; rhs: target
    let mut m: Vec<Vec<Rat>> = (0..deg)
        .map(|r| {
            let mut row: Vec<Rat> = basis.iter().map(|b| b.coords[r].clone()).collect();
            row.push(target.coords[r].clone());
            row
        })
        .collect();
    let cols = basis.len();
    let mut pivot_rows: Vec<Option<usize>> = vec![None; cols];
    let mut row = 0usize;
    for col in 0..cols {
        let Some(p) = (row..deg).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = Rat::one() / &m[row][col];
        for c in col..=cols {
            m[row][c] = &m[row][c] * &inv;
        }
        for r in 0..deg {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=cols {
                    let t = &m[row][c] * &factor;
                    m[r][c] -= t;
                }
            }
        }
        pivot_rows[col] = Some(row);
        row += 1;
    }
    // inconsistent rows mean the target is outside the span
    for r in row..deg {
        if !m[r][cols].is_zero() {
            return None;
        }
    }
    let mut out = vec![Rat::zero(); cols];
    for (col, pr) in pivot_rows.iter().enumerate() {
        if let Some(r) = pr {
            out[col] = m[*r][cols].clone();
        }
        // columns without pivots correspond to dependent basis elements,
        // excluded by the precondition
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qsqrt2() -> Arc<FieldSpec> {
        FieldSpec::number_field(vec![BigInt::from(-2), BigInt::zero(), BigInt::one()], Some(1))
            .unwrap()
    }

    fn sqrt2(spec: &Arc<FieldSpec>) -> FieldElem {
        FieldElem::generator(spec).unwrap()
    }

    #[test]
    fn mul_reduces_by_minpoly() {
        let spec = qsqrt2();
        let s = sqrt2(&spec);
        let two = FieldElem::from_int(&spec, 2);
        assert_eq!(s.mul(&s), two);
    }

    #[test]
    fn inverse_of_one_plus_sqrt2() {
        let spec = qsqrt2();
        let x = FieldElem::one(&spec).add(&sqrt2(&spec));
        let inv = x.inv().unwrap();
        // oracle: check the product is exactly one
        assert!(x.mul(&inv).is_one());
        // frozen value: -1 + sqrt2
        let expected = sqrt2(&spec).sub(&FieldElem::one(&spec));
        assert_eq!(inv, expected);
    }

    #[test]
    fn additive_identity() {
        let spec = qsqrt2();
        let x = sqrt2(&spec).add(&FieldElem::from_rational(&spec, rat(3, 7)));
        assert_eq!(x.add(&FieldElem::zero(&spec)), x);
    }

    #[test]
    fn inv_zero_fails() {
        let spec = FieldSpec::rationals(false);
        assert_eq!(FieldElem::zero(&spec).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn fraction_field_membership() {
        let spec = qsqrt2();
        assert!(!sqrt2(&spec).in_fraction_field());
        assert!(FieldElem::from_rational(&spec, rat(1, 2)).in_fraction_field());
    }

    #[test]
    fn ring_membership() {
        let spec = FieldSpec::rationals(false);
        let half = FieldElem::from_rational(&spec, rat(1, 2));
        assert!(!half.in_ring(&RingSpec::integers()));
        let z2 = RingSpec::localization([2]).unwrap();
        assert!(half.in_ring(&z2));
        assert!(!FieldElem::from_rational(&spec, rat(1, 6)).in_ring(&z2));
    }

    #[test]
    fn localization_units_and_moduli() {
        let z2 = RingSpec::localization([2]).unwrap();
        assert!(z2.is_unit(&rat_int(2)));
        assert!(z2.is_unit(&rat(1, 4)));
        assert!(!z2.is_unit(&rat_int(3)));
        assert_eq!(z2.canonical_modulus(&BigInt::from(12)), BigInt::from(3));
        assert_eq!(
            RingSpec::integers().canonical_modulus(&BigInt::from(-12)),
            BigInt::from(12)
        );
    }

    #[test]
    fn independence_power_basis() {
        let spec = qsqrt2();
        let one = FieldElem::one(&spec);
        let s = sqrt2(&spec);
        match rhat_independent(&[one, s]) {
            IndependenceOutcome::Independent { basis } => assert_eq!(basis, vec![0, 1]),
            _ => panic!("expected independent"),
        }
    }

    #[test]
    fn dependence_certificate() {
        let spec = FieldSpec::rationals(false);
        let one = FieldElem::one(&spec);
        let two = FieldElem::from_int(&spec, 2);
        match rhat_independent(&[one, two]) {
            IndependenceOutcome::Dependent { index, basis, coefficients } => {
                assert_eq!(index, 1);
                assert_eq!(basis, vec![0]);
                assert_eq!(coefficients, vec![rat_int(2)]);
            }
            _ => panic!("expected dependent"),
        }
    }

    #[test]
    fn dependence_certificate_number_field() {
        // (1+sqrt2, 2+2*sqrt2, sqrt2): the second element is twice the first
        let spec = qsqrt2();
        let a = FieldElem::one(&spec).add(&sqrt2(&spec));
        let b = a.scale(&rat_int(2));
        let c = sqrt2(&spec);
        match rhat_independent(&[a, b, c]) {
            IndependenceOutcome::Dependent { index, basis, coefficients } => {
                assert_eq!(index, 1);
                assert_eq!(basis, vec![0]);
                assert_eq!(coefficients, vec![rat_int(2)]);
            }
            _ => panic!("expected dependent"),
        }
    }

    #[test]
    fn coordinates_over_basis() {
        let spec = qsqrt2();
        let one = FieldElem::one(&spec);
        let s = sqrt2(&spec);
        let target = one.add(&s);
        let got = rhat_coordinates(&target, &[&one, &s]).unwrap().unwrap();
        assert_eq!(got, vec![rat_int(1), rat_int(1)]);
        // re-evaluate the combination and compare exactly
        let recomposed = one.scale(&got[0]).add(&s.scale(&got[1]));
        assert_eq!(recomposed, target);
        // sqrt2 over (1) has no rational coordinates
        assert_eq!(rhat_coordinates(&s, &[&one]).unwrap(), None);
        // zero over any basis is all zeros
        let z = FieldElem::zero(&spec);
        assert_eq!(
            rhat_coordinates(&z, &[&one, &s]).unwrap().unwrap(),
            vec![rat_int(0), rat_int(0)]
        );
    }

    #[test]
    fn coordinates_reject_dependent_basis() {
        let spec = FieldSpec::rationals(false);
        let one = FieldElem::one(&spec);
        let two = FieldElem::from_int(&spec, 2);
        assert_eq!(
            rhat_coordinates(&one, &[&one, &two]),
            Err(Error::NotIndependentBasis)
        );
    }

    #[test]
    fn sign_in_ordered_sqrt2() {
        let spec = qsqrt2();
        let s = sqrt2(&spec); // designated root index 1: the positive root
        assert_eq!(s.sign().unwrap(), 1);
        // 1 - sqrt2 < 0 < 3/2 - sqrt2 is false: 3/2 - sqrt2 > 0 ?  sqrt2 ~ 1.414
        let x = FieldElem::from_rational(&spec, rat(3, 2)).sub(&s);
        assert_eq!(x.sign().unwrap(), 1);
        let y = FieldElem::one(&spec).sub(&s);
        assert_eq!(y.sign().unwrap(), -1);
    }

    #[test]
    fn sign_negative_root_embedding() {
        // same polynomial, designated root 0: a = -sqrt2
        let spec =
            FieldSpec::number_field(vec![BigInt::from(-2), BigInt::zero(), BigInt::one()], Some(0))
                .unwrap();
        let a = FieldElem::generator(&spec).unwrap();
        assert_eq!(a.sign().unwrap(), -1);
    }

    #[test]
    fn sign_multiplicative_and_trichotomous() {
        use rand::{Rng, SeedableRng};
        let spec = qsqrt2();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..3_500 {
            let e1 = FieldElem::from_coords(
                &spec,
                vec![rat(rng.gen_range(-9..=9), 1 + rng.gen_range(0..3)), rat(rng.gen_range(-9..=9), 1)],
            );
            let e2 = FieldElem::from_coords(
                &spec,
                vec![rat(rng.gen_range(-9..=9), 1), rat(rng.gen_range(-9..=9), 1 + rng.gen_range(0..2))],
            );
            let s1 = e1.sign().unwrap();
            let s2 = e2.sign().unwrap();
            assert_eq!(e1.mul(&e2).sign().unwrap(), s1 * s2);
            assert_eq!(s1 == 0, e1.is_zero());
        }
    }

    #[test]
    fn reducible_minpolys_rejected() {
        // x^2 - 1 = (x-1)(x+1)
        assert!(FieldSpec::number_field(vec![BigInt::from(-1), BigInt::zero(), BigInt::one()], None)
            .is_err());
        // x^4 + 2x^2 + 1 = (x^2+1)^2
        assert!(FieldSpec::number_field(
            vec![BigInt::one(), BigInt::zero(), BigInt::from(2), BigInt::zero(), BigInt::one()],
            None
        )
        .is_err());
        // x^4 + 1 is irreducible over Q
        assert!(FieldSpec::number_field(
            vec![BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::one()],
            None
        )
        .is_ok());
        // x^4+1 has no real roots: ordered mode must fail
        assert!(FieldSpec::number_field(
            vec![BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::zero(), BigInt::one()],
            Some(0)
        )
        .is_err());
    }

    #[test]
    fn display_round_values() {
        let spec = qsqrt2();
        let e = FieldElem::from_coords(&spec, vec![rat_int(1), rat_int(2)]);
        assert_eq!(e.to_string(), "1 + 2*a");
        let e = FieldElem::from_coords(&spec, vec![rat(1, 2), rat_int(-1)]);
        assert_eq!(e.to_string(), "1/2 - a");
        let e = FieldElem::from_coords(&spec, vec![rat_int(0), rat_int(-3)]);
        assert_eq!(e.to_string(), "-3*a");
        assert_eq!(FieldElem::zero(&spec).to_string(), "0");
    }

    #[test]
    fn fraction_field_closed_under_product() {
        let spec = qsqrt2();
        let x = FieldElem::from_rational(&spec, rat(2, 3));
        let y = FieldElem::from_rational(&spec, rat(-5, 7));
        assert!(x.mul(&y).in_fraction_field());
    }
}
