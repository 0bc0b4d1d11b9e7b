//! Exact linear algebra: rational row reduction, kernels and solving, and
//! integer lattice algorithms (Hermite and Smith normal forms, integer
//! systems, lattice membership, coset containment and finite covers).
//!
//! Hermite form is computed as `H = U * M` with `U` unimodular; lattices
//! generated by columns are canonicalized through the Hermite form of the
//! transpose, which yields nonnegative pivots and reduced off-pivot entries.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rat, RingSpec};

/// Abort threshold for entry growth, in bits.
const MAX_ENTRY_BITS: u64 = 1_000_000;
/// Abort threshold for residue enumeration in the finite-cover test.
const MAX_RESIDUES: u64 = 1_000_000;

// ---------------------------------------------------------------------------
// matrices
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        IntMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        (0..self.cols).map(|j| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product shape");
        let mut out = IntMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self[(i, k)].is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let t = &self[(i, k)] * &rhs[(k, j)];
                    out[(i, j)] += t;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    /// Glue columns of two matrices with equal row counts.
    pub fn hcat(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.rows, rhs.rows);
        let mut out = IntMatrix::zero(self.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..rhs.cols {
                out[(i, self.cols + j)] = rhs[(i, j)].clone();
            }
        }
        out
    }

    fn check_growth(&self) -> Result<()> {
        for e in &self.data {
            if e.bits() > MAX_ENTRY_BITS {
                return Err(Error::ResourceLimit("integer entry growth".into()));
            }
        }
        Ok(())
    }

    /// Determinant by fraction-free (Bareiss) elimination; square only.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    let tmp = m[(k, j)].clone();
                    m[(k, j)] = m[(p, j)].clone();
                    m[(p, j)] = tmp;
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                    m[(i, j)] = num / &prev;
                }
                m[(i, k)] = BigInt::zero();
            }
            prev = m[(k, k)].clone();
        }
        sign * m[(n - 1, n - 1)].clone()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}
impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        RatMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}
impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

// ---------------------------------------------------------------------------
// rational elimination
// ---------------------------------------------------------------------------

/// Reduced row echelon form with the list of pivot columns.
pub fn rref(m: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut row = 0usize;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        let Some(p) = (row..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        for j in 0..a.cols {
            let tmp = a[(row, j)].clone();
            a[(row, j)] = a[(p, j)].clone();
            a[(p, j)] = tmp;
        }
        let inv = Rat::one() / &a[(row, col)];
        for j in col..a.cols {
            a[(row, j)] = &a[(row, j)] * &inv;
        }
        for r in 0..a.rows {
            if r != row && !a[(r, col)].is_zero() {
                let f = a[(r, col)].clone();
                for j in col..a.cols {
                    let t = &a[(row, j)] * &f;
                    a[(r, j)] -= t;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    (a, pivots)
}

/// Basis of the right kernel { v : M v = 0 } over Q.
pub fn kernel_basis(m: &RatMatrix) -> Vec<Vec<Rat>> {
    let (r, pivots) = rref(m);
    let mut out = Vec::new();
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    for free in 0..m.cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); m.cols];
        v[free] = Rat::one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -r[(i, free)].clone();
        }
        out.push(v);
    }
    out
}

/// Some rational solution of M x = b, or None.
pub fn solve_rational(m: &RatMatrix, b: &[Rat]) -> Result<Option<Vec<Rat>>> {
    if b.len() != m.rows {
        return Err(Error::DimensionMismatch(format!(
            "rhs length {} for {} rows",
            b.len(),
            m.rows
        )));
    }
    let mut aug = RatMatrix::zero(m.rows, m.cols + 1);
    for i in 0..m.rows {
        for j in 0..m.cols {
            aug[(i, j)] = m[(i, j)].clone();
        }
        aug[(i, m.cols)] = b[i].clone();
    }
    let (r, pivots) = rref(&aug);
    if pivots.contains(&m.cols) {
        return Ok(None); // pivot in the rhs column: inconsistent
    }
    let mut x = vec![Rat::zero(); m.cols];
    for (i, &pc) in pivots.iter().enumerate() {
        x[pc] = r[(i, m.cols)].clone();
    }
    Ok(Some(x))
}

// ---------------------------------------------------------------------------
// Hermite and Smith normal forms
// ---------------------------------------------------------------------------

/// Row-operation Hermite normal form: returns (H, U) with H = U * M,
/// U unimodular, pivots positive, entries above each pivot reduced into
/// [0, pivot).
pub fn hnf(m: &IntMatrix) -> Result<(IntMatrix, IntMatrix)> {
    let mut a = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut row = 0usize;
    for col in 0..a.cols {
        if row == a.rows {
            break;
        }
        loop {
            // smallest nonzero entry in this column at or below `row`
            let mut best: Option<usize> = None;
            for r in row..a.rows {
                if !a[(r, col)].is_zero()
                    && best.map_or(true, |b| a[(r, col)].abs() < a[(b, col)].abs())
                {
                    best = Some(r);
                }
            }
            let Some(p) = best else { break };
            swap_rows(&mut a, &mut u, row, p);
            let mut done = true;
            for r in row + 1..a.rows {
                if !a[(r, col)].is_zero() {
                    let q = div_floor_big(&a[(r, col)], &a[(row, col)]);
                    row_sub(&mut a, &mut u, r, row, &q);
                    if !a[(r, col)].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[(row, col)].is_zero() {
            continue;
        }
        if a[(row, col)].is_negative() {
            negate_row(&mut a, &mut u, row);
        }
        for r in 0..row {
            let q = div_floor_big(&a[(r, col)], &a[(row, col)]);
            if !q.is_zero() {
                row_sub(&mut a, &mut u, r, row, &q);
            }
        }
        a.check_growth()?;
        row += 1;
    }
    Ok((a, u))
}

fn swap_rows(a: &mut IntMatrix, u: &mut IntMatrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    for c in 0..a.cols {
        let t = a[(i, c)].clone();
        a[(i, c)] = a[(j, c)].clone();
        a[(j, c)] = t;
    }
    for c in 0..u.cols {
        let t = u[(i, c)].clone();
        u[(i, c)] = u[(j, c)].clone();
        u[(j, c)] = t;
    }
}

fn row_sub(a: &mut IntMatrix, u: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    for c in 0..a.cols {
        let t = q * &a[(src, c)];
        a[(dst, c)] -= t;
    }
    for c in 0..u.cols {
        let t = q * &u[(src, c)];
        u[(dst, c)] -= t;
    }
}

fn negate_row(a: &mut IntMatrix, u: &mut IntMatrix, i: usize) {
    for c in 0..a.cols {
        let t = -a[(i, c)].clone();
        a[(i, c)] = t;
    }
    for c in 0..u.cols {
        let t = -u[(i, c)].clone();
        u[(i, c)] = t;
    }
}

fn div_floor_big(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

/// Smith normal form: returns (S, U, V) with S = U * M * V diagonal,
/// d1 | d2 | ..., U and V unimodular.
pub fn snf(m: &IntMatrix) -> Result<(IntMatrix, IntMatrix, IntMatrix)> {
    let mut a = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let n = m.rows.min(m.cols);
    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..a.rows {
                for j in t..a.cols {
                    if !a[(i, j)].is_zero()
                        && best.map_or(true, |(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            swap_rows(&mut a, &mut u, t, pi);
            swap_cols(&mut a, &mut v, t, pj);
            let mut dirty = false;
            for i in t + 1..a.rows {
                if !a[(i, t)].is_zero() {
                    let q = div_floor_big(&a[(i, t)], &a[(t, t)]);
                    row_sub(&mut a, &mut u, i, t, &q);
                    if !a[(i, t)].is_zero() {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..a.cols {
                if !a[(t, j)].is_zero() {
                    let q = div_floor_big(&a[(t, j)], &a[(t, t)]);
                    col_sub(&mut a, &mut v, j, t, &q);
                    if !a[(t, j)].is_zero() {
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            if (t + 1..a.rows).any(|i| !a[(i, t)].is_zero())
                || (t + 1..a.cols).any(|j| !a[(t, j)].is_zero())
            {
                continue;
            }
            // divisibility pass: fold a non-divisible entry into row t
            let mut fixed = true;
            'scan: for i in t + 1..a.rows {
                for j in t + 1..a.cols {
                    if !(&a[(i, j)] % &a[(t, t)]).is_zero() {
                        let minus_one = BigInt::from(-1);
                        row_sub(&mut a, &mut u, t, i, &minus_one); // row_t += row_i
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            a.check_growth()?;
            if fixed {
                break;
            }
        }
        if !a[(t, t)].is_zero() && a[(t, t)].is_negative() {
            negate_row(&mut a, &mut u, t);
        }
    }
    Ok((a, u, v))
}

fn swap_cols(a: &mut IntMatrix, v: &mut IntMatrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    for r in 0..a.rows {
        let t = a[(r, i)].clone();
        a[(r, i)] = a[(r, j)].clone();
        a[(r, j)] = t;
    }
    for r in 0..v.rows {
        let t = v[(r, i)].clone();
        v[(r, i)] = v[(r, j)].clone();
        v[(r, j)] = t;
    }
}

fn col_sub(a: &mut IntMatrix, v: &mut IntMatrix, dst: usize, src: usize, q: &BigInt) {
    for r in 0..a.rows {
        let t = q * &a[(r, src)];
        a[(r, dst)] -= t;
    }
    for r in 0..v.rows {
        let t = q * &v[(r, src)];
        v[(r, dst)] -= t;
    }
}

/// Diagonal of a Smith form.
pub fn snf_diagonal(m: &IntMatrix) -> Result<Vec<BigInt>> {
    let (s, _, _) = snf(m)?;
    Ok((0..m.rows.min(m.cols)).map(|i| s[(i, i)].clone()).collect())
}

/// Inverse of a unimodular integer matrix (integer entries, |det| = 1).
pub fn unimodular_inverse(u: &IntMatrix) -> Result<IntMatrix> {
    assert_eq!(u.rows, u.cols);
    let n = u.rows;
    let mut inv = IntMatrix::zero(n, n);
    for j in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[j] = BigInt::one();
        let x = solve_integer(u, &e)?
            .ok_or_else(|| Error::DimensionMismatch("matrix is not unimodular".into()))?;
        for i in 0..n {
            inv[(i, j)] = x[i].clone();
        }
    }
    Ok(inv)
}

// ---------------------------------------------------------------------------
// integer systems and lattices
// ---------------------------------------------------------------------------

/// Some integer solution of A x = b, or None.  Decided through the Smith
/// form: S y = U b with x = V y.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != a.rows {
        return Err(Error::DimensionMismatch(format!(
            "rhs length {} for {} rows",
            b.len(),
            a.rows
        )));
    }
    let (s, u, v) = snf(a)?;
    let ub = u.mul_vec(b);
    let n = a.rows.min(a.cols);
    let mut y = vec![BigInt::zero(); a.cols];
    for i in 0..a.rows {
        let d = if i < n { s[(i, i)].clone() } else { BigInt::zero() };
        if d.is_zero() {
            if !ub[i].is_zero() {
                return Ok(None);
            }
        } else {
            let (q, r) = ub[i].div_rem(&d);
            if !r.is_zero() {
                return Ok(None);
            }
            y[i] = q;
        }
    }
    Ok(Some(v.mul_vec(&y)))
}

/// Some solution of A x = b with x over the ring R (integer matrix, rational
/// right-hand side with entries in R), or None.
pub fn solve_over_ring(a: &IntMatrix, b: &[Rat], ring: &RingSpec) -> Result<Option<Vec<Rat>>> {
    if b.len() != a.rows {
        return Err(Error::DimensionMismatch(format!(
            "rhs length {} for {} rows",
            b.len(),
            a.rows
        )));
    }
    // scale by the lcm of denominators; for rhs in R this is a unit of R
    let mut scale = BigInt::one();
    for q in b {
        scale = scale.lcm(q.denom());
    }
    let scaled: Vec<BigInt> = b
        .iter()
        .map(|q| (q * BigRational::from(scale.clone())).to_integer())
        .collect();
    let (s, u, v) = snf(a)?;
    let ub = u.mul_vec(&scaled);
    let n = a.rows.min(a.cols);
    let mut y = vec![Rat::zero(); a.cols];
    for i in 0..a.rows {
        let d = if i < n { s[(i, i)].clone() } else { BigInt::zero() };
        if d.is_zero() {
            if !ub[i].is_zero() {
                return Ok(None);
            }
        } else {
            let q = Rat::new(ub[i].clone(), d);
            if !ring.contains(&q) {
                return Ok(None);
            }
            y[i] = q;
        }
    }
    // x = V y / scale
    let inv_scale = Rat::new(BigInt::one(), scale);
    let mut x = vec![Rat::zero(); a.cols];
    for i in 0..a.cols {
        let mut acc = Rat::zero();
        for j in 0..a.cols {
            acc += Rat::from(v[(i, j)].clone()) * &y[j];
        }
        x[i] = acc * &inv_scale;
    }
    Ok(Some(x))
}

/// Basis of the integer kernel { x : A x = 0 } (a saturated lattice).
pub fn kernel_int(a: &IntMatrix) -> Result<Vec<Vec<BigInt>>> {
    let (s, _, v) = snf(a)?;
    let n = a.rows.min(a.cols);
    let mut rank = 0usize;
    for i in 0..n {
        if !s[(i, i)].is_zero() {
            rank += 1;
        }
    }
    Ok((rank..a.cols).map(|j| v.col(j)).collect())
}

/// Membership of v in the lattice generated by the columns of L.
pub fn lattice_member(v: &[BigInt], l: &IntMatrix) -> Result<bool> {
    Ok(solve_integer(l, v)?.is_some())
}

/// Canonical basis (as columns) of the lattice generated by the columns of M:
/// the nonzero rows of the Hermite form of the transpose, transposed back.
pub fn lattice_canon(m: &IntMatrix) -> Result<IntMatrix> {
    let (h, _) = hnf(&m.transpose())?;
    let mut rows = Vec::new();
    for i in 0..h.rows {
        let r = h.row(i);
        if r.iter().any(|x| !x.is_zero()) {
            rows.push(r);
        }
    }
    if rows.is_empty() {
        return Ok(IntMatrix::zero(m.rows, 0));
    }
    Ok(IntMatrix::from_rows(rows).transpose())
}

pub fn lattice_sum(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    lattice_canon(&a.hcat(b))
}

/// Intersection of two column lattices in the same ambient rank.
pub fn lattice_intersect(a: &IntMatrix, b: &IntMatrix) -> Result<IntMatrix> {
    if a.cols == 0 || b.cols == 0 {
        return Ok(IntMatrix::zero(a.rows, 0));
    }
    let neg_b = {
        let mut nb = b.clone();
        for i in 0..nb.rows {
            for j in 0..nb.cols {
                let t = -nb[(i, j)].clone();
                nb[(i, j)] = t;
            }
        }
        nb
    };
    let glued = a.hcat(&neg_b);
    let kern = kernel_int(&glued)?;
    let mut gens = Vec::new();
    for k in kern {
        let u = &k[..a.cols];
        gens.push(a.mul_vec(u));
    }
    if gens.is_empty() {
        return Ok(IntMatrix::zero(a.rows, 0));
    }
    let cols = IntMatrix::from_rows(gens).transpose();
    lattice_canon(&cols)
}

pub fn lattice_subset(a: &IntMatrix, b: &IntMatrix) -> Result<bool> {
    for j in 0..a.cols {
        if !lattice_member(&a.col(j), b)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn lattice_eq(a: &IntMatrix, b: &IntMatrix) -> Result<bool> {
    Ok(lattice_canon(a)? == lattice_canon(b)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeIndex {
    Finite(BigInt),
    Infinite,
}

/// Index of K inside L (K must be a sublattice of L).
pub fn lattice_index(l: &IntMatrix, k: &IntMatrix) -> Result<LatticeIndex> {
    let l = lattice_canon(l)?;
    let k = lattice_canon(k)?;
    if k.cols < l.cols {
        return Ok(LatticeIndex::Infinite);
    }
    let w = express_in_lattice(&l, &k)?;
    let diag = snf_diagonal(&w)?;
    let mut prod = BigInt::one();
    for d in &diag {
        if d.is_zero() {
            return Ok(LatticeIndex::Infinite);
        }
        prod *= d.abs();
    }
    if diag.len() < l.cols {
        return Ok(LatticeIndex::Infinite);
    }
    Ok(LatticeIndex::Finite(prod))
}

/// Express the columns of K in the column basis of L: returns W with
/// L * W = K.  Errors if some column is outside L.
fn express_in_lattice(l: &IntMatrix, k: &IntMatrix) -> Result<IntMatrix> {
    let mut cols = Vec::new();
    for j in 0..k.cols {
        let x = solve_integer(l, &k.col(j))?
            .ok_or_else(|| Error::DimensionMismatch("column outside lattice".into()))?;
        cols.push(x);
    }
    if cols.is_empty() {
        return Ok(IntMatrix::zero(l.cols, 0));
    }
    Ok(IntMatrix::from_rows(cols).transpose())
}

/// Coset representatives of L / K, for K a finite-index sublattice of L,
/// expressed as ambient vectors.
pub fn coset_representatives(l: &IntMatrix, k: &IntMatrix) -> Result<Vec<Vec<BigInt>>> {
    let l = lattice_canon(l)?;
    if l.cols == 0 {
        return Ok(vec![vec![BigInt::zero(); l.rows]]);
    }
    let w = express_in_lattice(&l, &lattice_canon(k)?)?;
    let (s, u, _) = snf(&w)?;
    let r = l.cols;
    let mut count = BigInt::one();
    let mut diag = Vec::new();
    for i in 0..r {
        let d = if i < s.rows.min(s.cols) { s[(i, i)].abs() } else { BigInt::zero() };
        if d.is_zero() {
            return Err(Error::DimensionMismatch("sublattice has infinite index".into()));
        }
        count *= &d;
        diag.push(d);
    }
    if count > BigInt::from(MAX_RESIDUES) {
        return Err(Error::ResourceLimit("too many coset residues".into()));
    }
    let uinv = unimodular_inverse(&u)?;
    // enumerate a in prod [0, d_i), residue rep = L * (Uinv * a)
    let mut reps = Vec::new();
    let mut idx = vec![BigInt::zero(); r];
    loop {
        let coords = uinv.mul_vec(&idx);
        reps.push(l.mul_vec(&coords));
        // increment mixed-radix counter
        let mut pos = 0usize;
        loop {
            if pos == r {
                return Ok(reps);
            }
            idx[pos] += 1;
            if idx[pos] < diag[pos] {
                break;
            }
            idx[pos] = BigInt::zero();
            pos += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// cosets
// ---------------------------------------------------------------------------

/// A coset `basepoint + lattice` of an integer lattice, with the lattice
/// stored in canonical column form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetDesc {
    pub basepoint: Vec<BigInt>,
    pub lattice: IntMatrix,
}

impl CosetDesc {
    pub fn new(basepoint: Vec<BigInt>, generators: IntMatrix) -> Result<CosetDesc> {
        if generators.rows != basepoint.len() {
            return Err(Error::RankMismatch(generators.rows, basepoint.len()));
        }
        Ok(CosetDesc { basepoint, lattice: lattice_canon(&generators)? })
    }

    pub fn ambient_rank(&self) -> usize {
        self.basepoint.len()
    }

    pub fn contains(&self, v: &[BigInt]) -> Result<bool> {
        let diff: Vec<BigInt> = v
            .iter()
            .zip(&self.basepoint)
            .map(|(a, b)| a - b)
            .collect();
        lattice_member(&diff, &self.lattice)
    }
}

/// Is C1 contained in C2?
pub fn coset_subset(c1: &CosetDesc, c2: &CosetDesc) -> Result<bool> {
    if c1.ambient_rank() != c2.ambient_rank() {
        return Err(Error::RankMismatch(c1.ambient_rank(), c2.ambient_rank()));
    }
    if !lattice_subset(&c1.lattice, &c2.lattice)? {
        return Ok(false);
    }
    c2.contains(&c1.basepoint)
}

/// Is the coset C contained in the union of the given cosets?
///
/// Covers whose lattice meets C's lattice in infinite index are discarded
/// (finitely many such cosets can never assemble a full cover), then the
/// residues of C's lattice modulo the intersection of the remaining
/// sublattices are checked exhaustively.
pub fn coset_finite_cover(c: &CosetDesc, covers: &[CosetDesc]) -> Result<bool> {
    let mut relevant = Vec::new();
    for d in covers {
        if d.ambient_rank() != c.ambient_rank() {
            return Err(Error::RankMismatch(c.ambient_rank(), d.ambient_rank()));
        }
        // does d meet the affine span of C at all?
        let diff: Vec<BigInt> = d
            .basepoint
            .iter()
            .zip(&c.basepoint)
            .map(|(a, b)| a - b)
            .collect();
        let span = lattice_sum(&c.lattice, &d.lattice)?;
        if !lattice_member(&diff, &span)? {
            continue;
        }
        let meet = lattice_intersect(&c.lattice, &d.lattice)?;
        match lattice_index(&c.lattice, &meet)? {
            LatticeIndex::Finite(_) => relevant.push((d, meet)),
            LatticeIndex::Infinite => {}
        }
    }
    if relevant.is_empty() {
        return Ok(false);
    }
    let mut common = relevant[0].1.clone();
    for (_, meet) in &relevant[1..] {
        common = lattice_intersect(&common, meet)?;
    }
    let reps = coset_representatives(&c.lattice, &common)?;
    'rep: for rho in reps {
        let point: Vec<BigInt> = c
            .basepoint
            .iter()
            .zip(&rho)
            .map(|(b, r)| b + r)
            .collect();
        for (d, _) in &relevant {
            if d.contains(&point)? {
                continue 'rep;
            }
        }
        return Ok(false);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, rat_int};

    fn im(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    #[test]
    fn rref_identity() {
        let id = RatMatrix::identity(3);
        let (r, p) = rref(&id);
        assert_eq!(r, id);
        assert_eq!(p, vec![0, 1, 2]);
    }

    #[test]
    fn kernel_of_sum_row() {
        let m = RatMatrix::from_rows(vec![vec![rat_int(1), rat_int(1)]]);
        let k = kernel_basis(&m);
        assert_eq!(k.len(), 1);
        // the kernel basis vector is proportional to (1, -1)
        assert_eq!(&k[0][0] + &k[0][1], rat_int(0));
        assert!(!k[0][0].is_zero());
    }

    #[test]
    fn solve_rational_diag() {
        let m = RatMatrix::from_rows(vec![
            vec![rat_int(2), rat_int(0)],
            vec![rat_int(0), rat_int(3)],
        ]);
        let x = solve_rational(&m, &[rat_int(1), rat_int(1)]).unwrap().unwrap();
        assert_eq!(x, vec![rat(1, 2), rat(1, 3)]);
        // oracle: substitute back
        assert_eq!(m.mul_vec(&x), vec![rat_int(1), rat_int(1)]);
    }

    #[test]
    fn snf_example() {
        let m = im(&[&[2, 4], &[6, 8]]);
        let (s, u, v) = snf(&m).unwrap();
        // recomposition
        assert_eq!(u.mul(&m).mul(&v), s);
        assert_eq!(u.det().abs(), BigInt::one());
        assert_eq!(v.det().abs(), BigInt::one());
        // d1 = gcd of entries = 2, d1*d2 = |det| = 8, so diag(2, 4)
        assert_eq!(s[(0, 0)], BigInt::from(2));
        assert_eq!(s[(1, 1)], BigInt::from(4));
    }

    #[test]
    fn snf_identity_and_hnf_zero() {
        let id = im(&[&[1, 0], &[0, 1]]);
        let (s, _, _) = snf(&id).unwrap();
        assert_eq!(s, id);
        let z = IntMatrix::zero(2, 2);
        let (h, u) = hnf(&z).unwrap();
        assert_eq!(h, z);
        assert_eq!(u, IntMatrix::identity(2));
    }

    #[test]
    fn hnf_recomposition_fuzz() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for _ in 0..120 {
            let rows = rng.gen_range(1..=5);
            let cols = rng.gen_range(1..=5);
            let m = IntMatrix::from_rows(
                (0..rows)
                    .map(|_| (0..cols).map(|_| BigInt::from(rng.gen_range(-20..=20))).collect())
                    .collect(),
            );
            let (h, u) = hnf(&m).unwrap();
            assert_eq!(u.mul(&m), h);
            assert_eq!(u.det().abs(), BigInt::one());
            let (s, uu, vv) = snf(&m).unwrap();
            assert_eq!(uu.mul(&m).mul(&vv), s);
            assert_eq!(uu.det().abs(), BigInt::one());
            assert_eq!(vv.det().abs(), BigInt::one());
            // divisibility chain
            let n = rows.min(cols);
            for i in 1..n {
                if !s[(i, i)].is_zero() {
                    assert!(!s[(i - 1, i - 1)].is_zero());
                    assert!((&s[(i, i)] % &s[(i - 1, i - 1)]).is_zero());
                }
            }
        }
    }

    #[test]
    fn solve_integer_parity() {
        let m = im(&[&[2]]);
        assert_eq!(solve_integer(&m, &[BigInt::one()]).unwrap(), None);
    }

    #[test]
    fn solve_integer_bezout() {
        let m = im(&[&[2, 3]]);
        let x = solve_integer(&m, &[BigInt::one()]).unwrap().unwrap();
        // any valid solution accepted; verify by substitution
        assert_eq!(m.mul_vec(&x), vec![BigInt::one()]);
    }

    #[test]
    fn lattice_membership_diag() {
        let l = im(&[&[2, 0], &[0, 2]]);
        assert!(lattice_member(&[BigInt::from(2), BigInt::zero()], &l).unwrap());
        assert!(!lattice_member(&[BigInt::one(), BigInt::zero()], &l).unwrap());
    }

    #[test]
    fn solve_over_localized_ring() {
        let z2 = RingSpec::localization([2]).unwrap();
        // 2x = 1 solvable over Z_(2 inverted), not over Z
        let m = im(&[&[2]]);
        let sol = solve_over_ring(&m, &[rat_int(1)], &z2).unwrap().unwrap();
        assert_eq!(sol, vec![rat(1, 2)]);
        assert_eq!(
            solve_over_ring(&m, &[rat_int(1)], &RingSpec::integers()).unwrap(),
            None
        );
        // 3x = 1 not solvable over Z_(2 inverted)
        let m3 = im(&[&[3]]);
        assert_eq!(solve_over_ring(&m3, &[rat_int(1)], &z2).unwrap(), None);
    }

    #[test]
    fn coset_subset_examples() {
        // 2Z inside Z
        let two_z = CosetDesc::new(vec![BigInt::zero()], im(&[&[2]])).unwrap();
        let z = CosetDesc::new(vec![BigInt::zero()], im(&[&[1]])).unwrap();
        assert!(coset_subset(&two_z, &z).unwrap());
        assert!(!coset_subset(&z, &two_z).unwrap());
    }

    #[test]
    fn finite_cover_mod_two() {
        let z = CosetDesc::new(vec![BigInt::zero()], im(&[&[1]])).unwrap();
        let even = CosetDesc::new(vec![BigInt::zero()], im(&[&[2]])).unwrap();
        let odd = CosetDesc::new(vec![BigInt::one()], im(&[&[2]])).unwrap();
        assert!(coset_finite_cover(&z, &[even.clone(), odd]).unwrap());
        // 2Z with 1 + 4Z leaves 3 mod 4 uncovered
        let one_mod4 = CosetDesc::new(vec![BigInt::one()], im(&[&[4]])).unwrap();
        assert!(!coset_finite_cover(&z, &[even.clone(), one_mod4]).unwrap());
        // monotone in covers; empty cover of a nonempty coset is false
        assert!(!coset_finite_cover(&z, &[]).unwrap());
        assert!(!coset_finite_cover(&z, &[even]).unwrap());
    }

    #[test]
    fn infinite_index_covers_discarded() {
        // Z^2 cannot be covered by finitely many lines
        let z2 = CosetDesc::new(
            vec![BigInt::zero(), BigInt::zero()],
            im(&[&[1, 0], &[0, 1]]),
        )
        .unwrap();
        let line = CosetDesc::new(vec![BigInt::zero(), BigInt::zero()], im(&[&[1], &[0]]))
            .unwrap();
        assert!(!coset_finite_cover(&z2, &[line]).unwrap());
    }

    #[test]
    fn solve_integer_brute_force_agreement() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(23);
        for _ in 0..60 {
            let a = IntMatrix::from_rows(
                (0..2)
                    .map(|_| (0..3).map(|_| BigInt::from(rng.gen_range(-5..=5))).collect())
                    .collect(),
            );
            let b: Vec<BigInt> = (0..2).map(|_| BigInt::from(rng.gen_range(-5..=5))).collect();
            let fast = solve_integer(&a, &b).unwrap();
            if let Some(x) = &fast {
                assert_eq!(a.mul_vec(x), b);
            }
            // brute force over a small box; if it finds a solution the
            // solver must have found one too
            let mut brute = None;
            'search: for x0 in -8i64..=8 {
                for x1 in -8i64..=8 {
                    for x2 in -8i64..=8 {
                        let v = vec![BigInt::from(x0), BigInt::from(x1), BigInt::from(x2)];
                        if a.mul_vec(&v) == b {
                            brute = Some(v);
                            break 'search;
                        }
                    }
                }
            }
            if brute.is_some() {
                assert!(fast.is_some());
            }
        }
    }

    #[test]
    fn unimodular_inverse_roundtrip() {
        let u = im(&[&[1, 2], &[0, 1]]);
        let ui = unimodular_inverse(&u).unwrap();
        assert_eq!(u.mul(&ui), IntMatrix::identity(2));
    }

    #[test]
    fn lattice_intersection_and_index() {
        let a = im(&[&[2]]);
        let b = im(&[&[3]]);
        let meet = lattice_intersect(&a, &b).unwrap();
        assert!(lattice_eq(&meet, &im(&[&[6]])).unwrap());
        match lattice_index(&im(&[&[1]]), &im(&[&[6]])).unwrap() {
            LatticeIndex::Finite(n) => assert_eq!(n, BigInt::from(6)),
            _ => panic!("expected finite index"),
        }
        match lattice_index(&im(&[&[1, 0], &[0, 1]]), &im(&[&[1], &[0]])).unwrap() {
            LatticeIndex::Infinite => {}
            _ => panic!("expected infinite index"),
        }
    }
}
