//! Exact linear algebra over prime fields.
//!
//! Subspaces of `GF(q)^n` are kept in reduced row-echelon form, so equality,
//! hashing and ordering of [`Subspace`] values all reduce to comparing
//! canonical bases.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A prime field `GF(q)` together with the ambient dimension `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldSpec {
    pub q: u8,
    pub n: usize,
}

fn is_prime(q: u8) -> bool {
    q >= 2
        && (2..q)
            .take_while(|d| d * d <= q)
            .all(|d| !q.is_multiple_of(d))
}

impl FieldSpec {
    pub fn new(q: u8, n: usize) -> Result<Self> {
        if !is_prime(q) {
            return Err(Error::Input(format!("q = {q} is not prime")));
        }
        if n < 3 {
            return Err(Error::Input(format!(
                "ambient dimension n = {n} must be at least 3"
            )));
        }
        Ok(FieldSpec { q, n })
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        ((a as u16 + b as u16) % self.q as u16) as u8
    }

    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        ((a as u16 + self.q as u16 - b as u16) % self.q as u16) as u8
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.q as u16) as u8
    }

    /// Multiplicative inverse by Fermat; `a` must be nonzero.
    pub fn inv(&self, a: u8) -> u8 {
        debug_assert!(a != 0);
        let mut base = a as u32;
        let mut e = self.q as u32 - 2;
        let mut acc = 1u32;
        let q = self.q as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % q;
            }
            base = base * base % q;
            e >>= 1;
        }
        acc as u8
    }

    /// The full space `V`.
    pub fn whole(&self) -> Subspace {
        let rows = (0..self.n)
            .map(|i| (0..self.n).map(|j| u8::from(i == j)).collect())
            .collect::<Vec<Vec<u8>>>();
        Subspace::from_reduced(*self, rows)
    }

    pub fn zero(&self) -> Subspace {
        Subspace::from_reduced(*self, Vec::new())
    }

    /// Span of the standard basis vectors with the given (0-based) indices.
    pub fn coordinate_span(&self, idx: impl IntoIterator<Item = usize>) -> Subspace {
        let rows = idx
            .into_iter()
            .map(|i| (0..self.n).map(|j| u8::from(i == j)).collect())
            .collect::<Vec<Vec<u8>>>();
        rref(*self, &rows).expect("unit vectors are in range")
    }
}

/// A subspace of `GF(q)^n` stored by its canonical (RREF) basis.
///
/// Ordering is lexicographic on the basis rows for subspaces of equal
/// dimension.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    dim: usize,
    rows: Vec<Vec<u8>>,
    field: FieldSpec,
}

impl Serialize for Subspace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.digits())
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.digits())
    }
}

/// Gauss-Jordan elimination in place; returns the nonzero reduced rows.
fn reduce(field: FieldSpec, mut m: Vec<Vec<u8>>) -> Vec<Vec<u8>> {
    let n = field.n;
    let mut r = 0;
    for col in 0..n {
        let Some(p) = (r..m.len()).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(r, p);
        let inv = field.inv(m[r][col]);
        for x in m[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && row[col] != 0 {
                let c = row[col];
                for (x, &y) in row.iter_mut().zip(&pivot) {
                    *x = field.sub(*x, field.mul(c, y));
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    m
}

/// Canonical subspace spanned by `rows`.
pub fn rref(field: FieldSpec, rows: &[Vec<u8>]) -> Result<Subspace> {
    for row in rows {
        if row.len() != field.n {
            return Err(Error::Input(format!(
                "row has length {} but the ambient dimension is {}",
                row.len(),
                field.n
            )));
        }
        if let Some(&x) = row.iter().find(|&&x| x >= field.q) {
            return Err(Error::Input(format!(
                "entry {x} is outside GF({})",
                field.q
            )));
        }
    }
    Ok(Subspace::from_reduced(field, reduce(field, rows.to_vec())))
}

impl Subspace {
    fn from_reduced(field: FieldSpec, rows: Vec<Vec<u8>>) -> Self {
        Subspace {
            dim: rows.len(),
            rows,
            field,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn basis(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Pivot column of each basis row.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .position(|&x| x != 0)
                    .expect("canonical rows are nonzero")
            })
            .collect()
    }

    /// Row-major digit string of the canonical basis, rows separated by `|`.
    pub fn digits(&self) -> String {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|d| char::from_digit(*d as u32, 36).unwrap())
                    .collect::<String>()
            })
            .collect::<Vec<_>>()
            .join("|")
    }

    /// Inverse of [`Subspace::digits`].
    pub fn from_digits(field: FieldSpec, s: &str) -> Result<Self> {
        if s.is_empty() {
            return Ok(field.zero());
        }
        let rows = s
            .split('|')
            .map(|r| {
                r.chars()
                    .map(|c| {
                        c.to_digit(36)
                            .map(|d| d as u8)
                            .ok_or_else(|| Error::Input(format!("bad digit {c:?}")))
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let s = rref(field, &rows)?;
        Ok(s)
    }

    fn check_same(&self, other: &Subspace) -> Result<()> {
        if self.field != other.field {
            return Err(Error::Input(format!(
                "mismatched ambient spaces: GF({})^{} vs GF({})^{}",
                self.field.q, self.field.n, other.field.q, other.field.n
            )));
        }
        Ok(())
    }

    /// Basis of the orthogonal complement under the standard dot product.
    pub fn perp(&self) -> Subspace {
        let f = self.field;
        let piv = self.pivots();
        let free: Vec<usize> = (0..f.n).filter(|c| !piv.contains(c)).collect();
        let rows = free
            .iter()
            .map(|&fc| {
                let mut v = vec![0u8; f.n];
                v[fc] = 1;
                for (row, &pc) in self.rows.iter().zip(&piv) {
                    v[pc] = f.sub(0, row[fc]);
                }
                v
            })
            .collect::<Vec<_>>();
        Subspace::from_reduced(f, reduce(f, rows))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same(other)?;
        Ok(self.join(other))
    }

    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_same(other)?;
        Ok(self.meet(other))
    }

    pub fn contains(&self, other: &Subspace) -> Result<bool> {
        self.check_same(other)?;
        Ok(self.includes(other))
    }

    /// Unchecked sum; both operands must share the ambient space.
    pub fn join(&self, other: &Subspace) -> Subspace {
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Subspace::from_reduced(self.field, reduce(self.field, rows))
    }

    /// Unchecked intersection.
    pub fn meet(&self, other: &Subspace) -> Subspace {
        if self.dim == 0 || other.dim == 0 {
            return self.field.zero();
        }
        self.perp().join(&other.perp()).perp()
    }

    /// Unchecked containment `other ⊆ self`.
    pub fn includes(&self, other: &Subspace) -> bool {
        if other.dim > self.dim {
            return false;
        }
        other.rows.iter().all(|v| self.contains_vector(v))
    }

    pub fn contains_vector(&self, v: &[u8]) -> bool {
        let f = self.field;
        let mut w = v.to_vec();
        for (row, pc) in self.rows.iter().zip(self.pivots()) {
            let c = w[pc];
            if c != 0 {
                for (x, &y) in w.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        w.iter().all(|&x| x == 0)
    }

    /// Image under a linear map given by its matrix acting on row vectors
    /// (`v ↦ v·M`).
    pub fn map_rows(&self, m: &[Vec<u8>]) -> Subspace {
        let f = self.field;
        let rows = self
            .rows
            .iter()
            .map(|v| {
                (0..f.n)
                    .map(|j| {
                        v.iter()
                            .zip(m)
                            .fold(0u8, |acc, (&x, mr)| f.add(acc, f.mul(x, mr[j])))
                    })
                    .collect()
            })
            .collect::<Vec<Vec<u8>>>();
        Subspace::from_reduced(f, reduce(f, rows))
    }

    /// All vectors of the subspace (q^dim of them).
    pub fn vectors(&self) -> Vec<Vec<u8>> {
        let f = self.field;
        let mut out = vec![vec![0u8; f.n]];
        for row in &self.rows {
            let mut next = Vec::with_capacity(out.len() * f.q as usize);
            for v in &out {
                for c in 0..f.q {
                    next.push(
                        v.iter()
                            .zip(row)
                            .map(|(&a, &b)| f.add(a, f.mul(c, b)))
                            .collect(),
                    );
                }
            }
            out = next;
        }
        out
    }

    /// A basis of a complement of `self` inside `outer` (which must contain
    /// `self`), chosen greedily from the canonical basis of `outer`.
    fn complement_in(&self, outer: &Subspace) -> Vec<Vec<u8>> {
        let mut acc = self.clone();
        let mut out = Vec::new();
        for v in &outer.rows {
            if !acc.contains_vector(v) {
                out.push(v.clone());
                let mut rows = acc.rows.clone();
                rows.push(v.clone());
                acc = Subspace::from_reduced(self.field, reduce(self.field, rows));
            }
        }
        out
    }
}

/// Gaussian binomial coefficient `[n choose k]_q`.
pub fn gaussian_binomial(q: u64, n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Every `k`-dimensional subspace of `GF(q)^n`, each exactly once, sorted
/// lexicographically by canonical basis.
///
/// Generated from RREF pivot patterns: the free entries of each row are the
/// non-pivot columns to the right of its pivot.
pub fn enumerate_subspaces(field: FieldSpec, k: usize) -> Result<Vec<Subspace>> {
    if k > field.n {
        return Err(Error::Input(format!("k = {k} exceeds n = {}", field.n)));
    }
    Ok(raw_enumerate(field.q, field.n, k)
        .into_iter()
        .map(|rows| Subspace::from_reduced(field, rows))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect())
}

/// Canonical bases of all k-subspaces of GF(q)^n, in no particular order.
fn raw_enumerate(q: u8, n: usize, k: usize) -> Vec<Vec<Vec<u8>>> {
    let mut out = Vec::new();
    for piv in combinations(n, k) {
        let slots: Vec<(usize, usize)> = piv
            .iter()
            .enumerate()
            .flat_map(|(r, &p)| {
                ((p + 1)..n)
                    .filter(|c| !piv.contains(c))
                    .map(move |c| (r, c))
            })
            .collect();
        let total = (q as u64).pow(slots.len() as u32);
        for mut code in 0..total {
            let mut rows = vec![vec![0u8; n]; k];
            for (r, &p) in piv.iter().enumerate() {
                rows[r][p] = 1;
            }
            for &(r, c) in &slots {
                rows[r][c] = (code % q as u64) as u8;
                code /= q as u64;
            }
            out.push(rows);
        }
    }
    out
}

/// All `k`-subspaces `U` with `h ⊆ U ⊆ b`, sorted canonically.
pub fn enumerate_between(h: &Subspace, b: &Subspace, k: usize) -> Result<Vec<Subspace>> {
    h.check_same(b)?;
    if !b.includes(h) {
        return Err(Error::Input(
            "lower bound is not contained in upper bound".into(),
        ));
    }
    if k < h.dim() || k > b.dim() {
        return Err(Error::Input(format!(
            "k = {k} is outside [{}, {}]",
            h.dim(),
            b.dim()
        )));
    }
    let f = h.field();
    let comp = h.complement_in(b);
    let d = comp.len();
    let mut out: Vec<Subspace> = raw_enumerate(f.q, d, k - h.dim())
        .into_iter()
        .map(|coeffs| {
            let mut rows = h.rows.clone();
            for c in coeffs {
                let v = (0..f.n)
                    .map(|j| {
                        c.iter()
                            .zip(&comp)
                            .fold(0u8, |acc, (&x, cv)| f.add(acc, f.mul(x, cv[j])))
                    })
                    .collect();
                rows.push(v);
            }
            Subspace::from_reduced(f, reduce(f, rows))
        })
        .collect();
    out.sort();
    Ok(out)
}
