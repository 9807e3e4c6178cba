//! Exact rational linear algebra.
//!
//! Everything here works over `BigRational` with eager normalisation (the
//! `num-rational` invariant: lowest terms, positive denominator). Vectors and
//! matrix rows are sparse; zero entries are never stored.
//!
//! Row reduction uses leftmost-column / topmost-row pivots, so every result is
//! deterministic and the reduced row echelon form is the unique one.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index ({row}, {col}) out of bounds for {rows}x{cols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        rows: usize,
        cols: usize,
    },
    #[error("cannot parse rational from {0:?}")]
    ParseRational(String),
}

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n / d`. Panics on `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p/q"` or `"p"`; surrounding whitespace is ignored.
pub fn parse_rational(s: &str) -> Result<Rational, LinalgError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(LinalgError::ParseRational(s.to_string()));
    }
    let parsed = match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok();
            let d = BigInt::from_str(d.trim()).ok();
            match (n, d) {
                (Some(n), Some(d)) if !d.is_zero() => Some(Rational::new(n, d)),
                _ => None,
            }
        }
        None => BigInt::from_str(t).ok().map(Rational::from_integer),
    };
    parsed.ok_or_else(|| LinalgError::ParseRational(s.to_string()))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod rational_str {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::super::{format_rational, parse_rational, Rational};
        use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for q in v {
                seq.serialize_element(&format_rational(q))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let raw = Vec::<String>::deserialize(d)?;
            raw.iter()
                .map(|s| parse_rational(s).map_err(D::Error::custom))
                .collect()
        }
    }
}

/// Sparse vector with no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: BTreeMap<usize, Rational>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(index: usize) -> Self {
        let mut v = Self::new();
        v.entries.insert(index, Rational::one());
        v
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, Rational)>>(pairs: I) -> Self {
        let mut v = Self::new();
        for (i, q) in pairs {
            v.add_at(i, &q);
        }
        v
    }

    pub fn from_dense(values: &[Rational]) -> Self {
        Self::from_pairs(values.iter().cloned().enumerate())
    }

    pub fn to_dense(&self, len: usize) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); len];
        for (i, q) in &self.entries {
            if *i < len {
                out[*i] = q.clone();
            }
        }
        out
    }

    pub fn get(&self, index: usize) -> Rational {
        self.entries.get(&index).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn get_ref(&self, index: usize) -> Option<&Rational> {
        self.entries.get(&index)
    }

    pub fn set(&mut self, index: usize, value: Rational) {
        if value.is_zero() {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
    }

    pub fn add_at(&mut self, index: usize, value: &Rational) {
        if value.is_zero() {
            return;
        }
        match self.entries.get_mut(&index) {
            Some(cur) => {
                *cur += value;
                if cur.is_zero() {
                    self.entries.remove(&index);
                }
            }
            None => {
                self.entries.insert(index, value.clone());
            }
        }
    }

    /// `self += scale * other`
    pub fn add_scaled(&mut self, other: &SparseVec, scale: &Rational) {
        if scale.is_zero() {
            return;
        }
        for (i, q) in &other.entries {
            self.add_at(*i, &(q * scale));
        }
    }

    pub fn scaled(&self, scale: &Rational) -> SparseVec {
        if scale.is_zero() {
            return SparseVec::new();
        }
        SparseVec {
            entries: self
                .entries
                .iter()
                .map(|(i, q)| (*i, q * scale))
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.entries.iter().map(|(i, q)| (*i, q))
    }

    pub fn leading_index(&self) -> Option<usize> {
        self.entries.keys().next().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    /// Keeps only the coordinates selected by `keep`.
    pub fn filtered(&self, keep: impl Fn(usize) -> bool) -> SparseVec {
        SparseVec {
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| keep(**i))
                .map(|(i, q)| (*i, q.clone()))
                .collect(),
        }
    }

    /// Re-indexes coordinates; entries mapped to `None` are dropped.
    pub fn reindexed(&self, map: impl Fn(usize) -> Option<usize>) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, q) in &self.entries {
            if let Some(j) = map(*i) {
                out.add_at(j, q);
            }
        }
        out
    }

    pub fn dot(&self, other: &SparseVec) -> Rational {
        let (small, large) = if self.nnz() <= other.nnz() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = Rational::zero();
        for (i, q) in &small.entries {
            if let Some(r) = large.entries.get(i) {
                acc += q * r;
            }
        }
        acc
    }
}

impl std::ops::Neg for SparseVec {
    type Output = SparseVec;
    fn neg(self) -> SparseVec {
        SparseVec {
            entries: self.entries.into_iter().map(|(i, q)| (i, -q)).collect(),
        }
    }
}

impl std::ops::Sub<&SparseVec> for &SparseVec {
    type Output = SparseVec;
    fn sub(self, rhs: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rational::one());
        out
    }
}

impl std::ops::Add<&SparseVec> for &SparseVec {
    type Output = SparseVec;
    fn add(self, rhs: &SparseVec) -> SparseVec {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rational::one());
        out
    }
}

/// Incrementally maintained reduced echelon basis.
///
/// Every stored row has a leading 1 in its pivot column and zeros in every
/// other pivot column, so reducing a vector needs only one pass.
#[derive(Clone, Debug)]
pub struct Echelon {
    ambient: usize,
    rows: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    pub fn new(ambient: usize) -> Self {
        Self {
            ambient,
            rows: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.keys().copied().collect()
    }

    /// Residual of `v` after elimination against the current pivots.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut r = v.clone();
        let hits: Vec<usize> = r
            .entries
            .keys()
            .copied()
            .filter(|c| self.rows.contains_key(c))
            .collect();
        for c in hits {
            let coef = r.get(c);
            if !coef.is_zero() {
                r.add_scaled(&self.rows[&c], &-coef);
            }
        }
        r
    }

    /// Inserts `v`; returns `true` when it was independent of the basis.
    pub fn insert(&mut self, v: &SparseVec) -> bool {
        let r = self.reduce(v);
        let Some(pivot) = r.leading_index() else {
            return false;
        };
        let inv = r.get(pivot).recip();
        let r = r.scaled(&inv);
        for row in self.rows.values_mut() {
            let coef = row.get(pivot);
            if !coef.is_zero() {
                row.add_scaled(&r, &-coef);
            }
        }
        self.rows.insert(pivot, r);
        true
    }

    pub fn into_rows(self) -> Vec<SparseVec> {
        self.rows.into_values().collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &SparseVec)> + '_ {
        self.rows.iter().map(|(c, r)| (*c, r))
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }
}

/// Sparse matrix stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

/// Result of [`Matrix::rref`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![SparseVec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i] = SparseVec::unit(i);
        }
        m
    }

    /// Builds a matrix from sparse rows; entries at or beyond `cols` are rejected.
    pub fn from_rows(cols: usize, rows: Vec<SparseVec>) -> Result<Self, LinalgError> {
        for (r, row) in rows.iter().enumerate() {
            if let Some(c) = row.max_index() {
                if c >= cols {
                    return Err(LinalgError::OutOfBounds {
                        row: r,
                        col: c,
                        rows: rows.len(),
                        cols,
                    });
                }
            }
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows,
        })
    }

    pub fn from_dense(values: &[Vec<Rational>]) -> Result<Self, LinalgError> {
        let cols = values.first().map_or(0, Vec::len);
        let mut rows = Vec::with_capacity(values.len());
        for row in values {
            if row.len() != cols {
                return Err(LinalgError::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            rows.push(SparseVec::from_dense(row));
        }
        Self::from_rows(cols, rows)
    }

    pub fn from_i64(values: &[&[i64]]) -> Result<Self, LinalgError> {
        let dense: Vec<Vec<Rational>> = values
            .iter()
            .map(|r| r.iter().map(|&x| rat(x)).collect())
            .collect();
        Self::from_dense(&dense)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[SparseVec]) -> Result<Self, LinalgError> {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            for (r, q) in col.iter() {
                m.set(r, c, q.clone())?;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &SparseVec {
        &self.data[r]
    }

    pub fn row_vecs(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(SparseVec::nnz).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.data.get(r).map_or_else(Rational::zero, |row| row.get(c))
    }

    pub fn set(&mut self, r: usize, c: usize, value: Rational) -> Result<(), LinalgError> {
        if r >= self.rows || c >= self.cols {
            return Err(LinalgError::OutOfBounds {
                row: r,
                col: c,
                rows: self.rows,
                cols: self.cols,
            });
        }
        self.data[r].set(c, value);
        Ok(())
    }

    pub fn column(&self, c: usize) -> SparseVec {
        SparseVec::from_pairs(
            self.data
                .iter()
                .enumerate()
                .filter_map(|(r, row)| row.get_ref(c).map(|q| (r, q.clone()))),
        )
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        let mut cols = vec![SparseVec::new(); self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for (c, q) in row.iter() {
                cols[c].set(r, q.clone());
            }
        }
        cols
    }

    pub fn transpose(&self) -> Matrix {
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data: self.columns(),
        }
    }

    pub fn mul_vec(&self, v: &SparseVec) -> Result<SparseVec, LinalgError> {
        if let Some(c) = v.max_index() {
            if c >= self.cols {
                return Err(LinalgError::DimensionMismatch {
                    expected: self.cols,
                    found: c + 1,
                });
            }
        }
        Ok(SparseVec::from_pairs(
            self.data
                .iter()
                .enumerate()
                .map(|(r, row)| (r, row.dot(v))),
        ))
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut data = Vec::with_capacity(self.rows);
        for row in &self.data {
            let mut out = SparseVec::new();
            for (k, q) in row.iter() {
                out.add_scaled(&other.data[k], q);
            }
            data.push(out);
        }
        Ok(Matrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(SparseVec::is_zero)
    }

    pub fn rref(&self) -> Rref {
        let mut ech = Echelon::new(self.cols);
        for row in &self.data {
            ech.insert(row);
        }
        let pivots = ech.pivots();
        let rank = pivots.len();
        let mut data = ech.into_rows();
        data.resize(self.rows.max(rank), SparseVec::new());
        Rref {
            matrix: Matrix {
                rows: self.rows.max(rank),
                cols: self.cols,
                data,
            },
            rank,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new(self.cols);
        for row in &self.data {
            ech.insert(row);
        }
        ech.rank()
    }

    /// Canonical kernel basis: one vector per free column of the RREF, in
    /// increasing column order, with a 1 in its free column.
    pub fn kernel_vectors(&self) -> Vec<SparseVec> {
        let Rref { matrix, pivots, .. } = self.rref();
        let pivot_rows: Vec<(usize, &SparseVec)> = pivots
            .iter()
            .copied()
            .zip(matrix.data.iter())
            .collect();
        let is_pivot: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        // column -> [(pivot col, entry)]
        let mut by_col: BTreeMap<usize, Vec<(usize, Rational)>> = BTreeMap::new();
        for (p, row) in &pivot_rows {
            for (c, q) in row.iter() {
                if c != *p {
                    by_col.entry(c).or_default().push((*p, q.clone()));
                }
            }
        }
        (0..self.cols)
            .filter(|c| !is_pivot.contains(c))
            .map(|f| {
                let mut v = SparseVec::unit(f);
                if let Some(hits) = by_col.get(&f) {
                    for (p, q) in hits {
                        v.set(*p, -q.clone());
                    }
                }
                v
            })
            .collect()
    }

    pub fn nullspace_basis(&self) -> Subspace {
        Subspace::span(self.cols, self.kernel_vectors().iter())
            .expect("kernel vectors live in the column space")
    }

    /// One solution of `self * x = b` with all free variables set to zero.
    pub fn solve(&self, b: &SparseVec) -> Result<Option<SparseVec>, LinalgError> {
        if let Some(r) = b.max_index() {
            if r >= self.rows {
                return Err(LinalgError::DimensionMismatch {
                    expected: self.rows,
                    found: r + 1,
                });
            }
        }
        // Augment with b in an extra column and reduce.
        let aug_col = self.cols;
        let mut ech = Echelon::new(self.cols + 1);
        for (r, row) in self.data.iter().enumerate() {
            let mut row = row.clone();
            row.set(aug_col, b.get(r));
            ech.insert(&row);
        }
        if ech.rows.contains_key(&aug_col) {
            return Ok(None);
        }
        let mut x = SparseVec::new();
        for (p, row) in ech.rows() {
            x.set(p, row.get(aug_col));
        }
        Ok(Some(x))
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = (0..self.cols)
                .map(|c| format_rational(&self.get(r, c)))
                .collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// A linear subspace of `Q^ambient_dim`, stored as an RREF basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<SparseVec>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: (0..ambient_dim).map(SparseVec::unit).collect(),
            pivots: (0..ambient_dim).collect(),
        }
    }

    pub fn span<'a, I>(ambient_dim: usize, vectors: I) -> Result<Self, LinalgError>
    where
        I: IntoIterator<Item = &'a SparseVec>,
    {
        let mut ech = Echelon::new(ambient_dim);
        for v in vectors {
            check_ambient(v, ambient_dim)?;
            ech.insert(v);
        }
        Ok(Self::from_echelon(ech))
    }

    pub fn from_echelon(ech: Echelon) -> Self {
        let ambient_dim = ech.ambient();
        let pivots = ech.pivots();
        Self {
            ambient_dim,
            basis: ech.into_rows(),
            pivots,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn echelon(&self) -> Echelon {
        Echelon {
            ambient: self.ambient_dim,
            rows: self
                .pivots
                .iter()
                .copied()
                .zip(self.basis.iter().cloned())
                .collect(),
        }
    }

    /// Coordinates of `v` in the RREF basis, or `None` when `v` is not in the span.
    pub fn membership(&self, v: &SparseVec) -> Result<Option<Vec<Rational>>, LinalgError> {
        check_ambient(v, self.ambient_dim)?;
        let coords: Vec<Rational> = self.pivots.iter().map(|&p| v.get(p)).collect();
        let mut residual = v.clone();
        for (c, b) in coords.iter().zip(&self.basis) {
            residual.add_scaled(b, &-c.clone());
        }
        Ok(residual.is_zero().then_some(coords))
    }

    pub fn contains(&self, v: &SparseVec) -> Result<bool, LinalgError> {
        Ok(self.membership(v)?.is_some())
    }

    /// `self ⊆ other`
    pub fn leq(&self, other: &Subspace) -> Result<bool, LinalgError> {
        if self.ambient_dim != other.ambient_dim {
            return Err(LinalgError::DimensionMismatch {
                expected: other.ambient_dim,
                found: self.ambient_dim,
            });
        }
        for b in &self.basis {
            if !other.contains(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        if self.ambient_dim != other.ambient_dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        let mut ech = self.echelon();
        for b in &other.basis {
            ech.insert(b);
        }
        Ok(Self::from_echelon(ech))
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        if self.ambient_dim != other.ambient_dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        // Kernel of [U | -V]; each kernel vector gives sum_i a_i u_i in U ∩ V.
        let mut cols: Vec<SparseVec> = self.basis.clone();
        cols.extend(other.basis.iter().map(|v| -v.clone()));
        let m = Matrix::from_columns(self.ambient_dim, &cols)?;
        let k = self.dim();
        let images: Vec<SparseVec> = m
            .kernel_vectors()
            .into_iter()
            .map(|coef| {
                let mut w = SparseVec::new();
                for (i, q) in coef.iter().filter(|(i, _)| *i < k) {
                    w.add_scaled(&self.basis[i], q);
                }
                w
            })
            .collect();
        Subspace::span(self.ambient_dim, images.iter())
    }

    /// Image under the coordinate projection keeping the indices selected by `keep`.
    pub fn project(&self, keep: impl Fn(usize) -> bool) -> Subspace {
        let mut ech = Echelon::new(self.ambient_dim);
        for b in &self.basis {
            ech.insert(&b.filtered(&keep));
        }
        Self::from_echelon(ech)
    }

    pub fn same_span(&self, other: &Subspace) -> Result<bool, LinalgError> {
        Ok(self.dim() == other.dim() && self.leq(other)?)
    }
}

fn check_ambient(v: &SparseVec, ambient: usize) -> Result<(), LinalgError> {
    match v.max_index() {
        Some(i) if i >= ambient => Err(LinalgError::DimensionMismatch {
            expected: ambient,
            found: i + 1,
        }),
        _ => Ok(()),
    }
}
