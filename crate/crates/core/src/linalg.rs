//! Exact sparse linear algebra over Q and F2.
//!
//! Public values are [`FieldScalar`]s; elimination runs on a private typed
//! representation (a rational with an `i64` fast path, or a bit).

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Q,
    F2,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Q => write!(f, "Q"),
            Field::F2 => write!(f, "F2"),
        }
    }
}

impl FromStr for Field {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "Q" | "q" => Ok(Field::Q),
            "F2" | "f2" => Ok(Field::F2),
            other => Err(format!("unknown field `{other}` (expected Q or F2)")),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("entry ({row}, {col}) out of bounds for a {rows}x{cols} matrix")]
    OutOfBounds { row: usize, col: usize, rows: usize, cols: usize },
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
}

/// An exact scalar: a reduced rational or an element of F2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldScalar {
    Q(BigRational),
    F2(bool),
}

impl FieldScalar {
    pub fn zero(field: Field) -> Self {
        match field {
            Field::Q => FieldScalar::Q(BigRational::zero()),
            Field::F2 => FieldScalar::F2(false),
        }
    }

    pub fn one(field: Field) -> Self {
        match field {
            Field::Q => FieldScalar::Q(BigRational::one()),
            Field::F2 => FieldScalar::F2(true),
        }
    }

    pub fn from_i64(field: Field, v: i64) -> Self {
        match field {
            Field::Q => FieldScalar::Q(BigRational::from_integer(BigInt::from(v))),
            Field::F2 => FieldScalar::F2(v.rem_euclid(2) == 1),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        FieldScalar::Q(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `(-1)^e` in the given field.
    pub fn sign(field: Field, e: i64) -> Self {
        if e.rem_euclid(2) == 0 {
            Self::one(field)
        } else {
            -Self::one(field)
        }
    }

    pub fn field(&self) -> Field {
        match self {
            FieldScalar::Q(_) => Field::Q,
            FieldScalar::F2(_) => Field::F2,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FieldScalar::Q(q) => q.is_zero(),
            FieldScalar::F2(b) => !*b,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            FieldScalar::Q(q) => q.is_one(),
            FieldScalar::F2(b) => *b,
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            FieldScalar::Q(q) => FieldScalar::Q(q.recip()),
            FieldScalar::F2(_) => FieldScalar::F2(true),
        })
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self {
            FieldScalar::Q(q) if q.is_integer() => q.to_integer().to_i64(),
            FieldScalar::Q(_) => None,
            FieldScalar::F2(b) => Some(*b as i64),
        }
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.field(), other.field(), "mixed-field arithmetic");
    }
}

impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldScalar::Q(q) => write!(f, "{q}"),
            FieldScalar::F2(b) => write!(f, "{}", *b as u8),
        }
    }
}

impl Add for &FieldScalar {
    type Output = FieldScalar;
    fn add(self, o: &FieldScalar) -> FieldScalar {
        self.check(o);
        match (self, o) {
            (FieldScalar::Q(a), FieldScalar::Q(b)) => FieldScalar::Q(a + b),
            (FieldScalar::F2(a), FieldScalar::F2(b)) => FieldScalar::F2(a ^ b),
            _ => unreachable!(),
        }
    }
}

impl Sub for &FieldScalar {
    type Output = FieldScalar;
    fn sub(self, o: &FieldScalar) -> FieldScalar {
        self.check(o);
        match (self, o) {
            (FieldScalar::Q(a), FieldScalar::Q(b)) => FieldScalar::Q(a - b),
            (FieldScalar::F2(a), FieldScalar::F2(b)) => FieldScalar::F2(a ^ b),
            _ => unreachable!(),
        }
    }
}

impl Mul for &FieldScalar {
    type Output = FieldScalar;
    fn mul(self, o: &FieldScalar) -> FieldScalar {
        self.check(o);
        match (self, o) {
            (FieldScalar::Q(a), FieldScalar::Q(b)) => FieldScalar::Q(a * b),
            (FieldScalar::F2(a), FieldScalar::F2(b)) => FieldScalar::F2(a & b),
            _ => unreachable!(),
        }
    }
}

impl Neg for &FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        match self {
            FieldScalar::Q(a) => FieldScalar::Q(-a),
            FieldScalar::F2(b) => FieldScalar::F2(*b),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for FieldScalar {
            type Output = FieldScalar;
            fn $m(self, o: FieldScalar) -> FieldScalar {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        -&self
    }
}

/// Sparse vector: strictly increasing indices, no stored zeros.
pub type SparseVec = Vec<(usize, FieldScalar)>;

/// Helpers on [`SparseVec`].
pub mod svec {
    use super::*;

    /// Sort, merge duplicate indices and drop zeros.
    pub fn normalize(mut v: Vec<(usize, FieldScalar)>) -> SparseVec {
        v.sort_by_key(|e| e.0);
        let mut out: SparseVec = Vec::with_capacity(v.len());
        for (i, c) in v {
            match out.last_mut() {
                Some((j, acc)) if *j == i => *acc = &*acc + &c,
                _ => out.push((i, c)),
            }
        }
        out.retain(|e| !e.1.is_zero());
        out
    }

    /// `a + c*b`.
    pub fn add_scaled(a: &SparseVec, c: &FieldScalar, b: &SparseVec) -> SparseVec {
        if c.is_zero() {
            return a.clone();
        }
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => unreachable!(),
            };
            match take {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b[j].0, c * &b[j].1));
                    j += 1;
                }
                Ordering::Equal => {
                    let s = &a[i].1 + &(c * &b[j].1);
                    if !s.is_zero() {
                        out.push((a[i].0, s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    pub fn add(a: &SparseVec, b: &SparseVec) -> SparseVec {
        match b.first() {
            None => a.clone(),
            Some((_, c)) => add_scaled(a, &FieldScalar::one(c.field()), b),
        }
    }

    pub fn sub(a: &SparseVec, b: &SparseVec) -> SparseVec {
        match b.first() {
            None => a.clone(),
            Some((_, c)) => add_scaled(a, &-FieldScalar::one(c.field()), b),
        }
    }

    pub fn scale(a: &SparseVec, c: &FieldScalar) -> SparseVec {
        if c.is_zero() {
            return Vec::new();
        }
        a.iter().map(|(i, x)| (*i, x * c)).collect()
    }

    pub fn get(a: &SparseVec, i: usize) -> Option<&FieldScalar> {
        a.binary_search_by_key(&i, |e| e.0).ok().map(|k| &a[k].1)
    }

    pub fn to_dense(a: &SparseVec, field: Field, len: usize) -> Vec<FieldScalar> {
        let mut d = vec![FieldScalar::zero(field); len];
        for (i, c) in a {
            d[*i] = c.clone();
        }
        d
    }

    pub fn from_dense(d: &[FieldScalar]) -> SparseVec {
        d.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.clone()))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Typed arithmetic used inside elimination.

pub(crate) trait Fld: Clone + PartialEq + Send + Sync + fmt::Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Self;
    fn from_scalar(s: &FieldScalar) -> Self;
    fn to_scalar(&self) -> FieldScalar;
}

/// Rational with an `i64` fast path. Canonical: `S` whenever the reduced
/// numerator and denominator fit, so structural equality is value equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Rat {
    S(i64, i64),
    B(Box<BigRational>),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rat {
    fn from_i128(n: i128, d: i128) -> Rat {
        debug_assert!(d != 0);
        if n == 0 {
            return Rat::S(0, 1);
        }
        let neg = (n < 0) != (d < 0);
        let (un, ud) = (n.unsigned_abs(), d.unsigned_abs());
        let g = gcd_u128(un, ud);
        let (un, ud) = (un / g, ud / g);
        if un <= i64::MAX as u128 && ud <= i64::MAX as u128 {
            let n = un as i64;
            Rat::S(if neg { -n } else { n }, ud as i64)
        } else {
            let bn = BigInt::from(un);
            let bn = if neg { -bn } else { bn };
            Rat::B(Box::new(BigRational::new_raw(bn, BigInt::from(ud))))
        }
    }

    fn from_big(q: BigRational) -> Rat {
        match (q.numer().to_i64(), q.denom().to_i64()) {
            (Some(n), Some(d)) => Rat::S(n, d),
            _ => Rat::B(Box::new(q)),
        }
    }

    fn big(&self) -> BigRational {
        match self {
            Rat::S(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rat::B(b) => (**b).clone(),
        }
    }
}

impl Fld for Rat {
    fn zero() -> Self {
        Rat::S(0, 1)
    }
    fn is_zero(&self) -> bool {
        matches!(self, Rat::S(0, _))
    }
    fn add(&self, o: &Self) -> Self {
        if let (Rat::S(a, b), Rat::S(c, d)) = (self, o) {
            if b == d {
                return Rat::from_i128(*a as i128 + *c as i128, *b as i128);
            }
            let x = (*a as i128).checked_mul(*d as i128);
            let y = (*c as i128).checked_mul(*b as i128);
            if let (Some(x), Some(y)) = (x, y) {
                if let Some(n) = x.checked_add(y) {
                    return Rat::from_i128(n, *b as i128 * *d as i128);
                }
            }
        }
        Rat::from_big(self.big() + o.big())
    }
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn mul(&self, o: &Self) -> Self {
        if let (Rat::S(a, b), Rat::S(c, d)) = (self, o) {
            return Rat::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128);
        }
        Rat::from_big(self.big() * o.big())
    }
    fn neg(&self) -> Self {
        match self {
            Rat::S(n, d) => match n.checked_neg() {
                Some(m) => Rat::S(m, *d),
                None => Rat::from_big(-self.big()),
            },
            Rat::B(b) => Rat::from_big(-(**b).clone()),
        }
    }
    fn inv(&self) -> Self {
        match self {
            Rat::S(n, d) => Rat::from_i128(*d as i128, *n as i128),
            Rat::B(b) => Rat::from_big(b.recip()),
        }
    }
    fn from_scalar(s: &FieldScalar) -> Self {
        match s {
            FieldScalar::Q(q) => Rat::from_big(q.clone()),
            FieldScalar::F2(_) => panic!("F2 scalar in a Q computation"),
        }
    }
    fn to_scalar(&self) -> FieldScalar {
        FieldScalar::Q(self.big())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Bit(pub bool);

impl Fld for Bit {
    fn zero() -> Self {
        Bit(false)
    }
    fn is_zero(&self) -> bool {
        !self.0
    }
    fn add(&self, o: &Self) -> Self {
        Bit(self.0 ^ o.0)
    }
    fn sub(&self, o: &Self) -> Self {
        Bit(self.0 ^ o.0)
    }
    fn mul(&self, o: &Self) -> Self {
        Bit(self.0 & o.0)
    }
    fn neg(&self) -> Self {
        *self
    }
    fn inv(&self) -> Self {
        assert!(self.0, "inverse of zero");
        *self
    }
    fn from_scalar(s: &FieldScalar) -> Self {
        match s {
            FieldScalar::F2(b) => Bit(*b),
            FieldScalar::Q(_) => panic!("Q scalar in an F2 computation"),
        }
    }
    fn to_scalar(&self) -> FieldScalar {
        FieldScalar::F2(self.0)
    }
}

type Row<T> = Vec<(usize, T)>;

fn row_sub_scaled<T: Fld>(a: &Row<T>, c: &T, b: &Row<T>) -> Row<T> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ord = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => unreachable!(),
        };
        match ord {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push((b[j].0, c.mul(&b[j].1).neg()));
                j += 1;
            }
            Ordering::Equal => {
                let s = a[i].1.sub(&c.mul(&b[j].1));
                if !s.is_zero() {
                    out.push((a[i].0, s));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn row_scale<T: Fld>(r: &mut Row<T>, c: &T) {
    for e in r.iter_mut() {
        e.1 = e.1.mul(c);
    }
}

/// Forward elimination. Rows with equal leading column are reduced against
/// the sparsest of them. Returns echelon rows with leading coefficient one,
/// ordered by pivot column.
fn echelon<T: Fld>(rows: Vec<Row<T>>, ncols: usize) -> Vec<Row<T>> {
    let mut buckets: HashMap<usize, Vec<Row<T>>> = HashMap::new();
    let mut leads: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = Default::default();
    for r in rows {
        if let Some(&(c, _)) = r.first() {
            let b = buckets.entry(c).or_default();
            if b.is_empty() {
                leads.push(std::cmp::Reverse(c));
            }
            b.push(r);
        }
    }
    let mut out = Vec::new();
    while let Some(std::cmp::Reverse(c)) = leads.pop() {
        debug_assert!(c < ncols.max(1));
        let mut bucket = match buckets.remove(&c) {
            Some(b) if !b.is_empty() => b,
            _ => continue,
        };
        let k = (0..bucket.len()).min_by_key(|&i| bucket[i].len()).unwrap();
        let mut piv = bucket.swap_remove(k);
        let inv = piv[0].1.inv();
        row_scale(&mut piv, &inv);
        for r in bucket {
            let f = r[0].1.clone();
            let nr = row_sub_scaled(&r, &f, &piv);
            if let Some(&(nc, _)) = nr.first() {
                let b = buckets.entry(nc).or_default();
                if b.is_empty() {
                    leads.push(std::cmp::Reverse(nc));
                }
                b.push(nr);
            }
        }
        out.push(piv);
    }
    out
}

/// Back substitution on echelon rows (sorted by pivot) to reduced form.
fn reduce_echelon<T: Fld>(mut rows: Vec<Row<T>>) -> Vec<Row<T>> {
    let pivot_row: HashMap<usize, usize> = rows.iter().enumerate().map(|(i, r)| (r[0].0, i)).collect();
    for k in (0..rows.len()).rev() {
        let own = rows[k][0].0;
        let hits: Vec<(usize, T)> = rows[k]
            .iter()
            .filter(|(c, _)| *c != own && pivot_row.contains_key(c))
            .cloned()
            .collect();
        if hits.is_empty() {
            continue;
        }
        let mut acc: BTreeMap<usize, T> = rows[k].iter().cloned().collect();
        for (c, f) in hits {
            let j = pivot_row[&c];
            for (cc, v) in &rows[j] {
                let e = acc.entry(*cc).or_insert_with(T::zero);
                *e = e.sub(&f.mul(v));
            }
        }
        rows[k] = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
    }
    rows
}

fn typed_rows<T: Fld>(rows: &[SparseVec]) -> Vec<Row<T>> {
    rows.iter()
        .map(|r| r.iter().map(|(i, c)| (*i, T::from_scalar(c))).collect())
        .collect()
}

fn scalar_rows<T: Fld>(rows: Vec<Row<T>>) -> Vec<SparseVec> {
    rows.into_iter()
        .map(|r| r.into_iter().map(|(i, c)| (i, c.to_scalar())).collect())
        .collect()
}

fn rank_rows(field: Field, rows: &[SparseVec], ncols: usize) -> usize {
    match field {
        Field::Q => echelon(typed_rows::<Rat>(rows), ncols).len(),
        Field::F2 => echelon(typed_rows::<Bit>(rows), ncols).len(),
    }
}

fn rref_rows(field: Field, rows: &[SparseVec], ncols: usize) -> Vec<SparseVec> {
    match field {
        Field::Q => scalar_rows(reduce_echelon(echelon(typed_rows::<Rat>(rows), ncols))),
        Field::F2 => scalar_rows(reduce_echelon(echelon(typed_rows::<Bit>(rows), ncols))),
    }
}

// ---------------------------------------------------------------------------

/// Sparse matrix acting on column vectors, stored row by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    field: Field,
    nrows: usize,
    ncols: usize,
    rows: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zero(field: Field, nrows: usize, ncols: usize) -> Self {
        SparseMatrix { field, nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let rows = (0..n).map(|i| vec![(i, FieldScalar::one(field))]).collect();
        SparseMatrix { field, nrows: n, ncols: n, rows }
    }

    /// Build from (row, col, value) triplets; duplicates are summed and zeros dropped.
    pub fn from_triplets(
        field: Field,
        nrows: usize,
        ncols: usize,
        entries: impl IntoIterator<Item = (usize, usize, FieldScalar)>,
    ) -> Result<Self, LinalgError> {
        let mut rows: Vec<Vec<(usize, FieldScalar)>> = vec![Vec::new(); nrows];
        for (r, c, v) in entries {
            if r >= nrows || c >= ncols {
                return Err(LinalgError::OutOfBounds { row: r, col: c, rows: nrows, cols: ncols });
            }
            if v.field() != field {
                return Err(LinalgError::FieldMismatch(field, v.field()));
            }
            rows[r].push((c, v));
        }
        let rows = rows.into_iter().map(svec::normalize).collect();
        Ok(SparseMatrix { field, nrows, ncols, rows })
    }

    pub fn from_rows(field: Field, nrows: usize, ncols: usize, rows: Vec<SparseVec>) -> Self {
        assert_eq!(rows.len(), nrows);
        let rows: Vec<SparseVec> = rows.into_iter().map(svec::normalize).collect();
        debug_assert!(rows.iter().all(|r| r.iter().all(|e| e.0 < ncols)));
        SparseMatrix { field, nrows, ncols, rows }
    }

    /// Build from column images (the usual way to write down a linear map).
    pub fn from_columns(field: Field, nrows: usize, ncols: usize, cols: &[SparseVec]) -> Self {
        assert_eq!(cols.len(), ncols);
        let mut rows: Vec<SparseVec> = vec![Vec::new(); nrows];
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col {
                assert!(*i < nrows, "column entry out of range");
                rows[*i].push((j, v.clone()));
            }
        }
        let rows = rows.into_iter().map(svec::normalize).collect();
        SparseMatrix { field, nrows, ncols, rows }
    }

    pub fn from_i64_rows(field: Field, data: &[Vec<i64>]) -> Self {
        let nrows = data.len();
        let ncols = data.first().map_or(0, |r| r.len());
        let rows = data
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .map(|(j, v)| (j, FieldScalar::from_i64(field, *v)))
                    .filter(|e| !e.1.is_zero())
                    .collect()
            })
            .collect();
        SparseMatrix { field, nrows, ncols, rows }
    }

    pub fn field(&self) -> Field {
        self.field
    }
    pub fn nrows(&self) -> usize {
        self.nrows
    }
    pub fn ncols(&self) -> usize {
        self.ncols
    }
    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }
    pub fn row(&self, i: usize) -> &SparseVec {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn triplets(&self) -> Vec<(usize, usize, FieldScalar)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j, v.clone())))
            .collect()
    }

    pub fn get(&self, i: usize, j: usize) -> FieldScalar {
        svec::get(&self.rows[i], j).cloned().unwrap_or_else(|| FieldScalar::zero(self.field))
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut rows: Vec<SparseVec> = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for (j, v) in r {
                rows[*j].push((i, v.clone()));
            }
        }
        SparseMatrix { field: self.field, nrows: self.ncols, ncols: self.nrows, rows }
    }

    /// Columns as sparse vectors.
    pub fn columns(&self) -> Vec<SparseVec> {
        self.transpose().rows
    }

    /// `self * other`.
    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix, LinalgError> {
        if self.ncols != other.nrows {
            return Err(LinalgError::DimensionMismatch { expected: self.ncols, found: other.nrows });
        }
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch(self.field, other.field));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut acc: BTreeMap<usize, FieldScalar> = BTreeMap::new();
                for (k, a) in r {
                    for (j, b) in &other.rows[*k] {
                        let e = acc.entry(*j).or_insert_with(|| FieldScalar::zero(self.field));
                        *e = &*e + &(a * b);
                    }
                }
                acc.into_iter().filter(|e| !e.1.is_zero()).collect()
            })
            .collect();
        Ok(SparseMatrix { field: self.field, nrows: self.nrows, ncols: other.ncols, rows })
    }

    /// Matrix times a sparse column vector.
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            let mut s = FieldScalar::zero(self.field);
            let (mut a, mut b) = (0, 0);
            while a < r.len() && b < v.len() {
                match r[a].0.cmp(&v[b].0) {
                    Ordering::Less => a += 1,
                    Ordering::Greater => b += 1,
                    Ordering::Equal => {
                        s = &s + &(&r[a].1 * &v[b].1);
                        a += 1;
                        b += 1;
                    }
                }
            }
            if !s.is_zero() {
                out.push((i, s));
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        if self.nrows <= self.ncols {
            rank_rows(self.field, &self.rows, self.ncols)
        } else {
            let t = self.transpose();
            rank_rows(t.field, &t.rows, t.ncols)
        }
    }

    /// Horizontal block `[self | other]`.
    pub fn hconcat(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.nrows, other.nrows);
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut r = a.clone();
                r.extend(b.iter().map(|(j, v)| (j + self.ncols, v.clone())));
                r
            })
            .collect();
        SparseMatrix { field: self.field, nrows: self.nrows, ncols: self.ncols + other.ncols, rows }
    }
}

/// Output of [`row_reduce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowReduction {
    pub reduced: SparseMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Reduced row echelon form. Zero rows are placed last.
pub fn row_reduce(m: &SparseMatrix) -> RowReduction {
    let rows = rref_rows(m.field, &m.rows, m.ncols);
    let rank = rows.len();
    let pivots: Vec<usize> = rows.iter().map(|r| r[0].0).collect();
    let mut all = rows;
    all.resize(m.nrows.max(rank), Vec::new());
    let reduced = SparseMatrix { field: m.field, nrows: m.nrows.max(rank), ncols: m.ncols, rows: all };
    RowReduction { reduced, rank, pivots }
}

/// Null space basis of `m` as sparse vectors (one per free column, in column order).
pub fn kernel_basis_sparse(m: &SparseMatrix) -> Vec<SparseVec> {
    let rows = rref_rows(m.field, &m.rows, m.ncols);
    let mut is_pivot = vec![false; m.ncols];
    for r in &rows {
        is_pivot[r[0].0] = true;
    }
    let mut ker: BTreeMap<usize, SparseVec> = (0..m.ncols)
        .filter(|&j| !is_pivot[j])
        .map(|j| (j, vec![(j, FieldScalar::one(m.field))]))
        .collect();
    for r in &rows {
        let p = r[0].0;
        for (j, v) in &r[1..] {
            ker.get_mut(j).expect("reduced row touches a pivot column").push((p, -v));
        }
    }
    ker.into_values().map(svec::normalize).collect()
}

/// Null space basis of `m` as dense vectors.
pub fn kernel_basis(m: &SparseMatrix) -> Vec<Vec<FieldScalar>> {
    kernel_basis_sparse(m).iter().map(|v| svec::to_dense(v, m.field, m.ncols)).collect()
}

/// Column space basis: the columns of `m` at the pivot positions.
pub fn image_basis_sparse(m: &SparseMatrix) -> Vec<SparseVec> {
    let t = m.transpose();
    let rows = match m.field {
        Field::Q => scalar_rows(echelon(typed_rows::<Rat>(&m.rows), m.ncols)),
        Field::F2 => scalar_rows(echelon(typed_rows::<Bit>(&m.rows), m.ncols)),
    };
    let mut pivots: Vec<usize> = rows.iter().map(|r| r[0].0).collect();
    pivots.sort_unstable();
    pivots.into_iter().map(|j| t.rows[j].clone()).collect()
}

pub fn image_basis(m: &SparseMatrix) -> Vec<Vec<FieldScalar>> {
    image_basis_sparse(m).iter().map(|v| svec::to_dense(v, m.field, m.nrows)).collect()
}

/// Rank of a family of sparse vectors in an ambient space of dimension `ambient`.
pub fn rank_of(field: Field, vecs: &[SparseVec], ambient: usize) -> usize {
    rank_rows(field, vecs, ambient)
}

/// `ambient - rank(span(sub))`.
pub fn quotient_dim(sub: &[Vec<FieldScalar>], ambient: usize) -> Result<usize, LinalgError> {
    let mut field = None;
    for v in sub {
        if v.len() != ambient {
            return Err(LinalgError::DimensionMismatch { expected: ambient, found: v.len() });
        }
        if let Some(c) = v.first() {
            match field {
                None => field = Some(c.field()),
                Some(f) if f != c.field() => return Err(LinalgError::FieldMismatch(f, c.field())),
                _ => {}
            }
        }
    }
    let Some(field) = field else { return Ok(ambient) };
    let rows: Vec<SparseVec> = sub.iter().map(|v| svec::from_dense(v)).collect();
    Ok(ambient - rank_rows(field, &rows, ambient))
}

/// Incrementally built span with combination tracking: every stored row knows
/// which inserted vectors it came from, so membership tests also return
/// coordinates.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    field: Field,
    rows: BTreeMap<usize, (SparseVec, SparseVec)>,
    inserted: usize,
}

impl SpanBasis {
    pub fn new(field: Field) -> Self {
        SpanBasis { field, rows: BTreeMap::new(), inserted: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of vectors offered to [`SpanBasis::insert`] so far (ids are `0..count`).
    pub fn offered(&self) -> usize {
        self.inserted
    }

    /// Reduce `v`; returns the remainder and coefficients over inserted ids with
    /// `v = remainder + sum coeff[id] * vector[id]`.
    pub fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut rem: BTreeMap<usize, FieldScalar> = v.iter().cloned().collect();
        let mut comb: BTreeMap<usize, FieldScalar> = BTreeMap::new();
        let mut cursor = 0usize;
        loop {
            let next = rem.range(cursor..).find(|(c, _)| self.rows.contains_key(c)).map(|(c, f)| (*c, f.clone()));
            let Some((c, f)) = next else { break };
            let (row, rc) = &self.rows[&c];
            for (j, x) in row {
                let e = rem.entry(*j).or_insert_with(|| FieldScalar::zero(self.field));
                *e = &*e - &(&f * x);
                if e.is_zero() {
                    rem.remove(j);
                }
            }
            for (j, x) in rc {
                let e = comb.entry(*j).or_insert_with(|| FieldScalar::zero(self.field));
                *e = &*e + &(&f * x);
                if e.is_zero() {
                    comb.remove(j);
                }
            }
            cursor = c + 1;
        }
        (rem.into_iter().collect(), comb.into_iter().collect())
    }

    /// Leading columns of the stored rows, ascending.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows.keys().copied().collect()
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Offer `v`; returns its id if it enlarged the span. Ids count every call.
    pub fn insert(&mut self, v: &SparseVec) -> Option<usize> {
        let id = self.inserted;
        self.inserted += 1;
        let (rem, comb) = self.reduce(v);
        if rem.is_empty() {
            return None;
        }
        let lead = rem[0].0;
        let inv = rem[0].1.inv().unwrap();
        let row = svec::scale(&rem, &inv);
        let mut rc = svec::scale(&comb, &-inv.clone());
        rc = svec::add_scaled(&rc, &inv, &vec![(id, FieldScalar::one(self.field))]);
        self.rows.insert(lead, (row, rc));
        Some(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> FieldScalar {
        FieldScalar::from_i64(Field::Q, v)
    }

    #[test]
    fn identity_rank_and_pivots() {
        let r = row_reduce(&SparseMatrix::identity(Field::Q, 2));
        assert_eq!(r.rank, 2);
        assert_eq!(r.pivots, vec![0, 1]);
    }

    #[test]
    fn duplicate_rows_over_f2() {
        let m = SparseMatrix::from_i64_rows(Field::F2, &[vec![1, 1], vec![1, 1]]);
        assert_eq!(row_reduce(&m).rank, 1);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&SparseMatrix::zero(Field::Q, 3, 3)).len(), 3);
        assert!(kernel_basis(&SparseMatrix::identity(Field::Q, 4)).is_empty());
        let m = SparseMatrix::from_i64_rows(Field::F2, &[vec![1, 1]]);
        let k = kernel_basis(&m);
        assert_eq!(k, vec![vec![FieldScalar::F2(true), FieldScalar::F2(true)]]);
    }

    #[test]
    fn image_examples() {
        assert_eq!(image_basis(&SparseMatrix::identity(Field::Q, 2)).len(), 2);
        assert!(image_basis(&SparseMatrix::zero(Field::Q, 2, 3)).is_empty());
        let m = SparseMatrix::from_i64_rows(Field::Q, &[vec![1], vec![2]]);
        assert_eq!(image_basis(&m), vec![vec![q(1), q(2)]]);
    }

    #[test]
    fn quotient_examples() {
        assert_eq!(quotient_dim(&[], 4), Ok(4));
        let full: Vec<Vec<FieldScalar>> =
            (0..3).map(|i| (0..3).map(|j| q((i == j) as i64)).collect()).collect();
        assert_eq!(quotient_dim(&full, 3), Ok(0));
        assert_eq!(quotient_dim(&[vec![q(1), q(1), q(0)]], 3), Ok(2));
        assert_eq!(
            quotient_dim(&[vec![q(1), q(1)]], 3),
            Err(LinalgError::DimensionMismatch { expected: 3, found: 2 })
        );
    }

    #[test]
    fn rat_fast_path_overflows_to_big() {
        let a = Rat::S(i64::MAX, 1);
        let b = a.add(&a);
        assert!(matches!(b, Rat::B(_)));
        let c = b.sub(&a);
        assert_eq!(c, Rat::S(i64::MAX, 1));
        assert_eq!(Rat::S(i64::MIN, 1).neg().neg(), Rat::S(i64::MIN, 1));
        assert_eq!(Rat::S(2, 3).mul(&Rat::S(3, 2)), Rat::S(1, 1));
    }

    #[test]
    fn span_basis_coordinates() {
        let mut s = SpanBasis::new(Field::Q);
        let a = vec![(0, q(1)), (1, q(1))];
        let b = vec![(1, q(1)), (2, q(1))];
        assert_eq!(s.insert(&a), Some(0));
        assert_eq!(s.insert(&b), Some(1));
        let v = vec![(0, q(2)), (1, q(5)), (2, q(3))];
        let (rem, comb) = s.reduce(&v);
        assert!(rem.is_empty());
        assert_eq!(comb, vec![(0, q(2)), (1, q(3))]);
        assert_eq!(s.insert(&svec::add(&a, &b)), None);
    }
}
