//! Bigraded vector spaces, chain complexes and their homology.
//!
//! A cell is a pair (homological degree, weight). Differentials lower the
//! degree by one and preserve the weight; cochain complexes are stored in
//! non-positive degrees.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{kernel_basis_sparse, svec, Field, FieldScalar, SpanBasis, SparseMatrix, SparseVec};

pub type Cell = (i64, u32);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GradedError {
    #[error("window too large: degree {degree}, weight {weight} needs cells outside the computed range")]
    WindowTooLarge { degree: i64, weight: u32 },
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(Field, Field),
    #[error("differential at ({degree}, {weight}) has shape {found:?}, expected {expected:?}")]
    Shape { degree: i64, weight: u32, expected: (usize, usize), found: (usize, usize) },
    #[error("duplicate label `{label}` in cell ({degree}, {weight})")]
    DuplicateLabel { degree: i64, weight: u32, label: String },
}

/// Finite ordered bases indexed by (degree, weight).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BigradedSpace {
    cells: BTreeMap<Cell, Vec<String>>,
}

impl BigradedSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_cells(cells: impl IntoIterator<Item = (Cell, Vec<String>)>) -> Result<Self, GradedError> {
        let mut s = Self::new();
        for (c, labels) in cells {
            s.set_cell(c, labels)?;
        }
        Ok(s)
    }

    /// Replace a cell; empty label lists remove it.
    pub fn set_cell(&mut self, cell: Cell, labels: Vec<String>) -> Result<(), GradedError> {
        let mut seen = BTreeSet::new();
        for l in &labels {
            if !seen.insert(l) {
                return Err(GradedError::DuplicateLabel { degree: cell.0, weight: cell.1, label: l.clone() });
            }
        }
        if labels.is_empty() {
            self.cells.remove(&cell);
        } else {
            self.cells.insert(cell, labels);
        }
        Ok(())
    }

    /// Append a label, returning its index in the cell. Duplicates are a logic error.
    pub fn push(&mut self, cell: Cell, label: String) -> usize {
        let v = self.cells.entry(cell).or_default();
        debug_assert!(!v.contains(&label), "duplicate label {label}");
        v.push(label);
        v.len() - 1
    }

    pub fn dim(&self, cell: Cell) -> usize {
        self.cells.get(&cell).map_or(0, |v| v.len())
    }

    pub fn labels(&self, cell: Cell) -> &[String] {
        self.cells.get(&cell).map_or(&[], |v| v.as_slice())
    }

    pub fn cells(&self) -> impl Iterator<Item = (&Cell, &Vec<String>)> {
        self.cells.iter()
    }

    pub fn cell_keys(&self) -> Vec<Cell> {
        self.cells.keys().copied().collect()
    }

    pub fn total_dim(&self) -> usize {
        self.cells.values().map(|v| v.len()).sum()
    }

    pub fn index_of(&self, cell: Cell, label: &str) -> Option<usize> {
        self.labels(cell).iter().position(|l| l == label)
    }

    pub fn suspend(&self, n: i64) -> BigradedSpace {
        BigradedSpace { cells: self.cells.iter().map(|((d, w), v)| ((d + n, *w), v.clone())).collect() }
    }

    /// Dimensions of all nonempty cells.
    pub fn dims(&self) -> BTreeMap<Cell, usize> {
        self.cells.iter().map(|(c, v)| (*c, v.len())).collect()
    }
}

/// A weight-preserving, degree-lowering complex. `complete_degrees` and
/// `complete_weights` record where every cell was built in full; `None` means
/// no truncation in that grading.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    field: Field,
    space: BigradedSpace,
    diff: BTreeMap<Cell, SparseMatrix>,
    complete_degrees: Option<RangeInclusive<i64>>,
    complete_weights: Option<RangeInclusive<u32>>,
}

/// First failure found by [`validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub degree: i64,
    pub weight: u32,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cell ({}, {}): {}", self.degree, self.weight, self.message)
    }
}

impl ChainComplex {
    /// Complex with zero differential.
    pub fn new(field: Field, space: BigradedSpace) -> Self {
        ChainComplex { field, space, diff: BTreeMap::new(), complete_degrees: None, complete_weights: None }
    }

    pub fn with_complete_degrees(mut self, r: RangeInclusive<i64>) -> Self {
        self.complete_degrees = Some(r);
        self
    }

    pub fn with_complete_weights(mut self, r: RangeInclusive<u32>) -> Self {
        self.complete_weights = Some(r);
        self
    }

    pub fn complete_degrees(&self) -> Option<&RangeInclusive<i64>> {
        self.complete_degrees.as_ref()
    }

    pub fn complete_weights(&self) -> Option<&RangeInclusive<u32>> {
        self.complete_weights.as_ref()
    }

    /// Set the differential out of `cell`; rows index cell (d-1, w), columns index `cell`.
    pub fn set_differential(&mut self, cell: Cell, m: SparseMatrix) -> Result<(), GradedError> {
        if m.field() != self.field {
            return Err(GradedError::FieldMismatch(self.field, m.field()));
        }
        let expected = (self.space.dim((cell.0 - 1, cell.1)), self.space.dim(cell));
        if (m.nrows(), m.ncols()) != expected {
            return Err(GradedError::Shape {
                degree: cell.0,
                weight: cell.1,
                expected,
                found: (m.nrows(), m.ncols()),
            });
        }
        if m.is_zero() {
            self.diff.remove(&cell);
        } else {
            self.diff.insert(cell, m);
        }
        Ok(())
    }

    /// Differential given by column images.
    pub fn set_differential_columns(&mut self, cell: Cell, cols: &[SparseVec]) -> Result<(), GradedError> {
        let m = SparseMatrix::from_columns(self.field, self.space.dim((cell.0 - 1, cell.1)), cols.len(), cols);
        self.set_differential(cell, m)
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn space(&self) -> &BigradedSpace {
        &self.space
    }

    /// Differential out of `cell` (a zero matrix of the right shape when absent).
    pub fn differential(&self, cell: Cell) -> SparseMatrix {
        match self.diff.get(&cell) {
            Some(m) => m.clone(),
            None => SparseMatrix::zero(self.field, self.space.dim((cell.0 - 1, cell.1)), self.space.dim(cell)),
        }
    }

    pub fn differential_ref(&self, cell: Cell) -> Option<&SparseMatrix> {
        self.diff.get(&cell)
    }

    fn covers(&self, d: i64, w: u32) -> bool {
        self.complete_degrees.as_ref().is_none_or(|r| r.contains(&d))
            && self.complete_weights.as_ref().is_none_or(|r| r.contains(&w))
    }

    /// Euler characteristic of a weight column.
    pub fn euler_characteristic(&self, weight: u32) -> i64 {
        self.space
            .cells()
            .filter(|((_, w), _)| *w == weight)
            .map(|((d, _), v)| if d.rem_euclid(2) == 0 { v.len() as i64 } else { -(v.len() as i64) })
            .sum()
    }

    fn rank_of(&self, cell: Cell) -> usize {
        self.diff.get(&cell).map_or(0, |m| m.rank())
    }
}

/// Check shapes and `d∘d = 0` on every populated cell.
pub fn validate(c: &ChainComplex) -> Result<(), Violation> {
    for (&(d, w), m) in &c.diff {
        let expected = (c.space.dim((d - 1, w)), c.space.dim((d, w)));
        if (m.nrows(), m.ncols()) != expected {
            return Err(Violation { degree: d, weight: w, message: "differential shape mismatch".into() });
        }
    }
    for (&(d, w), m) in &c.diff {
        if let Some(below) = c.diff.get(&(d - 1, w)) {
            let comp = below.mul(m).expect("shapes checked");
            if !comp.is_zero() {
                return Err(Violation { degree: d, weight: w, message: "d∘d is nonzero".into() });
            }
        }
    }
    Ok(())
}

/// Dimension and representative cycles of one homology cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyCell {
    pub dim: usize,
    pub reps: Vec<SparseVec>,
}

/// Homology over a rectangular window. Cells absent from `entries` but inside
/// the window are zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyTable {
    pub field: Field,
    pub degrees: RangeInclusive<i64>,
    pub weights: RangeInclusive<u32>,
    pub entries: BTreeMap<Cell, HomologyCell>,
}

#[derive(Serialize, Deserialize)]
struct JsonCell {
    degree: i64,
    weight: u32,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct JsonTable {
    field: String,
    cells: Vec<JsonCell>,
}

impl HomologyTable {
    pub fn empty(field: Field, degrees: RangeInclusive<i64>, weights: RangeInclusive<u32>) -> Self {
        HomologyTable { field, degrees, weights, entries: BTreeMap::new() }
    }

    /// Table from a dimension map; zero entries are dropped.
    pub fn from_dims(
        field: Field,
        degrees: RangeInclusive<i64>,
        weights: RangeInclusive<u32>,
        dims: impl IntoIterator<Item = (Cell, usize)>,
    ) -> Self {
        let entries = dims
            .into_iter()
            .filter(|(c, k)| *k > 0 && degrees.contains(&c.0) && weights.contains(&c.1))
            .map(|(c, k)| (c, HomologyCell { dim: k, reps: Vec::new() }))
            .collect();
        HomologyTable { field, degrees, weights, entries }
    }

    pub fn dim(&self, degree: i64, weight: u32) -> usize {
        self.entries.get(&(degree, weight)).map_or(0, |e| e.dim)
    }

    pub fn reps(&self, degree: i64, weight: u32) -> &[SparseVec] {
        self.entries.get(&(degree, weight)).map_or(&[], |e| e.reps.as_slice())
    }

    /// Nonzero cells in canonical order.
    pub fn dims(&self) -> BTreeMap<Cell, usize> {
        self.entries.iter().map(|(c, e)| (*c, e.dim)).collect()
    }

    /// Total dimension per degree, summed over weights.
    pub fn dims_by_degree(&self) -> BTreeMap<i64, usize> {
        let mut m = BTreeMap::new();
        for ((d, _), e) in &self.entries {
            *m.entry(*d).or_insert(0) += e.dim;
        }
        m
    }

    pub fn total_dim(&self) -> usize {
        self.entries.values().map(|e| e.dim).sum()
    }

    pub fn shift(&self, n: i64) -> HomologyTable {
        HomologyTable {
            field: self.field,
            degrees: (self.degrees.start() + n)..=(self.degrees.end() + n),
            weights: self.weights.clone(),
            entries: self.entries.iter().map(|((d, w), e)| ((d + n, *w), e.clone())).collect(),
        }
    }

    /// Restrict to a sub-window.
    pub fn restrict(&self, degrees: RangeInclusive<i64>, weights: RangeInclusive<u32>) -> HomologyTable {
        let entries = self
            .entries
            .iter()
            .filter(|(c, _)| degrees.contains(&c.0) && weights.contains(&c.1))
            .map(|(c, e)| (*c, e.clone()))
            .collect();
        HomologyTable { field: self.field, degrees, weights, entries }
    }

    pub fn to_json(&self) -> String {
        let t = JsonTable {
            field: self.field.to_string(),
            cells: self
                .entries
                .iter()
                .map(|((d, w), e)| JsonCell { degree: *d, weight: *w, dim: e.dim })
                .collect(),
        };
        serde_json::to_string(&t).expect("table serializes")
    }

    pub fn from_json(s: &str) -> Result<HomologyTable, String> {
        let t: JsonTable = serde_json::from_str(s).map_err(|e| e.to_string())?;
        let field: Field = t.field.parse()?;
        let (mut dl, mut dh, mut wl, mut wh) = (0i64, 0i64, 0u32, 0u32);
        for (i, c) in t.cells.iter().enumerate() {
            if i == 0 {
                (dl, dh, wl, wh) = (c.degree, c.degree, c.weight, c.weight);
            }
            dl = dl.min(c.degree);
            dh = dh.max(c.degree);
            wl = wl.min(c.weight);
            wh = wh.max(c.weight);
        }
        Ok(HomologyTable::from_dims(
            field,
            dl..=dh,
            wl..=wh,
            t.cells.into_iter().map(|c| ((c.degree, c.weight), c.dim)),
        ))
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["degree", "weight", "dim"]).unwrap();
        for ((d, wt), e) in &self.entries {
            w.write_record([d.to_string(), wt.to_string(), e.dim.to_string()]).unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("field {}\n", self.field);
        for ((d, w), e) in &self.entries {
            s.push_str(&format!("degree {d:>4}  weight {w:>3}  dim {}\n", e.dim));
        }
        s
    }
}

fn check_window(
    c: &ChainComplex,
    degrees: &RangeInclusive<i64>,
    weights: &RangeInclusive<u32>,
) -> Result<(), GradedError> {
    for w in weights.clone() {
        if !c.covers(*degrees.start(), w) || !c.covers(*degrees.end() + 1, w) || !c.covers(*degrees.end(), w) {
            let d = if !c.covers(*degrees.start(), w) { *degrees.start() } else { *degrees.end() + 1 };
            return Err(GradedError::WindowTooLarge { degree: d, weight: w });
        }
    }
    Ok(())
}

fn needed_cells(c: &ChainComplex, degrees: &RangeInclusive<i64>, weights: &RangeInclusive<u32>) -> Vec<Cell> {
    c.space
        .cell_keys()
        .into_iter()
        .filter(|(d, w)| degrees.contains(d) && weights.contains(w))
        .collect()
}

/// Homology dimensions only; ranks are computed in parallel.
pub fn homology_dims(
    c: &ChainComplex,
    degrees: RangeInclusive<i64>,
    weights: RangeInclusive<u32>,
) -> Result<HomologyTable, GradedError> {
    check_window(c, &degrees, &weights)?;
    let cells = needed_cells(c, &degrees, &weights);
    let mut mats: BTreeSet<Cell> = BTreeSet::new();
    for &(d, w) in &cells {
        mats.insert((d, w));
        mats.insert((d + 1, w));
    }
    let mats: Vec<Cell> = mats.into_iter().collect();
    let ranks: HashMap<Cell, usize> = mats.par_iter().map(|&cl| (cl, c.rank_of(cl))).collect();
    let dims = cells.iter().map(|&(d, w)| {
        let n = c.space.dim((d, w));
        ((d, w), n - ranks[&(d, w)] - ranks[&(d + 1, w)])
    });
    Ok(HomologyTable::from_dims(c.field, degrees.clone(), weights.clone(), dims.collect::<Vec<_>>()))
}

/// Homology with representative cycles. Representatives are kernel vectors
/// preferred by small support, then basis order, kept when independent modulo
/// boundaries.
pub fn homology(
    c: &ChainComplex,
    degrees: RangeInclusive<i64>,
    weights: RangeInclusive<u32>,
) -> Result<HomologyTable, GradedError> {
    check_window(c, &degrees, &weights)?;
    let cells = needed_cells(c, &degrees, &weights);
    let entries: Vec<(Cell, HomologyCell)> = cells
        .par_iter()
        .map(|&(d, w)| {
            let out = c.differential((d, w));
            let mut ker = kernel_basis_sparse(&out);
            ker.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().map(|e| e.0).cmp(b.iter().map(|e| e.0))));
            let mut span = SpanBasis::new(c.field);
            if let Some(inm) = c.diff.get(&(d + 1, w)) {
                for col in inm.columns() {
                    span.insert(&col);
                }
            }
            let mut reps = Vec::new();
            for k in ker {
                if span.insert(&k).is_some() {
                    reps.push(k);
                }
            }
            ((d, w), HomologyCell { dim: reps.len(), reps })
        })
        .collect();
    Ok(HomologyTable {
        field: c.field,
        degrees,
        weights,
        entries: entries.into_iter().filter(|(_, e)| e.dim > 0).collect(),
    })
}

/// Express a cycle in terms of homology representatives of its cell: returns
/// the coordinates, or `None` if `v` is not a cycle.
pub fn classify(c: &ChainComplex, table: &HomologyTable, cell: Cell, v: &SparseVec) -> Option<Vec<FieldScalar>> {
    if !c.differential(cell).apply(v).is_empty() {
        return None;
    }
    let reps = table.reps(cell.0, cell.1);
    let mut span = SpanBasis::new(c.field);
    for r in reps {
        span.insert(r);
    }
    if let Some(inm) = c.diff.get(&(cell.0 + 1, cell.1)) {
        for col in inm.columns() {
            span.insert(&col);
        }
    }
    let (rem, comb) = span.reduce(v);
    if !rem.is_empty() {
        return None;
    }
    let mut out = vec![FieldScalar::zero(c.field); reps.len()];
    for (id, x) in comb {
        if id < reps.len() {
            out[id] = x;
        }
    }
    Some(out)
}

/// Suspension: cell (d, w) moves to (d + n, w); differentials keep their signs.
pub fn suspend(c: &ChainComplex, n: i64) -> ChainComplex {
    ChainComplex {
        field: c.field,
        space: c.space.suspend(n),
        diff: c.diff.iter().map(|((d, w), m)| ((d + n, *w), m.clone())).collect(),
        complete_degrees: c.complete_degrees.as_ref().map(|r| (r.start() + n)..=(r.end() + n)),
        complete_weights: c.complete_weights.clone(),
    }
}

/// Tensor product with the Koszul sign `d(x⊗y) = dx⊗y + (-1)^{|x|} x⊗dy`.
/// Labels are `x⊗y`; within a cell the summands are ordered by the cell of `x`.
pub fn tensor(a: &ChainComplex, b: &ChainComplex) -> Result<ChainComplex, GradedError> {
    if a.field != b.field {
        return Err(GradedError::FieldMismatch(a.field, b.field));
    }
    let field = a.field;
    // offsets[(out cell)][(cell a, cell b)] = start index
    let mut blocks: BTreeMap<Cell, Vec<(Cell, Cell, usize)>> = BTreeMap::new();
    let mut space = BigradedSpace::new();
    for (ca, la) in a.space.cells() {
        for (cb, lb) in b.space.cells() {
            let out = (ca.0 + cb.0, ca.1 + cb.1);
            let start = space.dim(out);
            for x in la {
                for y in lb {
                    space.push(out, format!("{x}⊗{y}"));
                }
            }
            blocks.entry(out).or_default().push((*ca, *cb, start));
        }
    }
    let offset: HashMap<(Cell, Cell), usize> =
        blocks.values().flatten().map(|(ca, cb, s)| ((*ca, *cb), *s)).collect();
    let mut c = ChainComplex::new(field, space);
    for (out, bl) in &blocks {
        let mut cols: Vec<SparseVec> = vec![Vec::new(); c.space.dim(*out)];
        for (ca, cb, start) in bl {
            let (na, nb) = (a.space.dim(*ca), b.space.dim(*cb));
            let da = a.differential_ref(*ca).map(|m| m.columns());
            let db = b.differential_ref(*cb).map(|m| m.columns());
            let sign = FieldScalar::sign(field, ca.0);
            for i in 0..na {
                for j in 0..nb {
                    let col = &mut cols[start + i * nb + j];
                    if let Some(da) = &da {
                        let tgt = offset[&((ca.0 - 1, ca.1), *cb)];
                        for (k, v) in &da[i] {
                            col.push((tgt + k * nb + j, v.clone()));
                        }
                    }
                    if let Some(db) = &db {
                        let tgt = offset[&(*ca, (cb.0 - 1, cb.1))];
                        let nb2 = b.space.dim((cb.0 - 1, cb.1));
                        for (k, v) in &db[j] {
                            col.push((tgt + i * nb2 + k, &sign * v));
                        }
                    }
                }
            }
        }
        let cols: Vec<SparseVec> = cols.into_iter().map(svec::normalize).collect();
        if cols.iter().any(|v| !v.is_empty()) {
            c.set_differential_columns(*out, &cols)?;
        }
    }
    c.complete_weights = match (&a.complete_weights, &b.complete_weights) {
        (None, None) => None,
        (Some(r), None) | (None, Some(r)) => Some(0..=*r.end()),
        (Some(r), Some(s)) => Some(0..=(*r.end()).min(*s.end())),
    };
    c.complete_degrees = match (&a.complete_degrees, &b.complete_degrees) {
        (None, None) => None,
        _ => {
            let lo_a = a.space.cells().map(|(c, _)| c.0).min().unwrap_or(0);
            let lo_b = b.space.cells().map(|(c, _)| c.0).min().unwrap_or(0);
            let hi_a = a.complete_degrees.as_ref().map_or(i64::MAX / 4, |r| *r.end());
            let hi_b = b.complete_degrees.as_ref().map_or(i64::MAX / 4, |r| *r.end());
            Some((lo_a + lo_b)..=(hi_a + lo_b).min(hi_b + lo_a))
        }
    };
    Ok(c)
}

/// The unit complex: the ground field in degree 0, weight 0.
pub fn unit_complex(field: Field) -> ChainComplex {
    let mut s = BigradedSpace::new();
    s.push((0, 0), "1".into());
    ChainComplex::new(field, s)
}

/// Cellwise convolution of two dimension tables (Künneth over a field).
pub fn convolve(a: &BTreeMap<Cell, usize>, b: &BTreeMap<Cell, usize>) -> BTreeMap<Cell, usize> {
    let mut out = BTreeMap::new();
    for ((d1, w1), x) in a {
        for ((d2, w2), y) in b {
            *out.entry((d1 + d2, w1 + w2)).or_insert(0) += x * y;
        }
    }
    out.retain(|_, v| *v > 0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_cell(d: i64, w: u32, n: usize) -> Vec<(Cell, Vec<String>)> {
        vec![((d, w), (0..n).map(|i| format!("e{i}")).collect())]
    }

    #[test]
    fn zero_differential_validates() {
        let s = BigradedSpace::from_cells(one_cell(0, 0, 3)).unwrap();
        assert!(validate(&ChainComplex::new(Field::Q, s)).is_ok());
    }

    #[test]
    fn identity_composite_is_reported() {
        let mut cells = one_cell(0, 0, 1);
        cells.extend(one_cell(1, 0, 1));
        cells.extend(one_cell(2, 0, 1));
        let mut c = ChainComplex::new(Field::Q, BigradedSpace::from_cells(cells).unwrap());
        c.set_differential((1, 0), SparseMatrix::identity(Field::Q, 1)).unwrap();
        c.set_differential((2, 0), SparseMatrix::identity(Field::Q, 1)).unwrap();
        let v = validate(&c).unwrap_err();
        assert_eq!((v.degree, v.weight), (2, 0));
    }

    #[test]
    fn point_and_acyclic() {
        let c = ChainComplex::new(Field::Q, BigradedSpace::from_cells(one_cell(0, 3, 1)).unwrap());
        let h = homology(&c, -2..=2, 0..=4).unwrap();
        assert_eq!(h.dim(0, 3), 1);
        assert_eq!(h.total_dim(), 1);

        let mut cells = one_cell(0, 0, 1);
        cells.extend(one_cell(1, 0, 1));
        let mut c = ChainComplex::new(Field::F2, BigradedSpace::from_cells(cells).unwrap());
        c.set_differential((1, 0), SparseMatrix::identity(Field::F2, 1)).unwrap();
        assert_eq!(homology(&c, -1..=3, 0..=0).unwrap().total_dim(), 0);
    }

    #[test]
    fn window_margin_is_enforced() {
        let c = ChainComplex::new(Field::Q, BigradedSpace::from_cells(one_cell(0, 0, 1)).unwrap())
            .with_complete_degrees(0..=3);
        assert!(homology_dims(&c, 0..=2, 0..=0).is_ok());
        assert_eq!(
            homology_dims(&c, 0..=3, 0..=0).unwrap_err(),
            GradedError::WindowTooLarge { degree: 4, weight: 0 }
        );
    }

    #[test]
    fn suspension_moves_cells() {
        let c = ChainComplex::new(Field::Q, BigradedSpace::from_cells(one_cell(-1, 0, 1)).unwrap());
        let s = suspend(&c, 1);
        assert_eq!(s.space().dim((0, 0)), 1);
        assert_eq!(suspend(&s, -1).space(), c.space());
    }

    #[test]
    fn json_and_csv() {
        let t = HomologyTable::from_dims(Field::Q, 0..=2, 0..=2, [((1, 1), 2)]);
        assert_eq!(t.to_json(), r#"{"field":"Q","cells":[{"degree":1,"weight":1,"dim":2}]}"#);
        assert_eq!(t.to_csv(), "degree,weight,dim\n1,1,2\n");
        assert_eq!(HomologyTable::from_json(&t.to_json()).unwrap().dims(), t.dims());
    }
}
