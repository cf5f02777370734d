//! Hochschild cochains with their Gerstenhaber operations, Hochschild chains
//! with trivial coefficients, and the Loday construction on finite
//! simplicial sets (higher-order Hochschild homology).
//!
//! Cochains are stored per weight shift `k` (target weight minus source
//! weight) and are only evaluated on tuples of total source weight `<= N`.
//! Restricting to such tuples is a quotient complex; for the free algebras
//! used here (whose bar homology sits in source weight one) it has the same
//! cohomology as soon as `N >= 1`.

use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bar::{self, BarError};
use crate::free::Algebra;
use crate::graded::{self, BigradedSpace, Cell, ChainComplex, GradedError, HomologyTable};
use crate::linalg::{svec, Field, FieldScalar, SparseVec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HochschildError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("wrong field: {0}")]
    WrongField(String),
    #[error("arity {0} is outside the window")]
    ArityOverflow(usize),
    #[error("simplicial identity fails: {0}")]
    SimplicialIdentity(String),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Bar(#[from] BarError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coefficients {
    /// The algebra itself.
    Algebra,
    /// The augmentation ideal.
    Ideal,
}

// Extended basis of A: index 0 is the unit, index i + 1 is basis element i of Ā.

fn ext_mul(a: &Algebra, i: usize, j: usize) -> SparseVec {
    let one = FieldScalar::one(a.field);
    match (i, j) {
        (0, 0) => vec![(0, one)],
        (0, j) => vec![(j, one)],
        (i, 0) => vec![(i, one)],
        (i, j) => a.mul(i - 1, j - 1).into_iter().map(|(k, c)| (k + 1, c)).collect(),
    }
}

fn ext_mul_vec(a: &Algebra, x: &SparseVec, y: &SparseVec) -> SparseVec {
    let mut acc = Vec::new();
    for (i, c) in x {
        for (j, d) in y {
            let cd = c * d;
            for (k, e) in ext_mul(a, *i, *j) {
                acc.push((k, &cd * &e));
            }
        }
    }
    svec::normalize(acc)
}

fn ext_weight(a: &Algebra, i: usize) -> u32 {
    if i == 0 {
        0
    } else {
        a.basis[i - 1].weight
    }
}

/// Tuples of Ā-basis indices of the given arity and total weight `<= bound`.
pub fn tuples(a: &Algebra, arity: usize, bound: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    fn rec(a: &Algebra, arity: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == arity {
            out.push(cur.clone());
            return;
        }
        for (i, b) in a.basis.iter().enumerate() {
            if b.weight <= left {
                cur.push(i as u32);
                rec(a, arity, left - b.weight, cur, out);
                cur.pop();
            }
        }
    }
    rec(a, arity, bound, &mut Vec::new(), &mut out);
    out
}

fn tuple_weight(a: &Algebra, t: &[u32]) -> u32 {
    t.iter().map(|&i| a.basis[i as usize].weight).sum()
}

/// A normalized Hochschild cochain of fixed arity and weight shift, defined on
/// tuples of total source weight `<= source_bound`. Values are vectors in the
/// extended basis of A (index 0 is the unit).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedCochain {
    pub arity: usize,
    pub shift: i64,
    pub source_bound: u32,
    pub values: BTreeMap<Vec<u32>, SparseVec>,
}

impl WeightedCochain {
    pub fn zero(arity: usize, shift: i64, source_bound: u32) -> Self {
        WeightedCochain { arity, shift, source_bound, values: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|v| v.is_empty())
    }

    /// Evaluate on a tuple of basis indices of Ā.
    pub fn at(&self, t: &[u32]) -> SparseVec {
        self.values.get(t).cloned().unwrap_or_default()
    }

    /// Evaluate on arguments given in the extended basis; unit components are
    /// dropped (normalization).
    pub fn eval(&self, args: &[SparseVec]) -> SparseVec {
        assert_eq!(args.len(), self.arity);
        // expand multilinearly, one argument at a time
        let mut partial: Vec<(Vec<u32>, Option<FieldScalar>)> = vec![(Vec::new(), None)];
        for v in args {
            let mut next = Vec::new();
            for (t, c) in &partial {
                for (i, x) in v.iter().filter(|(i, _)| *i != 0) {
                    let mut t2 = t.clone();
                    t2.push((*i - 1) as u32);
                    next.push((t2, Some(c.as_ref().map_or(x.clone(), |c| c * x))));
                }
            }
            partial = next;
        }
        let mut acc = Vec::new();
        for (t, c) in partial {
            if let Some(val) = self.values.get(&t) {
                for (m, x) in val {
                    acc.push((*m, c.as_ref().map_or(x.clone(), |c| c * x)));
                }
            }
        }
        svec::normalize(acc)
    }

    pub fn scale(&self, c: &FieldScalar) -> Self {
        let mut out = self.clone();
        for v in out.values.values_mut() {
            *v = svec::scale(v, c);
        }
        out.values.retain(|_, v| !v.is_empty());
        out
    }

    /// `self + c * other`, restricted to the smaller source bound.
    pub fn add_scaled(&self, a: &Algebra, c: &FieldScalar, other: &Self) -> Self {
        assert_eq!((self.arity, self.shift), (other.arity, other.shift), "adding cochains of different type");
        let bound = self.source_bound.min(other.source_bound);
        let mut out = self.restrict(a, bound);
        for (t, v) in &other.values {
            if tuple_weight(a, t) > bound {
                continue;
            }
            let cur = out.values.remove(t).unwrap_or_default();
            let s = svec::add_scaled(&cur, c, v);
            if !s.is_empty() {
                out.values.insert(t.clone(), s);
            }
        }
        out
    }

    /// Restrict to tuples of total weight `<= bound`.
    pub fn restrict(&self, a: &Algebra, bound: u32) -> Self {
        let mut out = self.clone();
        out.source_bound = bound.min(self.source_bound);
        out.values.retain(|t, _| tuple_weight(a, t) <= out.source_bound);
        out
    }
}

/// Gerstenhaber composition
/// `(f∘g)(a1..) = Σ_i (-1)^{i(q-1)} f(a1..ai, g(a(i+1)..a(i+q)), ..)`.
pub fn circle_product(a: &Algebra, f: &WeightedCochain, g: &WeightedCochain) -> Result<WeightedCochain, HochschildError> {
    if f.arity == 0 {
        return Ok(WeightedCochain::zero(g.arity.saturating_sub(1), f.shift + g.shift, g.source_bound));
    }
    let (p, q) = (f.arity, g.arity);
    let arity = p + q - 1;
    let bound = if g.shift < 0 {
        g.source_bound.min((f.source_bound as i64 - g.shift) as u32)
    } else {
        g.source_bound.min(f.source_bound.saturating_sub(g.shift as u32))
    };
    let mut out = WeightedCochain::zero(arity, f.shift + g.shift, bound);
    let field = a.field;
    for t in tuples(a, arity, bound) {
        let mut acc: SparseVec = Vec::new();
        for i in 0..p {
            let inner = g.at(&t[i..i + q]);
            if inner.is_empty() {
                continue;
            }
            let mut args: Vec<SparseVec> = Vec::with_capacity(p);
            for &x in &t[..i] {
                args.push(vec![(x as usize + 1, FieldScalar::one(field))]);
            }
            args.push(inner);
            for &x in &t[i + q..] {
                args.push(vec![(x as usize + 1, FieldScalar::one(field))]);
            }
            let s = FieldScalar::sign(field, i as i64 * (q as i64 - 1));
            acc = svec::add_scaled(&acc, &s, &f.eval(&args));
        }
        if !acc.is_empty() {
            out.values.insert(t, acc);
        }
    }
    Ok(out)
}

/// `[f,g] = f∘g - (-1)^{(p-1)(q-1)} g∘f`.
pub fn gerstenhaber_bracket(a: &Algebra, f: &WeightedCochain, g: &WeightedCochain) -> Result<WeightedCochain, HochschildError> {
    let fg = circle_product(a, f, g)?;
    let gf = circle_product(a, g, f)?;
    let bound = fg.source_bound.min(gf.source_bound);
    let (fg, mut gf) = (fg.restrict(a, bound), gf.restrict(a, bound));
    gf.arity = fg.arity;
    let e = (f.arity as i64 - 1) * (g.arity as i64 - 1);
    Ok(fg.add_scaled(a, &-FieldScalar::sign(a.field, e), &gf))
}

/// Cup product `(f⌣g)(a1..a(p+q)) = f(a1..ap) · g(a(p+1)..a(p+q))`.
pub fn cup(a: &Algebra, f: &WeightedCochain, g: &WeightedCochain) -> WeightedCochain {
    let bound = f.source_bound.min(g.source_bound);
    let arity = f.arity + g.arity;
    let mut out = WeightedCochain::zero(arity, f.shift + g.shift, bound);
    for t in tuples(a, arity, bound) {
        let x = f.at(&t[..f.arity]);
        let y = g.at(&t[f.arity..]);
        let v = ext_mul_vec(a, &x, &y);
        if !v.is_empty() {
            out.values.insert(t, v);
        }
    }
    out
}

/// The restriction `ξ(f) = f∘f` on arity-one cochains over F2.
pub fn restriction_char2(a: &Algebra, f: &WeightedCochain) -> Result<WeightedCochain, HochschildError> {
    if a.field != Field::F2 {
        return Err(HochschildError::WrongField("the restriction is defined in characteristic 2".into()));
    }
    if f.arity != 1 {
        return Err(HochschildError::InvalidInput("restriction needs an arity-one cochain".into()));
    }
    circle_product(a, f, f)
}

/// Hochschild cochain complex, stored in degrees `-p`, weight = shift.
pub struct HochschildComplex {
    pub algebra: Algebra,
    pub coefficients: Coefficients,
    pub source_bound: u32,
    pub max_arity: usize,
    pub shifts: RangeInclusive<u32>,
    pub complex: ChainComplex,
    basis: HashMap<Cell, Vec<(Vec<u32>, usize)>>,
    index: HashMap<(Vec<u32>, usize), (Cell, usize)>,
}

/// Build the normalized cochain complex for arities `0..=max_arity` (plus one
/// more so the top arity has its outgoing differential) and shifts in
/// `shifts`. The algebra must be concentrated in degree zero and truncated at
/// weight `>= source_bound + max shift`.
pub fn hochschild_cochain_complex(
    a: &Algebra,
    coefficients: Coefficients,
    max_arity: usize,
    source_bound: u32,
    shifts: RangeInclusive<u32>,
) -> Result<HochschildComplex, HochschildError> {
    if !a.associative || !a.weight_additive {
        return Err(HochschildError::InvalidInput("need an associative weight-graded algebra".into()));
    }
    if a.basis.iter().any(|b| b.degree != 0) {
        return Err(HochschildError::Unsupported("cochain complexes are built for algebras in degree 0".into()));
    }
    if a.max_weight < source_bound + shifts.end() {
        return Err(HochschildError::InvalidInput(format!(
            "algebra truncated at weight {} but cochains need weight {}",
            a.max_weight,
            source_bound + shifts.end()
        )));
    }
    let field = a.field;
    let mut targets_by_weight: HashMap<u32, Vec<usize>> = HashMap::new();
    if coefficients == Coefficients::Algebra {
        targets_by_weight.entry(0).or_default().push(0);
    }
    for (i, b) in a.basis.iter().enumerate() {
        targets_by_weight.entry(b.weight).or_default().push(i + 1);
    }
    let mut space = BigradedSpace::new();
    let mut basis: HashMap<Cell, Vec<(Vec<u32>, usize)>> = HashMap::new();
    let mut index = HashMap::new();
    let mut tuples_by_arity = Vec::new();
    for p in 0..=max_arity + 1 {
        let ts = tuples(a, p, source_bound);
        for k in shifts.clone() {
            let cell = (-(p as i64), k);
            for t in &ts {
                let tw = tuple_weight(a, t) + k;
                for &m in targets_by_weight.get(&tw).map_or(&Vec::new(), |v| v) {
                    let e = basis.entry(cell).or_default();
                    index.insert((t.clone(), m), (cell, e.len()));
                    e.push((t.clone(), m));
                    let tl: Vec<String> = t.iter().map(|&i| a.basis[i as usize].label.clone()).collect();
                    let ml = if m == 0 { "1".to_string() } else { a.basis[m - 1].label.clone() };
                    space.push(cell, format!("({})↦{}", tl.join(","), ml));
                }
            }
        }
        tuples_by_arity.push(ts);
    }
    let mut complex = ChainComplex::new(field, space)
        .with_complete_degrees(-(max_arity as i64 + 1)..=1)
        .with_complete_weights(shifts.clone());
    for p in 0..=max_arity {
        for k in shifts.clone() {
            let cell = (-(p as i64), k);
            let Some(src) = basis.get(&cell) else { continue };
            let mut by_tuple: HashMap<&[u32], Vec<(usize, usize)>> = HashMap::new();
            for (e, (t, m)) in src.iter().enumerate() {
                by_tuple.entry(t.as_slice()).or_default().push((e, *m));
            }
            let mut cols: Vec<Vec<(usize, FieldScalar)>> = vec![Vec::new(); src.len()];
            let tcell = (-(p as i64) - 1, k);
            let push = |cols: &mut Vec<Vec<(usize, FieldScalar)>>, s: &Vec<u32>, e: usize, v: SparseVec| {
                for (m, c) in v {
                    if let Some(&(cl, pos)) = index.get(&(s.clone(), m)) {
                        debug_assert_eq!(cl, tcell);
                        cols[e].push((pos, c));
                    }
                }
            };
            for s in &tuples_by_arity[p + 1] {
                // a1 · f(a2..)
                if let Some(list) = by_tuple.get(&s[1..]) {
                    for &(e, m) in list {
                        let v = ext_mul(a, s[0] as usize + 1, m);
                        push(&mut cols, s, e, v);
                    }
                }
                // Σ (-1)^i f(.. ai a(i+1) ..)
                for i in 0..p {
                    let prod = a.mul(s[i] as usize, s[i + 1] as usize);
                    let sign = FieldScalar::sign(field, i as i64 + 1);
                    for (r, c) in prod {
                        let mut t = s[..i].to_vec();
                        t.push(r as u32);
                        t.extend_from_slice(&s[i + 2..]);
                        if let Some(list) = by_tuple.get(t.as_slice()) {
                            for &(e, m) in list {
                                let coef = &sign * &c;
                                push(&mut cols, s, e, vec![(m, coef)]);
                            }
                        }
                    }
                }
                // (-1)^{p+1} f(a1..ap) · a(p+1)
                if let Some(list) = by_tuple.get(&s[..p]) {
                    let sign = FieldScalar::sign(field, p as i64 + 1);
                    for &(e, m) in list {
                        let v = svec::scale(&ext_mul(a, m, s[p] as usize + 1), &sign);
                        push(&mut cols, s, e, v);
                    }
                }
            }
            let cols: Vec<SparseVec> = cols.into_iter().map(svec::normalize).collect();
            complex.set_differential_columns(cell, &cols)?;
        }
    }
    Ok(HochschildComplex {
        algebra: a.clone(),
        coefficients,
        source_bound,
        max_arity,
        shifts,
        complex,
        basis,
        index,
    })
}

impl HochschildComplex {
    /// Cohomology for arities `0..=max_arity`, with representatives.
    pub fn cohomology(&self) -> Result<HomologyTable, HochschildError> {
        Ok(graded::homology(&self.complex, -(self.max_arity as i64)..=0, self.shifts.clone())?)
    }

    /// Coordinates of a cochain in its cell (restricting it to this complex's bound).
    pub fn to_vector(&self, f: &WeightedCochain) -> Result<(Cell, SparseVec), HochschildError> {
        if f.arity > self.max_arity + 1 {
            return Err(HochschildError::ArityOverflow(f.arity));
        }
        if f.source_bound < self.source_bound {
            return Err(HochschildError::InvalidInput(format!(
                "cochain known on source weight <= {} but the complex needs {}",
                f.source_bound, self.source_bound
            )));
        }
        if f.shift < 0 || !self.shifts.contains(&(f.shift as u32)) {
            return Err(HochschildError::InvalidInput(format!("shift {} outside the window", f.shift)));
        }
        let cell = (-(f.arity as i64), f.shift as u32);
        let mut v = Vec::new();
        for (t, val) in &f.values {
            if tuple_weight(&self.algebra, t) > self.source_bound {
                continue;
            }
            for (m, c) in val {
                match self.index.get(&(t.clone(), *m)) {
                    Some(&(cl, pos)) if cl == cell => v.push((pos, c.clone())),
                    _ => {
                        if self.coefficients == Coefficients::Ideal && *m == 0 {
                            return Err(HochschildError::InvalidInput("cochain takes unit values".into()));
                        }
                    }
                }
            }
        }
        Ok((cell, svec::normalize(v)))
    }

    pub fn from_vector(&self, cell: Cell, v: &SparseVec) -> WeightedCochain {
        let mut f = WeightedCochain::zero((-cell.0) as usize, cell.1 as i64, self.source_bound);
        let b = &self.basis[&cell];
        for (pos, c) in v {
            let (t, m) = &b[*pos];
            let e = f.values.entry(t.clone()).or_default();
            *e = svec::add(e, &vec![(*m, c.clone())]);
        }
        f.values.retain(|_, v| !v.is_empty());
        f
    }

    pub fn is_cocycle(&self, f: &WeightedCochain) -> Result<bool, HochschildError> {
        let (cell, v) = self.to_vector(f)?;
        Ok(self.complex.differential(cell).apply(&v).is_empty())
    }

    /// Coordinates of the class of a cocycle relative to the representatives
    /// of `table`; `None` if it is not a cocycle.
    pub fn classify(&self, table: &HomologyTable, f: &WeightedCochain) -> Result<Option<Vec<FieldScalar>>, HochschildError> {
        let (cell, v) = self.to_vector(f)?;
        Ok(graded::classify(&self.complex, table, cell, &v))
    }

    /// Representative cochains of the cohomology cell `(arity, shift)`.
    pub fn representatives(&self, table: &HomologyTable, arity: usize, shift: u32) -> Vec<WeightedCochain> {
        let cell = (-(arity as i64), shift);
        table.reps(cell.0, cell.1).iter().map(|v| self.from_vector(cell, v)).collect()
    }
}

/// Zeroth cochain with value `alpha` (extended basis).
pub fn constant_cochain(alpha: SparseVec, shift: i64, source_bound: u32) -> WeightedCochain {
    let mut f = WeightedCochain::zero(0, shift, source_bound);
    if !alpha.is_empty() {
        f.values.insert(Vec::new(), alpha);
    }
    f
}

/// The derivation of a one-generator free commutative algebra sending the
/// generator (basis element 0) to `image` (extended basis). Defined on source
/// weights `<= source_bound`; basis element `i` must be the `(i+1)`-st power.
pub fn generator_derivation(a: &Algebra, image: &SparseVec, source_bound: u32) -> Result<WeightedCochain, HochschildError> {
    if a.basis.iter().enumerate().any(|(i, b)| b.weight != i as u32 + 1) {
        return Err(HochschildError::Unsupported("expected a monogenic algebra with one basis element per weight".into()));
    }
    let shift = image.first().map_or(0, |(m, _)| ext_weight(a, *m) as i64 - 1);
    let mut f = WeightedCochain::zero(1, shift, source_bound);
    // f(x^m) = x · f(x^{m-1}) + f(x) · x^{m-1}
    let mut prev: SparseVec = image.clone();
    if !prev.is_empty() {
        f.values.insert(vec![0], prev.clone());
    }
    for m in 2..=source_bound.min(a.dim() as u32) {
        let x = vec![(1usize, FieldScalar::one(a.field))];
        let xm1 = vec![(m as usize - 1, FieldScalar::one(a.field))];
        let v = svec::add(&ext_mul_vec(a, &x, &prev), &ext_mul_vec(a, image, &xm1));
        if !v.is_empty() {
            f.values.insert(vec![m - 1], v.clone());
        }
        prev = v;
    }
    Ok(f)
}

/// Normalized Hochschild chains of A with coefficients in the ground field:
/// `k ⊗ Ā^{⊗n}` with the Hochschild boundary. The end terms vanish because
/// the augmentation kills Ā, so this is the reduced bar complex; a chain of
/// length `n` sits in degree `Σ(|ai| + 1)` and weight `Σ wt(ai)`.
pub fn hochschild_chains_trivial_coeffs(a: &Algebra) -> Result<ChainComplex, HochschildError> {
    Ok(bar::bar(a)?.chain_complex())
}

// ---------------------------------------------------------------------------
// Simplicial sets and the Loday construction

/// A pointed simplicial set truncated at dimension `top`. `faces[q][x][i]` is
/// `d_i x` for `x` in dimension `q >= 1`; `degeneracies[q][x][i]` is `s_i x`
/// for `q < top`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialSetFinite {
    pub counts: Vec<usize>,
    pub faces: Vec<Vec<Vec<usize>>>,
    pub degeneracies: Vec<Vec<Vec<usize>>>,
    pub basepoint: Vec<usize>,
    #[serde(default)]
    pub labels: Vec<Vec<String>>,
}

impl SimplicialSetFinite {
    pub fn top(&self) -> usize {
        self.counts.len() - 1
    }

    pub fn from_json(s: &str) -> Result<Self, HochschildError> {
        let x: SimplicialSetFinite =
            serde_json::from_str(s).map_err(|e| HochschildError::InvalidInput(e.to_string()))?;
        x.check_identities()?;
        Ok(x)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("simplicial set serializes")
    }

    /// Simplicial identities and basepoint compatibility on all retained simplices.
    pub fn check_identities(&self) -> Result<(), HochschildError> {
        let top = self.top();
        let err = |m: String| Err(HochschildError::SimplicialIdentity(m));
        if self.faces.len() != top + 1 || self.degeneracies.len() != top + 1 || self.basepoint.len() != top + 1 {
            return err("table sizes do not match the dimension count".into());
        }
        for q in 1..=top {
            for x in 0..self.counts[q] {
                if self.faces[q][x].len() != q + 1 {
                    return err(format!("simplex {x} in dimension {q} needs {} faces", q + 1));
                }
                if self.faces[q][x].iter().any(|&y| y >= self.counts[q - 1]) {
                    return err(format!("face of {x} in dimension {q} out of range"));
                }
            }
        }
        for q in 0..top {
            for x in 0..self.counts[q] {
                if self.degeneracies[q][x].len() != q + 1 || self.degeneracies[q][x].iter().any(|&y| y >= self.counts[q + 1]) {
                    return err(format!("degeneracies of {x} in dimension {q} malformed"));
                }
            }
        }
        let d = |q: usize, x: usize, i: usize| self.faces[q][x][i];
        let s = |q: usize, x: usize, i: usize| self.degeneracies[q][x][i];
        for q in 2..=top {
            for x in 0..self.counts[q] {
                for j in 1..=q {
                    for i in 0..j {
                        if d(q - 1, d(q, x, j), i) != d(q - 1, d(q, x, i), j - 1) {
                            return err(format!("d{i} d{j} on simplex {x} of dimension {q}"));
                        }
                    }
                }
            }
        }
        for q in 0..top {
            for x in 0..self.counts[q] {
                for j in 0..=q {
                    let y = s(q, x, j);
                    for i in 0..=q + 1 {
                        let lhs = d(q + 1, y, i);
                        let ok = if i == j || i == j + 1 {
                            lhs == x
                        } else if i < j {
                            q >= 1 && lhs == s(q - 1, d(q, x, i), j - 1)
                        } else {
                            q >= 1 && lhs == s(q - 1, d(q, x, i - 1), j)
                        };
                        if !ok {
                            return err(format!("d{i} s{j} on simplex {x} of dimension {q}"));
                        }
                    }
                    if q + 1 < top {
                        for i in 0..=j {
                            if s(q + 1, s(q, x, j), i) != s(q + 1, s(q, x, i), j + 1) {
                                return err(format!("s{i} s{j} on simplex {x} of dimension {q}"));
                            }
                        }
                    }
                }
            }
        }
        for q in 1..=top {
            for i in 0..=q {
                if d(q, self.basepoint[q], i) != self.basepoint[q - 1] {
                    return err(format!("basepoint not preserved by d{i} in dimension {q}"));
                }
            }
        }
        Ok(())
    }
}

/// `Δⁿ/∂Δⁿ` up to dimension `top`: in dimension `q` the basepoint (index 0)
/// and the monotone surjections `[q] → [n]` (indices `1..`).
pub fn sphere_model(n: usize, top: usize) -> SimplicialSetFinite {
    let mut levels: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut index: Vec<HashMap<Vec<usize>, usize>> = Vec::new();
    for q in 0..=top {
        let mut maps = Vec::new();
        // monotone maps [q] -> [n] that hit every value
        fn rec(q: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == q + 1 {
                if *cur.last().unwrap() == n && cur[0] == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            let last = *cur.last().unwrap();
            for v in [last, last + 1] {
                if v <= n {
                    cur.push(v);
                    rec(q, n, cur, out);
                    cur.pop();
                }
            }
        }
        rec(q, n, &mut vec![0], &mut maps);
        let mut idx = HashMap::new();
        for (k, m) in maps.iter().enumerate() {
            idx.insert(m.clone(), k + 1);
        }
        levels.push(maps);
        index.push(idx);
    }
    let counts: Vec<usize> = levels.iter().map(|l| l.len() + 1).collect();
    let mut faces = vec![Vec::new()];
    for q in 1..=top {
        let mut fq = vec![vec![0; q + 1]];
        for m in &levels[q] {
            let mut row = Vec::new();
            for i in 0..=q {
                let mut v = m.clone();
                v.remove(i);
                row.push(index[q - 1].get(&v).copied().unwrap_or(0));
            }
            fq.push(row);
        }
        faces.push(fq);
    }
    let mut degeneracies = Vec::new();
    for q in 0..=top {
        if q == top {
            degeneracies.push(Vec::new());
            continue;
        }
        let mut sq = vec![vec![0; q + 1]];
        for m in &levels[q] {
            let mut row = Vec::new();
            for i in 0..=q {
                let mut v = m.clone();
                v.insert(i, m[i]);
                row.push(index[q + 1][&v]);
            }
            sq.push(row);
        }
        degeneracies.push(sq);
    }
    let labels = levels
        .iter()
        .map(|l| {
            let mut v = vec!["*".to_string()];
            v.extend(l.iter().map(|m| m.iter().map(|x| x.to_string()).collect::<String>()));
            v
        })
        .collect();
    SimplicialSetFinite { counts, faces, degeneracies, basepoint: vec![0; top + 1], labels }
}

/// One basis chain of the Loday complex: (simplex, Ā-basis index) pairs with
/// distinct simplices in increasing order.
type LodayChain = Vec<(usize, u32)>;

/// Normalized chains of the Loday construction `ℒ(A;k)(X)`: in simplicial
/// degree `q`, tensors over the non-basepoint simplices of `X_q`, with the
/// basepoint factor replaced by `k`. A basis element is a function from a
/// support of simplices to Ā; the degenerate part consists of functions
/// supported inside some `s_i(X_{q-1})`. Total degree is `q + Σ|ai|`.
pub fn loday_complex(a: &Algebra, x: &SimplicialSetFinite) -> Result<ChainComplex, HochschildError> {
    if !a.commutative || !a.weight_additive || !a.associative {
        return Err(HochschildError::InvalidInput("the Loday construction needs a commutative weight-graded algebra".into()));
    }
    x.check_identities()?;
    let field = a.field;
    let wmax = a.max_weight;
    let top = x.top();
    // degeneracy masks: bit i set if the simplex lies in s_i(X_{q-1})
    let mut masks: Vec<Vec<u64>> = Vec::new();
    for q in 0..=top {
        let mut m = vec![0u64; x.counts[q]];
        if q >= 1 {
            for y in 0..x.counts[q - 1] {
                for i in 0..q {
                    m[x.degeneracies[q - 1][y][i]] |= 1 << i;
                }
            }
        }
        masks.push(m);
    }
    let full = |q: usize| if q == 0 { 0u64 } else { (1u64 << q) - 1 };
    let nondeg = |q: usize, chain: &LodayChain| -> bool {
        let mut m = full(q);
        for (y, _) in chain {
            m &= masks[q][*y];
        }
        m == 0
    };
    // enumerate supports per level
    let mut chains: Vec<Vec<LodayChain>> = Vec::new();
    for q in 0..=top {
        let simplices: Vec<usize> = (0..x.counts[q]).filter(|&y| y != x.basepoint[q]).collect();
        let mut out = Vec::new();
        fn rec(
            a: &Algebra,
            simplices: &[usize],
            start: usize,
            left: u32,
            mask: u64,
            masks: &[u64],
            cur: &mut LodayChain,
            out: &mut Vec<LodayChain>,
        ) {
            if mask == 0 {
                out.push(cur.clone());
            }
            for k in start..simplices.len() {
                let y = simplices[k];
                for (i, b) in a.basis.iter().enumerate() {
                    if b.weight <= left {
                        cur.push((y, i as u32));
                        rec(a, simplices, k + 1, left - b.weight, mask & masks[y], masks, cur, out);
                        cur.pop();
                    }
                }
            }
        }
        rec(a, &simplices, 0, wmax, full(q), &masks[q], &mut Vec::new(), &mut out);
        chains.push(out);
    }
    let deg = |q: usize, c: &LodayChain| -> i64 {
        q as i64 + c.iter().map(|(_, i)| a.basis[*i as usize].degree).sum::<i64>()
    };
    let wt = |c: &LodayChain| -> u32 { c.iter().map(|(_, i)| a.basis[*i as usize].weight).sum() };
    let mut space = BigradedSpace::new();
    let mut index: HashMap<(usize, LodayChain), (Cell, usize)> = HashMap::new();
    for q in 0..=top {
        for c in &chains[q] {
            let cell = (deg(q, c), wt(c));
            let label = if c.is_empty() {
                format!("q{q}:1")
            } else {
                let parts: Vec<String> = c
                    .iter()
                    .map(|(y, i)| {
                        let yl = x.labels.get(q).and_then(|l| l.get(*y)).cloned().unwrap_or_else(|| y.to_string());
                        format!("{yl}:{}", a.basis[*i as usize].label)
                    })
                    .collect();
                format!("q{q}:{}", parts.join(","))
            };
            let pos = space.push(cell, label);
            index.insert((q, c.clone()), (cell, pos));
        }
    }
    let mut cols: BTreeMap<Cell, Vec<SparseVec>> = BTreeMap::new();
    for q in 0..=top {
        for c in &chains[q] {
            let (cell, _) = index[&(q, c.clone())];
            let mut acc: Vec<(usize, FieldScalar)> = Vec::new();
            if q >= 1 {
                for i in 0..=q {
                    for (target, coef) in apply_face(a, x, q, i, c) {
                        if !nondeg(q - 1, &target) {
                            continue;
                        }
                        let (tc, pos) = index[&(q - 1, target)];
                        debug_assert_eq!(tc, (cell.0 - 1, cell.1));
                        acc.push((pos, &FieldScalar::sign(field, i as i64) * &coef));
                    }
                }
            }
            cols.entry(cell).or_default().push(svec::normalize(acc));
        }
    }
    let mut complex = ChainComplex::new(field, space).with_complete_weights(0..=wmax);
    for (cell, cs) in cols {
        complex.set_differential_columns(cell, &cs)?;
    }
    Ok(complex)
}

/// `d_i` on one basis chain: values landing on the same simplex are
/// multiplied in source order; the Koszul sign accounts for the reordering.
fn apply_face(a: &Algebra, x: &SimplicialSetFinite, q: usize, i: usize, c: &LodayChain) -> Vec<(LodayChain, FieldScalar)> {
    let field = a.field;
    let base = x.basepoint[q - 1];
    let mut targets: Vec<(usize, usize)> = Vec::with_capacity(c.len());
    for (pos, (y, _)) in c.iter().enumerate() {
        let z = x.faces[q][*y][i];
        if z == base {
            return Vec::new();
        }
        targets.push((z, pos));
    }
    // stable sort by target simplex; sign from inversions between odd elements
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.sort_by_key(|&p| (targets[p].0, p));
    let mut parity = 0i64;
    for u in 0..order.len() {
        for v in u + 1..order.len() {
            if order[u] > order[v] {
                parity += a.basis[c[order[u]].1 as usize].degree * a.basis[c[order[v]].1 as usize].degree;
            }
        }
    }
    // multiply groups
    let mut terms: Vec<(LodayChain, FieldScalar)> = vec![(Vec::new(), FieldScalar::sign(field, parity))];
    let mut k = 0;
    while k < order.len() {
        let z = targets[order[k]].0;
        let mut prod: SparseVec = vec![(c[order[k]].1 as usize, FieldScalar::one(field))];
        let mut l = k + 1;
        while l < order.len() && targets[order[l]].0 == z {
            prod = a.mul_vec(&prod, &vec![(c[order[l]].1 as usize, FieldScalar::one(field))]);
            l += 1;
        }
        if prod.is_empty() {
            return Vec::new();
        }
        let mut next = Vec::new();
        for (chain, coef) in &terms {
            for (b, v) in &prod {
                let mut ch = chain.clone();
                ch.push((z, *b as u32));
                next.push((ch, coef * v));
            }
        }
        terms = next;
        k = l;
    }
    terms
}

/// Higher-order Hochschild homology `HH^{[n]}(A; k)` as the homology of the
/// Loday construction on the minimal simplicial `n`-sphere.
pub fn hh_order_n(
    a: &Algebra,
    n: usize,
    degrees: RangeInclusive<i64>,
    weights: RangeInclusive<u32>,
) -> Result<HomologyTable, HochschildError> {
    if n == 0 {
        return Err(HochschildError::InvalidInput("sphere dimension must be positive".into()));
    }
    // a nondegenerate chain of weight w lives in simplicial degree <= n·w
    let top = n * a.max_weight as usize + 1;
    let x = sphere_model(n, top);
    let c = loday_complex(a, &x)?;
    Ok(graded::homology_dims(&c, degrees, weights)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free::{free_commutative, square_zero, GeneratorSet};

    fn qx(w: u32, field: Field) -> Algebra {
        free_commutative(&GeneratorSet::simple(&[("x", 0)]), field, w)
    }

    #[test]
    fn cochain_complex_of_polynomial_ring() {
        let a = qx(10, Field::Q);
        let h = hochschild_cochain_complex(&a, Coefficients::Ideal, 3, 4, 0..=6).unwrap();
        graded::validate(&h.complex).unwrap();
        let t = h.cohomology().unwrap();
        for k in 0..=6u32 {
            assert_eq!(t.dim(0, k), (k >= 1) as usize, "HH0 shift {k}");
            assert_eq!(t.dim(-1, k), 1, "HH1 shift {k}");
            assert_eq!(t.dim(-2, k), 0);
            assert_eq!(t.dim(-3, k), 0);
        }
    }

    #[test]
    fn sphere_models_are_simplicial() {
        for n in 1..=3 {
            let s = sphere_model(n, 6);
            s.check_identities().unwrap();
            assert_eq!(SimplicialSetFinite::from_json(&s.to_json()).unwrap(), s);
        }
    }

    #[test]
    fn loday_on_circle_is_hochschild() {
        let a = square_zero(Field::Q, 2, -1);
        let mut a4 = a.clone();
        a4.max_weight = 4;
        // square-zero product table is empty, so any truncation is fine
        let h1 = hh_order_n(&a4, 1, -2..=2, 0..=4).unwrap();
        let c = hochschild_chains_trivial_coeffs(&a4).unwrap();
        let h2 = graded::homology_dims(&c, -2..=2, 0..=4).unwrap();
        let mut want = h2.dims();
        want.insert((0, 0), 1);
        assert_eq!(h1.dims(), want);
    }

    fn mono(m: usize, field: Field) -> SparseVec {
        vec![(m, FieldScalar::one(field))]
    }

    #[test]
    fn bracket_of_derivations() {
        let a = qx(16, Field::Q);
        let small = hochschild_cochain_complex(&a, Coefficients::Ideal, 1, 2, 0..=10).unwrap();
        let table = small.cohomology().unwrap();
        for p in 1..=5usize {
            for q in 1..=5usize {
                let f = generator_derivation(&a, &mono(p, Field::Q), 7).unwrap();
                let g = generator_derivation(&a, &mono(q, Field::Q), 7).unwrap();
                let br = gerstenhaber_bracket(&a, &f, &g).unwrap();
                let c = FieldScalar::from_i64(Field::Q, q as i64 - p as i64);
                let want = generator_derivation(&a, &svec::scale(&mono(p + q - 1, Field::Q), &c), 7).unwrap();
                let diff = br.add_scaled(&a, &-FieldScalar::one(Field::Q), &WeightedCochain { shift: br.shift, ..want });
                let coords = small.classify(&table, &diff).unwrap().expect("cocycle");
                assert!(coords.iter().all(|x| x.is_zero()), "x^{p}, x^{q}");
            }
        }
    }

    #[test]
    fn bracket_with_constants() {
        let a = qx(16, Field::Q);
        let f = generator_derivation(&a, &mono(3, Field::Q), 7).unwrap();
        let alpha = constant_cochain(mono(4, Field::Q), 4, 7);
        let br = gerstenhaber_bracket(&a, &f, &alpha).unwrap();
        // α' f = 4 x^3 · x^3
        assert_eq!(br.at(&[]), vec![(6, FieldScalar::from_i64(Field::Q, 4))]);
    }

    #[test]
    fn restriction_in_char_two() {
        let a = qx(16, Field::F2);
        let small = hochschild_cochain_complex(&a, Coefficients::Ideal, 1, 2, 0..=10).unwrap();
        let table = small.cohomology().unwrap();
        let one = FieldScalar::one(Field::F2);
        for p in 1..=5usize {
            let f = generator_derivation(&a, &mono(p, Field::F2), 8).unwrap();
            let xi = restriction_char2(&a, &f).unwrap();
            assert!(small.is_cocycle(&xi).unwrap());
            // f'f = p x^{2p-2}
            let want = if p % 2 == 1 && p >= 1 {
                generator_derivation(&a, &mono(2 * p - 1, Field::F2), 8).unwrap()
            } else {
                WeightedCochain::zero(1, xi.shift, 8)
            };
            let want = WeightedCochain { shift: xi.shift, ..want };
            let diff = xi.add_scaled(&a, &one, &want);
            let coords = small.classify(&table, &diff).unwrap().unwrap();
            assert!(coords.iter().all(|x| x.is_zero()), "p = {p}");
        }
    }

    #[test]
    fn order_two_hochschild_of_polynomial_ring() {
        let a = qx(4, Field::Q);
        let t = hh_order_n(&a, 2, 0..=8, 0..=4).unwrap();
        for d in 0..=8i64 {
            for w in 0..=4u32 {
                assert_eq!(t.dim(d, w), (d == 2 * w as i64) as usize, "({d},{w})");
            }
        }
    }
}
