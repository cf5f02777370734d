//! Augmented algebras, free commutative and free (restricted) Lie algebras,
//! suspension of Lie structures, universal enveloping algebras and
//! indecomposables.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::graded::{BigradedSpace, Cell};
use crate::linalg::{rank_of, svec, Field, FieldScalar, SpanBasis, SparseVec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FreeError {
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
    pub weight: u32,
}

/// Named generators of positive weight.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GeneratorSet {
    pub gens: Vec<Generator>,
}

impl GeneratorSet {
    pub fn new(gens: Vec<Generator>) -> Result<Self, FreeError> {
        for (i, g) in gens.iter().enumerate() {
            if g.weight == 0 {
                return Err(FreeError::InvalidPresentation(format!("generator {} has weight 0", g.name)));
            }
            if gens[..i].iter().any(|h| h.name == g.name) {
                return Err(FreeError::InvalidPresentation(format!("duplicate generator {}", g.name)));
            }
        }
        Ok(GeneratorSet { gens })
    }

    /// Generators of weight one with the given names and degrees.
    pub fn simple(list: &[(&str, i64)]) -> Self {
        GeneratorSet {
            gens: list.iter().map(|(n, d)| Generator { name: n.to_string(), degree: *d, weight: 1 }).collect(),
        }
    }

    /// Parse `x:0,y:0` (optionally `name:degree:weight`).
    pub fn parse(s: &str) -> Result<Self, FreeError> {
        let mut p = Parser::new(s);
        let g = p.gens()?;
        p.end()?;
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisElem {
    pub label: String,
    pub degree: i64,
    pub weight: u32,
}

pub type ProductFn = Arc<dyn Fn(usize, usize) -> SparseVec + Send + Sync>;

/// How products of augmentation-ideal basis elements are obtained.
#[derive(Clone)]
pub enum ProductRule {
    Table(HashMap<(usize, usize), SparseVec>),
    Computed(ProductFn),
}

impl fmt::Debug for ProductRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProductRule::Table(t) => write!(f, "Table({} entries)", t.len()),
            ProductRule::Computed(_) => write!(f, "Computed"),
        }
    }
}

/// An augmented algebra `k ⊕ Ā` described by a basis of the augmentation ideal
/// `Ā`, truncated to weights `<= max_weight` (a quotient by a weight ideal when
/// the product adds weights).
#[derive(Clone, Debug)]
pub struct Algebra {
    pub name: String,
    pub field: Field,
    pub basis: Vec<BasisElem>,
    pub product: ProductRule,
    pub differential: Option<Vec<SparseVec>>,
    pub commutative: bool,
    pub associative: bool,
    pub weight_additive: bool,
    pub max_weight: u32,
}

impl Algebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn mul(&self, i: usize, j: usize) -> SparseVec {
        match &self.product {
            ProductRule::Table(t) => t.get(&(i, j)).cloned().unwrap_or_default(),
            ProductRule::Computed(f) => f(i, j),
        }
    }

    pub fn mul_vec(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let mut acc = Vec::new();
        for (i, x) in a {
            for (j, y) in b {
                let c = x * y;
                for (k, z) in self.mul(*i, *j) {
                    acc.push((k, &c * &z));
                }
            }
        }
        svec::normalize(acc)
    }

    pub fn d(&self, i: usize) -> SparseVec {
        self.differential.as_ref().map(|d| d[i].clone()).unwrap_or_default()
    }

    pub fn d_vec(&self, a: &SparseVec) -> SparseVec {
        let mut acc = Vec::new();
        for (i, x) in a {
            for (k, z) in self.d(*i) {
                acc.push((k, x * &z));
            }
        }
        svec::normalize(acc)
    }

    pub fn has_differential(&self) -> bool {
        self.differential.as_ref().is_some_and(|d| d.iter().any(|v| !v.is_empty()))
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.label == label)
    }

    pub fn space(&self) -> BigradedSpace {
        let mut s = BigradedSpace::new();
        for b in &self.basis {
            s.push((b.degree, b.weight), b.label.clone());
        }
        s
    }

    pub fn dims(&self) -> BTreeMap<Cell, usize> {
        let mut m = BTreeMap::new();
        for b in &self.basis {
            *m.entry((b.degree, b.weight)).or_insert(0) += 1;
        }
        m
    }

    /// Basis indices grouped by cell, in basis order.
    pub fn cells(&self) -> BTreeMap<Cell, Vec<usize>> {
        let mut m: BTreeMap<Cell, Vec<usize>> = BTreeMap::new();
        for (i, b) in self.basis.iter().enumerate() {
            m.entry((b.degree, b.weight)).or_default().push(i);
        }
        m
    }

    fn pairs_in_window(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.dim();
        (0..n).flat_map(move |i| (0..n).map(move |j| (i, j))).filter(move |&(i, j)| {
            !self.weight_additive || self.basis[i].weight + self.basis[j].weight <= self.max_weight
        })
    }

    /// `(ab)c = a(bc)` on all basis triples inside the weight window.
    pub fn check_associative(&self) -> Result<(), FreeError> {
        let n = self.dim();
        for (i, j) in self.pairs_in_window() {
            let ij = self.mul(i, j);
            for k in 0..n {
                if self.weight_additive
                    && self.basis[i].weight + self.basis[j].weight + self.basis[k].weight > self.max_weight
                {
                    continue;
                }
                let l = self.mul_vec(&ij, &vec![(k, FieldScalar::one(self.field))]);
                let r = self.mul_vec(&vec![(i, FieldScalar::one(self.field))], &self.mul(j, k));
                if l != r {
                    return Err(FreeError::InvalidPresentation(format!(
                        "({}·{})·{} != {}·({}·{})",
                        self.basis[i].label, self.basis[j].label, self.basis[k].label,
                        self.basis[i].label, self.basis[j].label, self.basis[k].label
                    )));
                }
            }
        }
        Ok(())
    }

    /// `ab = (-1)^{|a||b|} ba` on all basis pairs inside the window.
    pub fn check_commutative(&self) -> Result<(), FreeError> {
        for (i, j) in self.pairs_in_window() {
            let s = FieldScalar::sign(self.field, self.basis[i].degree * self.basis[j].degree);
            if self.mul(i, j) != svec::scale(&self.mul(j, i), &s) {
                return Err(FreeError::InvalidPresentation(format!(
                    "{} and {} do not graded-commute",
                    self.basis[i].label, self.basis[j].label
                )));
            }
        }
        Ok(())
    }
}

fn monomial_label(names: &[String], exps: &[u32]) -> String {
    let parts: Vec<String> = names
        .iter()
        .zip(exps)
        .filter(|(_, e)| **e > 0)
        .map(|(n, e)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
        .collect();
    parts.join("*")
}

/// Commutative monomial algebra on `gens` with per-generator exponent bounds
/// (`None` = unbounded up to the weight limit). Over Q an odd generator never
/// appears twice; over F2 the polynomial convention applies.
fn monomial_algebra(
    name: String,
    field: Field,
    gens: &GeneratorSet,
    bounds: &[Option<u32>],
    max_weight: u32,
) -> Algebra {
    let k = gens.len();
    let mut mons: Vec<Vec<u32>> = Vec::new();
    fn rec(
        i: usize,
        cur: &mut Vec<u32>,
        w: u32,
        gens: &GeneratorSet,
        bounds: &[Option<u32>],
        field: Field,
        max_weight: u32,
        out: &mut Vec<Vec<u32>>,
    ) {
        if i == gens.len() {
            if w > 0 {
                out.push(cur.clone());
            }
            return;
        }
        let g = &gens.gens[i];
        let mut e = 0;
        loop {
            if w + e * g.weight > max_weight {
                break;
            }
            if let Some(b) = bounds[i] {
                if e >= b {
                    break;
                }
            }
            if field == Field::Q && g.degree.rem_euclid(2) == 1 && e > 1 {
                break;
            }
            cur.push(e);
            rec(i + 1, cur, w + e * g.weight, gens, bounds, field, max_weight, out);
            cur.pop();
            e += 1;
        }
    }
    rec(0, &mut Vec::new(), 0, gens, bounds, field, max_weight, &mut mons);
    let deg = |m: &[u32]| -> i64 { m.iter().zip(&gens.gens).map(|(e, g)| *e as i64 * g.degree).sum() };
    let wt = |m: &[u32]| -> u32 { m.iter().zip(&gens.gens).map(|(e, g)| e * g.weight).sum() };
    mons.sort_by_key(|a| (wt(a), deg(a), std::cmp::Reverse(a.clone())));
    let names: Vec<String> = gens.gens.iter().map(|g| g.name.clone()).collect();
    let basis: Vec<BasisElem> = mons
        .iter()
        .map(|m| BasisElem { label: monomial_label(&names, m), degree: deg(m), weight: wt(m) })
        .collect();
    let index: HashMap<Vec<u32>, usize> = mons.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut table = HashMap::new();
    for (i, a) in mons.iter().enumerate() {
        for (j, b) in mons.iter().enumerate() {
            let c: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            let Some(&t) = index.get(&c) else { continue };
            // moving generator q of b past generator p > q of a
            let mut parity = 0i64;
            for p in 0..k {
                for q in 0..p {
                    parity += (a[p] as i64) * (b[q] as i64) * gens.gens[p].degree * gens.gens[q].degree;
                }
            }
            table.insert((i, j), vec![(t, FieldScalar::sign(field, parity))]);
        }
    }
    Algebra {
        name,
        field,
        basis,
        product: ProductRule::Table(table),
        differential: None,
        commutative: true,
        associative: true,
        weight_additive: true,
        max_weight,
    }
}

/// Free graded commutative algebra `S(V)`, augmentation ideal in weights `1..=max_weight`.
pub fn free_commutative(gens: &GeneratorSet, field: Field, max_weight: u32) -> Algebra {
    let names: Vec<String> = gens.gens.iter().map(|g| format!("{}:{}", g.name, g.degree)).collect();
    monomial_algebra(format!("S({})", names.join(",")), field, gens, &vec![None; gens.len()], max_weight)
}

/// `k[x]/x^power` on one generator.
pub fn truncated_polynomial(gen: &Generator, field: Field, power: u32, max_weight: u32) -> Algebra {
    let gs = GeneratorSet { gens: vec![gen.clone()] };
    monomial_algebra(
        format!("{}[{}:{}]/{}^{}", field, gen.name, gen.degree, gen.name, power),
        field,
        &gs,
        &[Some(power)],
        max_weight,
    )
}

/// Free associative (tensor) algebra `T(V)` truncated at `max_weight`.
pub fn free_associative(gens: &GeneratorSet, field: Field, max_weight: u32) -> Algebra {
    let mut words: Vec<Vec<usize>> = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![vec![]];
    let wt = |w: &[usize]| -> u32 { w.iter().map(|&g| gens.gens[g].weight).sum() };
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for w in &frontier {
            for g in 0..gens.len() {
                let mut v = w.clone();
                v.push(g);
                if wt(&v) <= max_weight {
                    next.push(v);
                }
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    let deg = |w: &[usize]| -> i64 { w.iter().map(|&g| gens.gens[g].degree).sum() };
    words.sort_by_key(|a| (wt(a), a.len(), a.clone()));
    let index: HashMap<Vec<usize>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let basis = words
        .iter()
        .map(|w| BasisElem {
            label: w.iter().map(|&g| gens.gens[g].name.as_str()).collect::<Vec<_>>().join(""),
            degree: deg(w),
            weight: wt(w),
        })
        .collect();
    let mut table = HashMap::new();
    for (i, a) in words.iter().enumerate() {
        for (j, b) in words.iter().enumerate() {
            let mut c = a.clone();
            c.extend(b);
            if let Some(&t) = index.get(&c) {
                table.insert((i, j), vec![(t, FieldScalar::one(field))]);
            }
        }
    }
    let names: Vec<String> = gens.gens.iter().map(|g| format!("{}:{}", g.name, g.degree)).collect();
    Algebra {
        name: format!("T({})", names.join(",")),
        field,
        basis,
        product: ProductRule::Table(table),
        differential: None,
        commutative: gens.len() <= 1 && gens.gens.iter().all(|g| g.degree % 2 == 0),
        associative: true,
        weight_additive: true,
        max_weight,
    }
}

/// Square-zero extension `k ⋉ M` with `M` of dimension `dim` in the given
/// degree, each basis vector of weight one.
pub fn square_zero(field: Field, dim: usize, degree: i64) -> Algebra {
    let basis = (0..dim)
        .map(|i| BasisElem { label: format!("m{}", i + 1), degree, weight: 1 })
        .collect();
    Algebra {
        name: format!("sqzero:{dim}"),
        field,
        basis,
        product: ProductRule::Table(HashMap::new()),
        differential: None,
        commutative: true,
        associative: true,
        weight_additive: true,
        max_weight: 1,
    }
}

/// Group algebra of the cyclic group of the given order, augmentation ideal
/// spanned by `u_i = g^i - 1`; everything sits in degree 0, weight 1.
pub fn group_algebra_cyclic(field: Field, order: usize) -> Algebra {
    assert!(order >= 1);
    let basis = (1..order)
        .map(|i| BasisElem { label: format!("g{i}-1"), degree: 0, weight: 1 })
        .collect();
    let one = FieldScalar::one(field);
    let mut table = HashMap::new();
    // (g^a - 1)(g^b - 1) = u_{a+b} - u_a - u_b, with u_0 = 0
    for a in 1..order {
        for b in 1..order {
            let mut v = vec![(a - 1, -one.clone()), (b - 1, -one.clone())];
            let c = (a + b) % order;
            if c != 0 {
                v.push((c - 1, one.clone()));
            }
            table.insert((a - 1, b - 1), svec::normalize(v));
        }
    }
    Algebra {
        name: format!("group C{order}"),
        field,
        basis,
        product: ProductRule::Table(table),
        differential: None,
        commutative: true,
        associative: true,
        weight_additive: false,
        max_weight: 1,
    }
}

/// `k^factors` augmented by projection to the first factor; the ideal is
/// spanned by the remaining orthogonal idempotents.
pub fn product_of_fields(field: Field, factors: usize) -> Algebra {
    assert!(factors >= 1);
    let basis = (2..=factors)
        .map(|i| BasisElem { label: format!("e{i}"), degree: 0, weight: 1 })
        .collect();
    let mut table = HashMap::new();
    for i in 0..factors - 1 {
        table.insert((i, i), vec![(i, FieldScalar::one(field))]);
    }
    Algebra {
        name: format!("prod:{factors}"),
        field,
        basis,
        product: ProductRule::Table(table),
        differential: None,
        commutative: true,
        associative: true,
        weight_additive: false,
        max_weight: 1,
    }
}

/// Graded tensor product of two weight-additive algebras, truncated at the
/// smaller weight bound. Basis: `a⊗1`, `1⊗b`, `a⊗b`.
pub fn tensor_algebras(a: &Algebra, b: &Algebra) -> Result<Algebra, FreeError> {
    if a.field != b.field {
        return Err(FreeError::Unsupported("field mismatch".into()));
    }
    let field = a.field;
    let w = a.max_weight.min(b.max_weight);
    // element = (Option<i>, Option<j>)
    let mut elems: Vec<(Option<usize>, Option<usize>)> = Vec::new();
    for i in 0..a.dim() {
        elems.push((Some(i), None));
    }
    for j in 0..b.dim() {
        elems.push((None, Some(j)));
    }
    for i in 0..a.dim() {
        for j in 0..b.dim() {
            elems.push((Some(i), Some(j)));
        }
    }
    let dw = |e: &(Option<usize>, Option<usize>)| -> (i64, u32) {
        let (mut d, mut wt) = (0, 0);
        if let Some(i) = e.0 {
            d += a.basis[i].degree;
            wt += a.basis[i].weight;
        }
        if let Some(j) = e.1 {
            d += b.basis[j].degree;
            wt += b.basis[j].weight;
        }
        (d, wt)
    };
    elems.retain(|e| dw(e).1 <= w);
    elems.sort_by_key(|e| {
        let (d, wt) = dw(e);
        (wt, d, *e)
    });
    let index: HashMap<(Option<usize>, Option<usize>), usize> =
        elems.iter().enumerate().map(|(k, e)| (*e, k)).collect();
    let basis: Vec<BasisElem> = elems
        .iter()
        .map(|e| {
            let (d, wt) = dw(e);
            let la = e.0.map_or("1".to_string(), |i| a.basis[i].label.clone());
            let lb = e.1.map_or("1".to_string(), |j| b.basis[j].label.clone());
            BasisElem { label: format!("{la}⊗{lb}"), degree: d, weight: wt }
        })
        .collect();
    let one = FieldScalar::one(field);
    // product in A including the unit: None = 1
    let amul = |x: Option<usize>, y: Option<usize>| -> Vec<(Option<usize>, FieldScalar)> {
        match (x, y) {
            (None, None) => vec![(None, one.clone())],
            (Some(i), None) | (None, Some(i)) => vec![(Some(i), one.clone())],
            (Some(i), Some(j)) => a.mul(i, j).into_iter().map(|(k, c)| (Some(k), c)).collect(),
        }
    };
    let bmul = |x: Option<usize>, y: Option<usize>| -> Vec<(Option<usize>, FieldScalar)> {
        match (x, y) {
            (None, None) => vec![(None, one.clone())],
            (Some(i), None) | (None, Some(i)) => vec![(Some(i), one.clone())],
            (Some(i), Some(j)) => b.mul(i, j).into_iter().map(|(k, c)| (Some(k), c)).collect(),
        }
    };
    let mut table = HashMap::new();
    for (p, e) in elems.iter().enumerate() {
        for (q, f) in elems.iter().enumerate() {
            if dw(e).1 + dw(f).1 > w {
                continue;
            }
            // (a1⊗b1)(a2⊗b2) = (-1)^{|b1||a2|} a1a2 ⊗ b1b2
            let db1 = e.1.map_or(0, |j| b.basis[j].degree);
            let da2 = f.0.map_or(0, |i| a.basis[i].degree);
            let s = FieldScalar::sign(field, db1 * da2);
            let mut v = Vec::new();
            for (x, cx) in amul(e.0, f.0) {
                for (y, cy) in bmul(e.1, f.1) {
                    if let Some(&k) = index.get(&(x, y)) {
                        v.push((k, &s * &(&cx * &cy)));
                    }
                }
            }
            let v = svec::normalize(v);
            if !v.is_empty() {
                table.insert((p, q), v);
            }
        }
    }
    Ok(Algebra {
        name: format!("{}⊗{}", a.name, b.name),
        field,
        basis,
        product: ProductRule::Table(table),
        differential: None,
        commutative: a.commutative && b.commutative,
        associative: true,
        weight_additive: true,
        max_weight: w,
    })
}

// ---------------------------------------------------------------------------
// Lie algebras

/// Graded Lie algebra with bracket of degree `shift` (an `n`-Lie algebra for
/// `shift = n`), optionally restricted over F2.
#[derive(Clone, Debug)]
pub struct LiePresentation {
    pub field: Field,
    pub shift: i64,
    pub basis: Vec<BasisElem>,
    pub bracket: HashMap<(usize, usize), SparseVec>,
    pub restriction: Option<Vec<SparseVec>>,
    pub max_weight: u32,
}

impl LiePresentation {
    /// Abelian Lie algebra on the given generators.
    pub fn abelian(gens: &GeneratorSet, field: Field, shift: i64, max_weight: u32) -> Self {
        LiePresentation {
            field,
            shift,
            basis: gens
                .gens
                .iter()
                .map(|g| BasisElem { label: g.name.clone(), degree: g.degree, weight: g.weight })
                .collect(),
            bracket: HashMap::new(),
            restriction: None,
            max_weight,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn br(&self, i: usize, j: usize) -> SparseVec {
        self.bracket.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn bracket_vec(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let mut acc = Vec::new();
        for (i, x) in a {
            for (j, y) in b {
                let c = x * y;
                for (k, z) in self.br(*i, *j) {
                    acc.push((k, &c * &z));
                }
            }
        }
        svec::normalize(acc)
    }

    /// Restriction of an arbitrary vector: `ξ(Σ c_i b_i) = Σ c_i² ξ(b_i) + Σ_{i<j} c_i c_j [b_i, b_j]`.
    pub fn xi_vec(&self, a: &SparseVec) -> Option<SparseVec> {
        let r = self.restriction.as_ref()?;
        let mut acc = Vec::new();
        for (p, (i, x)) in a.iter().enumerate() {
            for (k, z) in &r[*i] {
                acc.push((*k, &(x * x) * z));
            }
            for (j, y) in &a[p + 1..] {
                for (k, z) in self.br(*i, *j) {
                    acc.push((k, &(x * y) * &z));
                }
            }
        }
        Some(svec::normalize(acc))
    }

    fn sdeg(&self, i: usize) -> i64 {
        self.basis[i].degree + self.shift
    }

    pub fn space(&self) -> BigradedSpace {
        let mut s = BigradedSpace::new();
        for b in &self.basis {
            s.push((b.degree, b.weight), b.label.clone());
        }
        s
    }

    pub fn dims(&self) -> BTreeMap<Cell, usize> {
        let mut m = BTreeMap::new();
        for b in &self.basis {
            *m.entry((b.degree, b.weight)).or_insert(0) += 1;
        }
        m
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.label == label)
    }

    fn in_window(&self, ws: &[usize]) -> bool {
        ws.iter().map(|&i| self.basis[i].weight).sum::<u32>() <= self.max_weight
    }

    /// Graded antisymmetry, Jacobi, degree and weight bookkeeping, and over F2
    /// `[x,x] = 0` and the restriction axioms, on all basis tuples in window.
    /// Signs use the shifted degrees `|x| + shift`.
    pub fn check(&self) -> Result<(), FreeError> {
        let n = self.dim();
        let f = self.field;
        let bad = |m: String| Err(FreeError::InvalidPresentation(m));
        for (&(i, j), v) in &self.bracket {
            for (k, _) in v {
                let b = &self.basis[*k];
                if b.degree != self.basis[i].degree + self.basis[j].degree + self.shift
                    || b.weight != self.basis[i].weight + self.basis[j].weight
                {
                    return bad(format!("[{},{}] has wrong bidegree", self.basis[i].label, self.basis[j].label));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !self.in_window(&[i, j]) {
                    continue;
                }
                let s = FieldScalar::sign(f, self.sdeg(i) * self.sdeg(j));
                let sum = svec::add_scaled(&self.br(i, j), &s, &self.br(j, i));
                if !sum.is_empty() {
                    return bad(format!("antisymmetry fails for {}, {}", self.basis[i].label, self.basis[j].label));
                }
            }
            if f == Field::F2 && !self.br(i, i).is_empty() {
                return bad(format!("[{0},{0}] != 0 in characteristic 2", self.basis[i].label));
            }
        }
        let e = |i: usize| vec![(i, FieldScalar::one(f))];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !self.in_window(&[i, j, k]) {
                        continue;
                    }
                    let t1 = self.bracket_vec(&e(i), &self.br(j, k));
                    let t2 = self.bracket_vec(&e(j), &self.br(k, i));
                    let t3 = self.bracket_vec(&e(k), &self.br(i, j));
                    let s1 = FieldScalar::sign(f, self.sdeg(i) * self.sdeg(k));
                    let s2 = FieldScalar::sign(f, self.sdeg(j) * self.sdeg(i));
                    let s3 = FieldScalar::sign(f, self.sdeg(k) * self.sdeg(j));
                    let sum = svec::add_scaled(&svec::add_scaled(&svec::scale(&t1, &s1), &s2, &t2), &s3, &t3);
                    if !sum.is_empty() {
                        return bad(format!(
                            "Jacobi fails for {}, {}, {}",
                            self.basis[i].label, self.basis[j].label, self.basis[k].label
                        ));
                    }
                }
            }
        }
        if let Some(r) = &self.restriction {
            if f != Field::F2 {
                return bad("restriction outside characteristic 2".into());
            }
            for i in 0..n {
                if !self.in_window(&[i, i]) {
                    continue;
                }
                for j in 0..n {
                    if !self.in_window(&[i, i, j]) {
                        continue;
                    }
                    let lhs = self.bracket_vec(&r[i], &e(j));
                    let rhs = self.bracket_vec(&e(i), &self.br(i, j));
                    if lhs != rhs {
                        return bad(format!(
                            "[ξ({0}),{1}] != [{0},[{0},{1}]]",
                            self.basis[i].label, self.basis[j].label
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Re-grade an `n`-Lie algebra as an `l`-Lie algebra: degrees move up by
/// `n - l`; bracket tables are unchanged.
pub fn shift_lie(g: &LiePresentation, to: i64) -> LiePresentation {
    let by = g.shift - to;
    let mut h = g.clone();
    h.shift = to;
    for b in &mut h.basis {
        b.degree += by;
    }
    h
}

/// Tensor algebra on generators, used to realize free Lie algebras.
#[derive(Clone, Debug, Default)]
pub struct WordSpace {
    pub gens: GeneratorSet,
    pub field: Option<Field>,
    index: HashMap<Vec<u16>, usize>,
    pub words: Vec<Vec<u16>>,
}

impl WordSpace {
    pub fn new(gens: &GeneratorSet, field: Field) -> Self {
        WordSpace { gens: gens.clone(), field: Some(field), index: HashMap::new(), words: Vec::new() }
    }

    pub fn id(&mut self, w: &[u16]) -> usize {
        if let Some(&i) = self.index.get(w) {
            return i;
        }
        self.words.push(w.to_vec());
        self.index.insert(w.to_vec(), self.words.len() - 1);
        self.words.len() - 1
    }

    pub fn generator(&mut self, g: usize) -> SparseVec {
        let f = self.field.unwrap();
        vec![(self.id(&[g as u16]), FieldScalar::one(f))]
    }

    pub fn mul(&mut self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let mut acc = Vec::new();
        for (i, x) in a {
            for (j, y) in b {
                let mut w = self.words[*i].clone();
                w.extend_from_slice(&self.words[*j]);
                acc.push((self.id(&w), x * y));
            }
        }
        svec::normalize(acc)
    }

    /// `ab - (-1)^{|a||b|} ba` for homogeneous `a`, `b`.
    pub fn commutator(&mut self, a: &SparseVec, da: i64, b: &SparseVec, db: i64) -> SparseVec {
        let f = self.field.unwrap();
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        svec::add_scaled(&ab, &-FieldScalar::sign(f, da * db), &ba)
    }
}

/// How a basis element of a free Lie algebra was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LieNode {
    Gen(usize),
    /// `[generator, basis element]`
    Br(usize, usize),
    /// restriction of a basis element
    Xi(usize),
}

/// A free Lie algebra together with its realization inside the tensor algebra.
#[derive(Clone, Debug)]
pub struct FreeLieRealization {
    pub lie: LiePresentation,
    pub words: WordSpace,
    pub elements: Vec<SparseVec>,
    pub construction: Vec<LieNode>,
}

fn lie_closure(gens: &GeneratorSet, field: Field, max_weight: u32, restricted: bool) -> FreeLieRealization {
    let mut ws = WordSpace::new(gens, field);
    let mut basis: Vec<BasisElem> = Vec::new();
    let mut elems: Vec<SparseVec> = Vec::new();
    let mut construction: Vec<LieNode> = Vec::new();
    let mut by_weight: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for w in 1..=max_weight {
        let mut cands: Vec<(SparseVec, BasisElem, LieNode)> = Vec::new();
        for (gi, g) in gens.gens.iter().enumerate() {
            if g.weight == w {
                cands.push((ws.generator(gi), BasisElem { label: g.name.clone(), degree: g.degree, weight: w }, LieNode::Gen(gi)));
            }
        }
        for (gi, g) in gens.gens.iter().enumerate() {
            if g.weight >= w {
                continue;
            }
            let ge = ws.generator(gi);
            for &y in by_weight.get(&(w - g.weight)).map_or(&vec![], |v| v) {
                let v = ws.commutator(&ge, g.degree, &elems[y], basis[y].degree);
                cands.push((
                    v,
                    BasisElem {
                        label: format!("[{},{}]", g.name, basis[y].label),
                        degree: g.degree + basis[y].degree,
                        weight: w,
                    },
                    LieNode::Br(gi, y),
                ));
            }
        }
        if restricted && w % 2 == 0 {
            for &y in by_weight.get(&(w / 2)).map_or(&vec![], |v| v) {
                let v = ws.mul(&elems[y], &elems[y]);
                cands.push((
                    v,
                    BasisElem { label: format!("ξ({})", basis[y].label), degree: 2 * basis[y].degree, weight: w },
                    LieNode::Xi(y),
                ));
            }
        }
        let mut spans: BTreeMap<i64, SpanBasis> = BTreeMap::new();
        for (v, b, node) in cands {
            let sp = spans.entry(b.degree).or_insert_with(|| SpanBasis::new(field));
            if sp.insert(&v).is_some() {
                by_weight.entry(w).or_default().push(basis.len());
                basis.push(b);
                elems.push(v);
                construction.push(node);
            }
        }
    }
    // coordinates per cell
    let mut cell_span: HashMap<Cell, (SpanBasis, Vec<usize>)> = HashMap::new();
    for (i, b) in basis.iter().enumerate() {
        let e = cell_span.entry((b.degree, b.weight)).or_insert_with(|| (SpanBasis::new(field), Vec::new()));
        e.0.insert(&elems[i]);
        e.1.push(i);
    }
    let coords = |v: &SparseVec, cell: Cell| -> SparseVec {
        if v.is_empty() {
            return Vec::new();
        }
        let (sp, ids) = cell_span.get(&cell).expect("closure is bracket-closed");
        let (rem, comb) = sp.reduce(v);
        assert!(rem.is_empty(), "bracket left the closure");
        svec::normalize(comb.into_iter().map(|(k, c)| (ids[k], c)).collect())
    };
    let mut bracket = HashMap::new();
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            let w = basis[i].weight + basis[j].weight;
            if w > max_weight {
                continue;
            }
            let v = ws.commutator(&elems[i], basis[i].degree, &elems[j], basis[j].degree);
            let c = coords(&v, (basis[i].degree + basis[j].degree, w));
            if !c.is_empty() {
                bracket.insert((i, j), c);
            }
        }
    }
    let restriction = restricted.then(|| {
        (0..basis.len())
            .map(|i| {
                if 2 * basis[i].weight > max_weight {
                    return Vec::new();
                }
                let v = ws.mul(&elems[i], &elems[i]);
                coords(&v, (2 * basis[i].degree, 2 * basis[i].weight))
            })
            .collect()
    });
    FreeLieRealization {
        lie: LiePresentation { field, shift: 0, basis, bracket, restriction, max_weight },
        words: ws,
        elements: elems,
        construction,
    }
}

/// Free graded Lie algebra on `gens`, as the Lie subalgebra of the tensor
/// algebra generated by `gens` under the graded commutator.
pub fn free_lie(gens: &GeneratorSet, field: Field, max_weight: u32) -> LiePresentation {
    lie_closure(gens, field, max_weight, false).lie
}

pub fn free_lie_realized(gens: &GeneratorSet, field: Field, max_weight: u32) -> FreeLieRealization {
    lie_closure(gens, field, max_weight, false)
}

/// Free restricted Lie algebra over F2: closure under commutators and squares.
pub fn free_restricted_lie(gens: &GeneratorSet, max_weight: u32) -> FreeLieRealization {
    lie_closure(gens, Field::F2, max_weight, true)
}

/// Witt necklace count: dimension of the free Lie algebra on `d` degree-zero
/// generators in weight `w`.
pub fn witt_dimension(d: u64, w: u64) -> u64 {
    fn mobius(mut n: u64) -> i64 {
        let mut m = 1;
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                n /= p;
                if n.is_multiple_of(p) {
                    return 0;
                }
                m = -m;
            }
            p += 1;
        }
        if n > 1 {
            m = -m;
        }
        m
    }
    let mut s: i64 = 0;
    for k in 1..=w {
        if w.is_multiple_of(k) {
            s += mobius(k) * (d as i64).pow((w / k) as u32);
        }
    }
    (s / w as i64) as u64
}

// ---------------------------------------------------------------------------
// Enveloping algebras

pub type PbwElem = BTreeMap<Vec<u16>, FieldScalar>;

/// Universal (or restricted) enveloping algebra of a 0-Lie algebra, with
/// products computed by PBW straightening. Monomials are non-decreasing words
/// in positions of the Lie basis sorted by (weight, degree, label).
#[derive(Debug)]
pub struct EnvelopingAlgebra {
    pub lie: LiePresentation,
    pub restricted: bool,
    order: Vec<usize>,
    pos: Vec<usize>,
    memo: Mutex<HashMap<Vec<u16>, PbwElem>>,
}

impl Clone for EnvelopingAlgebra {
    fn clone(&self) -> Self {
        EnvelopingAlgebra {
            lie: self.lie.clone(),
            restricted: self.restricted,
            order: self.order.clone(),
            pos: self.pos.clone(),
            memo: Mutex::new(HashMap::new()),
        }
    }
}

/// Build the enveloping algebra; the presentation is checked first.
pub fn enveloping(g: &LiePresentation) -> Result<EnvelopingAlgebra, FreeError> {
    if g.shift != 0 {
        return Err(FreeError::Unsupported(format!("enveloping algebra of a {}-Lie algebra; shift first", g.shift)));
    }
    g.check()?;
    let mut order: Vec<usize> = (0..g.dim()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&g.basis[a], &g.basis[b]);
        (x.weight, x.degree, &x.label).cmp(&(y.weight, y.degree, &y.label))
    });
    let mut pos = vec![0; g.dim()];
    for (p, &i) in order.iter().enumerate() {
        pos[i] = p;
    }
    Ok(EnvelopingAlgebra {
        lie: g.clone(),
        restricted: g.restriction.is_some(),
        order,
        pos,
        memo: Mutex::new(HashMap::new()),
    })
}

fn add_into(acc: &mut PbwElem, e: &PbwElem, c: &FieldScalar) {
    for (m, x) in e {
        let v = acc.remove(m).map_or_else(|| x * c, |y| &y + &(x * c));
        if !v.is_zero() {
            acc.insert(m.clone(), v);
        }
    }
}

impl EnvelopingAlgebra {
    pub fn field(&self) -> Field {
        self.lie.field
    }

    /// Lie basis index of a monomial letter.
    pub fn letter(&self, p: u16) -> usize {
        self.order[p as usize]
    }

    /// The monomial consisting of one Lie basis element.
    pub fn generator(&self, lie_index: usize) -> Vec<u16> {
        vec![self.pos[lie_index] as u16]
    }

    pub fn degree(&self, m: &[u16]) -> i64 {
        m.iter().map(|&p| self.lie.basis[self.letter(p)].degree).sum()
    }

    pub fn weight(&self, m: &[u16]) -> u32 {
        m.iter().map(|&p| self.lie.basis[self.letter(p)].weight).sum()
    }

    pub fn label(&self, m: &[u16]) -> String {
        if m.is_empty() {
            return "1".into();
        }
        let mut parts = Vec::new();
        let mut i = 0;
        while i < m.len() {
            let mut j = i;
            while j < m.len() && m[j] == m[i] {
                j += 1;
            }
            let l = &self.lie.basis[self.letter(m[i])].label;
            parts.push(if j - i == 1 { l.clone() } else { format!("{l}^{}", j - i) });
            i = j;
        }
        parts.join("*")
    }

    fn repeat_forbidden(&self, p: u16) -> bool {
        let b = &self.lie.basis[self.letter(p)];
        self.restricted || (self.lie.field == Field::Q && b.degree.rem_euclid(2) == 1)
    }

    fn lie_to_pbw(&self, v: &SparseVec) -> Vec<(u16, FieldScalar)> {
        v.iter().map(|(k, c)| (self.pos[*k] as u16, c.clone())).collect()
    }

    /// Normal form of an arbitrary word in Lie basis positions.
    pub fn normal_form(&self, w: &[u16]) -> PbwElem {
        if let Some(e) = self.memo.lock().unwrap().get(w) {
            return e.clone();
        }
        let f = self.lie.field;
        let mut out = PbwElem::new();
        let mut hit = None;
        for i in 0..w.len().saturating_sub(1) {
            if w[i] > w[i + 1] || (w[i] == w[i + 1] && self.repeat_forbidden(w[i])) {
                hit = Some(i);
                break;
            }
        }
        match hit {
            None => {
                out.insert(w.to_vec(), FieldScalar::one(f));
            }
            Some(i) => {
                let (a, b) = (w[i], w[i + 1]);
                let splice = |mid: &[u16]| -> Vec<u16> {
                    let mut v = w[..i].to_vec();
                    v.extend_from_slice(mid);
                    v.extend_from_slice(&w[i + 2..]);
                    v
                };
                let (la, lb) = (self.letter(a), self.letter(b));
                if a != b {
                    // ab = (-1)^{|a||b|} ba + [a,b]
                    let s = FieldScalar::sign(f, self.lie.basis[la].degree * self.lie.basis[lb].degree);
                    add_into(&mut out, &self.normal_form(&splice(&[b, a])), &s);
                    for (k, c) in self.lie_to_pbw(&self.lie.br(la, lb)) {
                        add_into(&mut out, &self.normal_form(&splice(&[k])), &c);
                    }
                } else if self.restricted {
                    let xi = self.lie.restriction.as_ref().unwrap()[la].clone();
                    for (k, c) in self.lie_to_pbw(&xi) {
                        add_into(&mut out, &self.normal_form(&splice(&[k])), &c);
                    }
                } else {
                    // odd a over Q: a² = ½[a,a]
                    let half = FieldScalar::from_ratio(1, 2);
                    for (k, c) in self.lie_to_pbw(&self.lie.br(la, la)) {
                        add_into(&mut out, &self.normal_form(&splice(&[k])), &(&c * &half));
                    }
                }
            }
        }
        self.memo.lock().unwrap().insert(w.to_vec(), out.clone());
        out
    }

    pub fn mul_monomials(&self, a: &[u16], b: &[u16]) -> PbwElem {
        let mut w = a.to_vec();
        w.extend_from_slice(b);
        self.normal_form(&w)
    }

    pub fn mul(&self, a: &PbwElem, b: &PbwElem) -> PbwElem {
        let mut out = PbwElem::new();
        for (m, x) in a {
            for (n, y) in b {
                add_into(&mut out, &self.mul_monomials(m, n), &(x * y));
            }
        }
        out
    }

    /// PBW monomials (excluding 1 unless `with_unit`) of weight `<= max_weight`
    /// and length `<= max_length`.
    pub fn monomials(&self, max_weight: u32, max_length: usize, with_unit: bool) -> Vec<Vec<u16>> {
        let mut out = Vec::new();
        let n = self.lie.dim() as u16;
        fn rec(
            u: &EnvelopingAlgebra,
            start: u16,
            n: u16,
            cur: &mut Vec<u16>,
            w: u32,
            max_w: u32,
            max_l: usize,
            out: &mut Vec<Vec<u16>>,
        ) {
            out.push(cur.clone());
            if cur.len() == max_l {
                return;
            }
            for p in start..n {
                let pw = u.lie.basis[u.letter(p)].weight;
                if w + pw > max_w {
                    continue;
                }
                if cur.last() == Some(&p) && u.repeat_forbidden(p) {
                    continue;
                }
                cur.push(p);
                rec(u, p, n, cur, w + pw, max_w, max_l, out);
                cur.pop();
            }
        }
        rec(self, 0, n, &mut Vec::new(), 0, max_weight, max_length, &mut out);
        if !with_unit {
            out.retain(|m| !m.is_empty());
        }
        out.sort_by_key(|a| (self.weight(a), self.degree(a), a.len(), a.clone()));
        out
    }

    /// Cell dimensions of the PBW basis (augmentation ideal) in window.
    pub fn dims(&self, max_weight: u32, max_length: usize) -> BTreeMap<Cell, usize> {
        let mut m = BTreeMap::new();
        for mon in self.monomials(max_weight, max_length, false) {
            *m.entry((self.degree(&mon), self.weight(&mon))).or_insert(0) += 1;
        }
        m
    }

    pub fn space(&self, max_weight: u32, max_length: usize) -> BigradedSpace {
        let mut s = BigradedSpace::new();
        for mon in self.monomials(max_weight, max_length, false) {
            s.push((self.degree(&mon), self.weight(&mon)), self.label(&mon));
        }
        s
    }

    /// The augmentation ideal as an [`Algebra`]; requires every Lie basis
    /// element to have positive weight so the window is finite.
    pub fn as_algebra(&self, max_weight: u32) -> Result<Algebra, FreeError> {
        if self.lie.basis.iter().any(|b| b.weight == 0) {
            return Err(FreeError::Unsupported("weight-zero Lie elements give infinite cells".into()));
        }
        let mons = self.monomials(max_weight, max_weight as usize, false);
        let index: HashMap<Vec<u16>, usize> = mons.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let basis = mons
            .iter()
            .map(|m| BasisElem { label: self.label(m), degree: self.degree(m), weight: self.weight(m) })
            .collect();
        let mut table = HashMap::new();
        for (i, a) in mons.iter().enumerate() {
            for (j, b) in mons.iter().enumerate() {
                if self.weight(a) + self.weight(b) > max_weight {
                    continue;
                }
                let v: SparseVec = svec::normalize(
                    self.mul_monomials(a, b).into_iter().map(|(m, c)| (index[&m], c)).collect(),
                );
                if !v.is_empty() {
                    table.insert((i, j), v);
                }
            }
        }
        Ok(Algebra {
            name: "U(g)".into(),
            field: self.lie.field,
            basis,
            product: ProductRule::Table(table),
            differential: None,
            commutative: self.lie.bracket.is_empty(),
            associative: true,
            weight_additive: true,
            max_weight,
        })
    }
}

/// Dimensions of the enveloping algebra computed directly as the tensor algebra
/// on `g` modulo the two-sided ideal of its defining relations, weight by
/// weight. Used as an independent check of PBW bases.
pub fn enveloping_dims_by_quotient(g: &LiePresentation) -> Result<BTreeMap<Cell, usize>, FreeError> {
    if g.basis.iter().any(|b| b.weight == 0) {
        return Err(FreeError::Unsupported("weight-zero Lie elements give infinite cells".into()));
    }
    let f = g.field;
    let n = g.dim();
    let wmax = g.max_weight;
    // words by weight
    let mut words_by_w: Vec<Vec<Vec<usize>>> = vec![Vec::new(); wmax as usize + 1];
    words_by_w[0].push(vec![]);
    for w in 1..=wmax {
        let mut list = Vec::new();
        for i in 0..n {
            let bw = g.basis[i].weight;
            if bw <= w {
                for u in &words_by_w[(w - bw) as usize] {
                    let mut v = vec![i];
                    v.extend(u);
                    list.push(v);
                }
            }
        }
        words_by_w[w as usize] = list;
    }
    let deg = |w: &[usize]| -> i64 { w.iter().map(|&i| g.basis[i].degree).sum() };
    let mut out = BTreeMap::new();
    for w in 1..=wmax {
        let mut cells: BTreeMap<i64, HashMap<Vec<usize>, usize>> = BTreeMap::new();
        for word in &words_by_w[w as usize] {
            let c = cells.entry(deg(word)).or_default();
            let k = c.len();
            c.insert(word.clone(), k);
        }
        let mut rels: BTreeMap<i64, Vec<SparseVec>> = BTreeMap::new();
        for a in 0..n {
            for b in 0..n {
                let rw = g.basis[a].weight + g.basis[b].weight;
                if rw > w {
                    continue;
                }
                // ab - (-1)^{|a||b|} ba - [a,b]  (restricted: aa - ξ(a) in place of the pair (a,a))
                let mut rel: Vec<(Vec<usize>, FieldScalar)> = vec![(vec![a, b], FieldScalar::one(f))];
                if g.restriction.is_some() && a == b {
                    for (k, c) in &g.restriction.as_ref().unwrap()[a] {
                        rel.push((vec![*k], -c.clone()));
                    }
                } else {
                    rel.push((vec![b, a], -FieldScalar::sign(f, g.basis[a].degree * g.basis[b].degree)));
                    for (k, c) in g.br(a, b) {
                        rel.push((vec![k], -c));
                    }
                }
                for lw in 0..=(w - rw) {
                    for u in &words_by_w[lw as usize] {
                        for v in &words_by_w[(w - rw - lw) as usize] {
                            let mut vec = Vec::new();
                            let mut d = 0;
                            for (m, c) in &rel {
                                let mut word = u.clone();
                                word.extend(m);
                                word.extend(v);
                                d = deg(&word);
                                vec.push((cells[&d][&word], c.clone()));
                            }
                            rels.entry(d).or_default().push(svec::normalize(vec));
                        }
                    }
                }
            }
        }
        for (d, c) in &cells {
            let r = rels.get(d).map_or(0, |rs| rank_of(f, rs, c.len()));
            if c.len() > r {
                out.insert((*d, w), c.len() - r);
            }
        }
    }
    Ok(out)
}

/// Dimensions of the free graded commutative algebra on a graded space given
/// by cell dimensions (exterior on odd cells over Q; over F2 with
/// `truncated`, every exponent is below 2).
pub fn symmetric_algebra_dims(
    field: Field,
    gens: &BTreeMap<Cell, usize>,
    max_weight: u32,
    truncated: bool,
) -> BTreeMap<Cell, usize> {
    let mut gs = Vec::new();
    let mut k = 0;
    for (&(d, w), &n) in gens {
        for _ in 0..n {
            gs.push(Generator { name: format!("g{k}"), degree: d, weight: w });
            k += 1;
        }
    }
    let gs = GeneratorSet { gens: gs };
    let bounds = vec![if truncated { Some(2) } else { None }; gs.len()];
    let a = monomial_algebra(String::new(), field, &gs, &bounds, max_weight);
    a.dims()
}

// ---------------------------------------------------------------------------
// Indecomposables

/// Result of [`indecomposables`]: a basis of `I/I²` given by basis elements
/// outside the span of products, plus the products that span `I²`.
#[derive(Clone, Debug)]
pub struct Indecomposables {
    pub space: BigradedSpace,
    pub generating_products: Vec<(String, String)>,
}

/// `I/I²` per cell, where `I` is the augmentation ideal.
pub fn indecomposables(a: &Algebra) -> Indecomposables {
    let cells = a.cells();
    let local: HashMap<usize, (Cell, usize)> = cells
        .iter()
        .flat_map(|(c, ids)| ids.iter().enumerate().map(move |(k, &i)| (i, (*c, k))))
        .collect();
    let mut spans: BTreeMap<Cell, SpanBasis> = BTreeMap::new();
    let mut gens = Vec::new();
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            if a.weight_additive && a.basis[i].weight + a.basis[j].weight > a.max_weight {
                continue;
            }
            let p = a.mul(i, j);
            if p.is_empty() {
                continue;
            }
            let cell = local[&p[0].0].0;
            let v: SparseVec = svec::normalize(p.iter().map(|(k, c)| (local[k].1, c.clone())).collect());
            if spans.entry(cell).or_insert_with(|| SpanBasis::new(a.field)).insert(&v).is_some() {
                gens.push((a.basis[i].label.clone(), a.basis[j].label.clone()));
            }
        }
    }
    let mut space = BigradedSpace::new();
    for (cell, ids) in &cells {
        let pivots: Vec<usize> = spans.get(cell).map_or(Vec::new(), |s| s.pivots());
        for (k, &i) in ids.iter().enumerate() {
            if !pivots.contains(&k) {
                space.push(*cell, a.basis[i].label.clone());
            }
        }
    }
    Indecomposables { space, generating_products: gens }
}

pub fn indecomposables_qa(a: &Algebra) -> BigradedSpace {
    indecomposables(a).space
}

// ---------------------------------------------------------------------------
// Textual grammar

/// Parsed algebra description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgebraSpec {
    /// `S(x:2)`, or `Q[x:0]` / `F2[x:-1]` with an explicit field.
    Free { field: Option<Field>, gens: GeneratorSet },
    /// `Q[x:0]/x^3`
    Truncated { field: Option<Field>, gen: Generator, power: u32 },
    /// `T(x:0,y:0)`
    Tensor { gens: GeneratorSet },
    /// `group C3`
    CyclicGroup { order: usize },
    /// `sqzero:2`: square-zero extension by a module in degree -1.
    SquareZero { dim: usize },
    /// `prod:3`
    Product { factors: usize },
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser { s: s.as_bytes(), pos: 0 }
    }
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FreeError> {
        Err(FreeError::Parse { pos: self.pos, msg: msg.into() })
    }
    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }
    fn eat(&mut self, lit: &str) -> bool {
        self.ws();
        if self.s[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            true
        } else {
            false
        }
    }
    fn expect(&mut self, lit: &str) -> Result<(), FreeError> {
        if self.eat(lit) {
            Ok(())
        } else {
            self.err(format!("expected `{lit}`"))
        }
    }
    fn end(&mut self) -> Result<(), FreeError> {
        self.ws();
        if self.pos == self.s.len() {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }
    fn name(&mut self) -> Result<String, FreeError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            if self.pos == start && self.s[self.pos].is_ascii_digit() {
                break;
            }
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a generator name");
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).into_owned())
    }
    fn int(&mut self) -> Result<i64, FreeError> {
        self.ws();
        let start = self.pos;
        if self.pos < self.s.len() && (self.s[self.pos] == b'-' || self.s[self.pos] == b'+') {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let t = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        match t.parse() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err("expected an integer")
            }
        }
    }
    fn uint(&mut self) -> Result<usize, FreeError> {
        let at = self.pos;
        let v = self.int()?;
        if v < 0 {
            self.pos = at;
            return self.err("expected a non-negative integer");
        }
        Ok(v as usize)
    }
    fn gen(&mut self) -> Result<Generator, FreeError> {
        let name = self.name()?;
        self.expect(":")?;
        let degree = self.int()?;
        let mut weight = 1;
        if self.eat(":") {
            let at = self.pos;
            weight = self.uint()? as u32;
            if weight == 0 {
                self.pos = at;
                return self.err("generator weight must be positive");
            }
        }
        Ok(Generator { name, degree, weight })
    }
    fn gens(&mut self) -> Result<GeneratorSet, FreeError> {
        let mut v = vec![self.gen()?];
        while self.eat(",") {
            v.push(self.gen()?);
        }
        let at = self.pos;
        GeneratorSet::new(v).map_err(|e| FreeError::Parse { pos: at, msg: e.to_string() })
    }
    fn spec(&mut self) -> Result<AlgebraSpec, FreeError> {
        if self.eat("group") {
            self.expect("C")?;
            let order = self.uint()?;
            if order == 0 {
                return self.err("group order must be positive");
            }
            return Ok(AlgebraSpec::CyclicGroup { order });
        }
        if self.eat("sqzero:") {
            return Ok(AlgebraSpec::SquareZero { dim: self.uint()? });
        }
        if self.eat("prod:") {
            let factors = self.uint()?;
            if factors == 0 {
                return self.err("need at least one factor");
            }
            return Ok(AlgebraSpec::Product { factors });
        }
        if self.eat("S(") {
            let gens = self.gens()?;
            self.expect(")")?;
            return Ok(AlgebraSpec::Free { field: None, gens });
        }
        if self.eat("T(") {
            let gens = self.gens()?;
            self.expect(")")?;
            return Ok(AlgebraSpec::Tensor { gens });
        }
        let field = if self.eat("F2[") {
            Field::F2
        } else if self.eat("Q[") {
            Field::Q
        } else {
            return self.err("expected S(..), T(..), Q[..], F2[..], group Cn, sqzero:n or prod:n");
        };
        let gens = self.gens()?;
        self.expect("]")?;
        if self.eat("/") {
            let at = self.pos;
            let name = self.name()?;
            if gens.len() != 1 || gens.gens[0].name != name {
                self.pos = at;
                return self.err("truncation must be a power of the single generator");
            }
            self.expect("^")?;
            let power = self.uint()? as u32;
            if power < 1 {
                return self.err("truncation power must be at least 1");
            }
            return Ok(AlgebraSpec::Truncated { field: Some(field), gen: gens.gens[0].clone(), power });
        }
        Ok(AlgebraSpec::Free { field: Some(field), gens })
    }
}

impl AlgebraSpec {
    pub fn parse(s: &str) -> Result<AlgebraSpec, FreeError> {
        let mut p = Parser::new(s);
        let spec = p.spec()?;
        p.end()?;
        Ok(spec)
    }

    /// Field fixed by the description itself, if any.
    pub fn field(&self) -> Option<Field> {
        match self {
            AlgebraSpec::Free { field, .. } | AlgebraSpec::Truncated { field, .. } => *field,
            _ => None,
        }
    }

    /// Build the algebra, truncated at `max_weight`.
    pub fn build(&self, default_field: Field, max_weight: u32) -> Algebra {
        let field = self.field().unwrap_or(default_field);
        match self {
            AlgebraSpec::Free { gens, .. } => free_commutative(gens, field, max_weight),
            AlgebraSpec::Truncated { gen, power, .. } => truncated_polynomial(gen, field, *power, max_weight),
            AlgebraSpec::Tensor { gens } => free_associative(gens, field, max_weight),
            AlgebraSpec::CyclicGroup { order } => group_algebra_cyclic(field, *order),
            AlgebraSpec::SquareZero { dim } => square_zero(field, *dim, -1),
            AlgebraSpec::Product { factors } => product_of_fields(field, *factors),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims_by_weight(a: &Algebra, w: u32) -> Vec<usize> {
        (1..=w).map(|k| a.basis.iter().filter(|b| b.weight == k).count()).collect()
    }

    #[test]
    fn free_commutative_parity() {
        let x1 = GeneratorSet::simple(&[("x", 1)]);
        assert_eq!(dims_by_weight(&free_commutative(&x1, Field::Q, 4), 4), vec![1, 0, 0, 0]);
        assert_eq!(dims_by_weight(&free_commutative(&x1, Field::F2, 4), 4), vec![1, 1, 1, 1]);
        let x2 = GeneratorSet::simple(&[("x", 2)]);
        assert_eq!(dims_by_weight(&free_commutative(&x2, Field::Q, 4), 4), vec![1, 1, 1, 1]);
    }

    #[test]
    fn algebras_are_associative_and_commutative() {
        let g = GeneratorSet::simple(&[("x", 1), ("y", 2), ("z", 1)]);
        let a = free_commutative(&g, Field::Q, 4);
        a.check_associative().unwrap();
        a.check_commutative().unwrap();
        for f in [Field::Q, Field::F2] {
            group_algebra_cyclic(f, 3).check_associative().unwrap();
            product_of_fields(f, 3).check_associative().unwrap();
        }
        let b = free_commutative(&GeneratorSet::simple(&[("u", 0)]), Field::Q, 3);
        let t = tensor_algebras(&a, &b).unwrap();
        t.check_associative().unwrap();
        t.check_commutative().unwrap();
    }

    #[test]
    fn free_lie_small_cases() {
        let one = free_lie(&GeneratorSet::simple(&[("x", 0)]), Field::Q, 4);
        assert_eq!(one.dim(), 1);
        let odd = free_lie(&GeneratorSet::simple(&[("x", 1)]), Field::Q, 4);
        let by_w: Vec<usize> = (1..=4).map(|w| odd.basis.iter().filter(|b| b.weight == w).count()).collect();
        assert_eq!(by_w, vec![1, 1, 0, 0]);
        odd.check().unwrap();
        let two = free_lie(&GeneratorSet::simple(&[("x", 0), ("y", 0)]), Field::Q, 5);
        let by_w: Vec<usize> = (1..=5).map(|w| two.basis.iter().filter(|b| b.weight == w).count()).collect();
        assert_eq!(by_w, vec![2, 1, 2, 3, 6]);
        two.check().unwrap();
    }

    #[test]
    fn restricted_closure() {
        let r = free_restricted_lie(&GeneratorSet::simple(&[("x", 0)]), 8).lie;
        let by_w: Vec<usize> = (1..=8).map(|w| r.basis.iter().filter(|b| b.weight == w).count()).collect();
        assert_eq!(by_w, vec![1, 1, 0, 1, 0, 0, 0, 1]);
        let r2 = free_restricted_lie(&GeneratorSet::simple(&[("x", 0), ("y", 0)]), 4).lie;
        assert_eq!(r2.basis.iter().filter(|b| b.weight == 2).count(), 3);
        r2.check().unwrap();
    }

    #[test]
    fn shift_round_trip() {
        let mut g = LiePresentation::abelian(&GeneratorSet::simple(&[("x", 0), ("y", -1)]), Field::Q, 1, 3);
        g.basis[1].weight = 0;
        g.bracket.insert((1, 0), vec![(0, FieldScalar::from_i64(Field::Q, 1))]);
        g.bracket.insert((0, 1), vec![(0, FieldScalar::from_i64(Field::Q, -1))]);
        g.check().unwrap();
        let h = shift_lie(&g, 0);
        assert_eq!((h.basis[0].degree, h.basis[1].degree), (1, 0));
        h.check().unwrap();
        let back = shift_lie(&h, 1);
        assert_eq!(back.basis, g.basis);
    }

    #[test]
    fn enveloping_examples() {
        let ab = LiePresentation::abelian(&GeneratorSet::simple(&[("x", 2)]), Field::Q, 0, 5);
        let u = enveloping(&ab).unwrap();
        assert_eq!(u.dims(5, 5).values().copied().collect::<Vec<_>>(), vec![1; 5]);
        let mut r = LiePresentation::abelian(&GeneratorSet::simple(&[("x", 0)]), Field::F2, 0, 4);
        r.restriction = Some(vec![Vec::new()]);
        let ur = enveloping(&r).unwrap();
        assert_eq!(ur.dims(4, 4).values().copied().collect::<Vec<_>>(), vec![1]);
    }

    #[test]
    fn indecomposables_examples() {
        let s = free_commutative(&GeneratorSet::simple(&[("x", 2)]), Field::Q, 5);
        assert_eq!(indecomposables_qa(&s).dims(), BTreeMap::from([((2, 1), 1)]));
        assert_eq!(indecomposables_qa(&group_algebra_cyclic(Field::F2, 3)).total_dim(), 0);
        let t = truncated_polynomial(&Generator { name: "x".into(), degree: 0, weight: 1 }, Field::Q, 3, 5);
        assert_eq!(indecomposables_qa(&t).total_dim(), 1);
    }

    #[test]
    fn grammar() {
        assert_eq!(
            AlgebraSpec::parse("S(x:2)").unwrap(),
            AlgebraSpec::Free { field: None, gens: GeneratorSet::simple(&[("x", 2)]) }
        );
        assert!(matches!(AlgebraSpec::parse("F2[x:-1]").unwrap(), AlgebraSpec::Free { field: Some(Field::F2), .. }));
        assert!(matches!(AlgebraSpec::parse("Q[x:0]/x^3").unwrap(), AlgebraSpec::Truncated { power: 3, .. }));
        assert_eq!(AlgebraSpec::parse("group C3").unwrap(), AlgebraSpec::CyclicGroup { order: 3 });
        assert_eq!(AlgebraSpec::parse("sqzero:2").unwrap(), AlgebraSpec::SquareZero { dim: 2 });
        assert!(matches!(AlgebraSpec::parse("T(x:0,y:0)").unwrap(), AlgebraSpec::Tensor { .. }));
        assert_eq!(
            AlgebraSpec::parse("S(x:)").unwrap_err(),
            FreeError::Parse { pos: 4, msg: "expected an integer".into() }
        );
        assert!(matches!(AlgebraSpec::parse("S(x:1,x:2)"), Err(FreeError::Parse { .. })));
    }

    #[test]
    fn witt_numbers() {
        let v: Vec<u64> = (1..=6).map(|w| witt_dimension(2, w)).collect();
        assert_eq!(v, vec![2, 1, 2, 3, 6, 9]);
    }
}
