//! Reduced bar construction, shuffle product and iterated bar constructions.
//!
//! A bar word `[a1|...|ar]` has degree `Σ(|ai| + 1)` and weight `Σ wt(ai)`.
//! With `εi = Σ_{k<=i}(|ak| + 1)` the differential is
//!
//! ```text
//! d[a1|..|ar] = -Σ (-1)^{ε(i-1)} [..|d ai|..] + Σ (-1)^{εi} [..|ai·a(i+1)|..]
//! ```
//!
//! and the shuffle product carries the Koszul sign of the suspended letters.

use std::collections::HashMap;
use std::ops::RangeInclusive;
use std::sync::Arc;

use thiserror::Error;

use crate::free::{Algebra, BasisElem, ProductRule};
use crate::graded::{self, BigradedSpace, Cell, ChainComplex, GradedError, HomologyTable};
use crate::linalg::{svec, Field, FieldScalar, SparseVec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BarError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("internal consistency: {0}")]
    Internal(String),
    #[error(transparent)]
    Graded(#[from] GradedError),
}

/// Shuffles of two words of letters with the given suspended degrees:
/// returns (word, sign exponent) pairs.
pub fn shuffle_words(u: &[u32], v: &[u32], sdeg: &dyn Fn(u32) -> i64) -> Vec<(Vec<u32>, i64)> {
    let mut out = Vec::new();
    let su: Vec<i64> = u.iter().map(|&a| sdeg(a)).collect();
    // suffix sums of suspended degrees of u
    let mut suffix = vec![0i64; u.len() + 1];
    for i in (0..u.len()).rev() {
        suffix[i] = suffix[i + 1] + su[i];
    }
    fn rec(
        u: &[u32],
        v: &[u32],
        i: usize,
        j: usize,
        suffix: &[i64],
        sdeg: &dyn Fn(u32) -> i64,
        cur: &mut Vec<u32>,
        sign: i64,
        out: &mut Vec<(Vec<u32>, i64)>,
    ) {
        if i == u.len() && j == v.len() {
            out.push((cur.clone(), sign));
            return;
        }
        if i < u.len() {
            cur.push(u[i]);
            rec(u, v, i + 1, j, suffix, sdeg, cur, sign, out);
            cur.pop();
        }
        if j < v.len() {
            cur.push(v[j]);
            let s = sign + sdeg(v[j]) * suffix[i];
            rec(u, v, i, j + 1, suffix, sdeg, cur, s, out);
            cur.pop();
        }
    }
    rec(u, v, 0, 0, &suffix, sdeg, &mut Vec::new(), 0, &mut out);
    out
}

struct WordData {
    field: Field,
    words: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    letter_sdeg: Vec<i64>,
}

impl WordData {
    fn shuffle(&self, i: usize, j: usize) -> SparseVec {
        let sd = |a: u32| self.letter_sdeg[a as usize];
        let mut acc = Vec::new();
        for (w, s) in shuffle_words(&self.words[i], &self.words[j], &sd) {
            if let Some(&k) = self.index.get(&w) {
                acc.push((k, FieldScalar::sign(self.field, s)));
            }
        }
        svec::normalize(acc)
    }
}

/// Reduced bar complex of an augmented (dg) algebra, truncated at the
/// algebra's weight bound. Words are indexed globally in order of
/// (weight, degree, length, letters).
pub struct BarComplex {
    pub base: Algebra,
    pub degree: Vec<i64>,
    pub weight: Vec<u32>,
    pub d: Vec<SparseVec>,
    data: Arc<WordData>,
    local: Vec<(Cell, usize)>,
}

impl BarComplex {
    pub fn field(&self) -> Field {
        self.data.field
    }

    pub fn len(&self) -> usize {
        self.data.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.words.is_empty()
    }

    pub fn word(&self, i: usize) -> &[u32] {
        &self.data.words[i]
    }

    pub fn index_of(&self, w: &[u32]) -> Option<usize> {
        self.data.index.get(w).copied()
    }

    /// Cell and position inside the cell of a global word index.
    pub fn local(&self, i: usize) -> (Cell, usize) {
        self.local[i]
    }

    pub fn label(&self, i: usize) -> String {
        let parts: Vec<&str> = self.data.words[i].iter().map(|&a| self.base.basis[a as usize].label.as_str()).collect();
        format!("[{}]", parts.join("|"))
    }

    /// Shuffle product of two words (only meaningful for commutative bases).
    pub fn shuffle(&self, i: usize, j: usize) -> SparseVec {
        self.data.shuffle(i, j)
    }

    pub fn shuffle_vec(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let mut acc = Vec::new();
        for (i, x) in a {
            for (j, y) in b {
                let c = x * y;
                for (k, z) in self.shuffle(*i, *j) {
                    acc.push((k, &c * &z));
                }
            }
        }
        svec::normalize(acc)
    }

    pub fn d_vec(&self, a: &SparseVec) -> SparseVec {
        let mut acc = Vec::new();
        for (i, x) in a {
            for (k, z) in &self.d[*i] {
                acc.push((*k, x * z));
            }
        }
        svec::normalize(acc)
    }

    /// The reduced complex as a [`ChainComplex`], complete in all weights up
    /// to the bound.
    pub fn chain_complex(&self) -> ChainComplex {
        let mut space = BigradedSpace::new();
        for i in 0..self.len() {
            space.push((self.degree[i], self.weight[i]), self.label(i));
        }
        let mut cols: HashMap<Cell, Vec<SparseVec>> = HashMap::new();
        for i in 0..self.len() {
            let (cell, _) = self.local[i];
            let v: SparseVec = svec::normalize(self.d[i].iter().map(|(k, c)| (self.local[*k].1, c.clone())).collect());
            cols.entry(cell).or_default().push(v);
        }
        let mut c = ChainComplex::new(self.field(), space).with_complete_weights(0..=self.base.max_weight);
        for (cell, cs) in cols {
            c.set_differential_columns(cell, &cs).expect("bar differential shape");
        }
        c
    }

    /// The bar complex as a commutative dg algebra under the shuffle product.
    pub fn as_algebra(&self) -> Result<Algebra, BarError> {
        if !self.base.commutative {
            return Err(BarError::Unsupported("shuffle algebra of a non-commutative bar complex".into()));
        }
        let data = self.data.clone();
        let basis: Vec<BasisElem> = (0..self.len())
            .map(|i| BasisElem { label: self.label(i), degree: self.degree[i], weight: self.weight[i] })
            .collect();
        Ok(Algebra {
            name: format!("B({})", self.base.name),
            field: self.field(),
            basis,
            product: ProductRule::Computed(Arc::new(move |i, j| data.shuffle(i, j))),
            differential: Some(self.d.clone()),
            commutative: true,
            associative: true,
            weight_additive: true,
            max_weight: self.base.max_weight,
        })
    }
}

/// Reduced bar construction. The differential is checked to square to zero.
pub fn bar(a: &Algebra) -> Result<BarComplex, BarError> {
    if !a.associative {
        return Err(BarError::InvalidInput(format!("{} is not associative", a.name)));
    }
    if !a.weight_additive {
        return Err(BarError::InvalidInput("bar construction needs a weight-additive product".into()));
    }
    if let Some(b) = a.basis.iter().find(|b| b.weight == 0) {
        return Err(BarError::InvalidInput(format!("augmentation ideal element {} has weight 0", b.label)));
    }
    if matches!(a.product, ProductRule::Table(_)) && a.dim() <= 64 {
        a.check_associative().map_err(|e| BarError::InvalidInput(e.to_string()))?;
    }
    let field = a.field;
    let wmax = a.max_weight;
    let letter_sdeg: Vec<i64> = a.basis.iter().map(|b| b.degree + 1).collect();
    // words by weight
    let mut by_weight: Vec<Vec<Vec<u32>>> = vec![Vec::new(); wmax as usize + 1];
    for w in 1..=wmax {
        let mut list = Vec::new();
        for (l, b) in a.basis.iter().enumerate() {
            if b.weight > w {
                continue;
            }
            if b.weight == w {
                list.push(vec![l as u32]);
            }
            for rest in &by_weight[(w - b.weight) as usize] {
                let mut v = vec![l as u32];
                v.extend(rest);
                list.push(v);
            }
        }
        by_weight[w as usize] = list;
    }
    let mut words: Vec<Vec<u32>> = by_weight.into_iter().flatten().collect();
    let deg = |w: &[u32]| -> i64 { w.iter().map(|&l| letter_sdeg[l as usize]).sum() };
    let wt = |w: &[u32]| -> u32 { w.iter().map(|&l| a.basis[l as usize].weight).sum() };
    words.sort_by(|x, y| (wt(x), deg(x), x.len(), x).cmp(&(wt(y), deg(y), y.len(), y)));
    let index: HashMap<Vec<u32>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let degree: Vec<i64> = words.iter().map(|w| deg(w)).collect();
    let weight: Vec<u32> = words.iter().map(|w| wt(w)).collect();
    let mut local = Vec::with_capacity(words.len());
    let mut counts: HashMap<Cell, usize> = HashMap::new();
    for i in 0..words.len() {
        let c = (degree[i], weight[i]);
        let k = counts.entry(c).or_insert(0);
        local.push((c, *k));
        *k += 1;
    }
    let dg: Vec<SparseVec> = (0..a.dim()).map(|i| a.d(i)).collect();
    let has_d = a.has_differential();
    let prods: HashMap<(u32, u32), SparseVec> = {
        let mut m = HashMap::new();
        for w in &words {
            for p in w.windows(2) {
                m.entry((p[0], p[1])).or_insert_with(|| a.mul(p[0] as usize, p[1] as usize));
            }
        }
        m
    };
    use rayon::prelude::*;
    let d: Vec<SparseVec> = words
        .par_iter()
        .map(|w| {
            let mut acc: Vec<(usize, FieldScalar)> = Vec::new();
            let mut eps = 0i64;
            for i in 0..w.len() {
                // internal part
                if has_d {
                    let s = -FieldScalar::sign(field, eps);
                    for (k, c) in &dg[w[i] as usize] {
                        let mut v = w.clone();
                        v[i] = *k as u32;
                        let t = index[&v];
                        acc.push((t, &s * c));
                    }
                }
                eps += letter_sdeg[w[i] as usize];
                if i + 1 < w.len() {
                    let s = FieldScalar::sign(field, eps);
                    for (k, c) in &prods[&(w[i], w[i + 1])] {
                        let mut v = w[..i].to_vec();
                        v.push(*k as u32);
                        v.extend_from_slice(&w[i + 2..]);
                        let t = index[&v];
                        acc.push((t, &s * c));
                    }
                }
            }
            svec::normalize(acc)
        })
        .collect();
    let b = BarComplex {
        base: a.clone(),
        degree,
        weight,
        d,
        data: Arc::new(WordData { field, words, index, letter_sdeg }),
        local,
    };
    // d∘d = 0
    for (i, col) in b.d.iter().enumerate() {
        if !b.d_vec(col).is_empty() {
            return Err(BarError::Internal(format!("d² != 0 on {}", b.label(i))));
        }
    }
    Ok(b)
}

/// The `n`-fold iterated bar construction, threading the shuffle product.
/// Levels `1..=n` are returned in order.
pub fn iterated_bar_levels(a: &Algebra, n: usize) -> Result<Vec<BarComplex>, BarError> {
    if n == 0 {
        return Err(BarError::InvalidInput("iteration count must be at least 1".into()));
    }
    if n >= 2 && !a.commutative {
        return Err(BarError::Unsupported("iterated bar constructions need a commutative input".into()));
    }
    let mut levels: Vec<BarComplex> = Vec::with_capacity(n);
    let mut cur = a.clone();
    for k in 0..n {
        let b = bar(&cur)?;
        if k + 1 < n {
            cur = b.as_algebra()?;
        }
        levels.push(b);
    }
    Ok(levels)
}

/// `Σ^{-n} B̄^n(Ā)` as a chain complex.
pub fn iterated_bar(a: &Algebra, n: usize) -> Result<ChainComplex, BarError> {
    let levels = iterated_bar_levels(a, n)?;
    Ok(graded::suspend(&levels.last().unwrap().chain_complex(), -(n as i64)))
}

/// E_n-homology of a commutative algebra as the homology of `Σ^{-n}B̄^n(Ā)`.
pub fn en_homology_commutative(
    a: &Algebra,
    n: usize,
    degrees: RangeInclusive<i64>,
    weights: RangeInclusive<u32>,
) -> Result<HomologyTable, BarError> {
    let c = iterated_bar(a, n)?;
    Ok(graded::homology_dims(&c, degrees, weights)?)
}

/// E_n-homology with representatives; the last bar level is returned so that
/// products of representatives can be formed with [`BarComplex::shuffle_vec`].
/// Representatives are in local (cell) coordinates of the unsuspended complex.
pub fn en_homology_with_reps(
    a: &Algebra,
    n: usize,
    degrees: RangeInclusive<i64>,
    weights: RangeInclusive<u32>,
) -> Result<(HomologyTable, BarComplex, ChainComplex), BarError> {
    let mut levels = iterated_bar_levels(a, n)?;
    let last = levels.pop().unwrap();
    let c = last.chain_complex();
    let shift = n as i64;
    let h = graded::homology(&c, (degrees.start() + shift)..=(degrees.end() + shift), weights)?;
    Ok((h.shift(-shift), last, c))
}

/// Convert between global word indices of a bar level and local coordinates of a cell.
pub fn to_local(b: &BarComplex, v: &SparseVec) -> Option<(Cell, SparseVec)> {
    let cell = b.local(v.first()?.0).0;
    let mut out = Vec::new();
    for (i, c) in v {
        let (ci, k) = b.local(*i);
        if ci != cell {
            return None;
        }
        out.push((k, c.clone()));
    }
    Some((cell, svec::normalize(out)))
}

pub fn to_global(b: &BarComplex, cell: Cell, v: &SparseVec) -> SparseVec {
    let globals: Vec<usize> = (0..b.len()).filter(|&i| b.local(i).0 == cell).collect();
    svec::normalize(v.iter().map(|(k, c)| (globals[*k], c.clone())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free::{free_commutative, GeneratorSet};

    #[test]
    fn bar_of_polynomial_ring() {
        let a = free_commutative(&GeneratorSet::simple(&[("x", 0)]), Field::Q, 6);
        let b = bar(&a).unwrap();
        let h = graded::homology_dims(&b.chain_complex(), -2..=10, 0..=6).unwrap();
        assert_eq!(h.dims(), [((1, 1), 1)].into_iter().collect());
    }

    #[test]
    fn bar_of_exterior_algebra() {
        let a = free_commutative(&GeneratorSet::simple(&[("x", 1)]), Field::Q, 6);
        let h = graded::homology_dims(&bar(&a).unwrap().chain_complex(), 0..=14, 0..=6).unwrap();
        let want: std::collections::BTreeMap<Cell, usize> = (1..=6).map(|w| ((2 * w as i64, w), 1)).collect();
        assert_eq!(h.dims(), want);
    }

    #[test]
    fn bar_of_ground_field_is_zero() {
        let a = free_commutative(&GeneratorSet::default(), Field::Q, 4);
        assert!(bar(&a).unwrap().is_empty());
    }

    #[test]
    fn shuffle_binomials() {
        // letter of even suspended degree
        let sd = |_: u32| 2i64;
        let r = shuffle_words(&[0, 0], &[0], &sd);
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|(_, s)| s % 2 == 0));
        let sd1 = |_: u32| 1i64;
        let total: i64 = shuffle_words(&[0], &[0], &sd1).iter().map(|(_, s)| if s % 2 == 0 { 1 } else { -1 }).sum();
        assert_eq!(total, 0);
    }

    #[test]
    fn iterated_bar_polynomial() {
        let a = free_commutative(&GeneratorSet::simple(&[("x", 0)]), Field::Q, 5);
        let h = en_homology_commutative(&a, 2, -2..=8, 0..=5).unwrap();
        let want: std::collections::BTreeMap<Cell, usize> = (1..=5).map(|w| ((2 * w as i64 - 2, w), 1)).collect();
        assert_eq!(h.dims(), want);
    }
}
