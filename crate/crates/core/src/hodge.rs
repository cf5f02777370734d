//! Eulerian idempotents in `Q[Σ_n]`, Hodge summands of the Hochschild
//! homology of commutative algebras with trivial coefficients, and the étale
//! test `I = I²`.

use std::collections::{BTreeMap, HashMap};
use std::ops::RangeInclusive;
use std::sync::{Mutex, OnceLock};

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bar::{bar, BarError};
use crate::free::{indecomposables, Algebra};
use crate::graded::{Cell, HomologyTable};
use crate::linalg::{svec, Field, FieldScalar, SparseMatrix, SparseVec};

/// Largest arity for which idempotents are produced unless asked otherwise.
pub const DEFAULT_ARITY_BOUND: usize = 7;

#[derive(Debug, Error)]
pub enum HodgeError {
    #[error("arity {n} exceeds the bound {bound}")]
    ArityBound { n: usize, bound: usize },
    #[error("Hodge decompositions are computed over Q, got {0}")]
    WrongField(Field),
    #[error("idempotent system failed at arity {n}: {msg}")]
    NotIdempotent { n: usize, msg: String },
    #[error("idempotent e^({l}) does not commute with the boundary at cell ({degree}, {weight})")]
    Commutation { l: usize, degree: i64, weight: u32 },
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Bar(#[from] BarError),
}

/// A permutation of `0..n` stored as its list of images.
pub type Permutation = Vec<u8>;

/// Element of the rational group algebra of `Σ_n`. Products compose as maps:
/// `(στ)(i) = σ(τ(i))`, so the action on tensors is a left action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricGroupElement {
    pub n: usize,
    pub coefficients: BTreeMap<Permutation, FieldScalar>,
}

impl SymmetricGroupElement {
    pub fn zero(n: usize) -> Self {
        SymmetricGroupElement { n, coefficients: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_perm((0..n as u8).collect(), FieldScalar::one(Field::Q))
    }

    pub fn from_perm(p: Permutation, c: FieldScalar) -> Self {
        let mut e = Self::zero(p.len());
        if !c.is_zero() {
            e.coefficients.insert(p, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn coefficient(&self, p: &[u8]) -> FieldScalar {
        self.coefficients.get(p).cloned().unwrap_or_else(|| FieldScalar::zero(Field::Q))
    }

    fn accumulate(&mut self, p: Permutation, c: FieldScalar) {
        let e = self.coefficients.entry(p).or_insert_with(|| FieldScalar::zero(Field::Q));
        *e = &*e + &c;
        if e.is_zero() {
            let key: Vec<_> = self.coefficients.iter().filter(|(_, v)| v.is_zero()).map(|(k, _)| k.clone()).collect();
            for k in key {
                self.coefficients.remove(&k);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (p, c) in &other.coefficients {
            out.accumulate(p.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &FieldScalar) -> Self {
        let mut out = Self::zero(self.n);
        for (p, x) in &self.coefficients {
            let y = x * c;
            if !y.is_zero() {
                out.coefficients.insert(p.clone(), y);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut acc: HashMap<Permutation, FieldScalar> = HashMap::new();
        for (s, x) in &self.coefficients {
            for (t, y) in &other.coefficients {
                let st: Permutation = t.iter().map(|&i| s[i as usize]).collect();
                let e = acc.entry(st).or_insert_with(|| FieldScalar::zero(Field::Q));
                *e = &*e + &(x * y);
            }
        }
        let mut out = Self::zero(self.n);
        out.coefficients = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        out
    }

    /// Place permutation of a word: the letter in position `i` moves to
    /// position `σ(i)`, with the Koszul sign of the letters' degrees.
    pub fn act(&self, word: &[u32], sdeg: &dyn Fn(u32) -> i64) -> Vec<(Vec<u32>, FieldScalar)> {
        assert_eq!(word.len(), self.n);
        let mut acc: BTreeMap<Vec<u32>, FieldScalar> = BTreeMap::new();
        for (p, c) in &self.coefficients {
            let (w, e) = permute_word(p, word, sdeg);
            let v = acc.entry(w).or_insert_with(|| FieldScalar::zero(Field::Q));
            *v = &*v + &(c * &FieldScalar::sign(Field::Q, e));
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }
}

fn permute_word(p: &[u8], word: &[u32], sdeg: &dyn Fn(u32) -> i64) -> (Vec<u32>, i64) {
    let n = word.len();
    let mut out = vec![0u32; n];
    let mut e = 0i64;
    for i in 0..n {
        out[p[i] as usize] = word[i];
        for j in i + 1..n {
            if p[i] > p[j] {
                e += sdeg(word[i]) * sdeg(word[j]);
            }
        }
    }
    (out, e)
}

// ---------------------------------------------------------------------------
// integer group algebra

/// All permutations of `0..n` in lexicographic order with a packed-key rank.
struct PermIndex {
    n: usize,
    perms: Vec<[u8; 8]>,
    /// rank by packed key, 3 bits per image
    rank: Vec<u16>,
}

impl PermIndex {
    fn new(n: usize) -> Self {
        let mut perms = Vec::new();
        let mut cur: Vec<u8> = (0..n as u8).collect();
        loop {
            let mut a = [0u8; 8];
            a[..n].copy_from_slice(&cur);
            perms.push(a);
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else { break };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        let mut rank = vec![u16::MAX; 1 << (3 * n)];
        for (k, p) in perms.iter().enumerate() {
            rank[pack(p, n) as usize] = k as u16;
        }
        PermIndex { n, perms, rank }
    }

    fn index(&self, p: &[u8]) -> usize {
        self.rank[pack(p, self.n) as usize] as usize
    }

    fn compose(&self, s: usize, t: usize) -> usize {
        let (a, b) = (&self.perms[s], &self.perms[t]);
        let mut key = 0u32;
        for i in 0..self.n {
            key |= (a[b[i] as usize] as u32) << (3 * i);
        }
        self.rank[key as usize] as usize
    }

    fn len(&self) -> usize {
        self.perms.len()
    }
}

fn pack(p: &[u8], n: usize) -> u32 {
    p[..n].iter().enumerate().fold(0, |k, (i, &x)| k | (x as u32) << (3 * i))
}

/// Dense integer element with a common denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
struct IntElem {
    num: Vec<i128>,
    den: i128,
}

impl IntElem {
    fn reduce(mut self) -> Self {
        let g = self.num.iter().fold(self.den, |g, &x| g.gcd(&x));
        if g > 1 {
            self.num.iter_mut().for_each(|x| *x /= g);
            self.den /= g;
        }
        self
    }
}

/// Product of two elements whose reduced numerators fit comfortably in i64.
fn int_mul(ix: &PermIndex, a: &[i64], b: &[i64]) -> Vec<i64> {
    let n = ix.n;
    let support: Vec<(&[u8; 8], i64)> = a.iter().enumerate().filter(|(_, x)| **x != 0).map(|(s, &x)| (&ix.perms[s], x)).collect();
    let mut out = vec![0i64; ix.len()];
    for (t, &y) in b.iter().enumerate() {
        if y == 0 {
            continue;
        }
        let tp = &ix.perms[t];
        for &(sp, x) in &support {
            let mut key = 0usize;
            for i in 0..n {
                key |= (sp[tp[i] as usize] as usize) << (3 * i);
            }
            out[ix.rank[key] as usize] += x * y;
        }
    }
    out
}

fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 1..=n.saturating_sub(k - 1) {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Shuffles of the given block type: permutations increasing on each block.
fn shuffles(blocks: &[usize]) -> Vec<Vec<u8>> {
    let n: usize = blocks.iter().sum();
    let mut labels: Vec<usize> = blocks.iter().enumerate().flat_map(|(b, &m)| std::iter::repeat_n(b, m)).collect();
    let offsets: Vec<usize> = blocks.iter().scan(0, |s, &m| Some(std::mem::replace(s, *s + m))).collect();
    let mut out = Vec::new();
    loop {
        // the shuffle sends the r-th letter of block b to the r-th position labelled b
        let mut seen = vec![0usize; blocks.len()];
        let mut sh = vec![0u8; n];
        for (pos, &b) in labels.iter().enumerate() {
            sh[offsets[b] + seen[b]] = pos as u8;
            seen[b] += 1;
        }
        out.push(sh);
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| labels[i] < labels[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| labels[j] > labels[i]).unwrap();
        labels.swap(i, j);
        labels[i + 1..].reverse();
    }
    out
}

/// Numerators of `L·e^(1)_m` for every `m <= n`, where `L = lcm(1..n)`.
fn first_idempotents(n: usize, l: i128) -> Vec<(PermIndex, Vec<i128>)> {
    (0..=n)
        .map(|m| {
            let ix = PermIndex::new(m);
            let mut v = vec![0i128; ix.len()];
            if m > 0 {
                for k in 1..=m {
                    let c = if k % 2 == 1 { l / k as i128 } else { -(l / k as i128) };
                    for comp in compositions(m, k) {
                        for u in shuffles(&comp) {
                            v[ix.index(&u)] += c;
                        }
                    }
                }
            }
            (ix, v)
        })
        .collect()
}

fn compute_idempotents(n: usize) -> Result<Vec<IntElem>, HodgeError> {
    let l: i128 = (1..=n.max(1) as i128).fold(1, |a, b| a.lcm(&b));
    let first = first_idempotents(n, l);
    let ix = &first[n].0;
    let mut out = Vec::new();
    let mut fact: i128 = 1;
    for i in 1..=n {
        fact *= i as i128;
        let mut num = vec![0i128; ix.len()];
        for comp in compositions(n, i) {
            // shuffle after the block product of the e^(1)'s
            let mut block: Vec<(Vec<u8>, i128)> = vec![(Vec::new(), 1)];
            for &m in &comp {
                let (bix, bv) = &first[m];
                let mut next = Vec::new();
                for (p, c) in &block {
                    let off = p.len() as u8;
                    for (k, &x) in bv.iter().enumerate() {
                        if x == 0 {
                            continue;
                        }
                        let mut q = p.clone();
                        q.extend(bix.perms[k][..m].iter().map(|&y| y + off));
                        next.push((q, c * x));
                    }
                }
                block = next;
            }
            let us: Vec<usize> = shuffles(&comp).iter().map(|u| ix.index(u)).collect();
            for (p, c) in &block {
                let s = ix.index(p);
                for &u in &us {
                    num[ix.compose(u, s)] += c;
                }
            }
        }
        let den = l.pow(i as u32) * fact;
        out.push(IntElem { num, den }.reduce());
    }
    verify_integer_system(n, ix, &out)?;
    Ok(out)
}

fn stirling_first(n: usize, k: usize) -> i128 {
    let mut t = vec![vec![0i128; n + 1]; n + 1];
    t[0][0] = 1;
    for i in 1..=n {
        for j in 1..=i {
            t[i][j] = t[i - 1][j - 1] + (i as i128 - 1) * t[i - 1][j];
        }
    }
    t[n][k]
}

fn verify_integer_system(n: usize, ix: &PermIndex, es: &[IntElem]) -> Result<(), HodgeError> {
    let bad = |msg: String| HodgeError::NotIdempotent { n, msg };
    let id = ix.index(&(0..n as u8).collect::<Vec<_>>());
    // sum to the identity
    let den = es.iter().fold(1i128, |a, e| a.lcm(&e.den));
    for k in 0..ix.len() {
        let s: i128 = es.iter().map(|e| e.num[k] * (den / e.den)).sum();
        if s != if k == id { den } else { 0 } {
            return Err(bad("idempotents do not sum to the identity".into()));
        }
    }
    // traces in the regular representation count permutations by cycles
    let nfact: i128 = (1..=n as i128).product();
    for (i, e) in es.iter().enumerate() {
        if e.num[id] * nfact != stirling_first(n, i + 1) * e.den {
            return Err(bad(format!("e^({}) has the wrong rank", i + 1)));
        }
    }
    let small: Vec<Vec<i64>> = es
        .iter()
        .map(|e| e.num.iter().map(|&x| i64::try_from(x).map_err(|_| bad("numerator overflow".into()))).collect())
        .collect::<Result<_, _>>()?;
    let pairs: Vec<(usize, usize)> = (0..es.len()).flat_map(|i| (0..es.len()).map(move |j| (i, j))).collect();
    let failure = pairs.par_iter().find_map_any(|&(i, j)| {
        let p = int_mul(ix, &small[i], &small[j]);
        let ok = if i == j {
            p.iter().zip(&es[i].num).all(|(x, y)| *x as i128 == y * es[i].den)
        } else {
            p.iter().all(|x| *x == 0)
        };
        (!ok).then(|| format!("e^({})e^({}) is wrong", i + 1, j + 1))
    });
    match failure {
        Some(msg) => Err(bad(msg)),
        None => Ok(()),
    }
}

type IdempotentCache = Mutex<HashMap<usize, Vec<SymmetricGroupElement>>>;

fn cache() -> &'static IdempotentCache {
    static CACHE: OnceLock<IdempotentCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// `e_n^(1), ..., e_n^(n)`: `e^(1)` is the logarithm of the total shuffle
/// element and `e^(i) = (e^(1))^{*i}/i!` in the convolution algebra. The
/// orthogonality relations are checked exactly before returning.
pub fn eulerian_idempotents(n: usize) -> Result<Vec<SymmetricGroupElement>, HodgeError> {
    eulerian_idempotents_bounded(n, DEFAULT_ARITY_BOUND)
}

pub fn eulerian_idempotents_bounded(n: usize, bound: usize) -> Result<Vec<SymmetricGroupElement>, HodgeError> {
    if n > bound || n > 8 {
        return Err(HodgeError::ArityBound { n, bound: bound.min(8) });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if let Some(v) = cache().lock().unwrap().get(&n) {
        return Ok(v.clone());
    }
    let ints = compute_idempotents(n)?;
    let ix = PermIndex::new(n);
    let out: Vec<SymmetricGroupElement> = ints
        .iter()
        .map(|e| {
            let mut s = SymmetricGroupElement::zero(n);
            for (k, &x) in e.num.iter().enumerate() {
                if x != 0 {
                    let c = FieldScalar::from_ratio(x as i64, e.den as i64);
                    s.coefficients.insert(ix.perms[k][..n].to_vec(), c);
                }
            }
            s
        })
        .collect();
    cache().lock().unwrap().insert(n, out.clone());
    Ok(out)
}

// ---------------------------------------------------------------------------
// Hodge summands

/// Homology of the `e^(ℓ)`-image of the reduced bar complex of a commutative
/// algebra (Hochschild homology with trivial coefficients), for `ℓ >= 1`.
/// The commutation `d e = e d` is checked on every cell that is used.
pub fn hodge_summand(
    a: &Algebra,
    l: usize,
    degrees: RangeInclusive<i64>,
    weights: RangeInclusive<u32>,
) -> Result<HomologyTable, HodgeError> {
    Ok(hodge_summands(a, &[l], degrees, weights)?.remove(0))
}

/// Several summands at once, sharing the bar complex.
pub fn hodge_summands(
    a: &Algebra,
    ls: &[usize],
    degrees: RangeInclusive<i64>,
    weights: RangeInclusive<u32>,
) -> Result<Vec<HomologyTable>, HodgeError> {
    if a.field != Field::Q {
        return Err(HodgeError::WrongField(a.field));
    }
    if !a.commutative {
        return Err(HodgeError::InvalidInput(format!("{} is not commutative", a.name)));
    }
    if *weights.end() > a.max_weight {
        return Err(HodgeError::InvalidInput(format!(
            "weight window ends at {} beyond the algebra's bound {}",
            weights.end(),
            a.max_weight
        )));
    }
    let b = bar(a)?;
    let sdeg = |x: u32| a.basis[x as usize].degree + 1;
    let mut cells: BTreeMap<Cell, Vec<usize>> = BTreeMap::new();
    for i in 0..b.len() {
        let (c, _) = b.local(i);
        if weights.contains(&c.1) && c.0 >= degrees.start() - 1 && c.0 <= degrees.end() + 1 {
            cells.entry(c).or_default().push(i);
        }
    }
    let longest = cells.values().flatten().map(|&i| b.word(i).len()).max().unwrap_or(0);
    if longest > DEFAULT_ARITY_BOUND {
        return Err(HodgeError::ArityBound { n: longest, bound: DEFAULT_ARITY_BOUND });
    }
    let idem: Vec<Vec<SymmetricGroupElement>> = (0..=longest).map(eulerian_idempotents).collect::<Result<_, _>>()?;
    let q = Field::Q;
    ls.iter()
        .map(|&l| {
            // e^(l) and d e^(l) on each cell, in local coordinates
            let mut e_cols: BTreeMap<Cell, Vec<SparseVec>> = BTreeMap::new();
            for (c, ids) in &cells {
                let cols = ids
                    .iter()
                    .map(|&i| {
                        let w = b.word(i);
                        if l == 0 || l > w.len() {
                            return Vec::new();
                        }
                        let v = idem[w.len()][l - 1]
                            .act(w, &sdeg)
                            .into_iter()
                            .map(|(u, x)| (b.local(b.index_of(&u).expect("permuted word in the bar complex")).1, x))
                            .collect();
                        svec::normalize(v)
                    })
                    .collect();
                e_cols.insert(*c, cols);
            }
            let mut rank_e = BTreeMap::new();
            let mut rank_de = BTreeMap::new();
            for (c, ids) in &cells {
                let n = ids.len();
                let e = SparseMatrix::from_columns(q, n, n, &e_cols[c]);
                rank_e.insert(*c, e.rank());
                let below = (c.0 - 1, c.1);
                let nb = cells.get(&below).map_or(0, |v| v.len());
                let d_cols: Vec<SparseVec> = ids
                    .iter()
                    .map(|&i| svec::normalize(b.d[i].iter().map(|(k, x)| (b.local(*k).1, x.clone())).collect()))
                    .collect();
                if nb == 0 {
                    rank_de.insert(*c, 0);
                    continue;
                }
                let d = SparseMatrix::from_columns(q, nb, n, &d_cols);
                let de = d.mul(&e).expect("shapes");
                if c.0 > *degrees.start() - 1 && cells.contains_key(&below) {
                    let eb = SparseMatrix::from_columns(q, nb, nb, &e_cols[&below]);
                    let ed = eb.mul(&d).expect("shapes");
                    if ed != de {
                        return Err(HodgeError::Commutation { l, degree: c.0, weight: c.1 });
                    }
                }
                rank_de.insert(*c, de.rank());
            }
            let mut dims = BTreeMap::new();
            for c in cells.keys().filter(|c| degrees.contains(&c.0)) {
                let above = (c.0 + 1, c.1);
                let h = rank_e[c] - rank_de[c] - rank_de.get(&above).copied().unwrap_or(0);
                dims.insert(*c, h);
            }
            Ok(HomologyTable::from_dims(q, degrees.clone(), weights.clone(), dims))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// étale test

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaleCertificate {
    pub algebra: String,
    pub etale: bool,
    /// basis of `I/I²`, empty exactly when the algebra passes
    pub indecomposables: Vec<String>,
    /// products `a·b` whose span is `I²`
    pub generating_products: Vec<(String, String)>,
}

impl EtaleCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

/// `I/I² = 0` for the augmentation ideal `I`.
pub fn etale_check(a: &Algebra) -> EtaleCertificate {
    let ind = indecomposables(a);
    let labels: Vec<String> = ind.space.cells().flat_map(|(_, l)| l.iter().cloned()).collect();
    EtaleCertificate {
        algebra: a.name.clone(),
        etale: labels.is_empty(),
        indecomposables: labels,
        generating_products: ind.generating_products,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free::{group_algebra_cyclic, product_of_fields, square_zero, truncated_polynomial, Generator};

    #[test]
    fn arity_two_closed_form() {
        let e = eulerian_idempotents(2).unwrap();
        let half = FieldScalar::from_ratio(1, 2);
        assert_eq!(e[0].coefficient(&[0, 1]), half);
        assert_eq!(e[0].coefficient(&[1, 0]), -half.clone());
        assert_eq!(e[1].coefficient(&[1, 0]), half);
    }

    #[test]
    fn rational_products_agree_with_integer_check() {
        let e = eulerian_idempotents(4).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let p = e[i].mul(&e[j]);
                if i == j {
                    assert_eq!(p, e[i]);
                } else {
                    assert!(p.is_zero());
                }
            }
        }
    }

    #[test]
    fn bound_is_enforced() {
        assert!(matches!(eulerian_idempotents(8), Err(HodgeError::ArityBound { .. })));
    }

    #[test]
    fn harrison_part_of_square_zero_is_free_lie() {
        let mut a = square_zero(Field::Q, 2, -1);
        a.max_weight = 5;
        let t = hodge_summand(&a, 1, 0..=0, 1..=5).unwrap();
        let dims: Vec<usize> = (1..=5).map(|w| t.dim(0, w)).collect();
        assert_eq!(dims, vec![2, 1, 2, 3, 6]);
    }

    #[test]
    fn summands_of_polynomial_ring() {
        let x = Generator { name: "x".into(), degree: 0, weight: 1 };
        let a = truncated_polynomial(&x, Field::Q, 7, 6);
        let ts = hodge_summands(&a, &[1, 2, 3], 0..=6, 1..=6).unwrap();
        assert_eq!(ts[0].dims(), BTreeMap::from([((1, 1), 1)]));
        assert!(ts[1].dims().is_empty() && ts[2].dims().is_empty());
    }

    #[test]
    fn etale_examples() {
        assert!(etale_check(&group_algebra_cyclic(Field::F2, 3)).etale);
        assert!(etale_check(&product_of_fields(Field::Q, 3)).etale);
        let x = Generator { name: "x".into(), degree: 0, weight: 1 };
        let c = etale_check(&truncated_polynomial(&x, Field::Q, 2, 4));
        assert!(!c.etale);
        assert_eq!(c.indecomposables, vec!["x".to_string()]);
    }
}
