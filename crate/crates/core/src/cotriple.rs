//! Truncated cotriple resolutions and derived functors of indecomposables.
//!
//! Level `t` of the resolution is the underlying space of `F^t(X)`, where `F`
//! is the free functor of the variant: non-unital symmetric algebras (`SI`),
//! free `n`-Lie algebras (`nL`), free restricted Lie algebras over F2 (`rL`)
//! or free `n`-Gerstenhaber algebras `S̄(nL(-))` (`nG`). Indecomposables of
//! `F^{t+1}(X)` are exactly this space, so the faces below are already the
//! maps on indecomposables:
//!
//! * `d_0` projects onto the generators,
//! * `d_1` evaluates a free word in the structure of the level below,
//! * `d_i = F(d_{i-1})` for `i >= 2`.
//!
//! Degeneracies are never needed for homology and are not stored.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use serde::Serialize;
use thiserror::Error;

use crate::free::{
    free_lie_realized, free_restricted_lie, Algebra, BasisElem, FreeError, Generator, GeneratorSet, LieNode,
    LiePresentation,
};
use crate::graded::Cell;
use crate::lie::TorTable;
use crate::linalg::{svec, Field, FieldScalar, SparseMatrix, SparseVec};

/// Largest admissible basis of a single level unless overridden.
pub const DEFAULT_BUDGET: usize = 20_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CotripleError {
    #[error("budget exceeded at level {level}: {size} basis elements (cap {budget})")]
    Budget { level: usize, size: usize, budget: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid resolution: {0}")]
    NotFree(String),
    #[error("simplicial identity d_{i} d_{j} = d_{} d_{i} fails at level {level}", j - 1)]
    SimplicialIdentity { level: usize, i: usize, j: usize },
    #[error(transparent)]
    Free(#[from] FreeError),
}

/// Which free functor generates the resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Variant {
    SI,
    NL(i64),
    NG(i64),
    RL(i64),
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::SI => write!(f, "SI"),
            Variant::NL(n) => write!(f, "{n}L"),
            Variant::NG(n) => write!(f, "{n}G"),
            Variant::RL(n) => write!(f, "{n}rL"),
        }
    }
}

impl FromStr for Variant {
    type Err = CotripleError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CotripleError::InvalidInput(format!("unknown variant {s:?}"));
        if s.eq_ignore_ascii_case("si") {
            return Ok(Variant::SI);
        }
        for (suffix, make) in [("rL", Variant::RL as fn(i64) -> Variant), ("L", Variant::NL), ("G", Variant::NG)] {
            if let Some(n) = s.strip_suffix(suffix) {
                return n.parse().map(make).map_err(|_| bad());
            }
        }
        Err(bad())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    Cotriple(Variant),
    UserSupplied,
}

/// The object being resolved.
#[derive(Clone, Copy)]
pub enum CotripleInput<'a> {
    /// commutative algebra, with zero bracket for the `nG` variant
    Algebra(&'a Algebra),
    Lie(&'a LiePresentation),
}

/// Levels `0..=t_max` of a simplicial object, recorded through the spaces of
/// indecomposables (generators) and the linear maps the faces induce there.
#[derive(Clone, Debug)]
pub struct SimplicialAlgebraTruncation {
    pub name: String,
    pub field: Field,
    pub provenance: Provenance,
    pub max_weight: u32,
    pub generators: Vec<Vec<BasisElem>>,
    /// `faces[t][i][b]`: `d_i` of generator `b` of level `t`, in level `t-1` coordinates
    pub faces: Vec<Vec<Vec<SparseVec>>>,
    pub levelwise_free: bool,
}

#[derive(Serialize)]
struct LevelSummary {
    level: usize,
    generators: usize,
}

#[derive(Serialize)]
struct TruncationSummary<'a> {
    name: &'a str,
    provenance: Provenance,
    max_weight: u32,
    levelwise_free: bool,
    levels: Vec<LevelSummary>,
}

fn apply(map: &[SparseVec], v: &SparseVec) -> SparseVec {
    let mut acc = Vec::new();
    for (i, c) in v {
        for (k, z) in &map[*i] {
            acc.push((*k, c * z));
        }
    }
    svec::normalize(acc)
}

impl SimplicialAlgebraTruncation {
    pub fn t_max(&self) -> usize {
        self.generators.len() - 1
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.generators.iter().map(|g| g.len()).collect()
    }

    /// `d_i d_j = d_{j-1} d_i` for `i < j` on every level.
    pub fn check_identities(&self) -> Result<(), CotripleError> {
        for t in 2..=self.t_max() {
            for j in 1..=t {
                for i in 0..j {
                    for b in 0..self.generators[t].len() {
                        let lhs = apply(&self.faces[t - 1][i], &self.faces[t][j][b]);
                        let rhs = apply(&self.faces[t - 1][j - 1], &self.faces[t][i][b]);
                        if lhs != rhs {
                            return Err(CotripleError::SimplicialIdentity { level: t, i, j });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Homology of `Σ (-1)^i d_i` on the generator spaces, by simplicial
    /// degree, internal degree and weight. Valid below the top level.
    pub fn indecomposables_homology(&self) -> TorTable {
        simplicial_homology(self.field, &self.generators, &self.faces)
    }

    pub fn summary_json(&self) -> String {
        let s = TruncationSummary {
            name: &self.name,
            provenance: self.provenance,
            max_weight: self.max_weight,
            levelwise_free: self.levelwise_free,
            levels: self
                .generators
                .iter()
                .enumerate()
                .map(|(level, g)| LevelSummary { level, generators: g.len() })
                .collect(),
        };
        serde_json::to_string_pretty(&s).expect("summary serializes")
    }
}

fn simplicial_homology(field: Field, levels: &[Vec<BasisElem>], faces: &[Vec<Vec<SparseVec>>]) -> TorTable {
    let top = levels.len() - 1;
    let cells: Vec<BTreeMap<Cell, Vec<usize>>> = levels
        .iter()
        .map(|lv| {
            let mut m: BTreeMap<Cell, Vec<usize>> = BTreeMap::new();
            for (i, b) in lv.iter().enumerate() {
                m.entry((b.degree, b.weight)).or_default().push(i);
            }
            m
        })
        .collect();
    let local: Vec<Vec<usize>> = cells
        .iter()
        .zip(levels)
        .map(|(m, lv)| {
            let mut pos = vec![0; lv.len()];
            for ids in m.values() {
                for (k, &i) in ids.iter().enumerate() {
                    pos[i] = k;
                }
            }
            pos
        })
        .collect();
    // rank of the boundary leaving level t, per cell
    let mut ranks: Vec<BTreeMap<Cell, usize>> = vec![BTreeMap::new(); top + 1];
    for t in 1..=top {
        for (cell, ids) in &cells[t] {
            let rows = cells[t - 1].get(cell).map_or(0, |v| v.len());
            if rows == 0 {
                continue;
            }
            let cols: Vec<SparseVec> = ids
                .iter()
                .map(|&b| {
                    let mut acc = Vec::new();
                    for (i, f) in faces[t].iter().enumerate() {
                        let s = FieldScalar::sign(field, i as i64);
                        for (k, c) in &f[b] {
                            acc.push((local[t - 1][*k], &s * c));
                        }
                    }
                    svec::normalize(acc)
                })
                .collect();
            ranks[t].insert(*cell, SparseMatrix::from_columns(field, rows, ids.len(), &cols).rank());
        }
    }
    let mut entries = BTreeMap::new();
    for (t, m) in cells.iter().enumerate().take(top) {
        for (cell, ids) in m {
            let r_out = ranks[t].get(cell).copied().unwrap_or(0);
            let r_in = ranks[t + 1].get(cell).copied().unwrap_or(0);
            let h = ids.len() - r_out - r_in;
            if h > 0 {
                entries.insert((t, cell.0, cell.1), h);
            }
        }
    }
    TorTable { field: Some(field), entries, s_max: top.saturating_sub(1), log: Vec::new() }
}

// ---------------------------------------------------------------------------
// graded-commutative monomials

/// Sort a word of letters into a graded-commutative monomial. Returns `None`
/// when an odd letter repeats in characteristic zero.
fn sort_monomial(word: &[u32], parity: &dyn Fn(u32) -> i64, field: Field) -> Option<(Vec<u32>, i64)> {
    let mut w = word.to_vec();
    let mut e = 0i64;
    for i in 1..w.len() {
        let mut j = i;
        while j > 0 && w[j - 1] > w[j] {
            e += parity(w[j - 1]) * parity(w[j]);
            w.swap(j - 1, j);
            j -= 1;
        }
    }
    if field == Field::Q && w.windows(2).any(|p| p[0] == p[1] && parity(p[0]).rem_euclid(2) == 1) {
        return None;
    }
    Some((w, e))
}

/// Non-empty monomials of bounded weight in the given letters, in depth-first
/// order, so every proper prefix precedes its extensions.
fn enumerate_monomials(
    letters: &[(i64, u32)],
    field: Field,
    max_weight: u32,
    lengths: Option<usize>,
    budget: usize,
    level: usize,
) -> Result<Vec<Vec<u32>>, CotripleError> {
    fn rec(
        letters: &[(i64, u32)],
        field: Field,
        start: usize,
        room: u32,
        max_len: usize,
        cur: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
        budget: usize,
    ) -> bool {
        if cur.len() == max_len {
            return true;
        }
        for l in start..letters.len() {
            let (d, w) = letters[l];
            if w > room {
                continue;
            }
            let odd = field == Field::Q && d.rem_euclid(2) == 1;
            if odd && cur.last() == Some(&(l as u32)) {
                continue;
            }
            cur.push(l as u32);
            out.push(cur.clone());
            if out.len() > budget {
                return false;
            }
            let next = if odd { l + 1 } else { l };
            if !rec(letters, field, next, room - w, max_len, cur, out, budget) {
                return false;
            }
            cur.pop();
        }
        true
    }
    let mut out = Vec::new();
    let cap = if lengths.is_some() { usize::MAX } else { budget };
    let ok = rec(letters, field, 0, max_weight, lengths.unwrap_or(usize::MAX), &mut Vec::new(), &mut out, cap);
    if let Some(l) = lengths {
        out.retain(|m| m.len() == l);
    }
    if !ok || out.len() > budget {
        return Err(CotripleError::Budget { level, size: out.len(), budget });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// free levels

struct Monomials {
    monos: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    /// degree of each letter
    parity: Vec<i64>,
}

impl Monomials {
    fn new(monos: Vec<Vec<u32>>, parity: Vec<i64>) -> Self {
        let index = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        Monomials { monos, index, parity }
    }

    fn mul(&self, a: &SparseVec, b: &SparseVec, field: Field) -> SparseVec {
        let mut acc = Vec::new();
        for (i, x) in a {
            for (j, y) in b {
                let mut w = self.monos[*i].clone();
                w.extend_from_slice(&self.monos[*j]);
                let Some((m, e)) = sort_monomial(&w, &|l| self.parity[l as usize], field) else { continue };
                if let Some(&k) = self.index.get(&m) {
                    acc.push((k, &(x * y) * &FieldScalar::sign(field, e)));
                }
            }
        }
        svec::normalize(acc)
    }

    fn prefix(&self, k: usize) -> Option<usize> {
        let m = &self.monos[k];
        (m.len() > 1).then(|| self.index[&m[..m.len() - 1]])
    }
}

struct LiePart {
    lie: LiePresentation,
    construction: Vec<LieNode>,
    /// degree shift of the bracket
    n: i64,
}

enum FreeKind {
    Sym(Monomials),
    Lie(LiePart),
    Gerst { lie: LiePart, monos: Monomials, lie_mono: Vec<Option<usize>>, cache: Mutex<HashMap<(usize, usize), SparseVec>> },
}

struct FreeLevel {
    field: Field,
    basis: Vec<BasisElem>,
    /// basis index of each generator
    gen_elem: Vec<usize>,
    kind: FreeKind,
}

enum Target<'a> {
    Alg(&'a Algebra),
    Lie(&'a LiePresentation),
    Free(&'a FreeLevel),
}

impl Target<'_> {
    fn product(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        match self {
            Target::Alg(x) => x.mul_vec(a, b),
            Target::Lie(_) => unreachable!("products are never evaluated in a Lie algebra"),
            Target::Free(l) => match &l.kind {
                FreeKind::Sym(m) | FreeKind::Gerst { monos: m, .. } => m.mul(a, b, l.field),
                FreeKind::Lie(_) => unreachable!("products are never evaluated in a Lie algebra"),
            },
        }
    }

    fn bracket(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        match self {
            Target::Alg(_) => Vec::new(),
            Target::Lie(g) => g.bracket_vec(a, b),
            Target::Free(l) => match &l.kind {
                FreeKind::Sym(_) => Vec::new(),
                FreeKind::Lie(p) => p.lie.bracket_vec(a, b),
                FreeKind::Gerst { .. } => l.poisson(a, b),
            },
        }
    }

    fn xi(&self, a: &SparseVec) -> Result<SparseVec, CotripleError> {
        let missing = || CotripleError::InvalidInput("restriction requested in an unrestricted algebra".into());
        match self {
            Target::Lie(g) => g.xi_vec(a).ok_or_else(missing),
            Target::Free(FreeLevel { kind: FreeKind::Lie(p), .. }) => p.lie.xi_vec(a).ok_or_else(missing),
            _ => Err(missing()),
        }
    }
}

impl FreeLevel {
    fn build(
        field: Field,
        variant: Variant,
        below: &[BasisElem],
        max_weight: u32,
        budget: usize,
        level: usize,
    ) -> Result<FreeLevel, CotripleError> {
        let letters: Vec<(i64, u32)> = below.iter().map(|b| (b.degree, b.weight)).collect();
        match variant {
            Variant::SI => {
                let monos = enumerate_monomials(&letters, field, max_weight, None, budget, level)?;
                let basis = monos.iter().map(|m| product_elem(below, m)).collect();
                let m = Monomials::new(monos, letters.iter().map(|l| l.0).collect());
                let gen_elem = (0..below.len()).map(|w| m.index[&vec![w as u32]]).collect();
                Ok(FreeLevel { field, basis, gen_elem, kind: FreeKind::Sym(m) })
            }
            Variant::NL(n) | Variant::RL(n) => {
                let lie = free_lie_part(field, below, n, max_weight, matches!(variant, Variant::RL(_)), budget, level)?;
                let (basis, gen_elem) = (lie.lie.basis.clone(), lie_generators(&lie, below.len()));
                Ok(FreeLevel { field, basis, gen_elem, kind: FreeKind::Lie(lie) })
            }
            Variant::NG(n) => {
                let lie = free_lie_part(field, below, n, max_weight, false, budget, level)?;
                let lie_letters: Vec<(i64, u32)> = lie.lie.basis.iter().map(|b| (b.degree, b.weight)).collect();
                let monos = enumerate_monomials(&lie_letters, field, max_weight, None, budget, level)?;
                let basis = monos.iter().map(|m| product_elem(&lie.lie.basis, m)).collect();
                let m = Monomials::new(monos, lie_letters.iter().map(|l| l.0).collect());
                let lie_mono: Vec<Option<usize>> =
                    (0..lie.lie.basis.len()).map(|l| m.index.get(&vec![l as u32]).copied()).collect();
                let gen_elem = lie_generators(&lie, below.len()).iter().map(|&l| lie_mono[l].unwrap()).collect();
                Ok(FreeLevel {
                    field,
                    basis,
                    gen_elem,
                    kind: FreeKind::Gerst { lie, monos: m, lie_mono, cache: Mutex::new(HashMap::new()) },
                })
            }
        }
    }

    fn is_generator(&self, b: usize) -> Option<usize> {
        match &self.kind {
            FreeKind::Sym(m) => (m.monos[b].len() == 1).then(|| m.monos[b][0] as usize),
            FreeKind::Lie(p) => match p.construction[b] {
                LieNode::Gen(g) => Some(g),
                _ => None,
            },
            FreeKind::Gerst { lie, monos, .. } => {
                let m = &monos.monos[b];
                match (m.len(), lie.construction[m[0] as usize]) {
                    (1, LieNode::Gen(g)) => Some(g),
                    _ => None,
                }
            }
        }
    }

    /// Poisson bracket of the free `n`-Gerstenhaber algebra: `[a, -]` is a
    /// derivation of degree `|a| + n` from the left, `[-, c]` one of degree
    /// `|c| + n` from the right.
    fn poisson(&self, a: &SparseVec, b: &SparseVec) -> SparseVec {
        let mut acc = Vec::new();
        for (i, x) in a {
            for (j, y) in b {
                let c = x * y;
                for (k, z) in self.poisson_monomials(*i, *j) {
                    acc.push((k, &c * &z));
                }
            }
        }
        svec::normalize(acc)
    }

    fn poisson_monomials(&self, i: usize, j: usize) -> SparseVec {
        let FreeKind::Gerst { lie, monos, lie_mono, cache } = &self.kind else { unreachable!() };
        if let Some(v) = cache.lock().unwrap().get(&(i, j)) {
            return v.clone();
        }
        let f = self.field;
        let n = lie.n;
        let deg = |l: u32| monos.parity[l as usize];
        let single = |l: u32| vec![(lie_mono[l as usize].unwrap(), FieldScalar::one(f))];
        let prod = |parts: &[SparseVec]| -> SparseVec {
            let mut it = parts.iter();
            let first = it.next().cloned().unwrap_or_default();
            it.fold(first, |acc, p| if acc.is_empty() { acc } else { monos.mul(&acc, p, f) })
        };
        let lie_to_mono = |v: SparseVec| -> SparseVec {
            svec::normalize(v.into_iter().filter_map(|(l, c)| lie_mono[l].map(|k| (k, c))).collect())
        };
        let (ma, mb) = (&monos.monos[i], &monos.monos[j]);
        let deg_b: i64 = mb.iter().map(|&l| deg(l)).sum();
        let mut acc = Vec::new();
        for (p, &ai) in ma.iter().enumerate() {
            let after_a: i64 = ma[p + 1..].iter().map(|&l| deg(l)).sum();
            let sa = (deg_b + n) * after_a;
            for (q, &bj) in mb.iter().enumerate() {
                let before_b: i64 = mb[..q].iter().map(|&l| deg(l)).sum();
                let sb = (deg(ai) + n) * before_b;
                let br = lie_to_mono(lie.lie.br(ai as usize, bj as usize));
                if br.is_empty() {
                    continue;
                }
                let mut parts: Vec<SparseVec> = ma[..p].iter().map(|&l| single(l)).collect();
                parts.extend(mb[..q].iter().map(|&l| single(l)));
                parts.push(br);
                parts.extend(mb[q + 1..].iter().map(|&l| single(l)));
                parts.extend(ma[p + 1..].iter().map(|&l| single(l)));
                let v = prod(&parts);
                let s = FieldScalar::sign(f, sa + sb);
                for (k, z) in v {
                    acc.push((k, &s * &z));
                }
            }
        }
        let v = svec::normalize(acc);
        cache.lock().unwrap().insert((i, j), v.clone());
        v
    }

    /// Images of all basis elements under the homomorphism out of this free
    /// object determined by the images of the generators.
    fn evaluate(&self, gen_img: &[SparseVec], target: &Target) -> Result<Vec<SparseVec>, CotripleError> {
        let eval_lie = |p: &LiePart| -> Result<Vec<SparseVec>, CotripleError> {
            let mut vals: Vec<SparseVec> = Vec::with_capacity(p.construction.len());
            for node in &p.construction {
                let v = match *node {
                    LieNode::Gen(g) => gen_img[g].clone(),
                    LieNode::Br(g, y) => {
                        if gen_img[g].is_empty() || vals[y].is_empty() {
                            Vec::new()
                        } else {
                            target.bracket(&gen_img[g], &vals[y])
                        }
                    }
                    LieNode::Xi(y) => target.xi(&vals[y])?,
                };
                vals.push(v);
            }
            Ok(vals)
        };
        let eval_monos = |m: &Monomials, letter: &dyn Fn(u32) -> SparseVec| -> Vec<SparseVec> {
            let mut vals: Vec<SparseVec> = Vec::with_capacity(m.monos.len());
            for k in 0..m.monos.len() {
                let last = letter(*m.monos[k].last().unwrap());
                let v = match m.prefix(k) {
                    None => last,
                    Some(p) if vals[p].is_empty() || last.is_empty() => Vec::new(),
                    Some(p) => target.product(&vals[p], &last),
                };
                vals.push(v);
            }
            vals
        };
        match &self.kind {
            FreeKind::Sym(m) => Ok(eval_monos(m, &|l| gen_img[l as usize].clone())),
            FreeKind::Lie(p) => eval_lie(p),
            FreeKind::Gerst { lie, monos, .. } => {
                let lv = eval_lie(lie)?;
                Ok(eval_monos(monos, &|l| lv[l as usize].clone()))
            }
        }
    }
}

fn product_elem(letters: &[BasisElem], m: &[u32]) -> BasisElem {
    let parts: Vec<&str> = m.iter().map(|&l| letters[l as usize].label.as_str()).collect();
    let label = if parts.len() == 1 { parts[0].to_string() } else { format!("({})", parts.join("·")) };
    BasisElem {
        label,
        degree: m.iter().map(|&l| letters[l as usize].degree).sum(),
        weight: m.iter().map(|&l| letters[l as usize].weight).sum(),
    }
}

fn free_lie_part(
    field: Field,
    below: &[BasisElem],
    n: i64,
    max_weight: u32,
    restricted: bool,
    budget: usize,
    level: usize,
) -> Result<LiePart, CotripleError> {
    let gens = GeneratorSet::new(
        below
            .iter()
            .enumerate()
            .map(|(i, b)| Generator { name: format!("g{i}"), degree: b.degree + n, weight: b.weight })
            .collect(),
    )?;
    let real = if restricted { free_restricted_lie(&gens, max_weight) } else { free_lie_realized(&gens, field, max_weight) };
    if real.lie.basis.len() > budget {
        return Err(CotripleError::Budget { level, size: real.lie.basis.len(), budget });
    }
    let mut lie = real.lie;
    lie.shift = n;
    // labels from the construction, degrees back to the n-Lie grading
    let mut labels: Vec<String> = Vec::with_capacity(real.construction.len());
    for (k, node) in real.construction.iter().enumerate() {
        let l = match *node {
            LieNode::Gen(g) => below[g].label.clone(),
            LieNode::Br(g, y) => format!("[{},{}]", below[g].label, labels[y]),
            LieNode::Xi(y) => format!("ξ{}", labels[y]),
        };
        lie.basis[k].label = l.clone();
        lie.basis[k].degree -= n;
        labels.push(l);
    }
    Ok(LiePart { lie, construction: real.construction, n })
}

fn lie_generators(p: &LiePart, count: usize) -> Vec<usize> {
    let mut out = vec![usize::MAX; count];
    for (k, node) in p.construction.iter().enumerate() {
        if let LieNode::Gen(g) = node {
            out[*g] = k;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// resolutions

/// Levels `0..=t_max` of the cotriple resolution of the input, truncated at
/// `max_weight`. Every level is capped at `budget` basis elements.
pub fn cotriple_resolution(
    input: CotripleInput,
    variant: Variant,
    t_max: usize,
    max_weight: u32,
    budget: usize,
) -> Result<SimplicialAlgebraTruncation, CotripleError> {
    let (field, name, base) = match (input, variant) {
        (CotripleInput::Algebra(a), Variant::SI | Variant::NG(_)) => {
            if !a.commutative || !a.associative || !a.weight_additive || a.has_differential() {
                return Err(CotripleError::InvalidInput(format!(
                    "{} must be a commutative, weight-additive algebra without differential",
                    a.name
                )));
            }
            if matches!(variant, Variant::NG(_)) && a.field != Field::Q {
                return Err(CotripleError::InvalidInput("Gerstenhaber resolutions are built over Q".into()));
            }
            (a.field, a.name.clone(), a.basis.clone())
        }
        (CotripleInput::Lie(g), Variant::NL(n) | Variant::RL(n)) => {
            if g.shift != n {
                return Err(CotripleError::InvalidInput(format!("{}-Lie input for the {variant} variant", g.shift)));
            }
            if matches!(variant, Variant::RL(_)) && (g.field != Field::F2 || g.restriction.is_none()) {
                return Err(CotripleError::InvalidInput("restricted resolutions need a restricted Lie algebra over F2".into()));
            }
            (g.field, format!("{n}-Lie algebra"), g.basis.clone())
        }
        _ => return Err(CotripleError::InvalidInput(format!("input type does not match the {variant} variant"))),
    };
    if let Some(b) = base.iter().find(|b| b.weight == 0 || b.weight > max_weight) {
        return Err(CotripleError::InvalidInput(format!(
            "basis element {} has weight {} outside 1..={max_weight}",
            b.label, b.weight
        )));
    }
    if base.len() > budget {
        return Err(CotripleError::Budget { level: 0, size: base.len(), budget });
    }
    let mut levels: Vec<FreeLevel> = Vec::new();
    let mut generators = vec![base];
    let mut faces: Vec<Vec<Vec<SparseVec>>> = vec![Vec::new()];
    for t in 1..=t_max {
        let lv = FreeLevel::build(field, variant, &generators[t - 1], max_weight, budget, t)?;
        log::info!("cotriple {variant} level {t}: {} basis elements", lv.basis.len());
        let below_len = generators[t - 1].len();
        let unit = |w: usize| vec![(w, FieldScalar::one(field))];
        let mut fs: Vec<Vec<SparseVec>> = Vec::with_capacity(t + 1);
        fs.push((0..lv.basis.len()).map(|b| lv.is_generator(b).map_or(Vec::new(), unit)).collect());
        let units: Vec<SparseVec> = (0..below_len).map(unit).collect();
        let target = match (t, input) {
            (1, CotripleInput::Algebra(a)) => Target::Alg(a),
            (1, CotripleInput::Lie(g)) => Target::Lie(g),
            _ => Target::Free(&levels[t - 2]),
        };
        fs.push(lv.evaluate(&units, &target)?);
        for i in 2..=t {
            let prev = &levels[t - 2];
            let img: Vec<SparseVec> = faces[t - 1][i - 1]
                .iter()
                .map(|v| svec::normalize(v.iter().map(|(k, c)| (prev.gen_elem[*k], c.clone())).collect()))
                .collect();
            fs.push(lv.evaluate(&img, &Target::Free(prev))?);
        }
        generators.push(lv.basis.clone());
        faces.push(fs);
        levels.push(lv);
    }
    let p = SimplicialAlgebraTruncation {
        name,
        field,
        provenance: Provenance::Cotriple(variant),
        max_weight,
        generators,
        faces,
        levelwise_free: variant == Variant::SI,
    };
    p.check_identities()?;
    Ok(p)
}

/// `𝕃_p Q` for `p <= p_max`, by simplicial degree, internal degree and weight.
pub fn derived_indecomposables(
    input: CotripleInput,
    variant: Variant,
    p_max: usize,
    max_weight: u32,
    budget: usize,
) -> Result<TorTable, CotripleError> {
    Ok(cotriple_resolution(input, variant, p_max + 1, max_weight, budget)?.indecomposables_homology())
}

/// Constant resolution of `k[x]` (`|x| = 0`, weight 1): one generator per
/// level and identity faces.
pub fn constant_polynomial_resolution(field: Field, t_max: usize, max_weight: u32) -> SimplicialAlgebraTruncation {
    let x = BasisElem { label: "x".into(), degree: 0, weight: 1 };
    let one = vec![(0, FieldScalar::one(field))];
    SimplicialAlgebraTruncation {
        name: "k[x]".into(),
        field,
        provenance: Provenance::UserSupplied,
        max_weight,
        generators: vec![vec![x]; t_max + 1],
        faces: (0..=t_max).map(|t| if t == 0 { Vec::new() } else { vec![vec![one.clone()]; t + 1] }).collect(),
        levelwise_free: true,
    }
}

/// Simplicial bar construction `B(k[x], k[y], k)` with `y ↦ x^power`,
/// resolving `k[x]/x^power`. Level `t` is free on `x, y_1, ..., y_t`.
pub fn truncated_polynomial_resolution(
    field: Field,
    power: u32,
    t_max: usize,
    max_weight: u32,
) -> Result<SimplicialAlgebraTruncation, CotripleError> {
    if power < 2 {
        return Err(CotripleError::InvalidInput("power must be at least 2".into()));
    }
    let gens = |t: usize| -> Vec<BasisElem> {
        let mut v = vec![BasisElem { label: "x".into(), degree: 0, weight: 1 }];
        v.extend((1..=t).map(|j| BasisElem { label: format!("y{j}"), degree: 0, weight: power }));
        v
    };
    let one = FieldScalar::one(field);
    let mut faces = vec![Vec::new()];
    for t in 1..=t_max {
        let mut fs = Vec::new();
        for i in 0..=t {
            // index 0 is x, index j is y_j
            let img: Vec<SparseVec> = (0..=t)
                .map(|j| {
                    let target = if j == 0 {
                        Some(0)
                    } else if i == 0 {
                        // y_1 ↦ x^power is decomposable
                        (j > 1).then(|| j - 1)
                    } else if i == t {
                        (j < t).then_some(j)
                    } else if j <= i {
                        Some(j)
                    } else {
                        Some(j - 1)
                    };
                    target.map_or(Vec::new(), |k| vec![(k, one.clone())])
                })
                .collect();
            fs.push(img);
        }
        faces.push(fs);
    }
    let p = SimplicialAlgebraTruncation {
        name: format!("k[x]/x^{power}"),
        field,
        provenance: Provenance::UserSupplied,
        max_weight,
        generators: (0..=t_max).map(gens).collect(),
        faces,
        levelwise_free: true,
    };
    p.check_identities()?;
    Ok(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PowerKind {
    Sym,
    Lambda,
}

/// Homology of the levelwise `Sym^ℓ` or `Λ^ℓ` of the indecomposables of a
/// levelwise-free simplicial algebra. Entry `(s, degree, weight)` is `H_s`.
pub fn kahler_fiber_powers(
    p: &SimplicialAlgebraTruncation,
    l: usize,
    kind: PowerKind,
    budget: usize,
) -> Result<TorTable, CotripleError> {
    if !p.levelwise_free {
        return Err(CotripleError::NotFree(format!("{} is not recorded as levelwise free", p.name)));
    }
    if l == 0 {
        return Err(CotripleError::InvalidInput("power must be positive".into()));
    }
    let flip = i64::from(kind == PowerKind::Lambda);
    let mut levels = Vec::new();
    let mut tables: Vec<Monomials> = Vec::new();
    for (t, g) in p.generators.iter().enumerate() {
        let letters: Vec<(i64, u32)> = g.iter().map(|b| (b.degree + flip, b.weight)).collect();
        let monos = enumerate_monomials(&letters, p.field, p.max_weight, Some(l), budget, t)?;
        levels.push(monos.iter().map(|m| product_elem(g, m)).collect::<Vec<_>>());
        tables.push(Monomials::new(monos, letters.iter().map(|x| x.0).collect()));
    }
    let mut faces = vec![Vec::new()];
    for t in 1..p.generators.len() {
        let below = &tables[t - 1];
        let fs = p.faces[t]
            .iter()
            .map(|f| {
                tables[t]
                    .monos
                    .iter()
                    .map(|m| {
                        let mut terms: Vec<(Vec<u32>, FieldScalar)> = vec![(Vec::new(), FieldScalar::one(p.field))];
                        for &v in m {
                            let mut next = Vec::new();
                            for (w, c) in &terms {
                                for (u, z) in &f[v as usize] {
                                    let mut w2 = w.clone();
                                    w2.push(*u as u32);
                                    next.push((w2, c * z));
                                }
                            }
                            terms = next;
                        }
                        let mut acc = Vec::new();
                        for (w, c) in terms {
                            let Some((s, e)) = sort_monomial(&w, &|x| below.parity[x as usize], p.field) else { continue };
                            if let Some(&k) = below.index.get(&s) {
                                acc.push((k, &c * &FieldScalar::sign(p.field, e)));
                            }
                        }
                        svec::normalize(acc)
                    })
                    .collect()
            })
            .collect();
        faces.push(fs);
    }
    Ok(simplicial_homology(p.field, &levels, &faces))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::free::{free_commutative, truncated_polynomial};

    fn trunc(power: u32, w: u32) -> Algebra {
        let x = Generator { name: "x".into(), degree: 0, weight: 1 };
        truncated_polynomial(&x, Field::Q, power, w)
    }

    #[test]
    fn free_input_is_acyclic() {
        let a = free_commutative(&GeneratorSet::simple(&[("x", 0)]), Field::Q, 4);
        let t = derived_indecomposables(CotripleInput::Algebra(&a), Variant::SI, 2, 4, DEFAULT_BUDGET).unwrap();
        assert_eq!(t.nonzero(), BTreeMap::from([((0, 0, 1), 1)]));
    }

    #[test]
    fn andre_quillen_of_truncated_polynomial() {
        let a = trunc(3, 5);
        let t = derived_indecomposables(CotripleInput::Algebra(&a), Variant::SI, 2, 5, DEFAULT_BUDGET).unwrap();
        assert_eq!(t.nonzero(), BTreeMap::from([((0, 0, 1), 1), ((1, 0, 3), 1)]));
        let h = truncated_polynomial_resolution(Field::Q, 3, 3, 5).unwrap();
        assert_eq!(kahler_fiber_powers(&h, 1, PowerKind::Sym, DEFAULT_BUDGET).unwrap().nonzero(), t.nonzero());
    }

    #[test]
    fn constant_resolution_powers() {
        let p = constant_polynomial_resolution(Field::Q, 4, 6);
        for l in 1..=5 {
            let s = kahler_fiber_powers(&p, l, PowerKind::Sym, DEFAULT_BUDGET).unwrap();
            assert_eq!(s.nonzero(), BTreeMap::from([((0, 0, l as u32), 1)]));
        }
        for l in 2..=5 {
            assert!(kahler_fiber_powers(&p, l, PowerKind::Lambda, DEFAULT_BUDGET).unwrap().nonzero().is_empty());
        }
    }

    #[test]
    fn gerstenhaber_levels_are_simplicial() {
        let a = trunc(3, 3);
        for n in [1, 2] {
            let p = cotriple_resolution(CotripleInput::Algebra(&a), Variant::NG(n), 3, 3, DEFAULT_BUDGET).unwrap();
            assert!(p.check_identities().is_ok());
        }
    }

    #[test]
    fn budget_names_the_level() {
        let a = trunc(3, 6);
        match cotriple_resolution(CotripleInput::Algebra(&a), Variant::SI, 4, 6, 200) {
            Err(CotripleError::Budget { level, .. }) => assert!(level >= 2),
            other => panic!("expected a budget error, got {other:?}"),
        }
    }

    fn by_s_and_weight(t: &TorTable) -> BTreeMap<(usize, u32), usize> {
        let mut m = BTreeMap::new();
        for ((s, _, w), d) in t.nonzero() {
            *m.entry((s, w)).or_insert(0) += d;
        }
        m
    }

    #[test]
    fn lie_variant_matches_tor_bar() {
        for deg in [1, 2] {
            let gens = GeneratorSet::simple(&[("x", deg)]);
            let g = LiePresentation::abelian(&gens, Field::Q, 1, 4);
            let d = derived_indecomposables(CotripleInput::Lie(&g), Variant::NL(1), 2, 4, DEFAULT_BUDGET).unwrap();
            let tor = crate::lie::tor_bar(&g, 3, 4, None).unwrap();
            let shifted: BTreeMap<(usize, u32), usize> =
                by_s_and_weight(&tor).into_iter().filter(|((s, _), _)| *s >= 1).map(|((s, w), n)| ((s - 1, w), n)).collect();
            assert_eq!(by_s_and_weight(&d), shifted, "degree {deg}");
        }
    }

    #[test]
    fn restricted_variant_matches_periodic_tor() {
        let gens = GeneratorSet::simple(&[("x", 0)]);
        let mut g = LiePresentation::abelian(&gens, Field::F2, 1, 4);
        g.restriction = Some(vec![Vec::new()]);
        let d = derived_indecomposables(CotripleInput::Lie(&g), Variant::RL(1), 3, 4, DEFAULT_BUDGET).unwrap();
        let tor = crate::lie::tor_from_resolution(&crate::lie::periodic_resolution(-1, 5).unwrap()).unwrap();
        for p in 0..=3 {
            assert_eq!(d.dim_s(p), tor.dim_s(p + 1), "p = {p}");
        }
    }

    #[test]
    fn gerstenhaber_stability() {
        let a = trunc(3, 4);
        let one = derived_indecomposables(CotripleInput::Algebra(&a), Variant::NG(1), 2, 4, DEFAULT_BUDGET).unwrap();
        let three = derived_indecomposables(CotripleInput::Algebra(&a), Variant::NG(3), 2, 4, DEFAULT_BUDGET).unwrap();
        let moved: BTreeMap<_, _> = one.nonzero().into_iter().map(|((m, q, w), n)| ((m, 3 * q, w), n)).collect();
        assert_eq!(moved, three.nonzero());
        // internal degree zero is André–Quillen homology
        let aq = derived_indecomposables(CotripleInput::Algebra(&a), Variant::SI, 2, 4, DEFAULT_BUDGET).unwrap();
        let zero: BTreeMap<_, _> = one.nonzero().into_iter().filter(|((_, q, _), _)| *q == 0).collect();
        assert_eq!(zero, aq.nonzero());
    }

    #[test]
    fn variant_names_round_trip() {
        for v in [Variant::SI, Variant::NL(1), Variant::NG(3), Variant::RL(1)] {
            assert_eq!(v.to_string().parse::<Variant>().unwrap(), v);
        }
    }
}
