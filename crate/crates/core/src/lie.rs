//! Lie algebra homology and Tor over enveloping algebras: Chevalley–Eilenberg
//! complexes, the outer derivation Lie algebra of a free associative algebra,
//! explicit free resolutions (May's resolution and the periodic one over
//! `F2[x]/x²`), and bar-resolution Tor as a generic oracle.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::free::{enveloping, shift_lie, BasisElem, EnvelopingAlgebra, FreeError, GeneratorSet, LiePresentation, PbwElem};
use crate::graded::{self, BigradedSpace, Cell, ChainComplex, GradedError, HomologyTable};
use crate::linalg::{rank_of, svec, Field, FieldScalar, SpanBasis, SparseMatrix, SparseVec};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LieError {
    #[error(transparent)]
    Presentation(#[from] FreeError),
    #[error("shift {0} Lie algebra; transport to shift 0 first")]
    NotShiftZero(i64),
    #[error("window too small: {0}")]
    Window(String),
    #[error("resolution is not exact at P_{index}, degree {degree}, weight {weight}")]
    NotExact { index: usize, degree: i64, weight: u32 },
    #[error("resolution composite d∘d is nonzero at P_{0}")]
    NotComplex(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Graded(#[from] GradedError),
}

// ---------------------------------------------------------------------------
// Chevalley–Eilenberg complexes

/// Chains `S(σg)`: graded-symmetric monomials in the suspensions `σa` of
/// degree `|a| + 1`. A monomial of `s` factors is a wedge of length `s`.
pub struct CEComplex {
    pub base: LiePresentation,
    pub complex: ChainComplex,
    /// Sorted factor lists, indexed like the cells of `complex`.
    pub wedges: BTreeMap<Cell, Vec<Vec<u32>>>,
    pub max_weight: u32,
    pub weight_filter: Option<u32>,
}

impl CEComplex {
    /// Number of factors of each basis chain, per cell.
    pub fn lengths(&self, cell: Cell) -> Vec<usize> {
        self.wedges.get(&cell).map_or_else(Vec::new, |v| v.iter().map(|w| w.len()).collect())
    }
}

/// The CE complex of a 0-Lie algebra on chains of weight `<= max_weight`, or
/// only of weight `f` when `weight_filter = Some(f)`. Brackets landing above
/// the presentation's weight bound are dropped, so this is the CE complex of
/// the weight truncation.
pub fn ce_complex(g: &LiePresentation, max_weight: u32, weight_filter: Option<u32>) -> Result<CEComplex, LieError> {
    if g.shift != 0 {
        return Err(LieError::NotShiftZero(g.shift));
    }
    g.check()?;
    let field = g.field;
    let sd: Vec<i64> = g.basis.iter().map(|b| b.degree + 1).collect();
    let odd = |i: usize| sd[i].rem_euclid(2) == 1;
    if let Some(i) = (0..g.dim()).find(|&i| g.basis[i].weight == 0 && !odd(i)) {
        return Err(LieError::Unsupported(format!(
            "{} has weight 0 and even suspension, so chain cells are infinite",
            g.basis[i].label
        )));
    }
    let top = weight_filter.unwrap_or(max_weight).min(max_weight);
    let mut all: Vec<Vec<u32>> = Vec::new();
    fn rec(g: &LiePresentation, odd: &dyn Fn(usize) -> bool, start: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        out.push(cur.clone());
        for i in start..g.dim() {
            let w = g.basis[i].weight;
            if w > left {
                continue;
            }
            // odd factors appear at most once
            let next = if odd(i) { i + 1 } else { i };
            cur.push(i as u32);
            rec(g, odd, next, left - w, cur, out);
            cur.pop();
        }
    }
    rec(g, &odd, 0, top, &mut Vec::new(), &mut all);
    let wt = |m: &[u32]| m.iter().map(|&i| g.basis[i as usize].weight).sum::<u32>();
    let deg = |m: &[u32]| m.iter().map(|&i| sd[i as usize]).sum::<i64>();
    if let Some(f) = weight_filter {
        all.retain(|m| wt(m) == f);
    }
    let mut wedges: BTreeMap<Cell, Vec<Vec<u32>>> = BTreeMap::new();
    for m in all {
        wedges.entry((deg(&m), wt(&m))).or_default().push(m);
    }
    let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut space = BigradedSpace::new();
    for (cell, ms) in &mut wedges {
        ms.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        for (p, m) in ms.iter().enumerate() {
            index.insert(m.clone(), p);
            let label = if m.is_empty() {
                "1".to_string()
            } else {
                m.iter().map(|&i| g.basis[i as usize].label.clone()).collect::<Vec<_>>().join("∧")
            };
            space.push(*cell, label);
        }
    }
    let weights = match weight_filter {
        Some(f) => f..=f,
        None => 0..=max_weight,
    };
    let mut complex = ChainComplex::new(field, space).with_complete_weights(weights);
    let cols: Vec<(Cell, Vec<SparseVec>)> = wedges
        .par_iter()
        .map(|(cell, ms)| {
            let cols = ms
                .iter()
                .map(|m| {
                    let mut acc = Vec::new();
                    let n = m.len();
                    for p in 0..n {
                        for q in p + 1..n {
                            let (a, b) = (m[p] as usize, m[q] as usize);
                            let br = g.br(a, b);
                            if br.is_empty() {
                                continue;
                            }
                            let before_p: i64 = m[..p].iter().map(|&i| sd[i as usize]).sum();
                            let before_q: i64 = m[..q].iter().map(|&i| sd[i as usize]).sum::<i64>() - sd[a];
                            let e1 = sd[a] * before_p + sd[b] * before_q + sd[a];
                            let rest: Vec<u32> = m.iter().enumerate().filter(|&(k, _)| k != p && k != q).map(|(_, &i)| i).collect();
                            for (c, coef) in br {
                                if odd(c) && rest.contains(&(c as u32)) {
                                    continue;
                                }
                                let pos = rest.iter().position(|&i| i as usize > c).unwrap_or(rest.len());
                                let e2 = sd[c] * rest[..pos].iter().map(|&i| sd[i as usize]).sum::<i64>();
                                let mut t = rest.clone();
                                t.insert(pos, c as u32);
                                if let Some(&ti) = index.get(&t) {
                                    acc.push((ti, &FieldScalar::sign(field, e1 + e2) * &coef));
                                }
                            }
                        }
                    }
                    svec::normalize(acc)
                })
                .collect();
            (*cell, cols)
        })
        .collect();
    for (cell, cs) in cols {
        complex.set_differential_columns(cell, &cs)?;
    }
    Ok(CEComplex { base: g.clone(), complex, wedges, max_weight, weight_filter })
}

/// Homology of [`ce_complex`] on the given window.
pub fn ce_homology(
    g: &LiePresentation,
    degrees: std::ops::RangeInclusive<i64>,
    max_weight: u32,
    weight_filter: Option<u32>,
) -> Result<HomologyTable, LieError> {
    let ce = ce_complex(g, max_weight, weight_filter)?;
    let weights = match weight_filter {
        Some(f) => f..=f,
        None => 0..=max_weight,
    };
    Ok(graded::homology(&ce.complex, degrees, weights)?)
}

// ---------------------------------------------------------------------------
// Derivations of the free non-unital associative algebra

/// `D_{g,v}`: the derivation sending generator `g` to the word `v` and the
/// other generators to zero.
fn apply_derivation(g: u16, v: &[u16], word: &[u16]) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    for (k, &l) in word.iter().enumerate() {
        if l == g {
            let mut w = word[..k].to_vec();
            w.extend_from_slice(v);
            w.extend_from_slice(&word[k + 1..]);
            out.push(w);
        }
    }
    out
}

/// `Der(T̄V)` modulo inner derivations, for degree-0 generators, as a 1-Lie
/// algebra in degree -1. Basis: the `D_{g,v}` (weight `len(v) - 1`) that are
/// not pivots of the inner derivation span; brackets are commutators reduced
/// modulo inner derivations and truncated at `max_weight`.
pub fn derivation_lie(gens: &GeneratorSet, field: Field, max_weight: u32) -> Result<LiePresentation, LieError> {
    if gens.gens.iter().any(|g| g.degree != 0) {
        return Err(LieError::Unsupported("derivations are built for degree-0 generators".into()));
    }
    let n = gens.len() as u16;
    let one = FieldScalar::one(field);
    // all D_{g,v} by weight
    let mut ders: Vec<(u16, Vec<u16>)> = Vec::new();
    let mut words: Vec<Vec<u16>> = vec![Vec::new()];
    for _ in 0..=max_weight {
        let mut next = Vec::new();
        for w in &words {
            for l in 0..n {
                let mut v = w.clone();
                v.push(l);
                next.push(v);
            }
        }
        for v in &next {
            for g in 0..n {
                ders.push((g, v.clone()));
            }
        }
        words = next;
    }
    let dindex: HashMap<(u16, Vec<u16>), usize> = ders.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect();
    // inner derivations ad_u for words u of length 1..=max_weight
    let mut inner = SpanBasis::new(field);
    let mut us: Vec<Vec<u16>> = vec![Vec::new()];
    for _ in 1..=max_weight {
        let mut next = Vec::new();
        for u in &us {
            for l in 0..n {
                let mut v = u.clone();
                v.push(l);
                next.push(v);
            }
        }
        for u in &next {
            let mut vec = Vec::new();
            for g in 0..n {
                let mut ug = u.clone();
                ug.push(g);
                let mut gu = vec![g];
                gu.extend_from_slice(u);
                vec.push((dindex[&(g, ug)], one.clone()));
                vec.push((dindex[&(g, gu)], -one.clone()));
            }
            inner.insert(&svec::normalize(vec));
        }
        us = next;
    }
    let pivots: std::collections::BTreeSet<usize> = inner.pivots().into_iter().collect();
    let kept: Vec<usize> = (0..ders.len()).filter(|i| !pivots.contains(i)).collect();
    let kpos: HashMap<usize, usize> = kept.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let label = |g: u16, v: &[u16]| {
        let name = |l: u16| gens.gens[l as usize].name.clone();
        format!("D_{{{},{}}}", name(g), v.iter().map(|&l| name(l)).collect::<String>())
    };
    let basis: Vec<BasisElem> = kept
        .iter()
        .map(|&i| {
            let (g, v) = &ders[i];
            BasisElem { label: label(*g, v), degree: -1, weight: v.len() as u32 - 1 }
        })
        .collect();
    let mut bracket = HashMap::new();
    for (p, &i) in kept.iter().enumerate() {
        for (q, &j) in kept.iter().enumerate() {
            let (g, v) = &ders[i];
            let (h, w) = &ders[j];
            if basis[p].weight + basis[q].weight > max_weight {
                continue;
            }
            // [D_{g,v}, D_{h,w}] = D_{h, D_{g,v}(w)} - D_{g, D_{h,w}(v)}
            let mut acc = Vec::new();
            for x in apply_derivation(*g, v, w) {
                acc.push((dindex[&(*h, x)], one.clone()));
            }
            for x in apply_derivation(*h, w, v) {
                acc.push((dindex[&(*g, x)], -one.clone()));
            }
            let (rem, _) = inner.reduce(&svec::normalize(acc));
            let v: SparseVec = svec::normalize(rem.into_iter().map(|(k, c)| (kpos[&k], c)).collect());
            if !v.is_empty() {
                bracket.insert((p, q), v);
            }
        }
    }
    Ok(LiePresentation { field, shift: 1, basis, bracket, restriction: None, max_weight })
}

// ---------------------------------------------------------------------------
// Free resolutions over enveloping algebras

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionGenerator {
    pub label: String,
    pub degree: i64,
    pub weight: u32,
}

/// Element of a free right module: (generator, PBW monomial) ↦ coefficient.
pub type ModElem = BTreeMap<(usize, Vec<u16>), FieldScalar>;

/// A free resolution `… → P_1 → P_0 = 𝔘 → k` of right 𝔘-modules.
/// `maps[i][g]` is the image of generator `g` of `P_i` in `P_{i-1}`.
#[derive(Clone, Debug)]
pub struct ModuleResolution {
    pub name: String,
    pub ring: EnvelopingAlgebra,
    pub generators: Vec<Vec<ResolutionGenerator>>,
    pub maps: Vec<Vec<Vec<(usize, PbwElem)>>>,
}

/// Triply graded Tor: (homological index, internal degree, weight) ↦ dim.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TorTable {
    pub field: Option<Field>,
    pub entries: BTreeMap<(usize, i64, u32), usize>,
    pub s_max: usize,
    pub log: Vec<String>,
}

/// One bookkeeping shift applied to `(s, internal degree)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reindex {
    pub label: String,
    pub ds: i64,
    pub ddegree: i64,
}

impl TorTable {
    pub fn dim(&self, s: usize, degree: i64, weight: u32) -> usize {
        self.entries.get(&(s, degree, weight)).copied().unwrap_or(0)
    }

    /// Total dimension of `Tor_s`.
    pub fn dim_s(&self, s: usize) -> usize {
        self.entries.iter().filter(|((t, _, _), _)| *t == s).map(|(_, d)| d).sum()
    }

    /// Nonzero entries only.
    pub fn nonzero(&self) -> BTreeMap<(usize, i64, u32), usize> {
        self.entries.iter().filter(|(_, &d)| d > 0).map(|(k, d)| (*k, *d)).collect()
    }

    /// Apply the shifts in order, then collapse to total degree `s + internal`.
    /// Entries pushed to negative `s` are dropped. Every step is logged.
    pub fn reindex(&self, steps: &[Reindex]) -> (HomologyTable, Vec<String>) {
        let mut log = Vec::new();
        let mut cur: Vec<((i64, i64, u32), usize)> =
            self.nonzero().into_iter().map(|((s, d, w), n)| ((s as i64, d, w), n)).collect();
        for st in steps {
            let line = format!("{}: s ↦ s{:+}, internal ↦ internal{:+}", st.label, st.ds, st.ddegree);
            log::info!("{line}");
            log.push(line);
            cur = cur.into_iter().map(|((s, d, w), n)| ((s + st.ds, d + st.ddegree, w), n)).collect();
        }
        let dropped: usize = cur.iter().filter(|((s, _, _), _)| *s < 0).map(|(_, n)| n).sum();
        if dropped > 0 {
            let line = format!("dropped {dropped} classes in negative homological index");
            log::info!("{line}");
            log.push(line);
        }
        let mut dims: BTreeMap<Cell, usize> = BTreeMap::new();
        for ((s, d, w), n) in cur {
            if s >= 0 {
                *dims.entry((s + d, w)).or_insert(0) += n;
            }
        }
        let line = "collapse: total degree = s + internal".to_string();
        log::info!("{line}");
        log.push(line);
        let (lo, hi) = dims.keys().fold((0, 0), |(a, b), (d, _)| (a.min(*d), b.max(*d)));
        let wmax = dims.keys().map(|(_, w)| *w).max().unwrap_or(0);
        let field = self.field.unwrap_or(Field::Q);
        (HomologyTable::from_dims(field, lo..=hi, 0..=wmax, dims), log)
    }
}

fn add_elem(acc: &mut ModElem, key: (usize, Vec<u16>), c: FieldScalar) {
    let v = match acc.remove(&key) {
        Some(x) => &x + &c,
        None => c,
    };
    if !v.is_zero() {
        acc.insert(key, v);
    }
}

impl ModuleResolution {
    pub fn field(&self) -> Field {
        self.ring.field()
    }

    /// Highest homological index with generators.
    pub fn length(&self) -> usize {
        self.generators.len() - 1
    }

    /// `d` on an element of `P_i`: right-linear, `d(g ⊗ u) = d(g) · u`.
    pub fn apply(&self, i: usize, x: &ModElem) -> ModElem {
        let mut out = ModElem::new();
        if i == 0 {
            return out;
        }
        for ((g, u), c) in x {
            for (h, coef) in &self.maps[i][*g] {
                for (m, a) in coef {
                    for (mm, b) in self.ring.mul_monomials(m, u) {
                        add_elem(&mut out, (*h, mm), &(c * a) * &b);
                    }
                }
            }
        }
        out
    }

    fn gen_elem(&self, g: usize) -> ModElem {
        let mut x = ModElem::new();
        x.insert((g, Vec::new()), FieldScalar::one(self.field()));
        x
    }

    /// `d∘d = 0`; right-linearity reduces this to generators.
    pub fn check_composites(&self) -> Result<(), LieError> {
        for i in 2..=self.length() {
            for g in 0..self.generators[i].len() {
                if !self.apply(i - 1, &self.apply(i, &self.gen_elem(g))).is_empty() {
                    return Err(LieError::NotComplex(i));
                }
            }
        }
        for g in 0..self.generators.get(1).map_or(0, |v| v.len()) {
            let x = self.apply(1, &self.gen_elem(g));
            if x.contains_key(&(0, Vec::new())) {
                return Err(LieError::NotComplex(1));
            }
        }
        Ok(())
    }

    /// Basis of `P_i` in the cell, PBW length `<= max_length`.
    fn cell_basis(&self, i: usize, cell: Cell, max_length: usize) -> Vec<(usize, Vec<u16>)> {
        let mut out = Vec::new();
        for (g, gen) in self.generators[i].iter().enumerate() {
            if gen.weight > cell.1 {
                continue;
            }
            for m in self.ring.monomials(cell.1 - gen.weight, max_length, true) {
                if gen.degree + self.ring.degree(&m) == cell.0 && gen.weight + self.ring.weight(&m) == cell.1 {
                    out.push((g, m));
                }
            }
        }
        out
    }

    fn cells(&self, i: usize, max_weight: u32, max_length: usize) -> Vec<Cell> {
        let mut cells = std::collections::BTreeSet::new();
        for gen in &self.generators[i] {
            if gen.weight > max_weight {
                continue;
            }
            for m in self.ring.monomials(max_weight - gen.weight, max_length, true) {
                cells.insert((gen.degree + self.ring.degree(&m), gen.weight + self.ring.weight(&m)));
            }
        }
        cells.into_iter().collect()
    }

    /// Exactness at `P_i` (at `P_0`, exactness of `P_1 → P_0 → k`) on all
    /// cells of weight `<= max_weight`: every cycle of PBW length `<= L` is a
    /// boundary of an element of PBW length `<= L + 1`.
    pub fn check_exactness(&self, i: usize, max_weight: u32, max_length: usize) -> Result<(), LieError> {
        if i + 1 > self.length() {
            return Err(LieError::Window(format!("need P_{} to test exactness at P_{i}", i + 1)));
        }
        let field = self.field();
        for cell in self.cells(i, max_weight, max_length) {
            let src = self.cell_basis(i, cell, max_length);
            let pre = self.cell_basis(i + 1, cell, max_length + 1);
            // ambient coordinates for P_i: collect keys as they appear
            let mut amb: HashMap<(usize, Vec<u16>), usize> = HashMap::new();
            for k in &src {
                let n = amb.len();
                amb.entry(k.clone()).or_insert(n);
            }
            let to_vec = |x: &ModElem, amb: &mut HashMap<(usize, Vec<u16>), usize>| -> SparseVec {
                svec::normalize(
                    x.iter()
                        .map(|(k, c)| {
                            let n = amb.len();
                            (*amb.entry(k.clone()).or_insert(n), c.clone())
                        })
                        .collect(),
                )
            };
            let cycles: Vec<SparseVec> = if i == 0 {
                // kernel of the augmentation: everything but the unit
                src.iter()
                    .filter(|(_, m)| !m.is_empty())
                    .map(|k| vec![(amb[k], FieldScalar::one(field))])
                    .collect()
            } else {
                // kernel of d_i on src
                let mut tgt: HashMap<(usize, Vec<u16>), usize> = HashMap::new();
                let cols: Vec<SparseVec> = src
                    .iter()
                    .map(|(g, m)| {
                        let mut x = ModElem::new();
                        x.insert((*g, m.clone()), FieldScalar::one(field));
                        to_vec(&self.apply(i, &x), &mut tgt)
                    })
                    .collect();
                let mat = SparseMatrix::from_columns(field, tgt.len(), src.len(), &cols);
                crate::linalg::kernel_basis_sparse(&mat)
            };
            if cycles.is_empty() {
                continue;
            }
            let bounds: Vec<SparseVec> = pre
                .iter()
                .map(|(g, m)| {
                    let mut x = ModElem::new();
                    x.insert((*g, m.clone()), FieldScalar::one(field));
                    to_vec(&self.apply(i + 1, &x), &mut amb)
                })
                .collect();
            let dim = amb.len();
            let rb = rank_of(field, &bounds, dim);
            let mut both = bounds.clone();
            both.extend(cycles);
            if rank_of(field, &both, dim) != rb {
                return Err(LieError::NotExact { index: i, degree: cell.0, weight: cell.1 });
            }
        }
        Ok(())
    }

    /// `Tor^𝔘(k,k)` as the homology of `P ⊗_𝔘 k`.
    pub fn tor(&self) -> Result<TorTable, LieError> {
        let field = self.field();
        let top = self.length();
        // P_i ⊗ k: generators; d ⊗ k keeps the constant terms
        let reduced = |i: usize, g: usize| -> SparseVec {
            let mut v = Vec::new();
            for (h, coef) in &self.maps[i][g] {
                if let Some(c) = coef.get(&Vec::<u16>::new()) {
                    v.push((*h, c.clone()));
                }
            }
            svec::normalize(v)
        };
        let mut entries = BTreeMap::new();
        // only indices < top have their outgoing and incoming maps
        for i in 0..top {
            let mut cells: BTreeMap<Cell, Vec<usize>> = BTreeMap::new();
            for (g, gen) in self.generators[i].iter().enumerate() {
                cells.entry((gen.degree, gen.weight)).or_default().push(g);
            }
            for (cell, gs) in cells {
                let out_rank = if i == 0 {
                    0
                } else {
                    let cols: Vec<SparseVec> = gs.iter().map(|&g| reduced(i, g)).collect();
                    rank_of(field, &cols, self.generators[i - 1].len())
                };
                let pos: HashMap<usize, usize> = gs.iter().enumerate().map(|(p, &g)| (g, p)).collect();
                let incoming: Vec<SparseVec> = self.generators[i + 1]
                    .iter()
                    .enumerate()
                    .filter(|(_, gen)| (gen.degree, gen.weight) == cell)
                    .map(|(h, _)| svec::normalize(reduced(i + 1, h).into_iter().filter_map(|(g, c)| pos.get(&g).map(|&p| (p, c))).collect()))
                    .collect();
                let in_rank = rank_of(field, &incoming, gs.len());
                entries.insert((i, cell.0, cell.1), gs.len() - out_rank - in_rank);
            }
        }
        Ok(TorTable { field: Some(field), entries, s_max: top.saturating_sub(1), log: Vec::new() })
    }

    /// Human-readable `generator ↦ image` listing of every stage.
    pub fn dump(&self) -> String {
        let mut s = format!("# {}\n", self.name);
        for i in 1..=self.length() {
            writeln!(s, "P_{i} → P_{}", i - 1).unwrap();
            for (g, gen) in self.generators[i].iter().enumerate() {
                let terms: Vec<String> = self.maps[i][g]
                    .iter()
                    .flat_map(|(h, coef)| {
                        coef.iter().map(move |(m, c)| (h, m, c))
                    })
                    .map(|(h, m, c)| format!("{c}·{}⊗{}", self.generators[i - 1][*h].label, self.ring.label(m)))
                    .collect();
                writeln!(
                    s,
                    "  {} (deg {}, wt {}) ↦ {}",
                    gen.label,
                    gen.degree,
                    gen.weight,
                    if terms.is_empty() { "0".to_string() } else { terms.join(" + ") }
                )
                .unwrap();
            }
        }
        s
    }
}

/// The Lie algebra `⟨x₁, y₀⟩` with `[y,x] = x`, `x` of degree and weight 1,
/// `y` of degree and weight 0.
pub fn may_lie_algebra(max_weight: u32) -> LiePresentation {
    let f = Field::Q;
    let one = FieldScalar::one(f);
    let mut bracket = HashMap::new();
    // basis 0 = x, 1 = y
    bracket.insert((1, 0), vec![(0, one.clone())]);
    bracket.insert((0, 1), vec![(0, -one)]);
    LiePresentation {
        field: f,
        shift: 0,
        basis: vec![
            BasisElem { label: "x".into(), degree: 1, weight: 1 },
            BasisElem { label: "y".into(), degree: 0, weight: 0 },
        ],
        bracket,
        restriction: None,
        max_weight,
    }
}

/// May's resolution over `𝔘⟨x₁, y₀⟩`: `P_i` is free on `a_i` (degree and
/// weight `i-1`) and `b_i` (degree and weight `i`), with
/// `a₁ ↦ y`, `b₁ ↦ x`, and for `i >= 2`
/// `a_i ↦ b_{i-1}·y + (i-1)·b_{i-1} - a_{i-1}·x`, `b_i ↦ b_{i-1}·x`.
pub fn may_resolution(max_index: usize) -> Result<ModuleResolution, LieError> {
    let g = may_lie_algebra(2 * max_index as u32 + 4);
    let ring = enveloping(&g)?;
    let f = Field::Q;
    let (x, y) = (ring.generator(0), ring.generator(1));
    let scal = |c: i64, m: Vec<u16>| -> PbwElem {
        let mut e = PbwElem::new();
        if c != 0 {
            e.insert(m, FieldScalar::from_i64(f, c));
        }
        e
    };
    let mut generators = vec![vec![ResolutionGenerator { label: "1".into(), degree: 0, weight: 0 }]];
    let mut maps = vec![Vec::new()];
    for i in 1..=max_index {
        let a = ResolutionGenerator { label: format!("a{i}"), degree: i as i64 - 1, weight: i as u32 - 1 };
        let b = ResolutionGenerator { label: format!("b{i}"), degree: i as i64, weight: i as u32 };
        generators.push(vec![a, b]);
        if i == 1 {
            maps.push(vec![vec![(0, scal(1, y.clone()))], vec![(0, scal(1, x.clone()))]]);
        } else {
            let mut bi1 = scal(1, y.clone());
            bi1.insert(Vec::new(), FieldScalar::from_i64(f, i as i64 - 1));
            let da = vec![(1, bi1), (0, scal(-1, x.clone()))];
            let db = vec![(1, scal(1, x.clone()))];
            maps.push(vec![da, db]);
        }
    }
    let r = ModuleResolution { name: "May resolution over U<x1,y0>".into(), ring, generators, maps };
    r.check_composites()?;
    Ok(r)
}

/// The periodic resolution of `F2` over `F2[x]/x²` with `x` in degree
/// `j + 1`, weight 1: `P_s` free on `e_s` (degree `s(j+1)`, weight `s`),
/// `e_s ↦ e_{s-1}·x`.
pub fn periodic_resolution(j: i64, max_index: usize) -> Result<ModuleResolution, LieError> {
    let f = Field::F2;
    let gens = GeneratorSet::new(vec![crate::free::Generator { name: "x".into(), degree: j + 1, weight: 1 }])?;
    let mut g = LiePresentation::abelian(&gens, f, 0, max_index as u32 + 2);
    g.restriction = Some(vec![Vec::new()]);
    let ring = enveloping(&g)?;
    let x = ring.generator(0);
    let mut generators = vec![vec![ResolutionGenerator { label: "e0".into(), degree: 0, weight: 0 }]];
    let mut maps = vec![Vec::new()];
    for s in 1..=max_index {
        generators.push(vec![ResolutionGenerator { label: format!("e{s}"), degree: s as i64 * (j + 1), weight: s as u32 }]);
        let mut e = PbwElem::new();
        e.insert(x.clone(), FieldScalar::one(f));
        maps.push(vec![vec![(0, e)]]);
    }
    let r = ModuleResolution { name: format!("periodic resolution over F2[x_{}]/x^2", j + 1), ring, generators, maps };
    r.check_composites()?;
    Ok(r)
}

/// Tor read off a resolution (every `P_s` for `s` below the top index).
pub fn tor_from_resolution(r: &ModuleResolution) -> Result<TorTable, LieError> {
    r.tor()
}

/// `Tor^{𝔘g}_s(k,k)` for `s <= s_max` from the normalized bar complex
/// `Ū^{⊗s}`, split by (s, internal degree, weight). Lie algebras of nonzero
/// shift are transported to shift 0 first. When `g` has weight-zero elements
/// the cells are infinite: chains are filtered by total PBW length and the
/// answer is the image of `H(F_L) → H(F_{L'})` for `lengths = (L, L')`.
pub fn tor_bar(
    g: &LiePresentation,
    s_max: usize,
    max_weight: u32,
    lengths: Option<(usize, usize)>,
) -> Result<TorTable, LieError> {
    let mut log = Vec::new();
    let g = if g.shift != 0 {
        log.push(format!("transported from shift {} to shift 0", g.shift));
        shift_lie(g, 0)
    } else {
        g.clone()
    };
    let has_zero = g.basis.iter().any(|b| b.weight == 0);
    let (l, l2) = match (has_zero, lengths) {
        (_, Some((a, b))) => (a, b.max(a)),
        (false, None) => (max_weight as usize, max_weight as usize),
        (true, None) => {
            return Err(LieError::Window("weight-zero elements need a PBW length window".into()));
        }
    };
    if !has_zero && s_max as u32 > max_weight {
        return Err(LieError::Window(format!("Tor_{s_max} needs weight >= {s_max}, window has {max_weight}")));
    }
    let ring = enveloping(&g)?;
    let field = g.field;
    let mons = ring.monomials(max_weight, l2, false);
    // words of s letters, total length <= l2
    type Word = Vec<u32>;
    let mut by_s: Vec<Vec<Word>> = vec![vec![Vec::new()]];
    for s in 1..=s_max + 1 {
        let mut next = Vec::new();
        for w in &by_s[s - 1] {
            let wt: u32 = w.iter().map(|&i| ring.weight(&mons[i as usize])).sum();
            let ln: usize = w.iter().map(|&i| mons[i as usize].len()).sum();
            for (i, m) in mons.iter().enumerate() {
                if wt + ring.weight(m) <= max_weight && ln + m.len() <= l2 {
                    let mut v = w.clone();
                    v.push(i as u32);
                    next.push(v);
                }
            }
        }
        by_s.push(next);
    }
    let key = |w: &Word| -> (i64, u32, usize) {
        (
            w.iter().map(|&i| ring.degree(&mons[i as usize])).sum(),
            w.iter().map(|&i| ring.weight(&mons[i as usize])).sum(),
            w.iter().map(|&i| mons[i as usize].len()).sum(),
        )
    };
    let mon_index: HashMap<&Vec<u16>, usize> = mons.iter().enumerate().map(|(i, m)| (m, i)).collect();
    // cells[(s, deg, wt)] = words (all lengths <= l2)
    let mut cells: BTreeMap<(usize, i64, u32), Vec<(Word, usize)>> = BTreeMap::new();
    for (s, ws) in by_s.iter().enumerate() {
        for w in ws {
            let (d, wt, ln) = key(w);
            cells.entry((s, d, wt)).or_default().push((w.clone(), ln));
        }
    }
    // d[u1|..|us] = Σ_i (-1)^{ε_i} [..|u_i u_{i+1}|..], ε_i = Σ_{k<=i}(|u_k|+1)
    let diff = |w: &Word| -> Vec<(Word, FieldScalar)> {
        let mut out = Vec::new();
        let mut eps = 0i64;
        for i in 0..w.len().saturating_sub(1) {
            let m = &mons[w[i] as usize];
            eps += ring.degree(m) + 1;
            for (p, c) in ring.mul_monomials(m, &mons[w[i + 1] as usize]) {
                let Some(&pi) = mon_index.get(&p) else { continue };
                let mut v = w[..i].to_vec();
                v.push(pi as u32);
                v.extend_from_slice(&w[i + 2..]);
                out.push((v, &FieldScalar::sign(field, eps) * &c));
            }
        }
        out
    };
    let keys: Vec<(usize, i64, u32)> = cells.keys().filter(|k| k.0 <= s_max).copied().collect();
    let results: Vec<((usize, i64, u32), usize)> = keys
        .par_iter()
        .map(|&(s, d, wt)| {
            let words = &cells[&(s, d, wt)];
            let pos: HashMap<&Word, usize> = words.iter().enumerate().map(|(p, (w, _))| (w, p)).collect();
            let small: Vec<usize> = (0..words.len()).filter(|&p| words[p].1 <= l).collect();
            // cycles of F_L
            let cycles: Vec<SparseVec> = if s == 0 {
                small.iter().map(|&p| vec![(p, FieldScalar::one(field))]).collect()
            } else {
                let tgt = cells.get(&(s - 1, d, wt));
                let tpos: HashMap<&Word, usize> =
                    tgt.map_or_else(HashMap::new, |t| t.iter().enumerate().map(|(p, (w, _))| (w, p)).collect());
                let cols: Vec<SparseVec> = small
                    .iter()
                    .map(|&p| svec::normalize(diff(&words[p].0).into_iter().map(|(w, c)| (tpos[&w], c)).collect()))
                    .collect();
                let m = SparseMatrix::from_columns(field, tpos.len(), cols.len(), &cols);
                crate::linalg::kernel_basis_sparse(&m)
                    .into_iter()
                    .map(|k| k.into_iter().map(|(j, c)| (small[j], c)).collect())
                    .collect()
            };
            let bounds: Vec<SparseVec> = cells.get(&(s + 1, d, wt)).map_or_else(Vec::new, |src| {
                src.iter().map(|(w, _)| svec::normalize(diff(w).into_iter().map(|(v, c)| (pos[&v], c)).collect())).collect()
            });
            let rb = rank_of(field, &bounds, words.len());
            let mut both = bounds;
            both.extend(cycles);
            ((s, d, wt), rank_of(field, &both, words.len()) - rb)
        })
        .collect();
    let mut entries = BTreeMap::new();
    for (k, n) in results {
        entries.insert(k, n);
    }
    Ok(TorTable { field: Some(field), entries, s_max, log })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_ce_has_zero_differential() {
        let gens = GeneratorSet::simple(&[("x", 0), ("y", 0)]);
        let g = LiePresentation::abelian(&gens, Field::Q, 0, 3);
        let h = ce_homology(&g, 0..=3, 3, None).unwrap();
        assert_eq!(h.dim(0, 0), 1);
        assert_eq!(h.dim(1, 1), 2);
        assert_eq!(h.dim(2, 2), 1);
    }

    #[test]
    fn gl2_part_of_derivations() {
        let gens = GeneratorSet::simple(&[("x", 0), ("y", 0)]);
        let d = derivation_lie(&gens, Field::Q, 2).unwrap();
        d.check().unwrap();
        let dims = d.dims();
        assert_eq!(dims[&(-1, 0)], 4);
        assert_eq!(dims[&(-1, 1)], 6);
        assert_eq!(dims[&(-1, 2)], 12);
        let g0 = shift_lie(&d, 0);
        let h = ce_homology(&g0, 0..=4, 0, Some(0)).unwrap();
        let v: Vec<usize> = (0..=4).map(|s| h.dim(s, 0)).collect();
        assert_eq!(v, vec![1, 1, 0, 1, 1]);
    }

    #[test]
    fn may_resolution_is_exact() {
        let r = may_resolution(6).unwrap();
        for i in 0..=5 {
            r.check_exactness(i, 5, 4).unwrap();
        }
        let t = r.tor().unwrap();
        assert_eq!(t.nonzero(), BTreeMap::from([((0, 0, 0), 1), ((1, 0, 0), 1)]));
    }

    #[test]
    fn periodic_tor() {
        for j in [-1i64, 0, 1] {
            let r = periodic_resolution(j, 8).unwrap();
            r.check_exactness(3, 4, 4).unwrap();
            let t = r.tor().unwrap();
            for s in 0..8usize {
                assert_eq!(t.dim(s, s as i64 * (j + 1), s as u32), 1);
                assert_eq!(t.dim_s(s), 1);
            }
        }
    }

    #[test]
    fn tor_bar_matches_may() {
        let g = may_lie_algebra(3);
        let t = tor_bar(&g, 3, 3, Some((4, 8))).unwrap();
        let m = may_resolution(5).unwrap().tor().unwrap();
        for ((s, d, w), n) in t.nonzero() {
            assert_eq!(m.dim(s, d, w), n, "({s},{d},{w})");
        }
        for ((s, d, w), n) in m.nonzero() {
            if s <= 3 && w <= 3 {
                assert_eq!(t.dim(s, d, w), n, "({s},{d},{w})");
            }
        }
    }

    #[test]
    fn tor_bar_of_shifted_abelian() {
        let gens = GeneratorSet::simple(&[("x", 2)]);
        let g = LiePresentation::abelian(&gens, Field::Q, 1, 5);
        let t = tor_bar(&g, 4, 5, None).unwrap();
        for s in 0..=4usize {
            assert_eq!(t.dim_s(s), 1);
            assert_eq!(t.dim(s, 3 * s as i64, s as u32), 1);
        }
    }

    #[test]
    fn tor_bar_matches_periodic() {
        for j in [-1i64, 0] {
            let gens = GeneratorSet::new(vec![crate::free::Generator { name: "x".into(), degree: j + 1, weight: 1 }]).unwrap();
            let mut g = LiePresentation::abelian(&gens, Field::F2, 0, 6);
            g.restriction = Some(vec![Vec::new()]);
            let t = tor_bar(&g, 5, 6, None).unwrap();
            let p = periodic_resolution(j, 7).unwrap().tor().unwrap();
            for s in 0..=5usize {
                assert_eq!(t.dim_s(s), p.dim_s(s));
                assert_eq!(t.dim(s, s as i64 * (j + 1), s as u32), 1);
            }
        }
    }

    #[test]
    fn ce_matches_tor_bar() {
        let g = may_lie_algebra(3);
        let ce = ce_complex(&g, 3, None).unwrap();
        graded::validate(&ce.complex).unwrap();
        let h = graded::homology_dims(&ce.complex, -1..=8, 0..=3).unwrap();
        let t = tor_bar(&g, 4, 3, Some((4, 8))).unwrap();
        let (tt, _) = t.reindex(&[]);
        assert_eq!(h.dims(), tt.dims());
    }

    #[test]
    fn fuks_reduction_on_truncations() {
        let gens = GeneratorSet::simple(&[("x", 0), ("y", 0)]);
        for bound in [2u32, 3] {
            let d = shift_lie(&derivation_lie(&gens, Field::Q, bound).unwrap(), 0);
            let h = ce_homology(&d, 0..=6, 3, None).unwrap();
            let h0 = ce_homology(&d, 0..=6, 0, Some(0)).unwrap();
            for (cell, n) in h.dims() {
                assert_eq!(cell.1, 0, "class in weight {} for bound {bound}", cell.1);
                assert_eq!(h0.dim(cell.0, 0), n);
            }
        }
    }
}
