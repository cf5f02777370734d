use std::collections::BTreeMap;

use enhom::bar;
use enhom::cotriple::{cotriple_resolution, CotripleInput, Variant, DEFAULT_BUDGET};
use enhom::free::{
    enveloping, enveloping_dims_by_quotient, free_commutative, free_lie, tensor_algebras, truncated_polynomial,
    witt_dimension, Algebra, Generator, GeneratorSet, LiePresentation,
};
use enhom::graded::{self, convolve, Cell};
use enhom::hochschild::{self, Coefficients};
use enhom::hodge;
use enhom::lie;
use enhom::linalg::{image_basis, kernel_basis_sparse};
use enhom::{Field, FieldScalar, SparseMatrix};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::Q), Just(Field::F2)]
}

fn generators(max: usize, degrees: std::ops::RangeInclusive<i64>) -> impl Strategy<Value = GeneratorSet> {
    prop::collection::vec((degrees, 1u32..=2), 1..=max).prop_map(|v| {
        GeneratorSet::new(
            v.into_iter()
                .enumerate()
                .map(|(i, (degree, weight))| Generator { name: format!("x{i}"), degree, weight })
                .collect(),
        )
        .unwrap()
    })
}

/// Small commutative algebras: free on one or two generators, or a
/// truncated polynomial algebra.
fn algebra() -> impl Strategy<Value = Algebra> {
    prop_oneof![
        (generators(2, -1..=2), field(), 2u32..=4).prop_map(|(g, f, w)| free_commutative(&g, f, w)),
        (0i64..=2, field(), 2u32..=4, 2u32..=4).prop_map(|(d, f, p, w)| {
            truncated_polynomial(&Generator { name: "x".into(), degree: d, weight: 1 }, f, p, w)
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn bar_complexes_square_to_zero(a in algebra()) {
        let b = bar::bar(&a).unwrap();
        prop_assert!(graded::validate(&b.chain_complex()).is_ok());
        if a.max_weight <= 3 {
            prop_assert!(graded::validate(&bar::iterated_bar(&a, 2).unwrap()).is_ok());
        }
    }

    #[test]
    fn hochschild_complexes_square_to_zero(a in algebra()) {
        let c = hochschild::hochschild_chains_trivial_coeffs(&a).unwrap();
        prop_assert!(graded::validate(&c).is_ok());
        let x = hochschild::sphere_model(2, 2 * a.max_weight as usize + 1);
        prop_assert!(graded::validate(&hochschild::loday_complex(&a, &x).unwrap()).is_ok());
    }

    #[test]
    fn cochain_complexes_square_to_zero(f in field(), shifts in 0u32..=4) {
        let a = free_commutative(&GeneratorSet::simple(&[("x", 0)]), f, 4 + shifts);
        for coeff in [Coefficients::Ideal, Coefficients::Algebra] {
            let h = hochschild::hochschild_cochain_complex(&a, coeff, 3, 4, 0..=shifts).unwrap();
            prop_assert!(graded::validate(&h.complex).is_ok());
        }
    }

    #[test]
    fn ce_complexes_square_to_zero(g in generators(2, -1..=1), f in field(), w in 2u32..=4) {
        let l = enhom::free::shift_lie(&free_lie(&g, f, w), 0);
        let ce = lie::ce_complex(&l, w, None).unwrap();
        prop_assert!(graded::validate(&ce.complex).is_ok());
    }

    #[test]
    fn cotriple_levels_are_simplicial(p in 2u32..=3, w in 2u32..=3) {
        let a = truncated_polynomial(&Generator { name: "x".into(), degree: 0, weight: 1 }, Field::Q, p, w);
        let r = cotriple_resolution(CotripleInput::Algebra(&a), Variant::SI, 3, w, DEFAULT_BUDGET).unwrap();
        prop_assert!(r.check_identities().is_ok());
    }
}

// ---------------------------------------------------------------------------
// Eulerian idempotents

fn stirling_first(n: usize, k: usize) -> i64 {
    let mut t = vec![vec![0i64; n + 1]; n + 1];
    t[0][0] = 1;
    for i in 1..=n {
        for j in 1..=i {
            t[i][j] = t[i - 1][j - 1] + (i as i64 - 1) * t[i - 1][j];
        }
    }
    t[n][k]
}

#[test]
fn idempotents_sum_to_one_with_stirling_traces() {
    for n in 1..=7usize {
        let es = hodge::eulerian_idempotents(n).unwrap();
        assert_eq!(es.len(), n);
        let mut sum = enhom::hodge::SymmetricGroupElement::zero(n);
        for e in &es {
            sum = sum.add(e);
        }
        assert_eq!(sum, enhom::hodge::SymmetricGroupElement::identity(n), "arity {n}");
        let id: Vec<u8> = (0..n as u8).collect();
        let fact: i64 = (1..=n as i64).product();
        for (i, e) in es.iter().enumerate() {
            // unsigned Stirling numbers of the first kind count permutations by cycles
            assert_eq!(e.coefficient(&id), FieldScalar::from_ratio(stirling_first(n, i + 1), fact), "e{} arity {n}", i + 1);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn idempotents_are_orthogonal(n in 1usize..=5, i in 0usize..5, j in 0usize..5) {
        prop_assume!(i < n && j < n);
        let es = hodge::eulerian_idempotents(n).unwrap();
        let p = es[i].mul(&es[j]);
        if i == j {
            prop_assert_eq!(p, es[i].clone());
        } else {
            prop_assert!(p.is_zero());
        }
    }

    #[test]
    fn idempotents_decompose_words(word in prop::collection::vec(0u32..3, 1..=5), degs in prop::collection::vec(-1i64..=1, 3)) {
        let n = word.len();
        let sdeg = |a: u32| degs[a as usize] + 1;
        let mut total: BTreeMap<Vec<u32>, FieldScalar> = BTreeMap::new();
        for e in hodge::eulerian_idempotents(n).unwrap() {
            for (w, c) in e.act(&word, &sdeg) {
                let v = total.remove(&w).map_or(c.clone(), |x| &x + &c);
                if !v.is_zero() {
                    total.insert(w, v);
                }
            }
        }
        prop_assert_eq!(total, BTreeMap::from([(word.clone(), FieldScalar::one(Field::Q))]));
    }

    #[test]
    fn idempotents_commute_with_the_boundary(g in generators(2, 0..=2), w in 2u32..=4) {
        // hodge_summands checks d e = e d on every cell it uses
        let a = free_commutative(&g, Field::Q, w);
        let ls: Vec<usize> = (1..=w as usize).collect();
        let parts = hodge::hodge_summands(&a, &ls, 0..=2 * w as i64 + 2, 1..=w);
        prop_assert!(parts.is_ok(), "{:?}", parts.err());
    }
}

#[test]
fn arity_bound_is_enforced() {
    assert!(hodge::eulerian_idempotents(8).is_err());
}

// ---------------------------------------------------------------------------
// PBW and Witt

/// Dimensions of the graded-symmetric algebra on a graded basis, by
/// (degree, weight), over Q.
fn symmetric_dims(basis: &[(i64, u32)], max_weight: u32) -> BTreeMap<Cell, usize> {
    let mut dims: BTreeMap<Cell, usize> = BTreeMap::from([((0, 0), 1)]);
    for &(d, w) in basis {
        let mut next = BTreeMap::new();
        for (&(d0, w0), &n) in &dims {
            let mut k = 0u32;
            while w0 + k * w <= max_weight {
                *next.entry((d0 + k as i64 * d, w0 + k * w)).or_insert(0) += n;
                // odd elements square to zero
                if d % 2 != 0 && k == 1 {
                    break;
                }
                k += 1;
            }
        }
        dims = next;
    }
    dims
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn pbw_matches_symmetric_algebra(g in generators(2, -1..=2), w in 2u32..=4) {
        let l: LiePresentation = free_lie(&g, Field::Q, w);
        let u = enveloping(&l).unwrap();
        let basis: Vec<(i64, u32)> = l.basis.iter().map(|b| (b.degree, b.weight)).collect();
        let mut want = symmetric_dims(&basis, w);
        want.remove(&(0, 0));
        let pbw: BTreeMap<Cell, usize> = u.dims(w, w as usize).into_iter().filter(|(c, n)| *n > 0 && c.1 >= 1).collect();
        prop_assert_eq!(&pbw, &want);
        let quotient: BTreeMap<Cell, usize> = enveloping_dims_by_quotient(&l).unwrap().into_iter().filter(|(_, n)| *n > 0).collect();
        prop_assert_eq!(&quotient, &want);
    }

    #[test]
    fn free_lie_dimensions_follow_witt(d in 1usize..=3, w in 1u32..=5, f in field()) {
        let names = ["x", "y", "z"];
        let g = GeneratorSet::simple(&names[..d].iter().map(|n| (*n, 0)).collect::<Vec<_>>());
        let l = free_lie(&g, f, w);
        for k in 1..=w {
            let n = l.basis.iter().filter(|b| b.weight == k).count();
            prop_assert_eq!(n as u64, witt_dimension(d as u64, k as u64), "weight {}", k);
        }
    }
}

// ---------------------------------------------------------------------------
// Künneth

/// E_n-homology with the unit, in unsuspended bar degrees.
fn unital_en(a: &Algebra, n: usize, top: i64) -> BTreeMap<Cell, usize> {
    let h = bar::en_homology_commutative(a, n, -(n as i64)..=top, 0..=a.max_weight).unwrap();
    let mut d: BTreeMap<Cell, usize> = h.dims().into_iter().map(|((k, w), m)| ((k + n as i64, w), m)).collect();
    d.insert((0, 0), 1);
    d
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn en_homology_of_tensor_products_convolves(i in 0i64..=2, j in 0i64..=2, n in 1usize..=2, f in field(), w in 2u32..=3) {
        let a = free_commutative(&GeneratorSet::simple(&[("x", i)]), f, w);
        let b = free_commutative(&GeneratorSet::simple(&[("y", j)]), f, w);
        let ab = tensor_algebras(&a, &b).unwrap();
        let top = (w as i64) * (2 + n as i64);
        let want: BTreeMap<Cell, usize> = convolve(&unital_en(&a, n, top), &unital_en(&b, n, top))
            .into_iter()
            .filter(|((_, k), m)| *k <= w && *m > 0)
            .collect();
        prop_assert_eq!(unital_en(&ab, n, top), want);
    }

    #[test]
    fn order_two_hochschild_of_tensor_products_convolves(w in 2u32..=3) {
        let a = free_commutative(&GeneratorSet::simple(&[("x", 0)]), Field::Q, w);
        let b = free_commutative(&GeneratorSet::simple(&[("y", 0)]), Field::Q, w);
        let ab = tensor_algebras(&a, &b).unwrap();
        let top = 2 * w as i64;
        let h = |x: &Algebra| hochschild::hh_order_n(x, 2, 0..=top, 0..=w).unwrap().dims();
        let want: BTreeMap<Cell, usize> = convolve(&h(&a), &h(&b)).into_iter().filter(|((_, k), _)| *k <= w).collect();
        prop_assert_eq!(h(&ab), want);
    }

    #[test]
    fn tensor_of_complexes_convolves(a in algebra(), b in algebra()) {
        prop_assume!(a.field == b.field);
        let (ca, cb) = (bar::bar(&a).unwrap().chain_complex(), bar::bar(&b).unwrap().chain_complex());
        let t = graded::tensor(&ca, &cb).unwrap();
        prop_assert!(graded::validate(&t).is_ok());
        let w = a.max_weight.min(b.max_weight);
        let range = |c: &graded::ChainComplex| {
            let ds: Vec<i64> = c.space().cells().map(|(k, _)| k.0).collect();
            (ds.iter().copied().min().unwrap_or(0), ds.iter().copied().max().unwrap_or(0))
        };
        let (ra, rb) = (range(&ca), range(&cb));
        let ha = graded::homology_dims(&ca, ra.0..=ra.1, 0..=w).unwrap();
        let hb = graded::homology_dims(&cb, rb.0..=rb.1, 0..=w).unwrap();
        let want: BTreeMap<Cell, usize> =
            convolve(&ha.dims(), &hb.dims()).into_iter().filter(|((_, k), m)| *k <= w && *m > 0).collect();
        let got = graded::homology_dims(&t, (ra.0 + rb.0)..=(ra.1 + rb.1), 0..=w).unwrap();
        prop_assert_eq!(got.dims(), want);
    }
}

// ---------------------------------------------------------------------------
// rank-nullity

fn matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=8, 1usize..=8).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(prop_oneof![3 => Just(0i64), 2 => -3i64..=3], c), r)
    })
}

fn rank_nullity(f: Field, rows: &[Vec<i64>]) -> Result<(), TestCaseError> {
    let m = SparseMatrix::from_i64_rows(f, rows);
    let r = m.rank();
    let ker = kernel_basis_sparse(&m);
    prop_assert_eq!(r + ker.len(), m.ncols());
    prop_assert_eq!(r, m.transpose().rank());
    prop_assert_eq!(image_basis(&m).len(), r);
    for v in &ker {
        prop_assert!(m.apply(v).is_empty());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn rank_nullity_over_q(rows in matrix()) {
        rank_nullity(Field::Q, &rows)?;
    }

    #[test]
    fn rank_nullity_over_f2(rows in matrix()) {
        rank_nullity(Field::F2, &rows)?;
    }
}
