use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use koszul_cy::lie::{ce_coalgebra, ce_squares_to_zero, is_unimodular, LieAlgebra};
use koszul_cy::linalg::{Scalar, ScalarKind};
use koszul_cy::selftest::{coalgebra_identities, lie_pool, random_basis};
use koszul_cy::spaces::{reduce_by_tree, SimplicialComplex};

fn kinds() -> impl Strategy<Value = ScalarKind> {
    prop_oneof![Just(ScalarKind::Rational), Just(ScalarKind::Prime(2)), Just(ScalarKind::Prime(5)), Just(ScalarKind::Prime(7))]
}

/// Up to 7 vertices, facets of dimension ≤ 2.
fn complexes() -> impl Strategy<Value = SimplicialComplex> {
    (3usize..=7).prop_flat_map(|n| {
        prop::collection::vec(prop::collection::btree_set(0..n, 1..=3), 1..8)
            .prop_map(move |fs| SimplicialComplex::new(n, fs.into_iter().map(|s| s.into_iter().collect()).collect()).unwrap())
    })
}

fn betti(k: &SimplicialComplex, kind: ScalarKind) -> Vec<usize> {
    k.chain_complex(kind).unwrap().homology_all().unwrap().ranks(0, 2)
}

fn euler_from_cells(k: &SimplicialComplex) -> i64 {
    (0..=2).map(|p| (if p % 2 == 0 { 1 } else { -1 }) * k.simplices(p).len() as i64).sum()
}

/// Structure constants in {-1,0,1} on a 3-dimensional space.
fn brackets3() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-1i64..=1, 9)
}

fn lie3(kind: ScalarKind, c: &[i64]) -> LieAlgebra {
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let brackets = pairs
        .iter()
        .enumerate()
        .map(|(p, &(i, j))| (i, j, (0..3).filter(|&k| c[3 * p + k] != 0).map(|k| (k, kind.from_i64(c[3 * p + k]))).collect()))
        .collect();
    LieAlgebra::new(kind, vec!["a".into(), "b".into(), "c".into()], brackets).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn field_axioms(kind in kinds(), a in -50i64..50, b in -50i64..50, c in -50i64..50) {
        let (x, y, z) = (kind.from_i64(a), kind.from_i64(b), kind.from_i64(c));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x + &y, &y + &x);
        if let Some(inv) = x.inverse() {
            prop_assert!((&x * &inv).is_one());
        } else {
            prop_assert!(x.is_zero());
        }
        let expect: Scalar = kind.from_i64(a * b + c);
        prop_assert_eq!(&(&x * &y) + &z, expect);
    }

    #[test]
    fn boundary_squares_to_zero(k in complexes(), kind in kinds()) {
        prop_assert!(k.chain_complex(kind).unwrap().check_square_zero().is_ok());
    }

    #[test]
    fn euler_characteristic(k in complexes(), kind in kinds()) {
        let b = betti(&k, kind);
        prop_assert_eq!(b[0] as i64 - b[1] as i64 + b[2] as i64, euler_from_cells(&k));
    }

    #[test]
    fn h0_counts_components(k in complexes()) {
        let b = betti(&k, ScalarKind::Rational);
        prop_assert_eq!(b[0] == 1, k.is_connected());
    }

    #[test]
    fn relabeling_preserves_homology(k in complexes(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..k.n_vertices()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let r = k.relabeled(&perm).unwrap();
        prop_assert_eq!(betti(&k, ScalarKind::Rational), betti(&r, ScalarKind::Rational));
        prop_assert_eq!(betti(&k, ScalarKind::Prime(2)), betti(&r, ScalarKind::Prime(2)));
    }

    #[test]
    fn subdivision_preserves_homology(k in complexes(), i in any::<prop::sample::Index>()) {
        let s = k.subdivide_facet(i.index(k.facets().len())).unwrap();
        prop_assert_eq!(betti(&k, ScalarKind::Rational), betti(&s, ScalarKind::Rational));
    }

    #[test]
    fn tree_collapse_preserves_homology(k in complexes()) {
        prop_assume!(k.is_connected());
        let m = reduce_by_tree(&k, 0).unwrap();
        prop_assert!(m.certificate().equal);
        prop_assert_eq!(m.tree().len(), k.n_vertices() - 1);
    }

    #[test]
    fn jacobi_iff_ce_square_zero(c in brackets3(), kind in kinds()) {
        let g = lie3(kind, &c);
        prop_assert_eq!(g.jacobi_holds(), ce_squares_to_zero(&g));
        prop_assert_eq!(g.jacobi_holds(), ce_coalgebra(&g).is_ok());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn basis_change_invariance(which in 0usize..5, seed in any::<u64>()) {
        let g = lie_pool(ScalarKind::Rational).swap_remove(which);
        let h = random_basis(&g, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(h.jacobi_holds());
        prop_assert_eq!(is_unimodular(&g), is_unimodular(&h));
        let n = g.dim() as i64;
        let bg = ce_coalgebra(&g).unwrap().coalgebra().chain_complex().unwrap().homology(0, n).unwrap().ranks(0, n);
        let bh = ce_coalgebra(&h).unwrap().coalgebra().chain_complex().unwrap().homology(0, n).unwrap().ranks(0, n);
        prop_assert_eq!(bg, bh);
    }

    #[test]
    fn ce_coalgebra_identities(which in 0usize..5, seed in any::<u64>(), kind in kinds()) {
        let g = lie_pool(kind).swap_remove(which);
        let h = random_basis(&g, &mut ChaCha8Rng::seed_from_u64(seed));
        let bad = coalgebra_identities(ce_coalgebra(&h).unwrap().coalgebra()).unwrap();
        prop_assert!(bad.is_empty(), "{:?}", bad);
    }
}
