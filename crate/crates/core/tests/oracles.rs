mod common;

use hybrid_luqr::criteria::CriterionKind;
use hybrid_luqr::factorization::{hybrid_factor, hybrid_factor_replay, solve, HybridConfig, PivotScope};
use hybrid_luqr::matgen::{self, MatrixKind, MatrixSpec};
use hybrid_luqr::metrics::{cond1, dense_block_lu, dense_lupp, dense_qr, hpl3, relative_difference, EPS, HPL3_THRESHOLD};
use hybrid_luqr::tiled::{GridConfig, TiledMatrix};
use hybrid_luqr::trees::TreeKind;
use proptest::prelude::*;

use common::corpus;

#[test]
fn alwaysqr_matches_dense_householder() {
    let mut checked = 0;
    for inst in corpus() {
        let kappa = cond1(&inst.a).unwrap();
        let tol = 100.0 * inst.a.order() as f64 * EPS * kappa;
        if tol >= 1.0 {
            continue;
        }
        let cfg = HybridConfig {
            criterion: CriterionKind::AlwaysQr,
            alpha: 0.0,
            ..inst.config()
        };
        let x = solve(&hybrid_factor(&inst.tiled(), &inst.b, &cfg).unwrap()).unwrap();
        let oracle = dense_qr(&inst.a).solve(&inst.b).unwrap();
        let d = relative_difference(&oracle, &x);
        assert!(d <= tol, "{}: {d:e} > {tol:e}", inst.name);
        checked += 1;
    }
    assert!(checked > 50);
}

#[test]
fn tile_lu_matches_block_lu_up_to_growth() {
    for inst in corpus() {
        let Ok(block) = dense_block_lu(&inst.a, inst.nb()) else {
            continue;
        };
        let kappa = cond1(&inst.a).unwrap();
        let tol = 100.0 * inst.a.order() as f64 * EPS * kappa * block.growth.max(1.0);
        if tol >= 1.0 {
            continue;
        }
        let cfg = HybridConfig {
            criterion: CriterionKind::AlwaysLu,
            alpha: f64::INFINITY,
            pivot_scope: PivotScope::Tile,
            ..inst.config()
        };
        let x = solve(&hybrid_factor(&inst.tiled(), &inst.b, &cfg).unwrap()).unwrap();
        let d = relative_difference(&block.solve(&inst.b), &x);
        assert!(d <= tol, "{}: {d:e} > {tol:e}", inst.name);
    }
}

#[test]
fn single_tile_lu_equals_lupp() {
    // With one tile the tile-scope search is full partial pivoting.
    for seed in 0..5 {
        let a = matgen::generate(&MatrixSpec::new(MatrixKind::Random, 12, seed)).unwrap();
        let b = matgen::rhs(12, seed);
        let cfg = HybridConfig {
            criterion: CriterionKind::AlwaysLu,
            alpha: f64::INFINITY,
            nb: 12,
            pivot_scope: PivotScope::Tile,
            ..HybridConfig::default()
        };
        let r = hybrid_factor(&TiledMatrix::from_dense(&a, 12).unwrap(), &b, &cfg).unwrap();
        let x = solve(&r).unwrap();
        let y = dense_lupp(&a).unwrap().solve(&b);
        assert!(relative_difference(&y, &x) < 1e-12);
    }
}

#[test]
fn alwaysqr_passes_hpl3_on_corpus() {
    for inst in corpus() {
        let cfg = HybridConfig {
            criterion: CriterionKind::AlwaysQr,
            alpha: 0.0,
            ..inst.config()
        };
        let x = solve(&hybrid_factor(&inst.tiled(), &inst.b, &cfg).unwrap()).unwrap();
        let h = hpl3(&inst.a, &x, &inst.b);
        assert!(h < HPL3_THRESHOLD, "{}: {h}", inst.name);
    }
}

fn tree() -> impl Strategy<Value = TreeKind> {
    prop_oneof![
        Just(TreeKind::Flat),
        Just(TreeKind::Binary),
        Just(TreeKind::Greedy),
        Just(TreeKind::Fibonacci)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_systems_solve_stably(
        seed in 0u64..10_000,
        tiles in 1usize..7,
        nb in prop_oneof![Just(2usize), Just(3), Just(5)],
        p in 1usize..4,
        q in 1usize..3,
        intra in tree(),
        inter in tree(),
        alpha in prop_oneof![Just(0.0), Just(1.0), Just(100.0), Just(f64::INFINITY)],
    ) {
        let n = tiles * nb;
        let a = matgen::generate(&MatrixSpec::new(MatrixKind::Random, n, seed)).unwrap();
        let b = matgen::rhs(n, seed);
        let cfg = HybridConfig {
            alpha,
            nb,
            grid: GridConfig::new(p, q).unwrap(),
            tree_intra: intra,
            tree_inter: inter,
            ..HybridConfig::default()
        };
        let t = TiledMatrix::from_dense(&a, nb).unwrap();
        let r = hybrid_factor(&t, &b, &cfg).unwrap();
        let x = solve(&r).unwrap();
        prop_assert!(hpl3(&a, &x, &b) < HPL3_THRESHOLD);

        // Replaying the decisions without speculation lands on the same bits.
        let replay = hybrid_factor_replay(&t, &b, &cfg, &r.decisions()).unwrap();
        prop_assert!(replay.workspace == r.workspace);
    }
}
