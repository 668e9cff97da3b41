//! The matrix that attains the Max-criterion growth bound `(1 + alpha)^(N-1)`
//! with 1x1 tiles.

use hybrid_luqr::criteria::{CriterionKind, StepKind};
use hybrid_luqr::factorization::{hybrid_factor, HybridConfig, PivotScope};
use hybrid_luqr::matgen;
use hybrid_luqr::metrics::growth_ratio;
use hybrid_luqr::tiled::TiledMatrix;

fn main() -> hybrid_luqr::Result<()> {
    let n = 30;
    println!("{:>6} {:>14} {:>14} {:>8}", "alpha", "growth", "bound", "all LU");
    for alpha in [0.25, 0.5, 1.0, 2.0] {
        let a = matgen::worst_case(n, alpha);
        let cfg = HybridConfig {
            criterion: CriterionKind::Max,
            alpha,
            nb: 1,
            pivot_scope: PivotScope::Tile,
            instrument: true,
            ..HybridConfig::default()
        };
        let r = hybrid_factor(&TiledMatrix::from_dense(&a, 1)?, &matgen::rhs(n, 0), &cfg)?;
        let all_lu = r.decisions().iter().all(|d| *d == StepKind::Lu);
        let growth = growth_ratio(&r.steps).expect("instrumented");
        println!("{alpha:>6} {growth:>14.6e} {:>14.6e} {all_lu:>8}", (1.0 + alpha).powi(n as i32 - 1));
    }
    Ok(())
}
