//! Evaluate every criterion on the first panel of a matrix whose diagonal
//! domain is made progressively weaker.

use hybrid_luqr::criteria::{decide, gather_stats, CriterionKind, InvNormMode};
use hybrid_luqr::kernels::getrf_domain;
use hybrid_luqr::matgen::{self, MatrixKind, MatrixSpec};
use hybrid_luqr::tiled::{DomainMap, GridConfig, TiledMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> hybrid_luqr::Result<()> {
    let (n, nb) = (8, 4);
    let map = DomainMap::new(GridConfig::new(2, 1)?);
    let domains = map.panel_domains(0, n);
    let settings = [
        (CriterionKind::Max, 6000.0),
        (CriterionKind::Max, 1.0),
        (CriterionKind::Sum, 1.0),
        (CriterionKind::Mumps, 2.1),
        (CriterionKind::Random, 50.0),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0);

    println!("domains at step 0: {domains:?}");
    for scale in [1.0, 1e-2, 1e-4, 1e-6] {
        let mut a = matgen::generate(&MatrixSpec::new(MatrixKind::Random, n * nb, 3))?;
        // shrink the rows of the diagonal domain
        for &tile_row in &domains[0] {
            for c in 0..nb {
                for r in 0..nb {
                    let (i, j) = (tile_row * nb + r, c);
                    a.set(i, j, a.get(i, j) * scale);
                }
            }
        }
        let t = TiledMatrix::from_dense(&a, nb)?;
        let panel: Vec<_> = (0..n).map(|i| t.tile(i, 0).clone()).collect();
        let pf = getrf_domain(&panel, &domains[0])?;
        let stats = gather_stats(&panel, 0, &domains, &pf, InvNormMode::Estimate)?;
        println!(
            "\nscale {scale:e}: inv_norm {:.3e}, max offdiag {:.3e}, sum offdiag {:.3e}",
            stats.inv_norm,
            stats.max_offdiag(),
            stats.sum_offdiag()
        );
        for (kind, alpha) in settings {
            let d = decide(kind, alpha, &stats, &mut rng)?;
            println!("  {:>6}({alpha:>6}) -> {}  [{}]", kind.name(), d.kind, d.reason);
        }
    }
    Ok(())
}
