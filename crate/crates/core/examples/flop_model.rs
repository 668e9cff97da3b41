//! Per-kernel flop counts against the step-fraction model
//! `(2/3 f_LU + 4/3 (1 - f_LU)) N^3`.
//!
//! cargo run --release --example flop_model -- [N]

use hybrid_luqr::criteria::CriterionKind;
use hybrid_luqr::factorization::{flop_report, hybrid_factor, HybridConfig};
use hybrid_luqr::kernels::KernelCounts;
use hybrid_luqr::matgen::{self, MatrixKind, MatrixSpec};
use hybrid_luqr::tiled::{GridConfig, TiledMatrix};

fn main() -> hybrid_luqr::Result<()> {
    let n: usize = std::env::args().nth(1).map(|a| a.parse().expect("integer N")).unwrap_or(960);
    let nb = 40;
    let a = matgen::generate(&MatrixSpec::new(MatrixKind::Random, n, 0))?;
    let b = matgen::rhs(n, 0);
    let t = TiledMatrix::from_dense(&a, nb)?;
    for (criterion, alpha) in [
        (CriterionKind::AlwaysLu, f64::INFINITY),
        (CriterionKind::AlwaysQr, 0.0),
        (CriterionKind::Max, 6000.0),
        (CriterionKind::Random, 50.0),
    ] {
        let cfg = HybridConfig {
            criterion,
            alpha,
            nb,
            grid: GridConfig::new(16, 1)?,
            ..HybridConfig::default()
        };
        let r = hybrid_factor(&t, &b, &cfg)?;
        let f = flop_report(&r.steps, n, nb);
        let mut totals = KernelCounts::default();
        for s in &r.steps {
            totals.merge(&s.kernels);
        }
        let decisions: String = r.decisions().iter().map(|d| &d.as_str()[..1]).collect();
        println!("{}({alpha}): {decisions}", criterion.name());
        println!(
            "  f_LU {:.3}  kernels {:.4e}  model {:.4e}  ({:+.2}%)",
            f.f_lu,
            f.kernel_flops,
            f.model_flops,
            100.0 * (f.kernel_flops / f.model_flops - 1.0)
        );
        let calls: Vec<String> = totals.entries().iter().filter(|(_, c)| *c > 0).map(|(k, c)| format!("{k:?} {c}")).collect();
        println!("  calls: {}", calls.join(", "));
    }
    Ok(())
}
