//! Sweep the Max threshold on random matrices with both pivot scopes.
//!
//! Stability (HPL3 relative to LUPP) against the fraction of LU steps, as
//! in the threshold study of the method; CSV rows go to stdout.
//!
//! cargo run --example alpha_sweep -- [N] [repetitions]

use hybrid_luqr::cli::{default_alphas, sweep, OutputFormat, RunRequest};
use hybrid_luqr::criteria::CriterionKind;
use hybrid_luqr::factorization::{HybridConfig, PivotScope};
use hybrid_luqr::matgen::{MatrixKind, MatrixSpec};
use hybrid_luqr::tiled::GridConfig;

fn main() -> hybrid_luqr::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(480);
    let repetitions = args.next().unwrap_or(2);
    let nb = 40;

    println!("scope,alpha,repetition,f_lu,hpl3,hpl3_ratio_vs_lupp");
    for scope in [PivotScope::Tile, PivotScope::Domain] {
        let req = RunRequest {
            matrix: MatrixSpec::new(MatrixKind::Random, n, 0),
            cfg: HybridConfig {
                criterion: CriterionKind::Max,
                pivot_scope: scope,
                nb,
                grid: GridConfig::new(4, 1)?,
                ..HybridConfig::default()
            },
            out: None,
            format: OutputFormat::Csv,
            repetitions,
            instrument: false,
        };
        let report = sweep(&req, &default_alphas(CriterionKind::Max))?;
        for row in report.rows {
            println!(
                "{scope:?},{},{},{:.3},{:.3e},{:.3}",
                row.alpha,
                row.repetition,
                row.f_lu,
                row.hpl3.unwrap_or(f64::INFINITY),
                row.hpl3_ratio_vs_lupp.unwrap_or(f64::INFINITY)
            );
        }
    }
    Ok(())
}
