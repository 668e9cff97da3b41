//! Factor a random system with the Max criterion and print the step log.
//!
//! cargo run --example factor_and_solve -- [N] [nb]

use hybrid_luqr::factorization::{flop_report, hybrid_factor, solve, HybridConfig};
use hybrid_luqr::matgen::{self, MatrixKind, MatrixSpec};
use hybrid_luqr::metrics::{hpl3, lupp_hpl3};
use hybrid_luqr::tiled::{GridConfig, TiledMatrix};

fn main() -> hybrid_luqr::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(480);
    let nb = args.next().unwrap_or(40);

    let a = matgen::generate(&MatrixSpec::new(MatrixKind::Random, n, 7))?;
    let b = matgen::rhs(n, 7);
    let cfg = HybridConfig {
        nb,
        grid: GridConfig::new(4, 1)?,
        instrument: true,
        ..HybridConfig::default()
    };
    let result = hybrid_factor(&TiledMatrix::from_dense(&a, nb)?, &b, &cfg)?;

    println!("{:>4} {:>4} {:>12} {:>12} {:>10}", "k", "kind", "inv_norm", "max_offdiag", "growth");
    for s in &result.steps {
        let d = &s.decision;
        println!(
            "{:>4} {:>4} {:>12.4e} {:>12.4e} {:>10.3}",
            d.k,
            d.kind.as_str(),
            d.inv_norm.unwrap_or(f64::NAN),
            d.max_offdiag.unwrap_or(f64::NAN),
            s.growth.unwrap_or(f64::NAN)
        );
    }

    let x = solve(&result)?;
    let flops = flop_report(&result.steps, n, nb);
    println!("N = {n}, nb = {nb}, alpha = {}", cfg.alpha);
    println!("f_LU = {:.3}", result.f_lu());
    println!("HPL3 = {:.3e} (LUPP {:.3e})", hpl3(&a, &x, &b), lupp_hpl3(&a, &b).unwrap_or(f64::NAN));
    println!(
        "kernel flops {:.3e}, model {:.3e}, wasted on speculation {:.3e}",
        flops.kernel_flops, flops.model_flops, flops.wasted_flops
    );
    Ok(())
}
