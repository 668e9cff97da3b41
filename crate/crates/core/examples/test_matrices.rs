//! Generate the special test matrices and report conditioning and the
//! behaviour of partial pivoting on each.
//!
//! cargo run --example test_matrices -- [N]

use hybrid_luqr::matgen::{self, MatrixSpec, SPECIAL};
use hybrid_luqr::metrics::{cond1, dense_lupp, hpl3};

fn main() -> hybrid_luqr::Result<()> {
    let n: usize = std::env::args().nth(1).map(|a| a.parse().expect("integer N")).unwrap_or(64);
    println!("{:>10} {:>12} {:>12} {:>12} {:>12}", "matrix", "||A||_1", "cond_1", "LUPP growth", "LUPP HPL3");
    for kind in SPECIAL {
        let a = matgen::generate(&MatrixSpec::new(kind, n, 0))?;
        let b = matgen::rhs(n, 0);
        let lu = dense_lupp(&a)?;
        let x = lu.solve(&b);
        println!(
            "{:>10} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e}",
            kind.name(),
            a.norm1(),
            cond1(&a).unwrap_or(f64::INFINITY),
            lu.growth,
            hpl3(&a, &x, &b)
        );
    }
    Ok(())
}
