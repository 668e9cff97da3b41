//! Run the special-matrix suite and print an HPL3 table, one column per
//! method. Entries above the threshold are starred.
//!
//! cargo run --release --example stability_suite -- [N] [nb]

use hybrid_luqr::cli::{stability_suite, suite_matrices, suite_methods, OutputFormat, RunRequest};
use hybrid_luqr::factorization::{HybridConfig, PivotScope};
use hybrid_luqr::matgen::{MatrixKind, MatrixSpec};
use hybrid_luqr::tiled::GridConfig;

fn main() -> hybrid_luqr::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(320);
    let nb = args.next().unwrap_or(40);
    let base = RunRequest {
        matrix: MatrixSpec::new(MatrixKind::Random, n, 0).with_nb(nb),
        cfg: HybridConfig {
            nb,
            grid: GridConfig::new(4, 1)?,
            ..HybridConfig::default()
        },
        out: None,
        format: OutputFormat::Json,
        repetitions: 1,
        instrument: false,
    };
    let criteria = ["max:6000".parse()?, "mumps:2.1".parse()?, "random:50".parse()?];
    let methods = suite_methods(&criteria, PivotScope::Domain);
    let report = stability_suite(&base, &methods, &suite_matrices(n, nb, 0, 2))?;

    print!("{:>10}", "matrix");
    for m in &methods {
        print!(" {:>16}", m.label);
    }
    println!();
    let mut names: Vec<&str> = report.rows.iter().map(|r| r.matrix.as_str()).collect();
    names.dedup();
    for name in names {
        print!("{name:>10}");
        for m in &methods {
            let row = report.row(name, &m.label).expect("every cell is run");
            let cell = match row.hpl3 {
                Some(h) => format!("{h:.2e}{}", if row.passed { " " } else { "*" }),
                None => "failed*".to_string(),
            };
            print!(" {cell:>16}");
        }
        println!();
    }
    for s in &report.summary {
        println!("{}: {}/{} pass", s.method, s.passed, s.total);
    }
    Ok(())
}
