//! Round-trip a matrix through the binary TLM1 format and CSV, then factor
//! the loaded copy.

use std::fs::File;
use std::io::{BufReader, BufWriter};

use hybrid_luqr::factorization::{hybrid_factor, solve, HybridConfig};
use hybrid_luqr::matgen::{self, MatrixKind, MatrixSpec};
use hybrid_luqr::metrics::hpl3;
use hybrid_luqr::tiled::{read_csv, read_tlm1, write_csv, write_tlm1, TiledMatrix};

fn main() -> hybrid_luqr::Result<()> {
    let (n, nb) = (64, 8);
    let a = matgen::generate(&MatrixSpec::new(MatrixKind::Lotkin, n, 0))?;
    let dir = std::env::temp_dir();
    let bin = dir.join("hluqr-lotkin.tlm");
    let text = dir.join("hluqr-lotkin.csv");

    write_tlm1(BufWriter::new(File::create(&bin)?), &a, nb)?;
    write_csv(BufWriter::new(File::create(&text)?), &a)?;
    let (from_bin, stored_nb) = read_tlm1(BufReader::new(File::open(&bin)?))?;
    let from_csv = read_csv(BufReader::new(File::open(&text)?))?;
    println!("TLM1: nb = {stored_nb}, bit-identical = {}", from_bin == a);
    println!("CSV: bit-identical = {}", from_csv == a);

    let b = matgen::rhs(n, 0);
    let cfg = HybridConfig {
        nb: stored_nb,
        ..HybridConfig::default()
    };
    let r = hybrid_factor(&TiledMatrix::from_dense(&from_bin, stored_nb)?, &b, &cfg)?;
    println!("f_LU = {:.3}, HPL3 = {:.3e}", r.f_lu(), hpl3(&a, &solve(&r)?, &b));
    std::fs::remove_file(bin)?;
    std::fs::remove_file(text)?;
    Ok(())
}
