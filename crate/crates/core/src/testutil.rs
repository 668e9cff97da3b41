//! Helpers shared by unit tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::tiled::Tile;

pub const EPS: f64 = f64::EPSILON / 2.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_tile(rng: &mut ChaCha8Rng, nb: usize) -> Tile {
    let data = (0..nb * nb).map(|_| rng.sample(StandardNormal)).collect();
    Tile::from_col_major(nb, data).unwrap()
}

/// Column-major `rows x cols` product of two column-major operands.
pub fn matmul(a: &[f64], b: &[f64], rows: usize, inner: usize, cols: usize) -> Vec<f64> {
    let mut c = vec![0.0; rows * cols];
    for j in 0..cols {
        for l in 0..inner {
            let s = b[j * inner + l];
            for i in 0..rows {
                c[j * rows + i] += a[l * rows + i] * s;
            }
        }
    }
    c
}

/// 1-norm of a column-major `rows x cols` array.
pub fn norm1(a: &[f64], rows: usize, cols: usize) -> f64 {
    (0..cols)
        .map(|j| a[j * rows..(j + 1) * rows].iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
