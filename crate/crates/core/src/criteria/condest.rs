//! 1-norm of the inverse of an LU-factored tile.
//!
//! The estimator is Hager's power iteration as refined by Higham (the
//! LAPACK `xLACON` scheme): at most five solve pairs with `L U` and its
//! transpose, stopping as soon as the estimate stops increasing, plus the
//! alternating test vector as a safeguard. The exact mode solves against
//! every unit vector.

use crate::error::{Error, Result};
use crate::tiled::Tile;

const MAX_ITER: usize = 5;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InvNormMode {
    #[default]
    Estimate,
    Exact,
}

impl std::str::FromStr for InvNormMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "estimate" => Ok(InvNormMode::Estimate),
            "exact" => Ok(InvNormMode::Exact),
            other => Err(Error::Parse(format!("unknown inverse-norm mode `{other}`"))),
        }
    }
}

/// `x <- (L U)^{-1} x` for a packed factor.
fn solve(lu: &Tile, x: &mut [f64]) {
    let nb = lu.nb();
    for c in 0..nb {
        let xc = x[c];
        for r in c + 1..nb {
            x[r] -= lu.get(r, c) * xc;
        }
    }
    for c in (0..nb).rev() {
        x[c] /= lu.get(c, c);
        let xc = x[c];
        for r in 0..c {
            x[r] -= lu.get(r, c) * xc;
        }
    }
}

/// `x <- (L U)^{-T} x` for a packed factor.
fn solve_transpose(lu: &Tile, x: &mut [f64]) {
    let nb = lu.nb();
    for c in 0..nb {
        let mut s = x[c];
        for r in 0..c {
            s -= lu.get(r, c) * x[r];
        }
        x[c] = s / lu.get(c, c);
    }
    for c in (0..nb).rev() {
        let mut s = x[c];
        for r in c + 1..nb {
            s -= lu.get(r, c) * x[r];
        }
        x[c] = s;
    }
}

fn sign(v: f64) -> f64 {
    if v >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn argmax_abs(z: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in z.iter().enumerate() {
        if v.abs() > z[best].abs() {
            best = i;
        }
    }
    best
}

fn norm1_vec(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

/// Estimate of `||(L U)^{-1}||_1` for the packed factor `lu`.
pub fn inv_norm1_estimate(lu: &Tile) -> Result<f64> {
    check_diagonal(lu)?;
    let n = lu.nb();
    let mut x = vec![1.0 / n as f64; n];
    solve(lu, &mut x);
    let mut est = norm1_vec(&x);
    if n == 1 {
        return Ok(est);
    }
    let mut xi: Vec<f64> = x.iter().map(|&v| sign(v)).collect();
    let mut z = xi.clone();
    solve_transpose(lu, &mut z);
    let mut j = argmax_abs(&z);
    for _ in 1..MAX_ITER {
        let mut y = vec![0.0; n];
        y[j] = 1.0;
        solve(lu, &mut y);
        let old = est;
        est = norm1_vec(&y);
        let new_xi: Vec<f64> = y.iter().map(|&v| sign(v)).collect();
        if new_xi == xi || est <= old {
            est = est.max(old);
            break;
        }
        xi = new_xi;
        z.copy_from_slice(&xi);
        solve_transpose(lu, &mut z);
        let last = j;
        j = argmax_abs(&z);
        if z[last].abs() == z[j].abs() {
            break;
        }
    }
    let mut alt: Vec<f64> = (0..n)
        .map(|i| {
            let s = if i % 2 == 0 { 1.0 } else { -1.0 };
            s * (1.0 + i as f64 / (n - 1) as f64)
        })
        .collect();
    solve(lu, &mut alt);
    let alt_est = 2.0 * norm1_vec(&alt) / (3.0 * n as f64);
    Ok(est.max(alt_est))
}

/// `||(L U)^{-1}||_1` computed column by column.
pub fn inv_norm1_exact(lu: &Tile) -> Result<f64> {
    check_diagonal(lu)?;
    let n = lu.nb();
    let mut best = 0.0f64;
    for j in 0..n {
        let mut y = vec![0.0; n];
        y[j] = 1.0;
        solve(lu, &mut y);
        best = best.max(norm1_vec(&y));
    }
    Ok(best)
}

fn check_diagonal(lu: &Tile) -> Result<()> {
    match (0..lu.nb()).find(|&i| lu.get(i, i) == 0.0) {
        Some(index) => Err(Error::ZeroDiagonal { index }),
        None => Ok(()),
    }
}

/// `||A_kk^{-1}||_1^{-1}` from the packed LU factor of the pivoted diagonal tile.
pub fn inv_norm1_lower_bound(lu: &Tile, mode: InvNormMode) -> Result<f64> {
    let norm = match mode {
        InvNormMode::Estimate => inv_norm1_estimate(lu)?,
        InvNormMode::Exact => inv_norm1_exact(lu)?,
    };
    Ok(1.0 / norm)
}
