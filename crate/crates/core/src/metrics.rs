//! Backward error, growth, and dense reference solvers.
//!
//! The dense solvers are textbook scalar algorithms on column-major storage,
//! independent of the tile kernels, so they can serve as oracles.

use serde::{Deserialize, Serialize};

use crate::criteria::StepKind;
use crate::error::{Error, Result};
use crate::factorization::{solve, FactorizationResult, StepLog};
use crate::tiled::DenseMatrix;

/// Unit roundoff of double precision, `2^-53`.
pub const EPS: f64 = f64::EPSILON / 2.0;

/// HPL3 pass threshold.
pub const HPL3_THRESHOLD: f64 = 16.0;

fn norm_inf_vec(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `||A x - b||_inf / (||A||_inf ||x||_inf eps N)`.
pub fn hpl3(a: &DenseMatrix, x: &[f64], b: &[f64]) -> f64 {
    let r = a.mul_vec(x);
    let res = r.iter().zip(b).map(|(y, b)| (y - b).abs()).fold(0.0, f64::max);
    if res == 0.0 {
        return 0.0;
    }
    let denom = a.norm_inf() * norm_inf_vec(x) * EPS * a.order() as f64;
    if denom == 0.0 || !res.is_finite() {
        f64::INFINITY
    } else {
        res / denom
    }
}

/// `max(1, largest per-step tile growth)`; `None` unless the run was
/// instrumented.
pub fn growth_ratio(steps: &[StepLog]) -> Option<f64> {
    let mut seen = false;
    let mut g = 1.0f64;
    for s in steps {
        if let Some(v) = s.growth {
            seen = true;
            g = g.max(v);
        }
    }
    seen.then_some(g)
}

/// Scalar LU factors `P A = L U`.
#[derive(Clone, Debug)]
pub struct DenseLu {
    lu: DenseMatrix,
    /// `perm[r]` is the original row at position `r`.
    perm: Vec<usize>,
    /// `max_{i,j,k} |a_ij^(k)| / max_{i,j} |a_ij|`.
    pub growth: f64,
}

impl DenseLu {
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.order();
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for c in 0..n {
            let xc = x[c];
            for (r, l) in self.lu.col(c).iter().enumerate().skip(c + 1) {
                x[r] -= l * xc;
            }
        }
        for c in (0..n).rev() {
            x[c] /= self.lu.get(c, c);
            let xc = x[c];
            for (r, u) in self.lu.col(c).iter().enumerate().take(c) {
                x[r] -= u * xc;
            }
        }
        x
    }

    pub fn factors(&self) -> &DenseMatrix {
        &self.lu
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }
}

/// Gaussian elimination where the pivot for column `c` is searched in rows
/// `c..limit(c)` only.
fn restricted_lu(a: &DenseMatrix, limit: impl Fn(usize) -> usize) -> Result<DenseLu> {
    let n = a.order();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let amax = a.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut gmax = amax;
    let data = lu.data_mut();
    for c in 0..n {
        let end = limit(c).min(n);
        let mut p = c;
        for r in c + 1..end {
            if data[c * n + r].abs() > data[c * n + p].abs() {
                p = r;
            }
        }
        if data[c * n + p] == 0.0 {
            return Err(Error::SingularSystem { index: c });
        }
        if p != c {
            perm.swap(c, p);
            for cc in 0..n {
                data.swap(cc * n + c, cc * n + p);
            }
        }
        let pivot = data[c * n + c];
        for r in c + 1..n {
            data[c * n + r] /= pivot;
        }
        for cc in c + 1..n {
            let u = data[cc * n + c];
            let (left, right) = data.split_at_mut(cc * n);
            let l = &left[c * n..c * n + n];
            let dst = &mut right[..n];
            if u != 0.0 {
                for r in c + 1..n {
                    dst[r] -= l[r] * u;
                }
            }
            for v in &dst[c + 1..n] {
                gmax = gmax.max(v.abs());
            }
        }
    }
    let growth = if amax > 0.0 { gmax / amax } else { 1.0 };
    Ok(DenseLu { lu, perm, growth })
}

/// LU with partial pivoting over all rows.
pub fn dense_lupp(a: &DenseMatrix) -> Result<DenseLu> {
    let n = a.order();
    restricted_lu(a, |_| n)
}

/// Scalar elimination whose pivot search stays inside the current diagonal
/// tile: the dense counterpart of an all-LU run with tile-scope pivoting.
pub fn dense_block_lu(a: &DenseMatrix, nb: usize) -> Result<DenseLu> {
    if nb == 0 || !a.order().is_multiple_of(nb) {
        return Err(Error::InvalidParameter(format!("tile size {nb} does not divide {}", a.order())));
    }
    restricted_lu(a, |c| (c / nb + 1) * nb)
}

/// Householder QR `A = Q R` with a nonnegative diagonal in `R`.
#[derive(Clone, Debug)]
pub struct DenseQr {
    /// Reflector vectors below the diagonal (unit leading entry implied),
    /// `R` on and above.
    qr: DenseMatrix,
    tau: Vec<f64>,
}

pub fn dense_qr(a: &DenseMatrix) -> DenseQr {
    let n = a.order();
    let mut qr = a.clone();
    let mut tau = vec![0.0; n];
    let data = qr.data_mut();
    for c in 0..n {
        let (left, right) = data.split_at_mut((c + 1) * n);
        let col = &mut left[c * n..];
        let alpha = col[c];
        let sigma: f64 = col[c + 1..].iter().map(|v| v * v).sum();
        let (beta, t) = if sigma == 0.0 {
            if alpha >= 0.0 {
                (alpha, 0.0)
            } else {
                (-alpha, 2.0)
            }
        } else {
            let norm = (alpha * alpha + sigma).sqrt();
            // Parlett's choice keeps beta = +norm without cancellation
            let v0 = if alpha <= 0.0 { alpha - norm } else { -sigma / (alpha + norm) };
            let t = 2.0 * v0 * v0 / (sigma + v0 * v0);
            for v in col[c + 1..].iter_mut() {
                *v /= v0;
            }
            (norm, t)
        };
        col[c] = beta;
        tau[c] = t;
        if t == 0.0 {
            continue;
        }
        for cc in 0..n - c - 1 {
            let dst = &mut right[cc * n..(cc + 1) * n];
            let mut s = dst[c];
            for r in c + 1..n {
                s += col[r] * dst[r];
            }
            s *= t;
            dst[c] -= s;
            for r in c + 1..n {
                dst[r] -= s * col[r];
            }
        }
    }
    DenseQr { qr, tau }
}

impl DenseQr {
    /// `x <- Q^T x`
    pub fn apply_qt(&self, x: &mut [f64]) {
        let n = self.qr.order();
        for c in 0..n {
            let t = self.tau[c];
            if t == 0.0 {
                continue;
            }
            let v = self.qr.col(c);
            let mut s = x[c];
            for r in c + 1..n {
                s += v[r] * x[r];
            }
            s *= t;
            x[c] -= s;
            for r in c + 1..n {
                x[r] -= s * v[r];
            }
        }
    }

    pub fn r(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.qr.order(), |i, j| if i <= j { self.qr.get(i, j) } else { 0.0 })
    }

    /// Explicit `Q`, formed by applying the reflectors to the identity.
    pub fn q(&self) -> DenseMatrix {
        let n = self.qr.order();
        let mut q = DenseMatrix::identity(n);
        // Q = H_0 H_1 ... H_{n-1}; Q^T e_j computed per column, then transposed
        for j in 0..n {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            self.apply_qt(&mut e);
            for (i, v) in e.into_iter().enumerate() {
                q.set(j, i, v);
            }
        }
        q
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.qr.order();
        let mut x = b.to_vec();
        self.apply_qt(&mut x);
        for c in (0..n).rev() {
            let d = self.qr.get(c, c);
            if d == 0.0 {
                return Err(Error::SingularSystem { index: c });
            }
            x[c] /= d;
            let xc = x[c];
            for (r, u) in self.qr.col(c).iter().enumerate().take(c) {
                x[r] -= u * xc;
            }
        }
        Ok(x)
    }
}

/// `||A||_1 ||A^{-1}||_1` from an explicit inverse.
pub fn cond1(a: &DenseMatrix) -> Result<f64> {
    let n = a.order();
    let lu = dense_lupp(a)?;
    let mut inv_norm = 0.0f64;
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = lu.solve(&e);
        inv_norm = inv_norm.max(col.iter().map(|v| v.abs()).sum());
    }
    Ok(a.norm1() * inv_norm)
}

/// `||x - y||_inf / ||x||_inf`
pub fn relative_difference(x: &[f64], y: &[f64]) -> f64 {
    let d = x.iter().zip(y).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let s = norm_inf_vec(x);
    if s == 0.0 {
        d
    } else {
        d / s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub hpl3: f64,
    pub hpl3_lupp: Option<f64>,
    pub hpl3_ratio_vs_lupp: Option<f64>,
    pub growth_ratio: Option<f64>,
    pub f_lu: f64,
    pub lu_steps: usize,
    pub qr_steps: usize,
    /// Non-finite solution or residual.
    pub diverged: bool,
}

impl StabilityReport {
    pub fn passes(&self) -> bool {
        !self.diverged && self.hpl3 < HPL3_THRESHOLD
    }
}

/// HPL3 of a LUPP solve of the same system.
pub fn lupp_hpl3(a: &DenseMatrix, b: &[f64]) -> Option<f64> {
    dense_lupp(a).ok().map(|lu| hpl3(a, &lu.solve(b), b))
}

/// Solves with `result` and compares against LUPP when `lupp` is given.
pub fn stability_report(a: &DenseMatrix, b: &[f64], result: &FactorizationResult, lupp: Option<f64>) -> StabilityReport {
    let lu_steps = result.decisions().iter().filter(|d| **d == StepKind::Lu).count();
    let (hpl3_value, diverged) = match solve(result) {
        Ok(x) => {
            let h = hpl3(a, &x, b);
            (h, !h.is_finite() || x.iter().any(|v| !v.is_finite()))
        }
        Err(_) => (f64::INFINITY, true),
    };
    let ratio = lupp.map(|l| if l > 0.0 { hpl3_value / l } else { f64::INFINITY });
    StabilityReport {
        hpl3: hpl3_value,
        hpl3_lupp: lupp,
        hpl3_ratio_vs_lupp: ratio,
        growth_ratio: growth_ratio(&result.steps),
        f_lu: result.f_lu(),
        lu_steps,
        qr_steps: result.steps.len() - lu_steps,
        diverged,
    }
}
