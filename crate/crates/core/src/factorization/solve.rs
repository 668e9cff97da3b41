//! Back substitution and flop accounting.

use serde::{Deserialize, Serialize};

use super::{FactorizationResult, StepLog};
use crate::criteria::StepKind;
use crate::error::{Error, Result};

/// Solves `R x = c` where `R` is the upper triangle left by the
/// factorization and `c` the transformed right-hand side.
pub fn solve(result: &FactorizationResult) -> Result<Vec<f64>> {
    let ws = &result.workspace;
    let (n, nb) = (ws.n(), ws.nb());
    if ws.cols() != n + 1 {
        return Err(Error::DimensionMismatch("factorization has no right-hand side".into()));
    }
    let mut x: Vec<f64> = (0..n).flat_map(|i| ws.tile(i, n).col(0).to_vec()).collect();
    for k in (0..n).rev() {
        for j in k + 1..n {
            let t = ws.tile(k, j);
            for c in 0..nb {
                let xc = x[j * nb + c];
                if xc == 0.0 {
                    continue;
                }
                for r in 0..nb {
                    x[k * nb + r] -= t.get(r, c) * xc;
                }
            }
        }
        let t = ws.tile(k, k);
        for c in (0..nb).rev() {
            let d = t.get(c, c);
            if d == 0.0 {
                return Err(Error::SingularSystem { index: k * nb + c });
            }
            x[k * nb + c] /= d;
            let xc = x[k * nb + c];
            for r in 0..c {
                x[k * nb + r] -= t.get(r, c) * xc;
            }
        }
    }
    Ok(x)
}

pub(crate) fn fraction_lu(steps: &[StepLog]) -> f64 {
    if steps.is_empty() {
        return 0.0;
    }
    let lu = steps.iter().filter(|s| s.decision.kind == StepKind::Lu).count();
    lu as f64 / steps.len() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlopReport {
    pub f_lu: f64,
    /// `(2/3 f_LU + 4/3 (1 - f_LU)) N^3`
    pub model_flops: f64,
    /// `2/3 N^3`, the count used for normalized performance.
    pub normalized_flops: f64,
    /// Sum of per-kernel costs on the matrix.
    pub kernel_flops: f64,
    pub rhs_flops: f64,
    pub wasted_flops: f64,
}

pub fn flop_report(steps: &[StepLog], order: usize, nb: usize) -> FlopReport {
    let f_lu = fraction_lu(steps);
    let n3 = (order as f64).powi(3);
    FlopReport {
        f_lu,
        model_flops: (2.0 / 3.0 * f_lu + 4.0 / 3.0 * (1.0 - f_lu)) * n3,
        normalized_flops: 2.0 / 3.0 * n3,
        kernel_flops: steps.iter().map(|s| s.kernels.flops(nb)).sum(),
        rhs_flops: steps.iter().map(|s| s.rhs_kernels.flops(nb)).sum(),
        wasted_flops: steps.iter().map(|s| s.wasted_kernels.flops(nb)).sum(),
    }
}
