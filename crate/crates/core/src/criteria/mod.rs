//! Robustness criteria choosing between an LU and a QR elimination step.
//!
//! Max and Sum compare the inverse norm of the pivoted diagonal tile against
//! the largest (resp. the sum of) the off-diagonal panel tile norms. MUMPS
//! compares each local pivot against an estimate of how the largest
//! off-domain entry of its column would have grown. Random flips a seeded
//! coin; AlwaysLU and AlwaysQR are constant policies.
//!
//! Every inequality is non-strict: equality picks LU. A threshold of zero
//! always picks QR.

pub mod condest;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub use condest::{inv_norm1_estimate, inv_norm1_exact, inv_norm1_lower_bound, InvNormMode};

use crate::error::{Error, Result};
use crate::kernels::PanelFactorization;
use crate::tiled::{tile_norm1, Tile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionKind {
    Max,
    Sum,
    Mumps,
    Random,
    #[serde(rename = "alwayslu")]
    AlwaysLu,
    #[serde(rename = "alwaysqr")]
    AlwaysQr,
}

impl CriterionKind {
    pub fn name(self) -> &'static str {
        match self {
            CriterionKind::Max => "max",
            CriterionKind::Sum => "sum",
            CriterionKind::Mumps => "mumps",
            CriterionKind::Random => "random",
            CriterionKind::AlwaysLu => "alwayslu",
            CriterionKind::AlwaysQr => "alwaysqr",
        }
    }

    /// Checks that `alpha` is meaningful for this criterion.
    pub fn validate_alpha(self, alpha: f64) -> Result<()> {
        match self {
            CriterionKind::Random if !(0.0..=100.0).contains(&alpha) => Err(
                Error::InvalidParameter(format!("random criterion needs alpha in [0, 100], got {alpha}")),
            ),
            _ if alpha.is_nan() || alpha < 0.0 => Err(Error::InvalidParameter(format!(
                "alpha must be nonnegative, got {alpha}"
            ))),
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CriterionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "max" => CriterionKind::Max,
            "sum" => CriterionKind::Sum,
            "mumps" => CriterionKind::Mumps,
            "random" => CriterionKind::Random,
            "alwayslu" => CriterionKind::AlwaysLu,
            "alwaysqr" => CriterionKind::AlwaysQr,
            other => return Err(Error::Parse(format!("unknown criterion `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    #[serde(rename = "LU")]
    Lu,
    #[serde(rename = "QR")]
    Qr,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::Lu => "LU",
            StepKind::Qr => "QR",
        }
    }
}

impl std::fmt::Display for StepKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Reduced panel statistics for one step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionStats {
    pub step: usize,
    /// `||(A_kk)^{-1}||_1^{-1}` of the pivoted diagonal tile.
    pub inv_norm: f64,
    /// `||A_ik||_1` for each panel row `i > k`, in row order, after pivoting
    /// within the factored region.
    pub offdiag_norms: Vec<f64>,
    /// Column maxima over the factored region of the panel.
    pub local_max: Vec<f64>,
    /// Column maxima over the rest of the panel.
    pub away_max: Vec<f64>,
    /// `|U_jj|` of the local factorization.
    pub pivot: Vec<f64>,
}

impl CriterionStats {
    pub fn max_offdiag(&self) -> f64 {
        self.offdiag_norms.iter().copied().fold(0.0, f64::max)
    }

    pub fn sum_offdiag(&self) -> f64 {
        self.offdiag_norms.iter().sum()
    }
}

/// One per-step decision, in the shape of the decision log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub k: usize,
    pub kind: StepKind,
    pub criterion: CriterionKind,
    #[serde(with = "crate::serde_util::extended_f64")]
    pub alpha: f64,
    pub inv_norm: Option<f64>,
    pub max_offdiag: Option<f64>,
    pub sum_offdiag: Option<f64>,
    pub reason: String,
}

impl Decision {
    fn from_stats(
        stats: &CriterionStats,
        criterion: CriterionKind,
        alpha: f64,
        kind: StepKind,
        reason: String,
    ) -> Self {
        Decision {
            k: stats.step,
            kind,
            criterion,
            alpha,
            inv_norm: Some(stats.inv_norm),
            max_offdiag: Some(stats.max_offdiag()),
            sum_offdiag: Some(stats.sum_offdiag()),
            reason,
        }
    }

    pub fn is_lu(&self) -> bool {
        self.kind == StepKind::Lu
    }
}

fn scaled(alpha: f64, value: f64) -> f64 {
    if alpha.is_infinite() {
        f64::INFINITY
    } else {
        alpha * value
    }
}

fn norm_test(stats: &CriterionStats, alpha: f64, criterion: CriterionKind, rhs: f64, what: &str) -> Decision {
    if alpha == 0.0 {
        return Decision::from_stats(stats, criterion, alpha, StepKind::Qr, "alpha = 0 forces QR".into());
    }
    let lhs = scaled(alpha, stats.inv_norm);
    let (kind, rel) = if lhs >= rhs {
        (StepKind::Lu, ">=")
    } else {
        (StepKind::Qr, "<")
    };
    Decision::from_stats(
        stats,
        criterion,
        alpha,
        kind,
        format!("alpha*inv_norm = {lhs:e} {rel} {what} = {rhs:e}"),
    )
}

/// LU iff `alpha * ||A_kk^{-1}||^{-1} >= max_{i>k} ||A_ik||`.
pub fn eval_max(stats: &CriterionStats, alpha: f64) -> Decision {
    norm_test(stats, alpha, CriterionKind::Max, stats.max_offdiag(), "max offdiag")
}

/// LU iff `alpha * ||A_kk^{-1}||^{-1} >= sum_{i>k} ||A_ik||`.
pub fn eval_sum(stats: &CriterionStats, alpha: f64) -> Decision {
    norm_test(stats, alpha, CriterionKind::Sum, stats.sum_offdiag(), "sum offdiag")
}

/// Propagates `away_max` through the local elimination: at step `i` every
/// later column's estimate grows by `pivot(i) / local_max(i)`.
pub fn estimate_max(stats: &CriterionStats) -> Vec<f64> {
    let nb = stats.pivot.len();
    let mut est = stats.away_max.clone();
    for i in 0..nb {
        if stats.local_max[i] == 0.0 {
            continue;
        }
        let growth = stats.pivot[i] / stats.local_max[i];
        for e in est.iter_mut().skip(i + 1) {
            *e *= growth;
        }
    }
    est
}

/// LU iff `alpha * pivot(j) >= estimate_max(j)` for every column `j`.
pub fn eval_mumps(stats: &CriterionStats, alpha: f64) -> Decision {
    let criterion = CriterionKind::Mumps;
    if alpha == 0.0 {
        return Decision::from_stats(stats, criterion, alpha, StepKind::Qr, "alpha = 0 forces QR".into());
    }
    let est = estimate_max(stats);
    for j in 0..stats.pivot.len() {
        if stats.local_max[j] == 0.0 {
            if stats.away_max[j] > 0.0 {
                return Decision::from_stats(
                    stats,
                    criterion,
                    alpha,
                    StepKind::Qr,
                    format!("column {j}: no local entry but away_max = {:e}", stats.away_max[j]),
                );
            }
            continue;
        }
        let lhs = scaled(alpha, stats.pivot[j]);
        if lhs < est[j] {
            return Decision::from_stats(
                stats,
                criterion,
                alpha,
                StepKind::Qr,
                format!("column {j}: alpha*pivot = {lhs:e} < estimate_max = {:e}", est[j]),
            );
        }
    }
    Decision::from_stats(stats, criterion, alpha, StepKind::Lu, "all pivots dominate estimate_max".into())
}

/// LU with probability `alpha / 100`. One uniform draw per call.
pub fn eval_random<R: Rng + ?Sized>(k: usize, alpha: f64, rng: &mut R) -> Result<Decision> {
    CriterionKind::Random.validate_alpha(alpha)?;
    let u: f64 = rng.random();
    let kind = if u < alpha / 100.0 {
        StepKind::Lu
    } else {
        StepKind::Qr
    };
    Ok(Decision {
        k,
        kind,
        criterion: CriterionKind::Random,
        alpha,
        inv_norm: None,
        max_offdiag: None,
        sum_offdiag: None,
        reason: format!("draw {u:.6} vs {:.6}", alpha / 100.0),
    })
}

/// Dispatches to the configured criterion.
pub fn decide<R: Rng + ?Sized>(
    kind: CriterionKind,
    alpha: f64,
    stats: &CriterionStats,
    rng: &mut R,
) -> Result<Decision> {
    Ok(match kind {
        CriterionKind::Max => eval_max(stats, alpha),
        CriterionKind::Sum => eval_sum(stats, alpha),
        CriterionKind::Mumps => eval_mumps(stats, alpha),
        CriterionKind::Random => eval_random(stats.step, alpha, rng)?,
        CriterionKind::AlwaysLu => {
            Decision::from_stats(stats, kind, alpha, StepKind::Lu, "policy".into())
        }
        CriterionKind::AlwaysQr => {
            Decision::from_stats(stats, kind, alpha, StepKind::Qr, "policy".into())
        }
    })
}

/// What one domain contributes to the panel reduction.
#[derive(Debug)]
struct DomainPartial {
    norms: Vec<(usize, f64)>,
    col_max: Vec<f64>,
    local: bool,
}

fn column_max_into(t: &Tile, acc: &mut [f64]) {
    for (c, m) in acc.iter_mut().enumerate() {
        for v in t.col(c) {
            *m = m.max(v.abs());
        }
    }
}

/// Collects criterion statistics for step `k`.
///
/// `panel` is tile column `k` before the speculative factorization is
/// written back, `domains` the panel rows grouped by domain with the
/// factored region first (its first row is `k`), and `pf` the local
/// factorization of that region. Each domain reduces its own tiles; the
/// partials are then combined in domain order.
pub fn gather_stats(
    panel: &[Tile],
    k: usize,
    domains: &[Vec<usize>],
    pf: &PanelFactorization,
    mode: InvNormMode,
) -> Result<CriterionStats> {
    let nb = pf.nb();
    let inv_norm = inv_norm1_lower_bound(&pf.packed_top(), mode)?;

    let partials: Vec<DomainPartial> = domains
        .iter()
        .enumerate()
        .map(|(d, rows)| {
            let mut col_max = vec![0.0; nb];
            if d == 0 {
                debug_assert_eq!(rows, pf.rows());
                // pivoted blocks of the factored region
                let perm = pf.permutation();
                let m = pf.stacked_rows();
                let mut norms = Vec::new();
                for (b, &row) in rows.iter().enumerate() {
                    column_max_into(&panel[row], &mut col_max);
                    if b == 0 {
                        continue;
                    }
                    let mut t = Tile::zeros(nb);
                    for r in 0..nb {
                        let src = perm[b * nb + r];
                        debug_assert!(src < m);
                        let st = &panel[rows[src / nb]];
                        for c in 0..nb {
                            t.set(r, c, st.get(src % nb, c));
                        }
                    }
                    norms.push((row, tile_norm1(&t)));
                }
                DomainPartial {
                    norms,
                    col_max,
                    local: true,
                }
            } else {
                let norms = rows
                    .iter()
                    .map(|&row| {
                        column_max_into(&panel[row], &mut col_max);
                        (row, tile_norm1(&panel[row]))
                    })
                    .collect();
                DomainPartial {
                    norms,
                    col_max,
                    local: false,
                }
            }
        })
        .collect();

    let mut norms: Vec<(usize, f64)> = Vec::new();
    let mut local_max = vec![0.0; nb];
    let mut away_max = vec![0.0; nb];
    for part in partials {
        norms.extend(part.norms);
        let acc = if part.local {
            &mut local_max
        } else {
            &mut away_max
        };
        for (a, m) in acc.iter_mut().zip(&part.col_max) {
            *a = f64::max(*a, *m);
        }
    }
    norms.sort_by_key(|&(row, _)| row);

    Ok(CriterionStats {
        step: k,
        inv_norm,
        offdiag_norms: norms.into_iter().map(|(_, v)| v).collect(),
        local_max,
        away_max,
        pivot: pf.pivots_abs(),
    })
}
