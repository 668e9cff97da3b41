//! The hybrid LU-QR driver.
//!
//! Every step backs up the diagonal-domain panel tiles, factors them
//! speculatively with partial pivoting, and asks the criterion whether the
//! step may stay LU. On QR the panel is restored bit for bit and eliminated
//! with Householder reflectors along the configured reduction trees. The
//! right-hand side rides along as an extra tile column, so the solve is a
//! single back substitution at the end.

mod solve;
mod steps;

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use solve::{flop_report, solve, FlopReport};
pub use steps::{apply_step, lu_step, qr_step, rhs_column, speculation_counts, PanelOp, StepCounts, StepTransform, Workspace};

use crate::criteria::{decide, gather_stats, CriterionKind, Decision, InvNormMode, StepKind};
use crate::error::{Error, Result};
use crate::kernels::{apply_row_swaps, getrf_domain, KernelCounts, PanelFactorization};
use crate::tiled::{tile_norm1, DomainMap, GridConfig, Tile, TiledMatrix};
use crate::trees::{build_plan, TreeKind};

/// Where the local pivot search of an LU step may look.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PivotScope {
    Tile,
    #[default]
    Domain,
}

impl std::str::FromStr for PivotScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "tile" => Ok(PivotScope::Tile),
            "domain" => Ok(PivotScope::Domain),
            other => Err(Error::Parse(format!("unknown pivot scope `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridConfig {
    pub criterion: CriterionKind,
    #[serde(with = "crate::serde_util::extended_f64")]
    pub alpha: f64,
    pub pivot_scope: PivotScope,
    pub tree_intra: TreeKind,
    pub tree_inter: TreeKind,
    pub grid: GridConfig,
    pub nb: usize,
    /// Seeds the random criterion from `seed`; otherwise it draws from entropy.
    pub deterministic: bool,
    pub seed: u64,
    /// Worker threads for the trailing updates; 0 uses the rayon default.
    pub threads: usize,
    /// Records per-step growth and checks the Max/Sum growth bounds.
    pub instrument: bool,
    pub inv_norm: InvNormMode,
}

impl Default for HybridConfig {
    fn default() -> Self {
        HybridConfig {
            criterion: CriterionKind::Max,
            alpha: 6000.0,
            pivot_scope: PivotScope::Domain,
            tree_intra: TreeKind::Greedy,
            tree_inter: TreeKind::Fibonacci,
            grid: GridConfig::default(),
            nb: 40,
            deterministic: true,
            seed: 0,
            threads: 0,
            instrument: false,
            inv_norm: InvNormMode::Estimate,
        }
    }
}

impl HybridConfig {
    pub fn validate(&self) -> Result<()> {
        self.criterion.validate_alpha(self.alpha)?;
        if self.nb == 0 {
            return Err(Error::InvalidParameter("nb must be positive".into()));
        }
        GridConfig::new(self.grid.p, self.grid.q)?;
        Ok(())
    }
}

/// Result of the instrumented growth-bound check for one LU step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    /// Largest ratio of a checked quantity to its bound.
    pub worst_ratio: f64,
    pub violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub decision: Decision,
    /// Kernels applied to the matrix, right-hand side excluded.
    pub kernels: KernelCounts,
    pub rhs_kernels: KernelCounts,
    /// Speculative factorization thrown away by a QR step.
    pub wasted_kernels: KernelCounts,
    /// Matrix flops of the step from the kernel cost model.
    pub flops: f64,
    pub wall_time_s: f64,
    /// `max_{i,j>k} ||A_ij^(k+1)||_1 / max_{i,j} ||A_ij||_1`, instrumented runs only.
    pub growth: Option<f64>,
    pub bound_check: Option<BoundCheck>,
    /// Checksums of the diagonal-domain panel before speculation and after
    /// the restore, for QR steps.
    pub panel_checksum: Option<u64>,
    pub restored_checksum: Option<u64>,
    /// The speculative factorization met an exactly zero pivot column.
    pub forced_qr: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Status {
    pub completed: bool,
    pub forced_qr_steps: Vec<usize>,
}

/// Factors in place plus everything needed to replay the transformation.
#[derive(Clone, Debug)]
pub struct FactorizationResult {
    pub workspace: Workspace,
    pub transforms: Vec<StepTransform>,
    pub steps: Vec<StepLog>,
    pub status: Status,
}

impl FactorizationResult {
    pub fn n(&self) -> usize {
        self.workspace.n()
    }

    pub fn nb(&self) -> usize {
        self.workspace.nb()
    }

    pub fn order(&self) -> usize {
        self.n() * self.nb()
    }

    pub fn decisions(&self) -> Vec<StepKind> {
        self.steps.iter().map(|s| s.decision.kind).collect()
    }

    pub fn f_lu(&self) -> f64 {
        solve::fraction_lu(&self.steps)
    }

    /// Applies every recorded step to a tile column of `n` tiles.
    pub fn transform_column(&self, col: &mut [Tile]) {
        for (k, step) in self.transforms.iter().enumerate() {
            apply_step(k, step, self.workspace.column(k), col);
        }
    }

    /// Pivot swap vectors of the LU steps, keyed by step.
    pub fn lu_pivots(&self) -> Vec<(usize, Vec<usize>)> {
        self.transforms
            .iter()
            .enumerate()
            .filter_map(|(k, s)| match s {
                StepTransform::Lu { pf, .. } => Some((k, pf.ipiv().to_vec())),
                StepTransform::Qr { .. } => None,
            })
            .collect()
    }
}

/// Bit-exact copy of panel tiles.
#[derive(Clone, Debug, PartialEq)]
pub struct PanelBackup {
    pub k: usize,
    pub rows: Vec<usize>,
    pub tiles: Vec<Tile>,
}

impl PanelBackup {
    pub fn checksum(&self) -> u64 {
        checksum(&self.tiles)
    }
}

/// Hash of the bit patterns of a tile sequence.
pub fn checksum<'a>(tiles: impl IntoIterator<Item = &'a Tile>) -> u64 {
    let mut h = DefaultHasher::new();
    for t in tiles {
        for v in t.data() {
            v.to_bits().hash(&mut h);
        }
    }
    h.finish()
}

pub fn backup_panel(ws: &Workspace, k: usize, rows: &[usize]) -> PanelBackup {
    PanelBackup {
        k,
        rows: rows.to_vec(),
        tiles: rows.iter().map(|&r| ws.tile(r, k).clone()).collect(),
    }
}

pub fn restore_panel(ws: &mut Workspace, backup: PanelBackup) {
    for (r, t) in backup.rows.into_iter().zip(backup.tiles) {
        *ws.tile_mut(r, backup.k) = t;
    }
}

/// Where step decisions come from.
#[derive(Clone, Copy, Debug)]
pub enum DecisionSource<'a> {
    Criterion,
    /// Replays a previous decision sequence. QR steps skip speculation.
    Replay(&'a [StepKind]),
}

pub fn hybrid_factor(a: &TiledMatrix, b: &[f64], cfg: &HybridConfig) -> Result<FactorizationResult> {
    factor_with(a, b, cfg, DecisionSource::Criterion)
}

pub fn hybrid_factor_replay(a: &TiledMatrix, b: &[f64], cfg: &HybridConfig, decisions: &[StepKind]) -> Result<FactorizationResult> {
    if decisions.len() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} decisions for {} steps",
            decisions.len(),
            a.n()
        )));
    }
    factor_with(a, b, cfg, DecisionSource::Replay(decisions))
}

pub fn factor_with(a: &TiledMatrix, b: &[f64], cfg: &HybridConfig, source: DecisionSource<'_>) -> Result<FactorizationResult> {
    cfg.validate()?;
    if a.nb() != cfg.nb {
        return Err(Error::DimensionMismatch(format!(
            "matrix tiled with nb={} but config has nb={}",
            a.nb(),
            cfg.nb
        )));
    }
    if b.len() != a.order() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side has {} entries for order {}",
            b.len(),
            a.order()
        )));
    }
    if let Some(i) = b.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput { row: i, col: 0 });
    }
    if cfg.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
        pool.install(|| run(a, b, cfg, source))
    } else {
        run(a, b, cfg, source)
    }
}

fn stat_domains(map: &DomainMap, k: usize, n: usize, scope: PivotScope) -> Vec<Vec<usize>> {
    let domains = map.panel_domains(k, n);
    match scope {
        PivotScope::Domain => domains,
        PivotScope::Tile => {
            let mut out = vec![vec![k]];
            for d in domains {
                let rest: Vec<usize> = d.into_iter().filter(|&r| r != k).collect();
                if !rest.is_empty() {
                    out.push(rest);
                }
            }
            out
        }
    }
}

/// Tile 1-norms of trailing matrix columns, `norms[j - k - 1][i - k]`,
/// with the domain row interchanges of `pf` applied.
fn pivoted_norms(ws: &Workspace, k: usize, pf: &PanelFactorization) -> Vec<Vec<f64>> {
    (k + 1..ws.n())
        .map(|j| {
            let mut col = ws.column(j).to_vec();
            apply_row_swaps(pf, &mut col);
            col[k..].iter().map(tile_norm1).collect()
        })
        .collect()
}

fn trailing_max(ws: &Workspace, k: usize) -> f64 {
    let n = ws.n();
    (k + 1..n)
        .flat_map(|j| (k + 1..n).map(move |i| (i, j)))
        .map(|(i, j)| tile_norm1(ws.tile(i, j)))
        .fold(0.0, f64::max)
}

/// Relative slack for rounding in the growth-bound checks.
fn bound_slack(order: usize) -> f64 {
    1.0 + 4.0 * order as f64 * f64::EPSILON
}

fn check_bounds(cfg: &HybridConfig, ws: &Workspace, k: usize, before: &[Vec<f64>]) -> Option<BoundCheck> {
    if cfg.alpha.is_infinite() || !matches!(cfg.criterion, CriterionKind::Max | CriterionKind::Sum) {
        return None;
    }
    let slack = bound_slack(ws.n() * ws.nb());
    let mut worst = 0.0f64;
    let mut violations = 0;
    let mut check = |value: f64, bound: f64| {
        let ratio = if bound > 0.0 {
            value / bound
        } else if value > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        worst = worst.max(ratio);
        if value > bound * slack {
            violations += 1;
        }
    };
    for (jj, old) in before.iter().enumerate() {
        let j = k + 1 + jj;
        let new: Vec<f64> = (k + 1..ws.n()).map(|i| tile_norm1(ws.tile(i, j))).collect();
        match cfg.criterion {
            CriterionKind::Max => {
                let bound = (1.0 + cfg.alpha) * old.iter().copied().fold(0.0, f64::max);
                for &v in &new {
                    check(v, bound);
                }
            }
            _ => {
                let bound = old[1..].iter().sum::<f64>() + cfg.alpha * old[0];
                check(new.iter().sum(), bound);
            }
        }
    }
    Some(BoundCheck {
        worst_ratio: worst,
        violations,
    })
}

fn check_finite(ws: &Workspace, k: usize) -> Result<()> {
    for j in k..ws.cols() {
        for i in k..ws.n() {
            if !ws.tile(i, j).is_finite() {
                return Err(Error::NonFinite { step: k, row: i, col: j });
            }
        }
    }
    Ok(())
}

fn run(a: &TiledMatrix, b: &[f64], cfg: &HybridConfig, source: DecisionSource<'_>) -> Result<FactorizationResult> {
    let n = a.n();
    let map = DomainMap::new(cfg.grid);
    let mut ws = Workspace::new(a, Some(b));
    let mut rng = if cfg.deterministic {
        ChaCha8Rng::seed_from_u64(cfg.seed)
    } else {
        ChaCha8Rng::from_rng(&mut rand::rng())
    };
    let orig_max = if cfg.instrument {
        a.tiles().iter().map(tile_norm1).fold(0.0, f64::max)
    } else {
        0.0
    };
    let mut steps = Vec::with_capacity(n);
    let mut transforms = Vec::with_capacity(n);
    let mut status = Status::default();

    for k in 0..n {
        let start = Instant::now();
        let rows = match cfg.pivot_scope {
            PivotScope::Domain => map.diagonal_domain_rows(k, n),
            PivotScope::Tile => vec![k],
        };
        let domain_rows = map.diagonal_domain_rows(k, n);
        let replayed = match source {
            DecisionSource::Replay(d) => Some(d[k]),
            DecisionSource::Criterion => None,
        };

        let mut backup = None;
        let mut speculation = None;
        let mut forced_qr = false;
        let decision = if replayed == Some(StepKind::Qr) {
            replay_decision(k, cfg, StepKind::Qr, "replayed")
        } else {
            let saved = backup_panel(&ws, k, &domain_rows);
            match getrf_domain(ws.column(k), &rows) {
                Err(Error::SingularPivot { column }) => {
                    forced_qr = true;
                    status.forced_qr_steps.push(k);
                    backup = Some(saved);
                    replay_decision(
                        k,
                        cfg,
                        StepKind::Qr,
                        &format!("singular speculative LU at column {column}, QR forced"),
                    )
                }
                Err(e) => return Err(e),
                Ok(pf) => {
                    let decision = match replayed {
                        Some(kind) => replay_decision(k, cfg, kind, "replayed"),
                        None => {
                            let domains = stat_domains(&map, k, n, cfg.pivot_scope);
                            let stats = gather_stats(ws.column(k), k, &domains, &pf, cfg.inv_norm)?;
                            decide(cfg.criterion, cfg.alpha, &stats, &mut rng)?
                        }
                    };
                    pf.store(ws.column_mut(k));
                    backup = Some(saved);
                    speculation = Some(pf);
                    decision
                }
            }
        };

        let panel_checksum = backup.as_ref().map(PanelBackup::checksum);
        let mut restored_checksum = None;
        let mut bound_check = None;
        let mut wasted = KernelCounts::default();
        let (transform, counts) = match (decision.kind, speculation) {
            (StepKind::Lu, Some(pf)) => {
                let before = cfg.instrument.then(|| pivoted_norms(&ws, k, &pf));
                let (transform, counts) = lu_step(&mut ws, k, &pf)?;
                if let Some(before) = before {
                    bound_check = check_bounds(cfg, &ws, k, &before);
                }
                (transform, counts)
            }
            (StepKind::Lu, None) => unreachable!("LU decision without a factorization"),
            (StepKind::Qr, spec) => {
                if let Some(pf) = spec {
                    wasted = speculation_counts(&pf);
                }
                if let Some(saved) = backup.take() {
                    restore_panel(&mut ws, saved);
                    restored_checksum = Some(checksum(domain_rows.iter().map(|&r| ws.tile(r, k))));
                }
                let plan = build_plan(k, n, &map, cfg.tree_intra, cfg.tree_inter);
                qr_step(&mut ws, k, &plan)
            }
        };
        check_finite(&ws, k)?;
        let growth = if cfg.instrument {
            let m = trailing_max(&ws, k);
            Some(if orig_max > 0.0 { m / orig_max } else { 0.0 })
        } else {
            None
        };
        steps.push(StepLog {
            decision,
            flops: counts.matrix.flops(cfg.nb),
            kernels: counts.matrix,
            rhs_kernels: counts.rhs,
            wasted_kernels: wasted,
            wall_time_s: start.elapsed().as_secs_f64(),
            growth,
            bound_check,
            panel_checksum,
            restored_checksum,
            forced_qr,
        });
        transforms.push(transform);
    }
    status.completed = true;
    Ok(FactorizationResult {
        workspace: ws,
        transforms,
        steps,
        status,
    })
}

fn replay_decision(k: usize, cfg: &HybridConfig, kind: StepKind, reason: &str) -> Decision {
    Decision {
        k,
        kind,
        criterion: cfg.criterion,
        alpha: cfg.alpha,
        inv_norm: None,
        max_offdiag: None,
        sum_offdiag: None,
        reason: reason.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;
    use crate::tiled::DenseMatrix;
    use rand::Rng;

    fn random_matrix(seed: u64, order: usize) -> DenseMatrix {
        let mut g = rng(seed);
        DenseMatrix::from_fn(order, |_, _| g.sample(rand_distr::StandardNormal))
    }

    fn cfg(criterion: CriterionKind, alpha: f64, nb: usize, p: usize) -> HybridConfig {
        HybridConfig {
            criterion,
            alpha,
            nb,
            grid: GridConfig::new(p, 1).unwrap(),
            ..HybridConfig::default()
        }
    }

    fn residual_inf(a: &DenseMatrix, x: &[f64], b: &[f64]) -> f64 {
        a.mul_vec(x).iter().zip(b).map(|(y, b)| (y - b).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn identity_all_lu() {
        let a = TiledMatrix::identity(4, 3);
        let b: Vec<f64> = (0..12).map(|i| i as f64 - 3.0).collect();
        for kind in [CriterionKind::Max, CriterionKind::Sum, CriterionKind::Mumps] {
            let r = hybrid_factor(&a, &b, &cfg(kind, 1.0, 3, 2)).unwrap();
            assert!(r.decisions().iter().all(|d| *d == StepKind::Lu));
            assert_eq!(solve(&r).unwrap(), b);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let a = TiledMatrix::identity(2, 2);
        assert!(hybrid_factor(&a, &[1.0; 3], &cfg(CriterionKind::Max, 1.0, 2, 1)).is_err());
        assert!(hybrid_factor(&a, &[1.0; 4], &cfg(CriterionKind::Max, 1.0, 3, 1)).is_err());
        assert!(hybrid_factor(&a, &[1.0; 4], &cfg(CriterionKind::Max, -1.0, 2, 1)).is_err());
        assert!(hybrid_factor(&a, &[f64::NAN, 0.0, 0.0, 0.0], &cfg(CriterionKind::Max, 1.0, 2, 1)).is_err());
    }

    #[test]
    fn every_policy_solves_random_system() {
        let order = 48;
        let dense = random_matrix(3, order);
        let a = TiledMatrix::from_dense(&dense, 8).unwrap();
        let b: Vec<f64> = (0..order).map(|i| (i as f64).sin()).collect();
        for (kind, alpha) in [
            (CriterionKind::AlwaysQr, 0.0),
            (CriterionKind::AlwaysLu, f64::INFINITY),
            (CriterionKind::Max, 1.0),
            (CriterionKind::Sum, 10.0),
            (CriterionKind::Mumps, 2.1),
            (CriterionKind::Random, 50.0),
        ] {
            for scope in [PivotScope::Tile, PivotScope::Domain] {
                let c = HybridConfig {
                    pivot_scope: scope,
                    ..cfg(kind, alpha, 8, 2)
                };
                let r = hybrid_factor(&a, &b, &c).unwrap();
                let x = solve(&r).unwrap();
                let xn = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                let hpl3 = residual_inf(&dense, &x, &b) / (dense.norm_inf() * xn * EPS * order as f64);
                assert!(hpl3 < 16.0, "{kind:?} {scope:?}: {hpl3}");
            }
        }
    }

    #[test]
    fn always_qr_matches_max_with_zero_alpha() {
        let dense = random_matrix(4, 32);
        let a = TiledMatrix::from_dense(&dense, 4).unwrap();
        let b = vec![1.0; 32];
        let qr = hybrid_factor(&a, &b, &cfg(CriterionKind::AlwaysQr, 0.0, 4, 2)).unwrap();
        let max0 = hybrid_factor(&a, &b, &cfg(CriterionKind::Max, 0.0, 4, 2)).unwrap();
        assert_eq!(qr.workspace, max0.workspace);
        assert_eq!(qr.f_lu(), 0.0);
    }

    #[test]
    fn transformations_reproduce_r() {
        let (order, nb) = (24, 4);
        let dense = random_matrix(9, order);
        let a = TiledMatrix::from_dense(&dense, nb).unwrap();
        let r = hybrid_factor(&a, &vec![1.0; order], &cfg(CriterionKind::Random, 50.0, nb, 3)).unwrap();
        assert!(r.f_lu() > 0.0 && r.f_lu() < 1.0);
        let n = a.n();
        for j in 0..n {
            let mut col: Vec<Tile> = (0..n).map(|i| a.tile(i, j).clone()).collect();
            r.transform_column(&mut col);
            for (i, t) in col.iter().enumerate() {
                let f = r.workspace.tile(i, j);
                for c in 0..nb {
                    for rr in 0..nb {
                        let expect = match i.cmp(&j) {
                            std::cmp::Ordering::Less => f.get(rr, c),
                            std::cmp::Ordering::Equal if rr <= c => f.get(rr, c),
                            _ => 0.0,
                        };
                        assert!((t.get(rr, c) - expect).abs() <= 1e3 * EPS * dense.norm1());
                    }
                }
            }
        }
    }

    #[test]
    fn replay_is_bit_identical_and_skips_speculation() {
        let dense = random_matrix(12, 40);
        let a = TiledMatrix::from_dense(&dense, 5).unwrap();
        let b: Vec<f64> = (0..40).map(|i| i as f64).collect();
        let c = cfg(CriterionKind::Max, 2.0, 5, 2);
        let first = hybrid_factor(&a, &b, &c).unwrap();
        let decisions = first.decisions();
        assert!(decisions.contains(&StepKind::Qr) && decisions.contains(&StepKind::Lu));
        let again = hybrid_factor_replay(&a, &b, &c, &decisions).unwrap();
        assert_eq!(first.workspace, again.workspace);
        for s in again.steps.iter().filter(|s| s.decision.kind == StepKind::Qr) {
            assert!(s.panel_checksum.is_none());
        }
        for s in first.steps.iter().filter(|s| s.decision.kind == StepKind::Qr) {
            assert_eq!(s.panel_checksum, s.restored_checksum);
            assert!(s.wasted_kernels.getrf == 1);
        }
    }

    #[test]
    fn backup_restore_round_trip() {
        let dense = random_matrix(1, 12);
        let a = TiledMatrix::from_dense(&dense, 3).unwrap();
        let mut ws = Workspace::new(&a, None);
        let orig = ws.clone();
        let saved = backup_panel(&ws, 0, &[0, 2]);
        let sum = saved.checksum();
        restore_panel(&mut ws, saved.clone());
        assert_eq!(ws, orig);
        let pf = getrf_domain(ws.column(0), &[0, 2]).unwrap();
        pf.store(ws.column_mut(0));
        assert_ne!(ws, orig);
        restore_panel(&mut ws, saved);
        assert_eq!(ws, orig);
        assert_eq!(checksum([0, 2].iter().map(|&r| ws.tile(r, 0))), sum);
    }

    #[test]
    fn singular_speculation_forces_qr() {
        // first tile column is zero in the diagonal domain rows
        let mut dense = random_matrix(2, 8);
        for r in [0, 1, 4, 5] {
            for c in 0..2 {
                dense.set(r, c, 0.0);
            }
        }
        let a = TiledMatrix::from_dense(&dense, 2).unwrap();
        let r = hybrid_factor(&a, &[1.0; 8], &cfg(CriterionKind::AlwaysLu, f64::INFINITY, 2, 2)).unwrap();
        assert_eq!(r.status.forced_qr_steps, vec![0]);
        assert!(r.steps[0].forced_qr);
        assert_eq!(r.decisions()[0], StepKind::Qr);
        let x = solve(&r).unwrap();
        assert!(residual_inf(&dense, &x, &[1.0; 8]) < 1e-12);
    }

    #[test]
    fn nonfinite_growth_is_reported() {
        let big = f64::MAX / 1.5;
        let dense = DenseMatrix::from_rows(&[vec![1.0, big, big], vec![1.0, -big, big], vec![1.0, big, -big]]).unwrap();
        let a = TiledMatrix::from_dense(&dense, 1).unwrap();
        let err = hybrid_factor(&a, &[1.0; 3], &cfg(CriterionKind::AlwaysLu, f64::INFINITY, 1, 1)).unwrap_err();
        assert!(matches!(err, Error::NonFinite { step: 0, .. }), "{err:?}");
    }

    #[test]
    fn threads_do_not_change_bits() {
        let dense = random_matrix(5, 36);
        let a = TiledMatrix::from_dense(&dense, 3).unwrap();
        let b = vec![2.0; 36];
        let base = cfg(CriterionKind::Mumps, 2.1, 3, 3);
        let one = hybrid_factor(&a, &b, &HybridConfig { threads: 1, ..base.clone() }).unwrap();
        let four = hybrid_factor(&a, &b, &HybridConfig { threads: 4, ..base }).unwrap();
        assert_eq!(one.workspace, four.workspace);
    }

    #[test]
    fn worst_case_growth() {
        for alpha in [1.0, 3.0] {
            let n = 12;
            let dense = DenseMatrix::from_fn(n, |i, j| {
                if j == n - 1 {
                    1.0
                } else if i == j {
                    1.0 / alpha
                } else if i > j {
                    -1.0
                } else {
                    0.0
                }
            });
            let a = TiledMatrix::from_dense(&dense, 1).unwrap();
            let c = HybridConfig {
                pivot_scope: PivotScope::Tile,
                instrument: true,
                ..cfg(CriterionKind::Max, alpha, 1, 1)
            };
            let r = hybrid_factor(&a, &vec![1.0; n], &c).unwrap();
            assert_eq!(r.f_lu(), 1.0);
            let g = r.steps.iter().filter_map(|s| s.growth).fold(1.0, f64::max);
            let expect = (1.0 + alpha).powi(n as i32 - 1);
            assert!((g / expect - 1.0).abs() < 1e-12, "{g} vs {expect}");
            assert!(r.steps.iter().all(|s| s.bound_check.as_ref().is_none_or(|b| b.violations == 0)));
        }
    }
}
