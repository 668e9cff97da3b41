//! LU and QR elimination steps on the augmented tile workspace.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kernels::{
    geqrt, gemm_update, swptrsm_apply, trsm_eliminate, tsmqr, tsqrt, ttmqr, ttqrt, unmqr, Kernel,
    KernelCounts, PanelFactorization, TFactor, Trans,
};
use crate::tiled::{Tile, TiledMatrix};
use crate::trees::{EliminationPlan, KillKind};

/// `n` tile rows by `cols` tile columns, stored column by column.
///
/// The factorization uses `cols = n + 1`; the last column carries the
/// right-hand side in its first scalar column.
#[derive(Clone, Debug, PartialEq)]
pub struct Workspace {
    n: usize,
    nb: usize,
    cols: usize,
    tiles: Vec<Tile>,
}

impl Workspace {
    /// `a` augmented with `b` (when given) as an extra tile column.
    pub fn new(a: &TiledMatrix, b: Option<&[f64]>) -> Self {
        let (n, nb) = (a.n(), a.nb());
        let mut tiles = a.tiles().to_vec();
        let cols = if let Some(b) = b {
            tiles.extend(rhs_column(b, n, nb));
            n + 1
        } else {
            n
        };
        Workspace { n, nb, cols, tiles }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nb(&self) -> usize {
        self.nb
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn tile(&self, i: usize, j: usize) -> &Tile {
        &self.tiles[j * self.n + i]
    }

    pub fn tile_mut(&mut self, i: usize, j: usize) -> &mut Tile {
        &mut self.tiles[j * self.n + i]
    }

    pub fn column(&self, j: usize) -> &[Tile] {
        &self.tiles[j * self.n..(j + 1) * self.n]
    }

    pub fn column_mut(&mut self, j: usize) -> &mut [Tile] {
        &mut self.tiles[j * self.n..(j + 1) * self.n]
    }

    /// Panel column `k` and the columns to its right.
    fn split(&mut self, k: usize) -> (&mut [Tile], &mut [Tile]) {
        let (left, right) = self.tiles.split_at_mut((k + 1) * self.n);
        (&mut left[k * self.n..], right)
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }
}

/// A vector laid out as a tile column: entry `r` of tile `i` column 0 holds
/// `b[i * nb + r]`, the other columns are zero.
pub fn rhs_column(b: &[f64], n: usize, nb: usize) -> Vec<Tile> {
    (0..n)
        .map(|i| {
            let mut t = Tile::zeros(nb);
            t.col_mut(0).copy_from_slice(&b[i * nb..(i + 1) * nb]);
            t
        })
        .collect()
}

pub(crate) fn pair_mut(col: &mut [Tile], a: usize, b: usize) -> (&mut Tile, &mut Tile) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = col.split_at_mut(b);
        (&mut lo[a], &mut hi[0])
    } else {
        let (lo, hi) = col.split_at_mut(a);
        (&mut hi[0], &mut lo[b])
    }
}

/// One Householder transformation of a QR step, with its reflectors.
#[derive(Clone, Debug, PartialEq)]
pub enum PanelOp {
    Geqrt { row: usize, v: Tile, t: TFactor },
    Ts { killed: usize, eliminator: usize, v: Tile, t: TFactor },
    Tt { killed: usize, eliminator: usize, v: Tile, t: TFactor },
}

/// What a step did to its panel, enough to apply it to any other column.
#[derive(Clone, Debug, PartialEq)]
pub enum StepTransform {
    /// Domain factorization plus the rows eliminated by `A_ik U^{-1}`; the
    /// multipliers stay in panel column `k`.
    Lu { pf: PanelFactorization, off_rows: Vec<usize> },
    Qr { ops: Vec<PanelOp> },
}

/// Per-step kernel tallies split between the matrix and the right-hand side.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StepCounts {
    pub matrix: KernelCounts,
    pub rhs: KernelCounts,
}

fn apply_lu_column(k: usize, pf: &PanelFactorization, off_rows: &[usize], panel: &[Tile], col: &mut [Tile]) {
    swptrsm_apply(pf, col);
    let (upper, lower) = col.split_at_mut(k + 1);
    let a_kj = &upper[k];
    for &i in off_rows {
        gemm_update(&mut lower[i - k - 1], &panel[i], a_kj);
    }
}

fn apply_qr_column(ops: &[PanelOp], col: &mut [Tile]) {
    for op in ops {
        match op {
            PanelOp::Geqrt { row, v, t } => unmqr(v, t, &mut col[*row], Trans::Transpose),
            PanelOp::Ts { killed, eliminator, v, t } => {
                let (e, i) = pair_mut(col, *eliminator, *killed);
                tsmqr(e, i, v, t, Trans::Transpose);
            }
            PanelOp::Tt { killed, eliminator, v, t } => {
                let (e, i) = pair_mut(col, *eliminator, *killed);
                ttmqr(e, i, v, t, Trans::Transpose);
            }
        }
    }
}

/// Applies step `k` to one tile column. `panel` is the factored column `k`.
pub fn apply_step(k: usize, step: &StepTransform, panel: &[Tile], col: &mut [Tile]) {
    match step {
        StepTransform::Lu { pf, off_rows } => apply_lu_column(k, pf, off_rows, panel, col),
        StepTransform::Qr { ops } => apply_qr_column(ops, col),
    }
}

fn update_trailing(ws: &mut Workspace, k: usize, step: &StepTransform) {
    let n = ws.n;
    let (panel, trailing) = ws.split(k);
    let panel: &[Tile] = panel;
    trailing
        .par_chunks_mut(n)
        .for_each(|col| apply_step(k, step, panel, col));
}

fn split_counts(ws: &Workspace, k: usize, panel: KernelCounts, per_column: KernelCounts) -> StepCounts {
    let mut matrix = panel;
    let columns = (ws.n - k - 1) as u64;
    for (kernel, c) in per_column.entries() {
        matrix.add(kernel, c * columns);
    }
    let rhs = if ws.cols > ws.n {
        per_column
    } else {
        KernelCounts::default()
    };
    StepCounts { matrix, rhs }
}

/// Cost of the domain factorization: one GETRF plus a TRSM per extra tile.
pub fn speculation_counts(pf: &PanelFactorization) -> KernelCounts {
    let mut c = KernelCounts::default();
    c.add(Kernel::Getrf, 1);
    c.add(Kernel::Trsm, pf.rows().len() as u64 - 1);
    c
}

/// LU step `k`: writes the domain factors into the panel, eliminates the
/// remaining panel tiles with `A_ik U^{-1}` and updates every trailing
/// column, right-hand side included.
pub fn lu_step(ws: &mut Workspace, k: usize, pf: &PanelFactorization) -> Result<(StepTransform, StepCounts)> {
    let n = ws.n;
    let off_rows: Vec<usize> = (k + 1..n).filter(|i| !pf.rows().contains(i)).collect();
    {
        let panel = ws.column_mut(k);
        pf.store(panel);
        let u = pf.u_tile();
        for &i in &off_rows {
            trsm_eliminate(&u, &mut panel[i])?;
        }
    }
    let step = StepTransform::Lu {
        pf: pf.clone(),
        off_rows,
    };
    update_trailing(ws, k, &step);

    let mut panel = speculation_counts(pf);
    let d = pf.rows().len() as u64;
    let off = (n - k) as u64 - d;
    panel.add(Kernel::Trsm, off);
    let mut per_column = KernelCounts::default();
    per_column.add(Kernel::Swptrsm, 1);
    per_column.add(Kernel::Gemm, d - 1 + off);
    Ok((step, split_counts(ws, k, panel, per_column)))
}

fn ensure_triangular(row: usize, panel: &mut [Tile], triangular: &mut [bool], ops: &mut Vec<PanelOp>) {
    if !triangular[row] {
        triangular[row] = true;
        let t = geqrt(&mut panel[row]);
        ops.push(PanelOp::Geqrt {
            row,
            v: panel[row].clone(),
            t,
        });
    }
}

/// QR step `k`: runs `plan` on the panel, triangularizing rows lazily the
/// first time they take part in an elimination, then replays the
/// transformations on every trailing column.
pub fn qr_step(ws: &mut Workspace, k: usize, plan: &EliminationPlan) -> (StepTransform, StepCounts) {
    let n = ws.n;
    let mut triangular = vec![false; n];
    let mut ops = Vec::new();
    {
        let panel = ws.column_mut(k);
        for e in &plan.eliminations {
            ensure_triangular(e.eliminator, panel, &mut triangular, &mut ops);
            let kind = if e.kind == KillKind::Tt || triangular[e.killed] {
                ensure_triangular(e.killed, panel, &mut triangular, &mut ops);
                KillKind::Tt
            } else {
                KillKind::Ts
            };
            let (r, a) = pair_mut(panel, e.eliminator, e.killed);
            let (killed, eliminator) = (e.killed, e.eliminator);
            ops.push(match kind {
                KillKind::Ts => {
                    let t = tsqrt(r, a);
                    PanelOp::Ts {
                        killed,
                        eliminator,
                        v: a.clone(),
                        t,
                    }
                }
                KillKind::Tt => {
                    let t = ttqrt(r, a);
                    PanelOp::Tt {
                        killed,
                        eliminator,
                        v: a.clone(),
                        t,
                    }
                }
            });
        }
        ensure_triangular(k, panel, &mut triangular, &mut ops);
    }

    let mut panel = KernelCounts::default();
    let mut per_column = KernelCounts::default();
    for op in &ops {
        let (p, c) = match op {
            PanelOp::Geqrt { .. } => (Kernel::Geqrt, Kernel::Unmqr),
            PanelOp::Ts { .. } => (Kernel::Tsqrt, Kernel::Tsmqr),
            PanelOp::Tt { .. } => (Kernel::Ttqrt, Kernel::Ttmqr),
        };
        panel.add(p, 1);
        per_column.add(c, 1);
    }
    let step = StepTransform::Qr { ops };
    update_trailing(ws, k, &step);
    let counts = split_counts(ws, k, panel, per_column);
    (step, counts)
}
