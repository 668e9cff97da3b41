//! Reduction trees for QR steps.
//!
//! A plan for step `k` first reduces the panel rows of every domain onto the
//! domain's first row with the intra-domain tree, then merges the surviving
//! triangles onto row `k` with the inter-domain tree. Each tree only fixes
//! who kills whom and in which order; logical times are assigned as soon as
//! both rows of a pair are free, so equal times always touch disjoint rows.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::tiled::DomainMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Flat,
    Binary,
    Greedy,
    Fibonacci,
}

impl TreeKind {
    pub fn name(self) -> &'static str {
        match self {
            TreeKind::Flat => "flat",
            TreeKind::Binary => "binary",
            TreeKind::Greedy => "greedy",
            TreeKind::Fibonacci => "fibonacci",
        }
    }
}

impl fmt::Display for TreeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for TreeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "flat" => TreeKind::Flat,
            "binary" => TreeKind::Binary,
            "greedy" => TreeKind::Greedy,
            "fibonacci" | "fib" => TreeKind::Fibonacci,
            other => return Err(Error::Parse(format!("unknown tree `{other}`"))),
        })
    }
}

/// TS kills a square tile, TT merges two triangles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KillKind {
    #[serde(rename = "TS")]
    Ts,
    #[serde(rename = "TT")]
    Tt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elimination {
    pub time: usize,
    pub killed: usize,
    pub eliminator: usize,
    pub kind: KillKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EliminationPlan {
    pub step: usize,
    pub n: usize,
    pub eliminations: Vec<Elimination>,
}

impl EliminationPlan {
    /// Number of logical time steps.
    pub fn depth(&self) -> usize {
        self.eliminations.iter().map(|e| e.time).max().unwrap_or(0)
    }

    pub fn eliminator_of(&self, row: usize) -> Option<usize> {
        self.eliminations
            .iter()
            .find(|e| e.killed == row)
            .map(|e| e.eliminator)
    }
}

impl fmt::Display for EliminationPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.eliminations {
            let kind = match e.kind {
                KillKind::Ts => "TS",
                KillKind::Tt => "TT",
            };
            writeln!(f, "t={} kill {} by {} {}", e.time, e.killed, e.eliminator, kind)?;
        }
        Ok(())
    }
}

/// Pairs `(killed, eliminator)` in dependency order.
type Pairs = Vec<(usize, usize)>;

fn flat_pairs(rows: &[usize]) -> Pairs {
    rows[1..].iter().map(|&r| (r, rows[0])).collect()
}

fn binary_pairs(rows: &[usize]) -> Pairs {
    let mut pairs = Vec::new();
    let mut stride = 1;
    while stride < rows.len() {
        for i in (0..rows.len()).step_by(2 * stride) {
            if i + stride < rows.len() {
                pairs.push((rows[i + stride], rows[i]));
            }
        }
        stride *= 2;
    }
    pairs
}

fn fibonacci_pairs(rows: &[usize]) -> Pairs {
    let z = rows.len();
    // smallest x with x(x+1)/2 >= z - 1
    let mut x = 0;
    while x * (x + 1) / 2 < z.saturating_sub(1) {
        x += 1;
    }
    let mut live = rows.to_vec();
    let mut pairs = Vec::new();
    let mut t = 1;
    while live.len() > 1 {
        let count = (x + 1).saturating_sub(t).max(1).min(live.len() / 2);
        let m = live.len();
        for j in 0..count {
            pairs.push((live[m - count + j], live[m - 2 * count + j]));
        }
        live.truncate(m - count);
        t += 1;
    }
    pairs
}

/// Assigns each pair the first time at which both rows are free.
fn schedule(pairs: &Pairs, free_at: &mut std::collections::BTreeMap<usize, usize>) -> Vec<(usize, usize, usize)> {
    pairs
        .iter()
        .map(|&(killed, elim)| {
            let t = free_at[&killed].max(free_at[&elim]) + 1;
            free_at.insert(killed, t);
            free_at.insert(elim, t);
            (t, killed, elim)
        })
        .collect()
}

/// Pairs consecutive free live rows at every time step.
fn greedy_schedule(rows: &[usize], free_at: &mut std::collections::BTreeMap<usize, usize>) -> Vec<(usize, usize, usize)> {
    let mut live = rows.to_vec();
    let mut out = Vec::new();
    let mut t = rows.iter().map(|r| free_at[r]).min().unwrap_or(0);
    while live.len() > 1 {
        t += 1;
        let ready: Vec<usize> = live.iter().copied().filter(|r| free_at[r] < t).collect();
        for pair in ready.chunks_exact(2) {
            let (elim, killed) = (pair[0], pair[1]);
            free_at.insert(killed, t);
            free_at.insert(elim, t);
            out.push((t, killed, elim));
            live.retain(|&r| r != killed);
        }
    }
    out
}

fn reduce(
    kind: TreeKind,
    rows: &[usize],
    free_at: &mut std::collections::BTreeMap<usize, usize>,
) -> Vec<(usize, usize, usize)> {
    match kind {
        TreeKind::Flat => schedule(&flat_pairs(rows), free_at),
        TreeKind::Binary => schedule(&binary_pairs(rows), free_at),
        TreeKind::Fibonacci => schedule(&fibonacci_pairs(rows), free_at),
        TreeKind::Greedy => greedy_schedule(rows, free_at),
    }
}

/// Elimination plan for step `k` of an `n x n` tile grid.
pub fn build_plan(k: usize, n: usize, map: &DomainMap, intra: TreeKind, inter: TreeKind) -> EliminationPlan {
    let domains = map.panel_domains(k, n);
    let mut free_at = std::collections::BTreeMap::new();
    for r in k..n {
        free_at.insert(r, 0);
    }
    let mut eliminations = Vec::new();
    let mut triangular = std::collections::BTreeSet::new();
    for rows in &domains {
        for (t, killed, elim) in reduce(intra, rows, &mut free_at) {
            let kind = if triangular.contains(&killed) {
                KillKind::Tt
            } else {
                KillKind::Ts
            };
            triangular.insert(elim);
            eliminations.push(Elimination {
                time: t,
                killed,
                eliminator: elim,
                kind,
            });
        }
    }
    let survivors: Vec<usize> = domains.iter().map(|d| d[0]).collect();
    for (t, killed, elim) in reduce(inter, &survivors, &mut free_at) {
        eliminations.push(Elimination {
            time: t,
            killed,
            eliminator: elim,
            kind: KillKind::Tt,
        });
    }
    eliminations.sort_by_key(|e| (e.time, e.killed));
    EliminationPlan {
        step: k,
        n,
        eliminations,
    }
}

/// Checks every plan invariant and reports the first violation.
pub fn validate_plan(plan: &EliminationPlan) -> Result<(), String> {
    let (k, n) = (plan.step, plan.n);
    if k >= n {
        return Err(format!("step {k} outside a grid of {n} tile rows"));
    }
    let mut killed_at: Vec<Option<usize>> = vec![None; n];
    let mut prev_time = 0;
    let mut busy: Vec<usize> = Vec::new();
    for e in &plan.eliminations {
        if e.time == 0 {
            return Err("logical times start at 1".into());
        }
        if e.time < prev_time {
            return Err(format!("eliminations out of time order at row {}", e.killed));
        }
        if e.time != prev_time {
            busy.clear();
            prev_time = e.time;
        }
        if e.killed <= k || e.killed >= n || e.eliminator < k || e.eliminator >= n {
            return Err(format!(
                "kill of {} by {} leaves the panel of step {k}",
                e.killed, e.eliminator
            ));
        }
        if e.killed == e.eliminator {
            return Err(format!("row {} eliminates itself", e.killed));
        }
        if killed_at[e.killed].is_some() {
            return Err(format!("duplicate elimination of row {}", e.killed));
        }
        if killed_at[e.eliminator].is_some() {
            return Err(format!(
                "row {} eliminates row {} after being eliminated",
                e.eliminator, e.killed
            ));
        }
        if busy.contains(&e.killed) || busy.contains(&e.eliminator) {
            return Err(format!(
                "rows {} and {} are not disjoint from other eliminations at t={}",
                e.killed, e.eliminator, e.time
            ));
        }
        busy.extend([e.killed, e.eliminator]);
        killed_at[e.killed] = Some(e.time);
    }
    if let Some(row) = (k + 1..n).find(|&r| killed_at[r].is_none()) {
        return Err(format!("row {row} is never eliminated"));
    }
    Ok(())
}
