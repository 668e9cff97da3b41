//! Command-line harness behind the `hluqr` binary.
//!
//! Three commands share one set of run flags:
//!
//! * `factor` runs one factorization (or `--repetitions` of them), solves,
//!   and reports backward error, growth and flop counts.
//! * `sweep` repeats `factor` over a list of thresholds.
//! * `suite` runs the special matrices plus random ones under every
//!   configured criterion and the two pure baselines.
//!
//! Exit codes: 0 on success, 1 on usage or I/O errors, 2 when a run fails
//! numerically (the factorization errors out or the solution is not
//! finite). A large backward error alone is a result, not a failure.
//!
//! JSON output follows `results.schema.json`; CSV columns are fixed per
//! version and listed in [`RUN_COLUMNS`], [`SWEEP_COLUMNS`] and
//! [`SUITE_COLUMNS`].

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::criteria::{CriterionKind, InvNormMode, StepKind};
use crate::error::{Error, Result};
use crate::factorization::{flop_report, hybrid_factor, FlopReport, HybridConfig, PivotScope, StepLog};
use crate::matgen::{self, MatrixKind, MatrixSpec, SPECIAL};
use crate::metrics::{growth_ratio, hpl3, lupp_hpl3, HPL3_THRESHOLD};
use crate::serde_util::extended_f64;
use crate::tiled::{DenseMatrix, GridConfig, TiledMatrix};
use crate::trees::TreeKind;

/// Version of the JSON layout and of the CSV column sets.
pub const SCHEMA_VERSION: u32 = 1;

/// JSON schema for every document the CLI writes.
pub const RESULT_SCHEMA: &str = include_str!("../results.schema.json");

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

pub const RUN_COLUMNS: [&str; 24] = [
    "schema_version",
    "matrix",
    "n",
    "nb",
    "grid",
    "criterion",
    "alpha",
    "pivot_scope",
    "tree_intra",
    "tree_inter",
    "seed",
    "repetition",
    "status",
    "f_lu",
    "lu_steps",
    "qr_steps",
    "hpl3",
    "hpl3_lupp",
    "hpl3_ratio_vs_lupp",
    "growth_ratio",
    "model_flops",
    "true_flops",
    "normalized_gflops",
    "wall_time_s",
];

pub const SWEEP_COLUMNS: [&str; 16] = [
    "schema_version",
    "matrix",
    "criterion",
    "alpha",
    "repetition",
    "status",
    "f_lu",
    "lu_steps",
    "qr_steps",
    "hpl3",
    "hpl3_lupp",
    "hpl3_ratio_vs_lupp",
    "growth_ratio",
    "model_flops",
    "true_flops",
    "wall_time_s",
];

pub const SUITE_COLUMNS: [&str; 12] = [
    "schema_version",
    "matrix",
    "method",
    "criterion",
    "alpha",
    "pivot_scope",
    "f_lu",
    "hpl3",
    "hpl3_ratio_vs_lupp",
    "growth_ratio",
    "passed",
    "error",
];

#[derive(Parser, Debug)]
#[command(name = "hluqr", version, about = "Hybrid LU-QR tiled solver harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Factor and solve one system.
    Factor(FactorArgs),
    /// Run the same system over a list of thresholds.
    Sweep(SweepArgs),
    /// Run the special-matrix stability suite.
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Clone, Debug)]
pub struct RunArgs {
    /// Matrix order N, a multiple of --nb.
    #[arg(long, default_value_t = 960)]
    pub n: usize,
    /// Tile order.
    #[arg(long, default_value_t = 40)]
    pub nb: usize,
    /// Process grid, `PxQ`.
    #[arg(long, default_value = "4x4")]
    pub grid: GridConfig,
    /// Pivot search region of LU steps: `tile` or `domain`.
    #[arg(long, default_value = "domain")]
    pub pivot_scope: PivotScope,
    /// Elimination tree inside a domain.
    #[arg(long, default_value = "greedy")]
    pub tree_intra: TreeKind,
    /// Elimination tree across domains.
    #[arg(long, default_value = "fibonacci")]
    pub tree_inter: TreeKind,
    /// Seed of the matrix, right-hand side and Random criterion.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses the global pool.
    #[arg(long, env = "HLUQR_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// Seed the Random criterion from --seed instead of OS entropy.
    #[arg(long)]
    pub deterministic: bool,
    /// Record per-step growth and bound checks.
    #[arg(long)]
    pub instrument: bool,
    /// Inverse-norm evaluation: `estimate` or `exact`.
    #[arg(long, default_value = "estimate")]
    pub inv_norm: InvNormMode,
    /// Independent runs; repetition r adds r to every seed.
    #[arg(long, default_value_t = 1)]
    pub repetitions: usize,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Args, Clone, Debug)]
pub struct FactorArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value = "max")]
    pub criterion: CriterionKind,
    /// Threshold; `inf` is accepted. Defaults per criterion.
    #[arg(long, value_parser = extended_f64::parse)]
    pub alpha: Option<f64>,
    /// Matrix kind, e.g. `random`, `hilb`, `wilkinson`.
    #[arg(long, default_value = "random")]
    pub matrix: MatrixKind,
    /// Generator parameter override.
    #[arg(long)]
    pub param: Option<f64>,
}

#[derive(Args, Clone, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value = "max")]
    pub criterion: CriterionKind,
    /// Comma-separated thresholds; defaults per criterion.
    #[arg(long, value_delimiter = ',', value_parser = extended_f64::parse)]
    pub alphas: Vec<f64>,
    #[arg(long, default_value = "random")]
    pub matrix: MatrixKind,
    #[arg(long)]
    pub param: Option<f64>,
}

#[derive(Args, Clone, Debug)]
pub struct SuiteArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Comma-separated `criterion[:alpha]` list.
    #[arg(long, value_delimiter = ',', default_value = "max:6000,mumps:2.1,random:50")]
    pub criteria: Vec<MethodSpec>,
    /// Number of random matrices added to the special ones.
    #[arg(long, default_value_t = 2)]
    pub random_count: usize,
}

/// Threshold used when `--alpha` is absent.
pub fn default_alpha(criterion: CriterionKind) -> f64 {
    match criterion {
        CriterionKind::Max | CriterionKind::Sum => 6000.0,
        CriterionKind::Mumps => 2.1,
        CriterionKind::Random => 50.0,
        CriterionKind::AlwaysLu => f64::INFINITY,
        CriterionKind::AlwaysQr => 0.0,
    }
}

/// Ten increasing thresholds spanning the useful range of `criterion`.
pub fn default_alphas(criterion: CriterionKind) -> Vec<f64> {
    let inf = f64::INFINITY;
    match criterion {
        CriterionKind::Max | CriterionKind::Sum => vec![0.0, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0, 1000.0, 6000.0, inf],
        CriterionKind::Mumps => vec![0.0, 0.5, 1.0, 1.5, 2.1, 3.0, 5.0, 10.0, 100.0, inf],
        CriterionKind::Random => vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 100.0],
        CriterionKind::AlwaysLu | CriterionKind::AlwaysQr => vec![default_alpha(criterion)],
    }
}

/// One criterion setting of the suite, parsed from `criterion[:alpha]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MethodSpec {
    pub criterion: CriterionKind,
    pub alpha: f64,
}

impl std::str::FromStr for MethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, alpha) = match s.split_once(':') {
            Some((name, alpha)) => (name, Some(alpha)),
            None => (s, None),
        };
        let criterion: CriterionKind = name.trim().parse()?;
        let alpha = match alpha {
            Some(a) => extended_f64::parse(a).map_err(Error::Parse)?,
            None => default_alpha(criterion),
        };
        criterion.validate_alpha(alpha)?;
        Ok(MethodSpec { criterion, alpha })
    }
}

/// A validated single-run request.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRequest {
    pub matrix: MatrixSpec,
    pub cfg: HybridConfig,
    pub out: Option<PathBuf>,
    pub format: OutputFormat,
    pub repetitions: usize,
    pub instrument: bool,
}

impl RunRequest {
    /// Builds a request from flags. `criterion` and `alpha` come from the
    /// command; the rest from the shared run flags.
    pub fn from_args(
        run: &RunArgs,
        matrix: MatrixKind,
        param: Option<f64>,
        criterion: CriterionKind,
        alpha: Option<f64>,
    ) -> Result<Self> {
        let mut spec = MatrixSpec::new(matrix, run.n, run.seed).with_nb(run.nb);
        spec.param = param;
        let cfg = HybridConfig {
            criterion,
            alpha: alpha.unwrap_or_else(|| default_alpha(criterion)),
            pivot_scope: run.pivot_scope,
            tree_intra: run.tree_intra,
            tree_inter: run.tree_inter,
            grid: run.grid,
            nb: run.nb,
            deterministic: run.deterministic,
            seed: run.seed,
            threads: run.threads,
            instrument: run.instrument,
            inv_norm: run.inv_norm,
        };
        let req = RunRequest {
            matrix: spec,
            cfg,
            out: run.out.clone(),
            format: run.format,
            repetitions: run.repetitions,
            instrument: run.instrument,
        };
        req.validate()?;
        Ok(req)
    }

    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        if self.repetitions == 0 {
            return Err(Error::InvalidParameter("repetitions must be at least 1".into()));
        }
        if self.matrix.n == 0 || !self.matrix.n.is_multiple_of(self.cfg.nb) {
            return Err(Error::InvalidParameter(format!(
                "matrix order {} is not a positive multiple of nb = {}",
                self.matrix.n, self.cfg.nb
            )));
        }
        Ok(())
    }

    /// Matrix spec and config of repetition `r`.
    fn repetition(&self, r: usize) -> (MatrixSpec, HybridConfig) {
        let mut spec = self.matrix.clone();
        spec.seed = spec.seed.wrapping_add(r as u64);
        let mut cfg = self.cfg.clone();
        cfg.seed = cfg.seed.wrapping_add(r as u64);
        cfg.instrument = self.instrument;
        (spec, cfg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    NumericalFailure,
}

impl RunStatus {
    fn as_str(self) -> &'static str {
        match self {
            RunStatus::Ok => "ok",
            RunStatus::NumericalFailure => "numerical_failure",
        }
    }
}

/// Result document of one run.
///
/// Timing fields are `wall_time_s`, `normalized_gflops`, `true_gflops` and
/// the per-step `wall_time_s`; everything else is deterministic for a
/// deterministic config.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub schema_version: u32,
    pub config: HybridConfig,
    pub matrix: MatrixSpec,
    pub repetition: usize,
    pub status: RunStatus,
    pub error: Option<String>,
    pub steps: Vec<StepLog>,
    pub forced_qr_steps: Vec<usize>,
    pub f_lu: f64,
    pub lu_steps: usize,
    pub qr_steps: usize,
    /// Absent when the solve failed or diverged.
    pub hpl3: Option<f64>,
    pub hpl3_lupp: Option<f64>,
    pub hpl3_ratio_vs_lupp: Option<f64>,
    pub passed: bool,
    pub growth_ratio: Option<f64>,
    pub flops: FlopReport,
    /// Sum of executed kernel costs on the matrix, excluding the right-hand side.
    pub true_flops: f64,
    /// `2/3 N^3` over the wall time, in GFLOP/s.
    pub normalized_gflops: f64,
    pub true_gflops: f64,
    pub wall_time_s: f64,
}

impl RunResult {
    /// Copy with every timing field zeroed.
    pub fn without_timing(&self) -> RunResult {
        let mut r = self.clone();
        r.wall_time_s = 0.0;
        r.normalized_gflops = 0.0;
        r.true_gflops = 0.0;
        for s in &mut r.steps {
            s.wall_time_s = 0.0;
        }
        r
    }

    fn csv_record(&self) -> Vec<String> {
        let c = &self.config;
        vec![
            self.schema_version.to_string(),
            self.matrix.kind.name().to_string(),
            self.matrix.n.to_string(),
            c.nb.to_string(),
            format!("{}x{}", c.grid.p, c.grid.q),
            c.criterion.name().to_string(),
            fmt_f64(c.alpha),
            scope_name(c.pivot_scope).to_string(),
            c.tree_intra.to_string(),
            c.tree_inter.to_string(),
            c.seed.to_string(),
            self.repetition.to_string(),
            self.status.as_str().to_string(),
            fmt_f64(self.f_lu),
            self.lu_steps.to_string(),
            self.qr_steps.to_string(),
            fmt_opt(self.hpl3),
            fmt_opt(self.hpl3_lupp),
            fmt_opt(self.hpl3_ratio_vs_lupp),
            fmt_opt(self.growth_ratio),
            fmt_f64(self.flops.model_flops),
            fmt_f64(self.true_flops),
            fmt_f64(self.normalized_gflops),
            fmt_f64(self.wall_time_s),
        ]
    }
}

fn fmt_f64(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else {
        format!("{v}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn scope_name(s: PivotScope) -> &'static str {
    match s {
        PivotScope::Tile => "tile",
        PivotScope::Domain => "domain",
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Factors, solves and measures one system.
///
/// `lupp` is the LUPP backward error of the same system, when known.
pub fn run_system(
    a: &DenseMatrix,
    b: &[f64],
    spec: &MatrixSpec,
    cfg: &HybridConfig,
    repetition: usize,
    lupp: Option<f64>,
) -> Result<RunResult> {
    let tiled = TiledMatrix::from_dense(a, cfg.nb)?;
    let order = a.order();
    let start = Instant::now();
    let factored = hybrid_factor(&tiled, b, cfg);
    let solved = match &factored {
        Ok(r) => crate::factorization::solve(r).map_err(|e| e.to_string()),
        Err(e) => Err(e.to_string()),
    };
    let wall = start.elapsed().as_secs_f64();
    let mut out = RunResult {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        matrix: spec.clone(),
        repetition,
        status: RunStatus::Ok,
        error: None,
        steps: Vec::new(),
        forced_qr_steps: Vec::new(),
        f_lu: 0.0,
        lu_steps: 0,
        qr_steps: 0,
        hpl3: None,
        hpl3_lupp: lupp,
        hpl3_ratio_vs_lupp: None,
        passed: false,
        growth_ratio: None,
        flops: flop_report(&[], order, cfg.nb),
        true_flops: 0.0,
        normalized_gflops: 0.0,
        true_gflops: 0.0,
        wall_time_s: wall,
    };
    if let Ok(r) = &factored {
        out.steps = r.steps.clone();
        out.forced_qr_steps = r.status.forced_qr_steps.clone();
        out.f_lu = r.f_lu();
        out.lu_steps = r.decisions().iter().filter(|d| **d == StepKind::Lu).count();
        out.qr_steps = r.steps.len() - out.lu_steps;
        out.growth_ratio = growth_ratio(&r.steps);
        out.flops = flop_report(&r.steps, order, cfg.nb);
        out.true_flops = out.flops.kernel_flops;
        if wall > 0.0 {
            out.normalized_gflops = out.flops.normalized_flops / wall / 1e9;
            out.true_gflops = out.true_flops / wall / 1e9;
        }
    }
    match solved {
        Ok(x) => {
            let h = hpl3(a, &x, b);
            if x.iter().all(|v| v.is_finite()) && h.is_finite() {
                out.hpl3 = Some(h);
                out.hpl3_ratio_vs_lupp = lupp.and_then(|l| finite(h / l));
                out.passed = h < HPL3_THRESHOLD;
            } else {
                out.status = RunStatus::NumericalFailure;
                out.error = Some("solution is not finite".into());
            }
        }
        Err(e) => {
            out.status = RunStatus::NumericalFailure;
            out.error = Some(e);
        }
    }
    Ok(out)
}

/// Generates the system of `spec` and its LUPP reference error.
fn system(spec: &MatrixSpec) -> Result<(DenseMatrix, Vec<f64>, Option<f64>)> {
    let a = matgen::generate(spec)?;
    let b = matgen::rhs(spec.n, spec.seed);
    let lupp = lupp_hpl3(&a, &b).and_then(finite);
    Ok((a, b, lupp))
}

/// Runs every repetition of `req`.
pub fn execute(req: &RunRequest) -> Result<Vec<RunResult>> {
    req.validate()?;
    (0..req.repetitions)
        .map(|r| {
            let (spec, cfg) = req.repetition(r);
            let (a, b, lupp) = system(&spec)?;
            run_system(&a, &b, &spec, &cfg, r, lupp)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub matrix: MatrixKind,
    pub criterion: CriterionKind,
    #[serde(with = "extended_f64")]
    pub alpha: f64,
    pub repetition: usize,
    pub status: RunStatus,
    pub f_lu: f64,
    pub lu_steps: usize,
    pub qr_steps: usize,
    pub hpl3: Option<f64>,
    pub hpl3_lupp: Option<f64>,
    pub hpl3_ratio_vs_lupp: Option<f64>,
    pub growth_ratio: Option<f64>,
    pub model_flops: f64,
    pub true_flops: f64,
    pub wall_time_s: f64,
}

impl SweepRow {
    fn from_run(r: &RunResult) -> Self {
        SweepRow {
            matrix: r.matrix.kind,
            criterion: r.config.criterion,
            alpha: r.config.alpha,
            repetition: r.repetition,
            status: r.status,
            f_lu: r.f_lu,
            lu_steps: r.lu_steps,
            qr_steps: r.qr_steps,
            hpl3: r.hpl3,
            hpl3_lupp: r.hpl3_lupp,
            hpl3_ratio_vs_lupp: r.hpl3_ratio_vs_lupp,
            growth_ratio: r.growth_ratio,
            model_flops: r.flops.model_flops,
            true_flops: r.true_flops,
            wall_time_s: r.wall_time_s,
        }
    }

    fn csv_record(&self) -> Vec<String> {
        vec![
            SCHEMA_VERSION.to_string(),
            self.matrix.name().to_string(),
            self.criterion.name().to_string(),
            fmt_f64(self.alpha),
            self.repetition.to_string(),
            self.status.as_str().to_string(),
            fmt_f64(self.f_lu),
            self.lu_steps.to_string(),
            self.qr_steps.to_string(),
            fmt_opt(self.hpl3),
            fmt_opt(self.hpl3_lupp),
            fmt_opt(self.hpl3_ratio_vs_lupp),
            fmt_opt(self.growth_ratio),
            fmt_f64(self.model_flops),
            fmt_f64(self.true_flops),
            fmt_f64(self.wall_time_s),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub matrix: MatrixSpec,
    pub config: HybridConfig,
    pub rows: Vec<SweepRow>,
}

/// Runs `req` once per threshold in `alphas`. The system and its LUPP
/// reference are computed once per repetition.
pub fn sweep(req: &RunRequest, alphas: &[f64]) -> Result<SweepReport> {
    req.validate()?;
    if alphas.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one threshold".into()));
    }
    for &a in alphas {
        req.cfg.criterion.validate_alpha(a)?;
    }
    let mut rows = Vec::with_capacity(alphas.len() * req.repetitions);
    for r in 0..req.repetitions {
        let (spec, cfg) = req.repetition(r);
        let (a, b, lupp) = system(&spec)?;
        for &alpha in alphas {
            let cfg = HybridConfig { alpha, ..cfg.clone() };
            rows.push(SweepRow::from_run(&run_system(&a, &b, &spec, &cfg, r, lupp)?));
        }
    }
    Ok(SweepReport {
        schema_version: SCHEMA_VERSION,
        matrix: req.matrix.clone(),
        config: req.cfg.clone(),
        rows,
    })
}

/// One column of the suite table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteMethod {
    pub label: String,
    pub criterion: CriterionKind,
    #[serde(with = "extended_f64")]
    pub alpha: f64,
    pub pivot_scope: PivotScope,
}

impl SuiteMethod {
    pub fn new(criterion: CriterionKind, alpha: f64, pivot_scope: PivotScope) -> Self {
        let label = match criterion {
            CriterionKind::AlwaysLu | CriterionKind::AlwaysQr => format!("{}-{}", criterion.name(), scope_name(pivot_scope)),
            _ => format!("{}:{}", criterion.name(), fmt_f64(alpha)),
        };
        SuiteMethod {
            label,
            criterion,
            alpha,
            pivot_scope,
        }
    }
}

/// Configured criteria followed by the AlwaysLU (tile scope) and AlwaysQR
/// baselines. Criteria that duplicate a baseline are skipped.
pub fn suite_methods(criteria: &[MethodSpec], scope: PivotScope) -> Vec<SuiteMethod> {
    let mut methods: Vec<SuiteMethod> = criteria
        .iter()
        .filter(|m| !matches!(m.criterion, CriterionKind::AlwaysLu | CriterionKind::AlwaysQr))
        .map(|m| SuiteMethod::new(m.criterion, m.alpha, scope))
        .collect();
    methods.push(SuiteMethod::new(CriterionKind::AlwaysLu, f64::INFINITY, PivotScope::Tile));
    methods.push(SuiteMethod::new(CriterionKind::AlwaysQr, 0.0, scope));
    methods
}

/// Special matrices followed by `random_count` random ones.
pub fn suite_matrices(n: usize, nb: usize, seed: u64, random_count: usize) -> Vec<(String, MatrixSpec)> {
    let mut out: Vec<(String, MatrixSpec)> = SPECIAL
        .iter()
        .map(|k| (k.name().to_string(), MatrixSpec::new(*k, n, seed).with_nb(nb)))
        .collect();
    for i in 0..random_count {
        let s = seed.wrapping_add(i as u64);
        out.push((format!("random#{i}"), MatrixSpec::new(MatrixKind::Random, n, s).with_nb(nb)));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteRow {
    pub matrix: String,
    pub method: String,
    pub criterion: CriterionKind,
    #[serde(with = "extended_f64")]
    pub alpha: f64,
    pub pivot_scope: PivotScope,
    pub f_lu: Option<f64>,
    pub hpl3: Option<f64>,
    pub hpl3_lupp: Option<f64>,
    pub hpl3_ratio_vs_lupp: Option<f64>,
    pub growth_ratio: Option<f64>,
    pub passed: bool,
    pub error: Option<String>,
    /// Per-step checksums matched for every QR step.
    pub restore_ok: bool,
}

impl SuiteRow {
    fn csv_record(&self) -> Vec<String> {
        vec![
            SCHEMA_VERSION.to_string(),
            self.matrix.clone(),
            self.method.clone(),
            self.criterion.name().to_string(),
            fmt_f64(self.alpha),
            scope_name(self.pivot_scope).to_string(),
            fmt_opt(self.f_lu),
            fmt_opt(self.hpl3),
            fmt_opt(self.hpl3_ratio_vs_lupp),
            fmt_opt(self.growth_ratio),
            self.passed.to_string(),
            self.error.clone().unwrap_or_default(),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: String,
    pub passed: usize,
    pub total: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub n: usize,
    pub nb: usize,
    pub grid: GridConfig,
    pub methods: Vec<SuiteMethod>,
    pub rows: Vec<SuiteRow>,
    pub summary: Vec<MethodSummary>,
}

impl SuiteReport {
    pub fn row(&self, matrix: &str, method: &str) -> Option<&SuiteRow> {
        self.rows.iter().find(|r| r.matrix == matrix && r.method == method)
    }
}

/// Every QR step that followed a speculation restored the panel bits.
pub fn restore_ok(steps: &[StepLog]) -> bool {
    steps
        .iter()
        .filter(|s| s.decision.kind == StepKind::Qr && s.panel_checksum.is_some())
        .all(|s| s.restored_checksum == s.panel_checksum)
}

/// Runs every matrix under every method. Failures are recorded per row and
/// the suite carries on.
pub fn stability_suite(base: &RunRequest, methods: &[SuiteMethod], matrices: &[(String, MatrixSpec)]) -> Result<SuiteReport> {
    base.validate()?;
    for m in methods {
        m.criterion.validate_alpha(m.alpha)?;
    }
    let mut rows = Vec::new();
    for (name, spec) in matrices {
        let sys = system(spec).map_err(|e| e.to_string());
        for m in methods {
            let cfg = HybridConfig {
                criterion: m.criterion,
                alpha: m.alpha,
                pivot_scope: m.pivot_scope,
                instrument: base.instrument,
                ..base.cfg.clone()
            };
            let run = match &sys {
                Ok((a, b, lupp)) => run_system(a, b, spec, &cfg, 0, *lupp).map_err(|e| e.to_string()),
                Err(e) => Err(e.clone()),
            };
            rows.push(match run {
                Ok(r) => SuiteRow {
                    matrix: name.clone(),
                    method: m.label.clone(),
                    criterion: m.criterion,
                    alpha: m.alpha,
                    pivot_scope: m.pivot_scope,
                    f_lu: (!r.steps.is_empty()).then_some(r.f_lu),
                    hpl3: r.hpl3,
                    hpl3_lupp: r.hpl3_lupp,
                    hpl3_ratio_vs_lupp: r.hpl3_ratio_vs_lupp,
                    growth_ratio: r.growth_ratio,
                    passed: r.passed,
                    restore_ok: restore_ok(&r.steps),
                    error: r.error,
                },
                Err(e) => SuiteRow {
                    matrix: name.clone(),
                    method: m.label.clone(),
                    criterion: m.criterion,
                    alpha: m.alpha,
                    pivot_scope: m.pivot_scope,
                    f_lu: None,
                    hpl3: None,
                    hpl3_lupp: None,
                    hpl3_ratio_vs_lupp: None,
                    growth_ratio: None,
                    passed: false,
                    error: Some(e),
                    restore_ok: true,
                },
            });
        }
    }
    let summary = methods
        .iter()
        .map(|m| {
            let mine: Vec<_> = rows.iter().filter(|r| r.method == m.label).collect();
            MethodSummary {
                method: m.label.clone(),
                passed: mine.iter().filter(|r| r.passed).count(),
                total: mine.len(),
            }
        })
        .collect();
    Ok(SuiteReport {
        schema_version: SCHEMA_VERSION,
        n: base.matrix.n,
        nb: base.cfg.nb,
        grid: base.cfg.grid,
        methods: methods.to_vec(),
        rows,
        summary,
    })
}

/// Rendered output of a command together with its exit code.
#[derive(Clone, Debug, PartialEq)]
pub struct CommandOutput {
    pub exit_code: i32,
    pub body: String,
    pub out: Option<PathBuf>,
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn to_csv(header: &[&str], records: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Parse(e.to_string());
    w.write_record(header).map_err(csv_err)?;
    for r in records {
        w.write_record(&r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

pub fn cmd_factor(args: &FactorArgs) -> Result<CommandOutput> {
    let req = RunRequest::from_args(&args.run, args.matrix, args.param, args.criterion, args.alpha)?;
    let results = execute(&req)?;
    let failed = results.iter().any(|r| r.status != RunStatus::Ok);
    let body = match req.format {
        OutputFormat::Json if results.len() == 1 => to_json(&results[0])?,
        OutputFormat::Json => to_json(&results)?,
        OutputFormat::Csv => to_csv(&RUN_COLUMNS, results.iter().map(RunResult::csv_record))?,
    };
    Ok(CommandOutput {
        exit_code: if failed { EXIT_NUMERICAL } else { EXIT_OK },
        body,
        out: req.out,
    })
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<CommandOutput> {
    let req = RunRequest::from_args(&args.run, args.matrix, args.param, args.criterion, None)?;
    let alphas = if args.alphas.is_empty() {
        default_alphas(args.criterion)
    } else {
        args.alphas.clone()
    };
    let report = sweep(&req, &alphas)?;
    let failed = report.rows.iter().any(|r| r.status != RunStatus::Ok);
    let body = match req.format {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Csv => to_csv(&SWEEP_COLUMNS, report.rows.iter().map(SweepRow::csv_record))?,
    };
    Ok(CommandOutput {
        exit_code: if failed { EXIT_NUMERICAL } else { EXIT_OK },
        body,
        out: req.out,
    })
}

pub fn cmd_stability_suite(args: &SuiteArgs) -> Result<CommandOutput> {
    let first = args.criteria.first().copied().unwrap_or(MethodSpec {
        criterion: CriterionKind::Max,
        alpha: default_alpha(CriterionKind::Max),
    });
    let req = RunRequest::from_args(&args.run, MatrixKind::Random, None, first.criterion, Some(first.alpha))?;
    let methods = suite_methods(&args.criteria, args.run.pivot_scope);
    let matrices = suite_matrices(args.run.n, args.run.nb, args.run.seed, args.random_count);
    let report = stability_suite(&req, &methods, &matrices)?;
    let body = match req.format {
        OutputFormat::Json => to_json(&report)?,
        OutputFormat::Csv => to_csv(&SUITE_COLUMNS, report.rows.iter().map(SuiteRow::csv_record))?,
    };
    Ok(CommandOutput {
        exit_code: EXIT_OK,
        body,
        out: req.out,
    })
}

/// Parses `args` (including the program name), runs the command and writes
/// the result to `--out` or `stdout`. Diagnostics go to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let output = match &cli.command {
        Command::Factor(a) => cmd_factor(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Suite(a) => cmd_stability_suite(a),
    };
    let output = match output {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let written = match &output.out {
        Some(path) => std::fs::write(path, &output.body),
        None => stdout.write_all(output.body.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_USAGE;
    }
    output.exit_code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(extra: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let args = std::iter::once("hluqr").chain(extra.iter().copied());
        let code = run(args, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn hilbert_alwaysqr_reports_zero_lu_fraction() {
        let (code, out, _) = run_args(&["factor", "--matrix", "hilb", "--n", "4", "--nb", "2", "--criterion", "alwaysqr"]);
        assert_eq!(code, EXIT_OK);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["f_lu"], 0.0);
        assert_eq!(v["steps"].as_array().unwrap().len(), 2);
        assert_eq!(v["status"], "ok");
    }

    #[test]
    fn usage_errors_exit_one() {
        for args in [
            &["factor", "--bogus"][..],
            &["factor", "--matrix", "nosuch"],
            &["factor", "--n", "10", "--nb", "4"],
            &["factor", "--criterion", "random", "--alpha", "150"],
            &["factor", "--grid", "0x2"],
            &[],
        ] {
            let (code, _, err) = run_args(args);
            assert_eq!(code, EXIT_USAGE, "{args:?}");
            assert!(!err.is_empty());
        }
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn default_thresholds_follow_criterion() {
        assert_eq!(default_alpha(CriterionKind::Max), 6000.0);
        assert_eq!(default_alpha(CriterionKind::Mumps), 2.1);
        assert_eq!(default_alpha(CriterionKind::Random), 50.0);
        for c in [CriterionKind::Max, CriterionKind::Sum, CriterionKind::Mumps, CriterionKind::Random] {
            let a = default_alphas(c);
            assert_eq!(a.len(), 10);
            assert!(a.windows(2).all(|w| w[0] < w[1]));
            assert!(a.iter().all(|x| c.validate_alpha(*x).is_ok()));
        }
    }

    #[test]
    fn method_spec_parsing() {
        let m: MethodSpec = "mumps:2.1".parse().unwrap();
        assert_eq!(m, MethodSpec { criterion: CriterionKind::Mumps, alpha: 2.1 });
        let m: MethodSpec = "max".parse().unwrap();
        assert_eq!(m.alpha, 6000.0);
        let m: MethodSpec = "sum:inf".parse().unwrap();
        assert_eq!(m.alpha, f64::INFINITY);
        assert!("random:101".parse::<MethodSpec>().is_err());
        assert!("nope:1".parse::<MethodSpec>().is_err());
    }

    #[test]
    fn csv_header_is_fixed() {
        let (code, out, _) = run_args(&["factor", "--n", "8", "--nb", "2", "--format", "csv", "--repetitions", "2"]);
        assert_eq!(code, EXIT_OK);
        let mut lines = out.lines();
        assert_eq!(lines.next().unwrap(), RUN_COLUMNS.join(","));
        assert_eq!(lines.count(), 2);
    }

    #[test]
    fn sweep_brackets_lu_fraction() {
        let (code, out, _) = run_args(&["sweep", "--n", "16", "--nb", "4", "--grid", "2x1", "--alphas", "0,inf"]);
        assert_eq!(code, EXIT_OK);
        let report: SweepReport = serde_json::from_str(&out).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.rows[0].f_lu, 0.0);
        assert_eq!(report.rows[1].f_lu, 1.0);
        assert_eq!(report.rows[1].alpha, f64::INFINITY);
    }

    #[test]
    fn suite_marks_baselines() {
        let methods = suite_methods(&["max:6000".parse().unwrap(), "alwaysqr".parse().unwrap()], PivotScope::Domain);
        let labels: Vec<_> = methods.iter().map(|m| m.label.as_str()).collect();
        assert_eq!(labels, ["max:6000", "alwayslu-tile", "alwaysqr-domain"]);
        assert_eq!(suite_matrices(8, 2, 0, 3).len(), 24);
    }
}
