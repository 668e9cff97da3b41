//! Test matrix generators.
//!
//! The special matrices follow the constructions of Higham's test matrix
//! collection (MATLAB `gallery`), with 1-based formulas translated to
//! 0-based storage. Fixed parameter defaults:
//!
//! | kind    | default                                   |
//! |---------|-------------------------------------------|
//! | condex  | mode 4, theta = 100                       |
//! | dorr    | theta = 0.01                              |
//! | kahan   | theta = 1.2, perturbation 25 eps          |
//! | prolate | w = 0.25                                  |
//! | foster  | k = h = c = 1                             |
//! | wright  | h = 0.3, M = [[-1/6, 1], [1, -1/6]]       |
//! | demmel  | D = diag(10^(14 (i-1)/n)), 1e-7 perturbation |
//!
//! `param` overrides the theta / w of condex, dorr, kahan and prolate, and
//! the threshold of the worst-case matrix. Randomized kinds draw from a
//! ChaCha8 stream seeded with `seed`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::criteria::inv_norm1_exact;
use crate::error::{Error, Result};
use crate::kernels::getrf_tile;
use crate::tiled::{DenseMatrix, Tile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Random,
    Blockdd,
    House,
    Parter,
    Ris,
    Condex,
    Circul,
    Hankel,
    Compan,
    Lehmer,
    Dorr,
    Demmel,
    Chebvand,
    Invhess,
    Prolate,
    Cauchy,
    Hilb,
    Lotkin,
    Kahan,
    Orthogo,
    Wilkinson,
    Foster,
    Wright,
    /// Diagonal `1/alpha`, `-1` below, last column ones: LU growth `(1+alpha)^(N-1)`.
    Worstcase,
}

/// The special matrices, in table order.
pub const SPECIAL: [MatrixKind; 21] = [
    MatrixKind::House,
    MatrixKind::Parter,
    MatrixKind::Ris,
    MatrixKind::Condex,
    MatrixKind::Circul,
    MatrixKind::Hankel,
    MatrixKind::Compan,
    MatrixKind::Lehmer,
    MatrixKind::Dorr,
    MatrixKind::Demmel,
    MatrixKind::Chebvand,
    MatrixKind::Invhess,
    MatrixKind::Prolate,
    MatrixKind::Cauchy,
    MatrixKind::Hilb,
    MatrixKind::Lotkin,
    MatrixKind::Kahan,
    MatrixKind::Orthogo,
    MatrixKind::Wilkinson,
    MatrixKind::Foster,
    MatrixKind::Wright,
];

impl MatrixKind {
    pub fn name(self) -> &'static str {
        match self {
            MatrixKind::Random => "random",
            MatrixKind::Blockdd => "blockdd",
            MatrixKind::House => "house",
            MatrixKind::Parter => "parter",
            MatrixKind::Ris => "ris",
            MatrixKind::Condex => "condex",
            MatrixKind::Circul => "circul",
            MatrixKind::Hankel => "hankel",
            MatrixKind::Compan => "compan",
            MatrixKind::Lehmer => "lehmer",
            MatrixKind::Dorr => "dorr",
            MatrixKind::Demmel => "demmel",
            MatrixKind::Chebvand => "chebvand",
            MatrixKind::Invhess => "invhess",
            MatrixKind::Prolate => "prolate",
            MatrixKind::Cauchy => "cauchy",
            MatrixKind::Hilb => "hilb",
            MatrixKind::Lotkin => "lotkin",
            MatrixKind::Kahan => "kahan",
            MatrixKind::Orthogo => "orthogo",
            MatrixKind::Wilkinson => "wilkinson",
            MatrixKind::Foster => "foster",
            MatrixKind::Wright => "wright",
            MatrixKind::Worstcase => "worstcase",
        }
    }

    pub fn all() -> Vec<MatrixKind> {
        let mut v = vec![MatrixKind::Random, MatrixKind::Blockdd];
        v.extend(SPECIAL);
        v.push(MatrixKind::Worstcase);
        v
    }

    pub fn is_randomized(self) -> bool {
        matches!(
            self,
            MatrixKind::Random
                | MatrixKind::Blockdd
                | MatrixKind::House
                | MatrixKind::Circul
                | MatrixKind::Hankel
                | MatrixKind::Compan
                | MatrixKind::Demmel
        )
    }
}

impl std::fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        MatrixKind::all()
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| Error::UnknownMatrix(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixSpec {
    pub kind: MatrixKind,
    pub n: usize,
    pub seed: u64,
    /// Tile size, needed by `blockdd` only.
    pub nb: Option<usize>,
    pub param: Option<f64>,
}

impl MatrixSpec {
    pub fn new(kind: MatrixKind, n: usize, seed: u64) -> Self {
        MatrixSpec {
            kind,
            n,
            seed,
            nb: None,
            param: None,
        }
    }

    pub fn with_nb(mut self, nb: usize) -> Self {
        self.nb = Some(nb);
        self
    }

    pub fn with_param(mut self, param: f64) -> Self {
        self.param = Some(param);
        self
    }
}

pub fn generate(spec: &MatrixSpec) -> Result<DenseMatrix> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::InvalidParameter("matrix order must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let param = |default: f64| spec.param.unwrap_or(default);
    let nf = n as f64;
    // 1-based entry formulas
    let from = |f: &dyn Fn(f64, f64) -> f64| DenseMatrix::from_fn(n, |i, j| f(i as f64 + 1.0, j as f64 + 1.0));
    let a = match spec.kind {
        MatrixKind::Random => normal_matrix(n, &mut rng),
        MatrixKind::Blockdd => {
            let nb = spec
                .nb
                .ok_or_else(|| Error::InvalidParameter("blockdd needs a tile size".into()))?;
            return generate_blockdd(n, nb, spec.seed);
        }
        MatrixKind::House => house(n, &mut rng),
        MatrixKind::Parter => from(&|i, j| 1.0 / (i - j + 0.5)),
        MatrixKind::Ris => from(&|i, j| 0.5 / (nf - i - j + 1.5)),
        MatrixKind::Condex => condex(n, param(100.0)),
        MatrixKind::Circul => {
            let v = normal_vec(n, &mut rng);
            DenseMatrix::from_fn(n, |i, j| v[(j + n - i) % n])
        }
        MatrixKind::Hankel => {
            let c = normal_vec(n, &mut rng);
            let mut r = normal_vec(n, &mut rng);
            r[0] = c[n - 1];
            DenseMatrix::from_fn(n, |i, j| if i + j < n { c[i + j] } else { r[i + j + 1 - n] })
        }
        MatrixKind::Compan => {
            let p = normal_vec(n + 1, &mut rng);
            DenseMatrix::from_fn(n, |i, j| {
                if i == 0 {
                    -p[j + 1] / p[0]
                } else if i == j + 1 {
                    1.0
                } else {
                    0.0
                }
            })
        }
        MatrixKind::Lehmer => from(&|i, j| i.min(j) / i.max(j)),
        MatrixKind::Dorr => dorr(n, param(0.01)),
        MatrixKind::Demmel => {
            let mut a = DenseMatrix::from_fn(n, |i, j| {
                let u: f64 = rng.random();
                (if i == j { 1.0 } else { 0.0 }) + 1e-7 * u
            });
            for i in 0..n {
                let d = 10f64.powf(14.0 * i as f64 / nf);
                for j in 0..n {
                    a.set(i, j, d * a.get(i, j));
                }
            }
            a
        }
        MatrixKind::Chebvand => {
            let p = |j: usize| if n == 1 { 1.0 } else { j as f64 / (nf - 1.0) };
            DenseMatrix::from_fn(n, |i, j| chebyshev(i, p(j)))
        }
        MatrixKind::Invhess => from(&|i, j| if i >= j { i } else { -i }),
        MatrixKind::Prolate => {
            let w = param(0.25);
            DenseMatrix::from_fn(n, |i, j| {
                let k = i.abs_diff(j) as f64;
                if k == 0.0 {
                    2.0 * w
                } else {
                    (2.0 * std::f64::consts::PI * w * k).sin() / (std::f64::consts::PI * k)
                }
            })
        }
        MatrixKind::Cauchy => from(&|i, j| 1.0 / (i + j)),
        MatrixKind::Hilb => from(&|i, j| 1.0 / (i + j - 1.0)),
        MatrixKind::Lotkin => from(&|i, j| if i == 1.0 { 1.0 } else { 1.0 / (i + j - 1.0) }),
        MatrixKind::Kahan => kahan(n, param(1.2), 25.0),
        MatrixKind::Orthogo => {
            let s = (2.0 / (nf + 1.0)).sqrt();
            from(&|i, j| s * (i * j * std::f64::consts::PI / (nf + 1.0)).sin())
        }
        MatrixKind::Wilkinson => worst_case(n, 1.0),
        MatrixKind::Foster => foster(n, 1.0, 1.0, 1.0),
        MatrixKind::Wright => wright(n, 0.3),
        MatrixKind::Worstcase => {
            let alpha = param(1.0);
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(Error::InvalidParameter(format!("worst-case alpha must be positive, got {alpha}")));
            }
            worst_case(n, alpha)
        }
    };
    Ok(a)
}

fn normal_vec(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn normal_matrix(n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    DenseMatrix::from_col_major(n, normal_vec(n * n, rng)).expect("square buffer")
}

/// Right-hand side with entries uniform in `[-0.5, 0.5)`, as in HPL.
///
/// The stream is independent of the matrix stream for the same seed.
pub fn rhs(order: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    (0..order).map(|_| rng.random::<f64>() - 0.5).collect()
}

/// `T_k(x)` by the three-term recurrence.
fn chebyshev(k: usize, x: f64) -> f64 {
    let (mut t0, mut t1) = (1.0, x);
    if k == 0 {
        return t0;
    }
    for _ in 1..k {
        let t2 = 2.0 * x * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    t1
}

fn house(n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let x = normal_vec(n, rng);
    let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut v = x.clone();
    let sign = if x[0] >= 0.0 { 1.0 } else { -1.0 };
    v[0] += sign * s;
    let beta = if s == 0.0 { 0.0 } else { 1.0 / (s * (s + x[0].abs())) };
    DenseMatrix::from_fn(n, |i, j| (if i == j { 1.0 } else { 0.0 }) - beta * v[i] * v[j])
}

/// `I + theta (I - Q Q^T)` with `Q` an orthonormal basis of
/// `[ones, e_1, b]`, `b_i = (-1)^(i-1) (1 + (i-1)/(n-1))`.
fn condex(n: usize, theta: f64) -> DenseMatrix {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let cols = [
        vec![1.0; n],
        (0..n).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect::<Vec<_>>(),
        (0..n)
            .map(|i| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                s * (1.0 + i as f64 / (n.max(2) - 1) as f64)
            })
            .collect(),
    ];
    for c in cols {
        // modified Gram-Schmidt, twice for good orthogonality
        let mut w = c;
        for _ in 0..2 {
            for q in &basis {
                let d: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= d * qi;
                }
            }
        }
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-10 {
            basis.push(w.into_iter().map(|v| v / norm).collect());
        }
    }
    DenseMatrix::from_fn(n, |i, j| {
        let qq: f64 = basis.iter().map(|q| q[i] * q[j]).sum();
        let id = if i == j { 1.0 } else { 0.0 };
        id + theta * (id - qq)
    })
}

fn dorr(n: usize, theta: f64) -> DenseMatrix {
    let h = 1.0 / (n as f64 + 1.0);
    let m = n.div_ceil(2);
    let term = theta / (h * h);
    let (mut c, mut d, mut e) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for idx in 0..n {
        let i = (idx + 1) as f64;
        if idx < m {
            c[idx] = -term;
            e[idx] = c[idx] - (0.5 - i * h) / h;
        } else {
            e[idx] = -term;
            c[idx] = e[idx] + (0.5 - i * h) / h;
        }
        d[idx] = -(c[idx] + e[idx]);
    }
    DenseMatrix::from_fn(n, |i, j| {
        if i == j {
            d[i]
        } else if i == j + 1 {
            c[i]
        } else if j == i + 1 {
            e[i]
        } else {
            0.0
        }
    })
}

fn kahan(n: usize, theta: f64, pert: f64) -> DenseMatrix {
    let (s, c) = theta.sin_cos();
    DenseMatrix::from_fn(n, |i, j| {
        let scale = s.powi(i as i32);
        let base = if i == j {
            scale
        } else if j > i {
            -c * scale
        } else {
            0.0
        };
        let diag_pert = if i == j {
            pert * f64::EPSILON * (n - i) as f64
        } else {
            0.0
        };
        base + diag_pert
    })
}

fn foster(n: usize, k: f64, h: f64, c: f64) -> DenseMatrix {
    let kh = k * h;
    DenseMatrix::from_fn(n, |i, j| {
        let mut v = if i == 0 {
            if j == 0 {
                1.0
            } else {
                0.0
            }
        } else if j == 0 {
            -kh / 2.0
        } else if j < i {
            -kh
        } else if j == i {
            1.0 - kh / 2.0
        } else {
            0.0
        };
        if j == n - 1 && n > 1 {
            v = if i == n - 1 { 1.0 - kh / 2.0 - 1.0 / c } else { -1.0 / c };
        }
        v
    })
}

/// Multiple-shooting matrix with `2 x 2` blocks `B = exp(M h)`.
fn wright(n: usize, h: f64) -> DenseMatrix {
    let e1 = (5.0 / 6.0 * h).exp();
    let e2 = (-7.0 / 6.0 * h).exp();
    let b = [[(e1 + e2) / 2.0, (e1 - e2) / 2.0], [(e1 - e2) / 2.0, (e1 + e2) / 2.0]];
    let m = n / 2;
    let mut a = DenseMatrix::zeros(n);
    for r in 0..m {
        for p in 0..2 {
            for q in 0..2 {
                let id = if p == q { 1.0 } else { 0.0 };
                if r + 1 < m {
                    a.set(2 * r + p, 2 * r + q, -b[p][q]);
                    a.set(2 * r + p, 2 * r + 2 + q, id);
                } else {
                    // boundary conditions couple the first and last blocks
                    a.set(2 * r + p, q, id);
                    a.set(2 * r + p, 2 * r + q, id);
                }
            }
        }
    }
    if n % 2 == 1 {
        a.set(n - 1, n - 1, 1.0);
    }
    a
}

/// Diagonal `1/alpha`, `-1` strictly below, ones in the last column.
pub fn worst_case(n: usize, alpha: f64) -> DenseMatrix {
    DenseMatrix::from_fn(n, |i, j| {
        if j == n - 1 {
            1.0
        } else if i == j {
            1.0 / alpha
        } else if i > j {
            -1.0
        } else {
            0.0
        }
    })
}

fn tile_of(a: &DenseMatrix, nb: usize, ti: usize, tj: usize) -> Tile {
    let mut t = Tile::zeros(nb);
    for c in 0..nb {
        for r in 0..nb {
            t.set(r, c, a.get(ti * nb + r, tj * nb + c));
        }
    }
    t
}

/// `||A_jj^{-1}||_1^{-1}` for a tile, zero if singular.
fn inv_norm_lower(t: &Tile) -> f64 {
    let mut lu = t.clone();
    match getrf_tile(&mut lu).and_then(|_| inv_norm1_exact(&lu)) {
        Ok(norm) => 1.0 / norm,
        Err(_) => 0.0,
    }
}

/// Smallest per-block-column ratio `||A_jj^{-1}||_1^{-1} / sum_{i != j} ||A_ij||_1`.
/// A value of at least 1 means block diagonal dominance by columns.
pub fn block_dominance_margin(a: &DenseMatrix, nb: usize) -> Result<f64> {
    let order = a.order();
    if nb == 0 || !order.is_multiple_of(nb) {
        return Err(Error::InvalidParameter(format!("tile size {nb} does not divide {order}")));
    }
    let n = order / nb;
    let mut margin = f64::INFINITY;
    for j in 0..n {
        let off: f64 = (0..n).filter(|&i| i != j).map(|i| tile_of(a, nb, i, j).norm1()).sum();
        let diag = inv_norm_lower(&tile_of(a, nb, j, j));
        let ratio = if off == 0.0 {
            if diag > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        } else {
            diag / off
        };
        margin = margin.min(ratio);
    }
    Ok(margin)
}

/// Random tiles with every diagonal tile rescaled so that
/// `||A_jj^{-1}||_1^{-1} = 1.1 * sum_{i != j} ||A_ij||_1`.
pub fn generate_blockdd(order: usize, nb: usize, seed: u64) -> Result<DenseMatrix> {
    if order == 0 || nb == 0 || !order.is_multiple_of(nb) {
        return Err(Error::InvalidParameter(format!("tile size {nb} does not divide {order}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = normal_matrix(order, &mut rng);
    let n = order / nb;
    for j in 0..n {
        let off: f64 = (0..n).filter(|&i| i != j).map(|i| tile_of(&a, nb, i, j).norm1()).sum();
        let mut d = tile_of(&a, nb, j, j);
        for r in 0..nb {
            d.set(r, r, d.get(r, r) + nb as f64);
        }
        let sigma = inv_norm_lower(&d);
        let scale = if off > 0.0 && sigma > 0.0 { 1.1 * off / sigma } else { 1.0 };
        for c in 0..nb {
            for r in 0..nb {
                a.set(j * nb + r, j * nb + c, scale * d.get(r, c));
            }
        }
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::EPS;
    use proptest::prelude::{any, prop_assert, proptest, ProptestConfig};

    fn gen(kind: MatrixKind, n: usize) -> DenseMatrix {
        generate(&MatrixSpec::new(kind, n, 7)).unwrap()
    }

    #[test]
    fn hilbert_and_lehmer() {
        let h = gen(MatrixKind::Hilb, 3);
        let expect = [[1.0, 1.0 / 2.0, 1.0 / 3.0], [1.0 / 2.0, 1.0 / 3.0, 1.0 / 4.0], [1.0 / 3.0, 1.0 / 4.0, 1.0 / 5.0]];
        for (i, row) in expect.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(h.get(i, j), *v);
            }
        }
        let l = gen(MatrixKind::Lehmer, 2);
        assert_eq!(l.data(), &[1.0, 0.5, 0.5, 1.0]);
    }

    fn orthogonality_error(a: &DenseMatrix) -> f64 {
        let n = a.order();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let d: f64 = (0..n).map(|r| a.get(r, i) * a.get(r, j)).sum();
                let id = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((d - id).abs());
            }
        }
        worst
    }

    #[test]
    fn orthogonal_kinds() {
        let o = gen(MatrixKind::Orthogo, 2);
        let s = (2.0f64 / 3.0).sqrt();
        let t = std::f64::consts::PI / 3.0;
        assert!((o.get(0, 0) - s * t.sin()).abs() <= EPS);
        assert!((o.get(1, 1) - s * (4.0 * t).sin()).abs() <= 2.0 * EPS);
        for n in [2, 5, 16] {
            assert!(orthogonality_error(&gen(MatrixKind::Orthogo, n)) <= 10.0 * n as f64 * EPS);
            assert!(orthogonality_error(&gen(MatrixKind::House, n)) <= 10.0 * n as f64 * EPS);
        }
    }

    /// Entry formulas evaluated independently at random positions.
    #[test]
    fn formula_spot_checks() {
        let n = 12;
        let nf = n as f64;
        let pi = std::f64::consts::PI;
        let formulas: Vec<(MatrixKind, Box<dyn Fn(f64, f64) -> f64>)> = vec![
            (MatrixKind::Parter, Box::new(|i, j| 1.0 / (i - j + 0.5))),
            (MatrixKind::Ris, Box::new(move |i, j| 0.5 / (nf - i - j + 1.5))),
            (MatrixKind::Lehmer, Box::new(|i, j| if j >= i { i / j } else { j / i })),
            (MatrixKind::Cauchy, Box::new(|i, j| 1.0 / (i + j))),
            (MatrixKind::Hilb, Box::new(|i, j| 1.0 / (i + j - 1.0))),
            (MatrixKind::Lotkin, Box::new(|i, j| if i == 1.0 { 1.0 } else { 1.0 / (i + j - 1.0) })),
            (MatrixKind::Invhess, Box::new(|i, j| if i >= j { i } else { -i })),
            (
                MatrixKind::Orthogo,
                Box::new(move |i, j| (2.0 / (nf + 1.0)).sqrt() * (i * j * pi / (nf + 1.0)).sin()),
            ),
            (
                MatrixKind::Chebvand,
                Box::new(move |i, j| {
                    let x = (j - 1.0) / (nf - 1.0);
                    ((i - 1.0) * x.acos()).cos()
                }),
            ),
            (
                MatrixKind::Prolate,
                Box::new(|i, j| {
                    let k = (i - j).abs();
                    if k == 0.0 { 0.5 } else { (0.5 * pi * k).sin() / (pi * k) }
                }),
            ),
            (
                MatrixKind::Wilkinson,
                Box::new(move |i, j| if j == nf || i == j { 1.0 } else if i > j { -1.0 } else { 0.0 }),
            ),
            (
                MatrixKind::Kahan,
                Box::new(move |i, j| {
                    let (s, c) = 1.2f64.sin_cos();
                    let base = if j > i { -c * s.powf(i - 1.0) } else if i == j { s.powf(i - 1.0) } else { 0.0 };
                    base + if i == j { 25.0 * 2f64.powi(-52) * (nf - i + 1.0) } else { 0.0 }
                }),
            ),
        ];
        let mut g = ChaCha8Rng::seed_from_u64(3);
        for (kind, f) in formulas {
            let a = gen(kind, n);
            for _ in 0..10 {
                let (i, j) = (g.random_range(0..n), g.random_range(0..n));
                let expect = f(i as f64 + 1.0, j as f64 + 1.0);
                assert!(
                    (a.get(i, j) - expect).abs() <= 1e-13 * expect.abs().max(1.0),
                    "{kind} ({i},{j}): {} vs {expect}",
                    a.get(i, j)
                );
            }
        }
    }

    #[test]
    fn structured_random_kinds() {
        let n = 6;
        let c = gen(MatrixKind::Circul, n);
        let h = gen(MatrixKind::Hankel, n);
        let p = gen(MatrixKind::Compan, n);
        for i in 1..n {
            for j in 1..n {
                assert_eq!(c.get(i, j), c.get(i - 1, j - 1));
                assert_eq!(h.get(i, j - 1), h.get(i - 1, j));
            }
            assert_eq!(p.get(i, i - 1), 1.0);
        }
        let d = gen(MatrixKind::Dorr, n);
        for i in 0..n {
            for j in 0..n {
                if i.abs_diff(j) > 1 {
                    assert_eq!(d.get(i, j), 0.0);
                }
            }
        }
        // diagonally dominant M-matrix rows for the interior
        assert!(d.get(2, 2) > 0.0 && d.get(2, 1) < 0.0 && d.get(2, 3) < 0.0);
    }

    #[test]
    fn condex_and_wright_shapes() {
        let c = gen(MatrixKind::Condex, 8);
        // symmetric, eigenvalue 1 on span(Q) and 1 + theta elsewhere
        for i in 0..8 {
            for j in 0..8 {
                assert!((c.get(i, j) - c.get(j, i)).abs() < 1e-12);
            }
        }
        let ones = vec![1.0; 8];
        let y = c.mul_vec(&ones);
        assert!(y.iter().all(|v| (v - 1.0).abs() < 1e-10));

        let w = gen(MatrixKind::Wright, 6);
        assert_eq!(w.get(0, 2), 1.0);
        let b11 = ((0.25f64).exp() + (-0.35f64).exp()) / 2.0;
        assert!((w.get(0, 0) + b11).abs() < 1e-15);
        assert_eq!(w.get(4, 0), 1.0);
        assert_eq!(w.get(5, 5), 1.0);
        let odd = gen(MatrixKind::Wright, 7);
        assert_eq!(odd.get(6, 6), 1.0);
    }

    #[test]
    fn foster_pattern() {
        let f = gen(MatrixKind::Foster, 4);
        let expect = [
            [1.0, 0.0, 0.0, -1.0],
            [-0.5, 0.5, 0.0, -1.0],
            [-0.5, -1.0, 0.5, -1.0],
            [-0.5, -1.0, -1.0, -0.5],
        ];
        for (i, row) in expect.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(f.get(i, j), *v, "({i},{j})");
            }
        }
    }

    #[test]
    fn reproducible_and_named() {
        for kind in MatrixKind::all() {
            let spec = MatrixSpec::new(kind, 12, 42).with_nb(4);
            assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap(), "{kind}");
            assert_eq!(kind.name().parse::<MatrixKind>().unwrap(), kind);
            assert!(generate(&spec).unwrap().is_finite());
        }
        assert!(matches!("fiedler".parse::<MatrixKind>(), Err(Error::UnknownMatrix(_))));
        assert!(generate(&MatrixSpec::new(MatrixKind::Blockdd, 12, 0)).is_err());
        assert!(generate(&MatrixSpec::new(MatrixKind::Hilb, 0, 0)).is_err());
        assert_ne!(
            generate(&MatrixSpec::new(MatrixKind::Random, 4, 1)).unwrap(),
            generate(&MatrixSpec::new(MatrixKind::Random, 4, 2)).unwrap()
        );
    }

    #[test]
    fn blockdd_dominance() {
        assert!(block_dominance_margin(&DenseMatrix::identity(8), 2).unwrap().is_infinite());
        for seed in 0..5 {
            let a = generate_blockdd(40, 8, seed).unwrap();
            let m = block_dominance_margin(&a, 8).unwrap();
            assert!(m >= 1.0, "seed {seed}: {m}");
            assert!((m - 1.1).abs() < 1e-9, "{m}");
        }
        assert!(generate_blockdd(10, 4, 0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn blockdd_always_dominant(seed in any::<u64>(), n in 1usize..6, nb in 1usize..6) {
            let a = generate_blockdd(n * nb, nb, seed).unwrap();
            prop_assert!(block_dominance_margin(&a, nb).unwrap() >= 1.0);
        }
    }

    #[test]
    fn rhs_is_reproducible_and_bounded() {
        let b = rhs(50, 3);
        assert_eq!(b, rhs(50, 3));
        assert_ne!(b, rhs(50, 4));
        assert!(b.iter().all(|v| (-0.5..0.5).contains(v)));
        let a = generate(&MatrixSpec::new(MatrixKind::Random, 50, 3)).unwrap();
        assert_ne!(&b[..], a.col(0));
    }
}
