//! Householder tile kernels in compact WY form.
//!
//! A factored tile keeps `R` on and above the diagonal and the essential part
//! of the reflectors below it; the triangular block-reflector factors `T`
//! live in a separate [`TFactor`] with inner block size `ib`. The stacked
//! kernels (TS: triangle on top of a square, TT: triangle on top of a
//! triangle) keep their reflectors in the eliminated tile.
//!
//! Reflectors are chosen so that every diagonal entry of `R` is nonnegative.

use crate::tiled::Tile;

/// Inner block size used by all QR kernels for a given tile order.
pub fn inner_block(nb: usize) -> usize {
    (nb / 4).max(1)
}

/// Triangular factors of the block reflectors of one factored tile.
///
/// Stored as an `ib x nb` array: the block covering columns `s..s+w` keeps
/// its `w x w` upper-triangular factor in columns `s..s+w`, rows `0..w`.
#[derive(Clone, Debug, PartialEq)]
pub struct TFactor {
    nb: usize,
    ib: usize,
    data: Vec<f64>,
}

impl TFactor {
    pub fn new(nb: usize) -> Self {
        let ib = inner_block(nb);
        TFactor {
            nb,
            ib,
            data: vec![0.0; ib * nb],
        }
    }

    pub fn nb(&self) -> usize {
        self.nb
    }

    pub fn ib(&self) -> usize {
        self.ib
    }

    /// Entry `(i, j)` of the block that starts at column `s`, block-local indices.
    #[inline]
    fn get(&self, s: usize, i: usize, j: usize) -> f64 {
        self.data[(s + j) * self.ib + i]
    }

    #[inline]
    fn set(&mut self, s: usize, i: usize, j: usize, v: f64) {
        self.data[(s + j) * self.ib + i] = v;
    }

    fn blocks(&self) -> impl DoubleEndedIterator<Item = (usize, usize)> {
        let (nb, ib) = (self.nb, self.ib);
        (0..nb).step_by(ib).map(move |s| (s, ib.min(nb - s)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Trans {
    /// Apply `Q^T`.
    Transpose,
    /// Apply `Q`.
    NoTranspose,
}

fn norm2(x: &[f64]) -> f64 {
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * x.iter().map(|v| (v / scale).powi(2)).sum::<f64>().sqrt()
}

/// Generates `H = I - tau v v^T` with `v = [1; x/v1]` such that
/// `H [alpha; x] = [beta; 0]` and `beta >= 0`. Overwrites `x` with the
/// essential part of `v`. Returns `(beta, tau)`.
fn householder(alpha: f64, x: &mut [f64]) -> (f64, f64) {
    let xnorm = norm2(x);
    if xnorm == 0.0 {
        return if alpha >= 0.0 {
            (alpha, 0.0)
        } else {
            (-alpha, 2.0)
        };
    }
    let beta = alpha.hypot(xnorm);
    let v1 = if alpha <= 0.0 {
        alpha - beta
    } else {
        -xnorm * (xnorm / (alpha + beta))
    };
    if v1 == 0.0 {
        return (alpha, 0.0);
    }
    let ratio = xnorm / v1;
    let tau = 2.0 / (1.0 + ratio * ratio);
    for v in x.iter_mut() {
        *v /= v1;
    }
    (beta, tau)
}

/// QR factorization of one tile in place.
pub fn geqrt(a: &mut Tile) -> TFactor {
    let nb = a.nb();
    let mut t = TFactor::new(nb);
    let blocks: Vec<_> = t.blocks().collect();
    for (s, w) in blocks {
        for j in s..s + w {
            let alpha = a.get(j, j);
            let (beta, tau) = householder(alpha, &mut a.col_mut(j)[j + 1..]);
            a.set(j, j, beta);
            t.set(s, j - s, j - s, tau);
            if tau == 0.0 {
                continue;
            }
            for cc in j + 1..s + w {
                let mut dot = a.get(j, cc);
                for r in j + 1..nb {
                    dot += a.get(r, j) * a.get(r, cc);
                }
                let f = tau * dot;
                a.set(j, cc, a.get(j, cc) - f);
                for r in j + 1..nb {
                    a.set(r, cc, a.get(r, cc) - f * a.get(r, j));
                }
            }
        }
        // T(0:j, j) = -tau_j T(0:j, 0:j) V(:, 0:j)^T v_j
        for j in 1..w {
            let tau = t.get(s, j, j);
            let gj = s + j;
            let dots: Vec<f64> = (0..j)
                .map(|i| {
                    let gi = s + i;
                    let mut d = a.get(gj, gi);
                    for r in gj + 1..nb {
                        d += a.get(r, gi) * a.get(r, gj);
                    }
                    d
                })
                .collect();
            for i in 0..j {
                let mut acc = 0.0;
                for (l, dl) in dots.iter().enumerate().skip(i) {
                    acc += t.get(s, i, l) * dl;
                }
                t.set(s, i, j, -tau * acc);
            }
        }
        if s + w < nb {
            apply_block_single(a, s, w, &t, Trans::Transpose, s + w..nb);
        }
    }
    t
}

/// Applies block `(s, w)` of the reflectors stored below the diagonal of `v`
/// to columns `cols` of `c` (rows `s..nb`). When `c` aliases `v` the columns
/// must lie to the right of the block.
fn apply_block_single_into(
    v: &Tile,
    s: usize,
    w: usize,
    t: &TFactor,
    trans: Trans,
    c: &mut Tile,
    cols: std::ops::Range<usize>,
) {
    let nb = v.nb();
    let mut work = vec![0.0; w];
    for cc in cols {
        let ccol = c.col(cc);
        for (i, wi) in work.iter_mut().enumerate() {
            let gi = s + i;
            let vcol = v.col(gi);
            let mut d = ccol[gi];
            for r in gi + 1..nb {
                d += vcol[r] * ccol[r];
            }
            *wi = d;
        }
        tri_mul(t, s, w, trans, &mut work);
        let ccol = c.col_mut(cc);
        for (i, &wi) in work.iter().enumerate() {
            let gi = s + i;
            ccol[gi] -= wi;
            let vcol = v.col(gi);
            for r in gi + 1..nb {
                ccol[r] -= vcol[r] * wi;
            }
        }
    }
}

fn apply_block_single(
    a: &mut Tile,
    s: usize,
    w: usize,
    t: &TFactor,
    trans: Trans,
    cols: std::ops::Range<usize>,
) {
    // Reflector columns s..s+w are read while columns >= s+w are written.
    let v = a.clone();
    apply_block_single_into(&v, s, w, t, trans, a, cols);
}

/// `work <- T^T work` or `work <- T work` for the block at column `s`.
fn tri_mul(t: &TFactor, s: usize, w: usize, trans: Trans, work: &mut [f64]) {
    match trans {
        Trans::Transpose => {
            for i in (0..w).rev() {
                let mut acc = 0.0;
                for l in 0..=i {
                    acc += t.get(s, l, i) * work[l];
                }
                work[i] = acc;
            }
        }
        Trans::NoTranspose => {
            for i in 0..w {
                let mut acc = 0.0;
                for l in i..w {
                    acc += t.get(s, i, l) * work[l];
                }
                work[i] = acc;
            }
        }
    }
}

/// Applies `Q^T` (or `Q`) of a [`geqrt`]-factored tile `v` to `c`.
pub fn unmqr(v: &Tile, t: &TFactor, c: &mut Tile, trans: Trans) {
    let nb = v.nb();
    let blocks: Vec<_> = t.blocks().collect();
    let run = |(s, w): (usize, usize), c: &mut Tile| {
        apply_block_single_into(v, s, w, t, trans, c, 0..nb);
    };
    match trans {
        Trans::Transpose => blocks.into_iter().for_each(|b| run(b, c)),
        Trans::NoTranspose => blocks.into_iter().rev().for_each(|b| run(b, c)),
    }
}

/// Number of leading rows of reflector column `j` held in the lower tile.
#[inline]
fn tail_len(nb: usize, j: usize, triangular: bool) -> usize {
    if triangular {
        j + 1
    } else {
        nb
    }
}

/// QR of `[r; a]` where `r` is upper triangular. `r` receives the new `R`,
/// `a` the reflectors. Only the upper triangle of `r` is read or written; with
/// `triangular` only the upper triangle of `a` is.
fn stacked_qrt(r: &mut Tile, a: &mut Tile, triangular: bool) -> TFactor {
    let nb = r.nb();
    let mut t = TFactor::new(nb);
    let blocks: Vec<_> = t.blocks().collect();
    for (s, w) in blocks {
        for j in s..s + w {
            let len = tail_len(nb, j, triangular);
            let (beta, tau) = householder(r.get(j, j), &mut a.col_mut(j)[..len]);
            r.set(j, j, beta);
            t.set(s, j - s, j - s, tau);
            if tau == 0.0 {
                continue;
            }
            for cc in j + 1..s + w {
                let mut dot = r.get(j, cc);
                for l in 0..len {
                    dot += a.get(l, j) * a.get(l, cc);
                }
                let f = tau * dot;
                r.set(j, cc, r.get(j, cc) - f);
                for l in 0..len {
                    a.set(l, cc, a.get(l, cc) - f * a.get(l, j));
                }
            }
        }
        for j in 1..w {
            let gj = s + j;
            let tau = t.get(s, j, j);
            let dots: Vec<f64> = (0..j)
                .map(|i| {
                    let gi = s + i;
                    let len = tail_len(nb, gi, triangular).min(tail_len(nb, gj, triangular));
                    (0..len).map(|l| a.get(l, gi) * a.get(l, gj)).sum()
                })
                .collect();
            for i in 0..j {
                let mut acc = 0.0;
                for (l, dl) in dots.iter().enumerate().skip(i) {
                    acc += t.get(s, i, l) * dl;
                }
                t.set(s, i, j, -tau * acc);
            }
        }
        if s + w < nb {
            let v = a.clone();
            apply_block_pair(&v, s, w, &t, triangular, Trans::Transpose, r, a, s + w..nb);
        }
    }
    t
}

/// Applies block `(s, w)` of stacked reflectors `[e; v]` to columns `cols`
/// of the pair `[a1; a2]`.
#[allow(clippy::too_many_arguments)]
fn apply_block_pair(
    v: &Tile,
    s: usize,
    w: usize,
    t: &TFactor,
    triangular: bool,
    trans: Trans,
    a1: &mut Tile,
    a2: &mut Tile,
    cols: std::ops::Range<usize>,
) {
    let nb = v.nb();
    let mut work = vec![0.0; w];
    for cc in cols {
        let bot = a2.col(cc);
        for (i, wi) in work.iter_mut().enumerate() {
            let gi = s + i;
            let len = tail_len(nb, gi, triangular);
            let vcol = &v.col(gi)[..len];
            let mut d = a1.get(gi, cc);
            for (x, y) in vcol.iter().zip(bot) {
                d += x * y;
            }
            *wi = d;
        }
        tri_mul(t, s, w, trans, &mut work);
        for (i, &wi) in work.iter().enumerate() {
            let gi = s + i;
            a1.set(gi, cc, a1.get(gi, cc) - wi);
        }
        let bot = a2.col_mut(cc);
        for (i, &wi) in work.iter().enumerate() {
            let gi = s + i;
            let len = tail_len(nb, gi, triangular);
            for (y, x) in bot[..len].iter_mut().zip(&v.col(gi)[..len]) {
                *y -= x * wi;
            }
        }
    }
}

fn pair_apply(v: &Tile, t: &TFactor, triangular: bool, a1: &mut Tile, a2: &mut Tile, trans: Trans) {
    let nb = v.nb();
    let blocks: Vec<_> = t.blocks().collect();
    let order: Box<dyn Iterator<Item = (usize, usize)>> = match trans {
        Trans::Transpose => Box::new(blocks.into_iter()),
        Trans::NoTranspose => Box::new(blocks.into_iter().rev()),
    };
    for (s, w) in order {
        apply_block_pair(v, s, w, t, triangular, trans, a1, a2, 0..nb);
    }
}

/// Eliminates the square tile `a` against the triangle in `r`.
pub fn tsqrt(r: &mut Tile, a: &mut Tile) -> TFactor {
    stacked_qrt(r, a, false)
}

/// Applies the transformation of a [`tsqrt`] (reflectors in `v`) to the
/// pair `[a_e; a_i]` of a trailing column.
pub fn tsmqr(a_e: &mut Tile, a_i: &mut Tile, v: &Tile, t: &TFactor, trans: Trans) {
    pair_apply(v, t, false, a_e, a_i, trans);
}

/// Merges the triangle `r_i` into the triangle `r_e`; `r_i`'s upper triangle
/// receives the reflectors.
pub fn ttqrt(r_e: &mut Tile, r_i: &mut Tile) -> TFactor {
    stacked_qrt(r_e, r_i, true)
}

/// Applies the transformation of a [`ttqrt`] (reflectors in the upper
/// triangle of `v`) to the pair `[a_e; a_i]`.
pub fn ttmqr(a_e: &mut Tile, a_i: &mut Tile, v: &Tile, t: &TFactor, trans: Trans) {
    pair_apply(v, t, true, a_e, a_i, trans);
}
