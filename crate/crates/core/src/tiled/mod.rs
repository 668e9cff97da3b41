//! Tiled matrix storage and the logical block-cyclic process grid.
//!
//! A matrix of order `N = n * nb` is stored as an `n x n` grid of square
//! tiles. Both the grid and each tile are column-major, so a whole tile
//! column is a contiguous slice of tiles and a tile column is a contiguous
//! slice of elements.

mod io;

pub use io::{read_csv, read_tlm1, write_csv, write_tlm1};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dense `nb x nb` block, column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Tile {
    nb: usize,
    data: Vec<f64>,
}

impl Tile {
    pub fn zeros(nb: usize) -> Self {
        Tile {
            nb,
            data: vec![0.0; nb * nb],
        }
    }

    pub fn identity(nb: usize) -> Self {
        let mut t = Tile::zeros(nb);
        for i in 0..nb {
            t.set(i, i, 1.0);
        }
        t
    }

    pub fn from_col_major(nb: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != nb * nb {
            return Err(Error::DimensionMismatch(format!(
                "tile of order {nb} needs {} elements, got {}",
                nb * nb,
                data.len()
            )));
        }
        Ok(Tile { nb, data })
    }

    /// Builds a tile from row slices; handy for small literal tiles.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let nb = rows.len();
        let mut t = Tile::zeros(nb);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != nb {
                return Err(Error::DimensionMismatch(format!(
                    "row {r} has {} entries, expected {nb}",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                t.set(r, c, v);
            }
        }
        Ok(t)
    }

    #[inline]
    pub fn nb(&self) -> usize {
        self.nb
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.nb + row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[col * self.nb + row] = value;
    }

    #[inline]
    pub fn col(&self, col: usize) -> &[f64] {
        &self.data[col * self.nb..(col + 1) * self.nb]
    }

    #[inline]
    pub fn col_mut(&mut self, col: usize) -> &mut [f64] {
        &mut self.data[col * self.nb..(col + 1) * self.nb]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn norm1(&self) -> f64 {
        tile_norm1(self)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// Matrix 1-norm of a tile: the largest absolute column sum.
pub fn tile_norm1(tile: &Tile) -> f64 {
    (0..tile.nb)
        .map(|c| tile.col(c).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Square dense matrix, column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    order: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(order: usize) -> Self {
        DenseMatrix {
            order,
            data: vec![0.0; order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = DenseMatrix::zeros(order);
        for i in 0..order {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_col_major(order: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != order * order {
            return Err(Error::DimensionMismatch(format!(
                "matrix of order {order} needs {} elements, got {}",
                order * order,
                data.len()
            )));
        }
        Ok(DenseMatrix { order, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let order = rows.len();
        let mut m = DenseMatrix::zeros(order);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != order {
                return Err(Error::DimensionMismatch(format!(
                    "row {r} has {} entries, expected {order}",
                    row.len()
                )));
            }
            for (c, &v) in row.iter().enumerate() {
                m.set(r, c, v);
            }
        }
        Ok(m)
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DenseMatrix::zeros(order);
        for c in 0..order {
            for r in 0..order {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.order + row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[col * self.order + row] = value;
    }

    #[inline]
    pub fn col(&self, col: usize) -> &[f64] {
        &self.data[col * self.order..(col + 1) * self.order]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.order];
        for (c, &xc) in x.iter().enumerate() {
            for (yr, a) in y.iter_mut().zip(self.col(c)) {
                *yr += a * xc;
            }
        }
        y
    }

    /// Largest absolute row sum, accumulated left to right.
    pub fn norm_inf(&self) -> f64 {
        (0..self.order)
            .map(|r| (0..self.order).map(|c| self.get(r, c).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest absolute column sum, accumulated top to bottom.
    pub fn norm1(&self) -> f64 {
        (0..self.order)
            .map(|c| self.col(c).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> DenseMatrix {
        DenseMatrix {
            order: self.order,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.order, |r, c| self.get(c, r))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// A square matrix held as an `n x n` grid of `nb x nb` tiles.
#[derive(Clone, Debug, PartialEq)]
pub struct TiledMatrix {
    n: usize,
    nb: usize,
    /// Column-major grid: tile `(i, j)` is `tiles[j * n + i]`.
    tiles: Vec<Tile>,
}

impl TiledMatrix {
    pub fn from_dense(dense: &DenseMatrix, nb: usize) -> Result<Self> {
        let order = dense.order();
        if nb == 0 || order == 0 || !order.is_multiple_of(nb) {
            return Err(Error::DimensionMismatch(format!(
                "matrix order {order} is not a positive multiple of tile order {nb}"
            )));
        }
        for c in 0..order {
            for r in 0..order {
                if !dense.get(r, c).is_finite() {
                    return Err(Error::NonFiniteInput { row: r, col: c });
                }
            }
        }
        let n = order / nb;
        let mut tiles = Vec::with_capacity(n * n);
        for tj in 0..n {
            for ti in 0..n {
                let mut t = Tile::zeros(nb);
                for c in 0..nb {
                    let src = &dense.col(tj * nb + c)[ti * nb..(ti + 1) * nb];
                    t.col_mut(c).copy_from_slice(src);
                }
                tiles.push(t);
            }
        }
        Ok(TiledMatrix { n, nb, tiles })
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let order = self.order();
        let mut dense = DenseMatrix::zeros(order);
        for tj in 0..self.n {
            for ti in 0..self.n {
                let t = self.tile(ti, tj);
                for c in 0..self.nb {
                    let gc = tj * self.nb + c;
                    let dst = &mut dense.data_mut()[gc * order + ti * self.nb..][..self.nb];
                    dst.copy_from_slice(t.col(c));
                }
            }
        }
        dense
    }

    pub fn identity(n: usize, nb: usize) -> Self {
        let mut tiles = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                tiles.push(if i == j {
                    Tile::identity(nb)
                } else {
                    Tile::zeros(nb)
                });
            }
        }
        TiledMatrix { n, nb, tiles }
    }

    /// Tile count per dimension.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn nb(&self) -> usize {
        self.nb
    }

    /// Global order `n * nb`.
    #[inline]
    pub fn order(&self) -> usize {
        self.n * self.nb
    }

    #[inline]
    pub fn tile(&self, i: usize, j: usize) -> &Tile {
        &self.tiles[j * self.n + i]
    }

    #[inline]
    pub fn tile_mut(&mut self, i: usize, j: usize) -> &mut Tile {
        &mut self.tiles[j * self.n + i]
    }

    /// Global element `(row, col)`, 0-based.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.tile(row / self.nb, col / self.nb)
            .get(row % self.nb, col % self.nb)
    }

    pub fn into_tiles(self) -> Vec<Tile> {
        self.tiles
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    /// Global infinity norm; row sums run over global columns left to right.
    pub fn norm_inf(&self) -> f64 {
        matrix_norm_inf(self)
    }
}

/// Infinity norm of the assembled matrix, summed in the same order as
/// [`DenseMatrix::norm_inf`].
pub fn matrix_norm_inf(a: &TiledMatrix) -> f64 {
    let nb = a.nb;
    let mut best = 0.0f64;
    for ti in 0..a.n {
        for r in 0..nb {
            let mut s = 0.0;
            for tj in 0..a.n {
                let t = a.tile(ti, tj);
                for c in 0..nb {
                    s += t.get(r, c).abs();
                }
            }
            best = best.max(s);
        }
    }
    best
}

/// Logical `p x q` process grid for the 2D block-cyclic tile distribution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridConfig {
    pub p: usize,
    pub q: usize,
}

impl GridConfig {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidParameter(format!(
                "grid dimensions must be positive, got {p}x{q}"
            )));
        }
        Ok(GridConfig { p, q })
    }

    /// Grid coordinates of the process owning tile `(i, j)`.
    pub fn owner(&self, i: usize, j: usize) -> (usize, usize) {
        (i % self.p, j % self.q)
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { p: 4, q: 4 }
    }
}

impl std::str::FromStr for GridConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (p, q) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::Parse(format!("grid `{s}` is not of the form PxQ")))?;
        let p = p
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad grid rows in `{s}`")))?;
        let q = q
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad grid cols in `{s}`")))?;
        GridConfig::new(p, q)
    }
}

/// Panel domains derived from the grid: tile rows grouped by owning grid row.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DomainMap {
    pub grid: GridConfig,
}

impl DomainMap {
    pub fn new(grid: GridConfig) -> Self {
        DomainMap { grid }
    }

    pub fn domain_of_row(&self, i: usize) -> usize {
        i % self.grid.p
    }

    /// Tile rows `i` in `k..n` owned by the same grid row as tile `(k, k)`.
    pub fn diagonal_domain_rows(&self, k: usize, n: usize) -> Vec<usize> {
        diagonal_domain_rows(k, self, n)
    }

    /// Rows `k..n` split by domain; domains ordered by their first row, so
    /// the diagonal domain comes first.
    pub fn panel_domains(&self, k: usize, n: usize) -> Vec<Vec<usize>> {
        let p = self.grid.p;
        (k..n.min(k + p))
            .map(|first| (first..n).step_by(p).collect())
            .collect()
    }
}

/// Rows of the diagonal domain at step `k` (0-based), starting with `k`.
pub fn diagonal_domain_rows(k: usize, map: &DomainMap, n: usize) -> Vec<usize> {
    (k..n).step_by(map.grid.p).collect()
}
