//! LU-step kernels: panel factorization with partial pivoting over a
//! stack of tiles, and the TRSM / SWPTRSM / GEMM tile updates.

use crate::error::{Error, Result};
use crate::tiled::Tile;

/// LU factors of a stacked column of tiles (the diagonal domain, or just
/// the diagonal tile).
///
/// The stacked panel `A` of `d * nb` rows satisfies `P A = L U` where the top
/// `nb x nb` block of `L` is unit lower triangular and the remaining blocks
/// are full. `U` occupies the top block.
#[derive(Clone, Debug, PartialEq)]
pub struct PanelFactorization {
    rows: Vec<usize>,
    nb: usize,
    /// Packed factors, column-major with leading dimension `d * nb`.
    lu: Vec<f64>,
    /// `ipiv[c]` is the stacked row exchanged with row `c` at step `c`.
    ipiv: Vec<usize>,
}

impl PanelFactorization {
    /// Tile rows of the factored stack, in stacking order.
    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    pub fn nb(&self) -> usize {
        self.nb
    }

    pub fn stacked_rows(&self) -> usize {
        self.rows.len() * self.nb
    }

    pub fn ipiv(&self) -> &[usize] {
        &self.ipiv
    }

    /// `perm[r]` is the original stacked row that ends up at position `r`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut perm: Vec<usize> = (0..self.stacked_rows()).collect();
        for (c, &p) in self.ipiv.iter().enumerate() {
            perm.swap(c, p);
        }
        perm
    }

    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.lu[c * self.stacked_rows() + r]
    }

    fn block(&self, b: usize) -> Tile {
        let mut t = Tile::zeros(self.nb);
        for c in 0..self.nb {
            for r in 0..self.nb {
                t.set(r, c, self.at(b * self.nb + r, c));
            }
        }
        t
    }

    /// Top block with `L` strictly below and `U` on and above the diagonal.
    pub fn packed_top(&self) -> Tile {
        self.block(0)
    }

    pub fn u_tile(&self) -> Tile {
        let mut t = self.block(0);
        for c in 0..self.nb {
            for r in c + 1..self.nb {
                t.set(r, c, 0.0);
            }
        }
        t
    }

    /// Block `b` of `L`; block 0 carries its implicit unit diagonal.
    pub fn l_block(&self, b: usize) -> Tile {
        let mut t = self.block(b);
        if b == 0 {
            for c in 0..self.nb {
                t.set(c, c, 1.0);
                for r in 0..c {
                    t.set(r, c, 0.0);
                }
            }
        }
        t
    }

    /// `|U_jj|` for each column.
    pub fn pivots_abs(&self) -> Vec<f64> {
        (0..self.nb).map(|j| self.at(j, j).abs()).collect()
    }

    /// Writes the factors back into the panel: packed `L\U` in the top tile,
    /// `L` blocks in the other stacked tiles.
    pub fn store(&self, column: &mut [Tile]) {
        for (b, &row) in self.rows.iter().enumerate() {
            column[row] = self.block(b);
        }
    }
}

fn stack(column: &[Tile], rows: &[usize], nb: usize) -> Vec<f64> {
    let m = rows.len() * nb;
    let mut buf = vec![0.0; m * nb];
    for (b, &row) in rows.iter().enumerate() {
        let t = &column[row];
        for c in 0..nb {
            buf[c * m + b * nb..c * m + (b + 1) * nb].copy_from_slice(t.col(c));
        }
    }
    buf
}

fn unstack(buf: &[f64], column: &mut [Tile], rows: &[usize], nb: usize) {
    let m = rows.len() * nb;
    for (b, &row) in rows.iter().enumerate() {
        let t = &mut column[row];
        for c in 0..nb {
            t.col_mut(c)
                .copy_from_slice(&buf[c * m + b * nb..c * m + (b + 1) * nb]);
        }
    }
}

/// Right-looking LU with partial pivoting of an `m x nb` column-major array.
/// Ties in pivot magnitude go to the smallest row index.
fn getrf_in_place(a: &mut [f64], m: usize, nb: usize) -> Result<Vec<usize>> {
    let mut ipiv = Vec::with_capacity(nb);
    for c in 0..nb {
        let col = &a[c * m..(c + 1) * m];
        let mut p = c;
        let mut best = col[c].abs();
        for (r, v) in col.iter().enumerate().skip(c + 1) {
            if v.abs() > best {
                best = v.abs();
                p = r;
            }
        }
        if best == 0.0 {
            return Err(Error::SingularPivot { column: c });
        }
        ipiv.push(p);
        if p != c {
            for cc in 0..nb {
                a.swap(cc * m + c, cc * m + p);
            }
        }
        let pivot = a[c * m + c];
        for r in c + 1..m {
            a[c * m + r] /= pivot;
        }
        for cc in c + 1..nb {
            let u = a[cc * m + c];
            if u == 0.0 {
                continue;
            }
            for r in c + 1..m {
                a[cc * m + r] -= a[c * m + r] * u;
            }
        }
    }
    Ok(ipiv)
}

/// In-place LU with partial pivoting of one tile. Returns the swap vector.
pub fn getrf_tile(tile: &mut Tile) -> Result<Vec<usize>> {
    let nb = tile.nb();
    getrf_in_place(tile.data_mut(), nb, nb)
}

/// Factors the tiles `rows` of a tile column as one stacked panel. The column
/// is left untouched; see [`PanelFactorization::store`].
pub fn getrf_domain(column: &[Tile], rows: &[usize]) -> Result<PanelFactorization> {
    assert!(!rows.is_empty(), "panel needs at least one tile");
    let nb = column[rows[0]].nb();
    let m = rows.len() * nb;
    let mut lu = stack(column, rows, nb);
    let ipiv = getrf_in_place(&mut lu, m, nb)?;
    Ok(PanelFactorization {
        rows: rows.to_vec(),
        nb,
        lu,
        ipiv,
    })
}

/// `A_ik <- A_ik U^{-1}` where `U` is the upper triangle of `u`.
pub fn trsm_eliminate(u: &Tile, a: &mut Tile) -> Result<()> {
    let nb = u.nb();
    if let Some(index) = (0..nb).find(|&i| u.get(i, i) == 0.0) {
        return Err(Error::ZeroDiagonal { index });
    }
    for c in 0..nb {
        for l in 0..c {
            let s = u.get(l, c);
            if s == 0.0 {
                continue;
            }
            let (done, rest) = a.data_mut().split_at_mut(c * nb);
            let xl = &done[l * nb..(l + 1) * nb];
            for (y, x) in rest[..nb].iter_mut().zip(xl) {
                *y -= x * s;
            }
        }
        let d = u.get(c, c);
        for y in a.col_mut(c) {
            *y /= d;
        }
    }
    Ok(())
}

/// Applies the row interchanges of `pf` to its stacked rows of `column`,
/// then `A_kj <- L11^{-1} (P A)_kj` on the top tile and
/// `A_ij <- (P A)_ij - L_i1 A_kj` on every other stacked tile.
pub fn swptrsm_apply(pf: &PanelFactorization, column: &mut [Tile]) {
    let nb = pf.nb;
    let m = pf.stacked_rows();
    let mut b = stack(column, &pf.rows, nb);
    for (c, &p) in pf.ipiv.iter().enumerate() {
        if p != c {
            for cc in 0..nb {
                b.swap(cc * m + c, cc * m + p);
            }
        }
    }
    for cc in 0..nb {
        let bc = &mut b[cc * m..(cc + 1) * m];
        // unit lower solve on the top block
        for c in 0..nb {
            let x = bc[c];
            if x == 0.0 {
                continue;
            }
            for r in c + 1..nb {
                bc[r] -= pf.at(r, c) * x;
            }
        }
        // Schur update of the lower blocks
        for c in 0..nb {
            let x = bc[c];
            if x == 0.0 {
                continue;
            }
            for r in nb..m {
                bc[r] -= pf.at(r, c) * x;
            }
        }
    }
    unstack(&b, column, &pf.rows, nb);
}

/// Applies the row interchanges of `pf` to its stacked rows of `column`
/// without any triangular solve.
pub fn apply_row_swaps(pf: &PanelFactorization, column: &mut [Tile]) {
    let nb = pf.nb;
    let m = pf.stacked_rows();
    let mut b = stack(column, &pf.rows, nb);
    for (c, &p) in pf.ipiv.iter().enumerate() {
        if p != c {
            for cc in 0..nb {
                b.swap(cc * m + c, cc * m + p);
            }
        }
    }
    unstack(&b, column, &pf.rows, nb);
}

/// `A_ij <- A_ij - A_ik A_kj`
pub fn gemm_update(a_ij: &mut Tile, a_ik: &Tile, a_kj: &Tile) {
    let nb = a_ij.nb();
    for c in 0..nb {
        let dst = a_ij.col_mut(c);
        for l in 0..nb {
            let s = a_kj.get(l, c);
            if s == 0.0 {
                continue;
            }
            for (y, x) in dst.iter_mut().zip(a_ik.col(l)) {
                *y -= x * s;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;

    fn permuted_stack(column: &[Tile], pf: &PanelFactorization) -> Vec<f64> {
        let nb = pf.nb();
        let m = pf.stacked_rows();
        let a = stack(column, pf.rows(), nb);
        let perm = pf.permutation();
        let mut pa = vec![0.0; m * nb];
        for c in 0..nb {
            for r in 0..m {
                pa[c * m + r] = a[c * m + perm[r]];
            }
        }
        pa
    }

    fn lu_product(pf: &PanelFactorization) -> Vec<f64> {
        let nb = pf.nb();
        let m = pf.stacked_rows();
        let mut l = vec![0.0; m * nb];
        for (b, _) in pf.rows().iter().enumerate() {
            let lb = pf.l_block(b);
            for c in 0..nb {
                for r in 0..nb {
                    l[c * m + b * nb + r] = lb.get(r, c);
                }
            }
        }
        matmul(&l, pf.u_tile().data(), m, nb, nb)
    }

    #[test]
    fn identity_tile() {
        let mut t = Tile::identity(4);
        let piv = getrf_tile(&mut t).unwrap();
        assert_eq!(piv, vec![0, 1, 2, 3]);
        assert_eq!(t, Tile::identity(4));
    }

    #[test]
    fn forced_swap() {
        let mut t = Tile::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let piv = getrf_tile(&mut t).unwrap();
        assert_eq!(piv, vec![1, 1]);
        assert_eq!(t, Tile::identity(2));
    }

    #[test]
    fn ties_keep_smallest_row() {
        let mut t = Tile::from_rows(&[&[1.0, 2.0], &[-1.0, 3.0]]).unwrap();
        assert_eq!(getrf_tile(&mut t).unwrap()[0], 0);
    }

    #[test]
    fn zero_column_is_singular() {
        let mut t = Tile::from_rows(&[&[1.0, 2.0], &[1.0, 2.0]]).unwrap();
        assert!(matches!(
            getrf_tile(&mut t),
            Err(Error::SingularPivot { column: 1 })
        ));
        let col = vec![Tile::zeros(2), Tile::zeros(2)];
        assert!(matches!(
            getrf_domain(&col, &[0, 1]),
            Err(Error::SingularPivot { column: 0 })
        ));
    }

    #[test]
    fn tile_reconstruction() {
        let mut g = rng(7);
        for nb in [1, 2, 5, 8, 16] {
            let t = random_tile(&mut g, nb);
            let pf = getrf_domain(std::slice::from_ref(&t), &[0]).unwrap();
            let mut packed = t.clone();
            let piv = getrf_tile(&mut packed).unwrap();
            assert_eq!(piv, pf.ipiv());
            assert_eq!(packed, pf.packed_top());
            let resid = norm1(
                &sub(&permuted_stack(std::slice::from_ref(&t), &pf), &lu_product(&pf)),
                nb,
                nb,
            );
            assert!(resid <= 10.0 * nb as f64 * EPS * t.norm1(), "nb={nb} resid={resid}");
        }
    }

    #[test]
    fn scalar_stack_picks_larger() {
        let col = vec![
            Tile::from_rows(&[&[1.0]]).unwrap(),
            Tile::from_rows(&[&[3.0]]).unwrap(),
        ];
        let pf = getrf_domain(&col, &[0, 1]).unwrap();
        assert_eq!(pf.permutation(), vec![1, 0]);
        assert_eq!(pf.u_tile().get(0, 0), 3.0);
        assert_eq!(pf.l_block(1).get(0, 0), 1.0 / 3.0);
    }

    #[test]
    fn domain_reconstruction() {
        let mut g = rng(11);
        let (d, nb) = (3, 4);
        let column: Vec<Tile> = (0..5).map(|_| random_tile(&mut g, nb)).collect();
        let rows = [1, 2, 4];
        let pf = getrf_domain(&column, &rows).unwrap();
        let m = d * nb;
        let a = stack(&column, &rows, nb);
        let resid = norm1(&sub(&permuted_stack(&column, &pf), &lu_product(&pf)), m, nb);
        assert!(resid <= 10.0 * m as f64 * EPS * norm1(&a, m, nb));
        let mut stored = column.clone();
        pf.store(&mut stored);
        assert_eq!(stored[0], column[0]);
        assert_eq!(stored[1], pf.packed_top());
        assert_eq!(stored[4], pf.l_block(2));
    }

    #[test]
    fn trsm_cases() {
        let mut a = Tile::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let before = a.clone();
        trsm_eliminate(&Tile::identity(2), &mut a).unwrap();
        assert_eq!(a, before);

        let mut s = Tile::from_rows(&[&[6.0]]).unwrap();
        trsm_eliminate(&Tile::from_rows(&[&[2.0]]).unwrap(), &mut s).unwrap();
        assert_eq!(s.get(0, 0), 3.0);

        let u = Tile::from_rows(&[&[1.0, 2.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(
            trsm_eliminate(&u, &mut a),
            Err(Error::ZeroDiagonal { index: 1 })
        ));

        let mut g = rng(3);
        let nb = 8;
        let mut u = random_tile(&mut g, nb);
        for c in 0..nb {
            for r in c + 1..nb {
                u.set(r, c, 0.0);
            }
            u.set(c, c, u.get(c, c) + 4.0f64.copysign(u.get(c, c)));
        }
        let a0 = random_tile(&mut g, nb);
        let mut x = a0.clone();
        trsm_eliminate(&u, &mut x).unwrap();
        let back = matmul(x.data(), u.data(), nb, nb, nb);
        let resid = norm1(&sub(&back, a0.data()), nb, nb);
        assert!(resid <= 10.0 * nb as f64 * EPS * a0.norm1());
    }

    #[test]
    fn swptrsm_identity_and_scalar() {
        let col = vec![Tile::identity(2), Tile::zeros(2)];
        let pf = getrf_domain(&col, &[0]).unwrap();
        let mut trailing = vec![Tile::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap()];
        let before = trailing.clone();
        swptrsm_apply(&pf, &mut trailing);
        assert_eq!(trailing, before);

        // U = 1, L21 = 2, no interchange
        let pf = PanelFactorization {
            rows: vec![0, 1],
            nb: 1,
            lu: vec![1.0, 2.0],
            ipiv: vec![0],
        };
        let mut trailing = vec![
            Tile::from_rows(&[&[5.0]]).unwrap(),
            Tile::from_rows(&[&[7.0]]).unwrap(),
        ];
        swptrsm_apply(&pf, &mut trailing);
        assert_eq!(trailing[0].get(0, 0), 5.0);
        assert_eq!(trailing[1].get(0, 0), -3.0);
    }

    #[test]
    fn gemm_cases() {
        let mut a = Tile::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let before = a.clone();
        gemm_update(&mut a, &Tile::zeros(2), &Tile::identity(2));
        assert_eq!(a, before);
        let mut s = Tile::from_rows(&[&[10.0]]).unwrap();
        gemm_update(
            &mut s,
            &Tile::from_rows(&[&[2.0]]).unwrap(),
            &Tile::from_rows(&[&[3.0]]).unwrap(),
        );
        assert_eq!(s.get(0, 0), 4.0);

        let mut g = rng(5);
        let nb = 6;
        let (c0, x, y) = (
            random_tile(&mut g, nb),
            random_tile(&mut g, nb),
            random_tile(&mut g, nb),
        );
        let mut c = c0.clone();
        gemm_update(&mut c, &x, &y);
        let expect = sub(c0.data(), &matmul(x.data(), y.data(), nb, nb, nb));
        let err = norm1(&sub(c.data(), &expect), nb, nb);
        assert!(err <= 4.0 * nb as f64 * EPS * (c0.norm1() + x.norm1() * y.norm1()));
    }
}
