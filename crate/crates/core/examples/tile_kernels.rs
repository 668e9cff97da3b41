//! Drive the tile kernels by hand on a two-tile panel: LU with pivoting
//! across both tiles, then a TS QR elimination, with residual checks.

use hybrid_luqr::kernels::{geqrt, getrf_domain, tsmqr, tsqrt, unmqr, Trans};
use hybrid_luqr::tiled::Tile;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn random_tile(nb: usize, rng: &mut ChaCha8Rng) -> Tile {
    Tile::from_col_major(nb, (0..nb * nb).map(|_| rng.sample(StandardNormal)).collect()).unwrap()
}

fn main() -> hybrid_luqr::Result<()> {
    let nb = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let panel = vec![random_tile(nb, &mut rng), random_tile(nb, &mut rng)];

    // LU of the stacked 12x6 panel
    let pf = getrf_domain(&panel, &[0, 1])?;
    let perm = pf.permutation();
    let u = pf.u_tile();
    let mut worst: f64 = 0.0;
    for r in 0..2 * nb {
        let l = pf.l_block(r / nb);
        for c in 0..nb {
            let lu: f64 = (0..nb).map(|k| l.get(r % nb, k) * u.get(k, c)).sum();
            let src = perm[r];
            worst = worst.max((panel[src / nb].get(src % nb, c) - lu).abs());
        }
    }
    println!("LU: pivot rows {:?}", &perm[..nb]);
    println!("LU: max |PA - LU| = {worst:.2e}");

    // QR: GEQRT on the top tile, TSQRT kills the bottom one
    let (mut top, mut bottom) = (panel[0].clone(), panel[1].clone());
    let t_top = geqrt(&mut top);
    let v_top = top.clone();
    let t_ts = tsqrt(&mut top, &mut bottom);
    // Applying Q^T to the original panel must give [R; 0].
    let (mut c0, mut c1) = (panel[0].clone(), panel[1].clone());
    unmqr(&v_top, &t_top, &mut c0, Trans::Transpose);
    tsmqr(&mut c0, &mut c1, &bottom, &t_ts, Trans::Transpose);
    let below: f64 = c1.data().iter().fold(0.0, |m, v| m.max(v.abs()));
    let mut diff: f64 = 0.0;
    for c in 0..nb {
        for r in 0..=c {
            diff = diff.max((c0.get(r, c) - top.get(r, c)).abs());
        }
    }
    println!("QR: max |Q^T A| below R = {below:.2e}, max |R - R'| = {diff:.2e}");
    Ok(())
}

