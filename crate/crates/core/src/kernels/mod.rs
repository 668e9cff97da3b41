//! Tile kernels for LU and QR elimination steps, with flop accounting.
//!
//! Costs are bookkept in units of `nb^3` flops, one count per kernel call,
//! using the leading-order cost of each kernel rather than instrumented
//! operation counts.

pub mod lu;
pub mod qr;

use serde::{Deserialize, Serialize};

pub use lu::{
    apply_row_swaps, gemm_update, getrf_domain, getrf_tile, swptrsm_apply, trsm_eliminate, PanelFactorization,
};
pub use qr::{geqrt, inner_block, tsmqr, tsqrt, ttmqr, ttqrt, unmqr, TFactor, Trans};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kernel {
    Getrf,
    Trsm,
    Swptrsm,
    Gemm,
    Geqrt,
    Tsqrt,
    Tsmqr,
    Ttqrt,
    Ttmqr,
    Unmqr,
}

impl Kernel {
    /// Cost in units of `nb^3` flops.
    ///
    /// TT kernels work on triangles: a TT kill (GEQRT + TTQRT) and a TT
    /// update (UNMQR + TTMQR) cost the same as TSQRT and TSMQR respectively.
    pub fn units(self) -> f64 {
        match self {
            Kernel::Getrf => 2.0 / 3.0,
            Kernel::Trsm => 1.0,
            Kernel::Swptrsm => 1.0,
            Kernel::Gemm => 2.0,
            Kernel::Geqrt => 4.0 / 3.0,
            Kernel::Tsqrt => 2.0,
            Kernel::Tsmqr => 4.0,
            Kernel::Ttqrt => 2.0 / 3.0,
            Kernel::Ttmqr => 2.0,
            Kernel::Unmqr => 2.0,
        }
    }
}

/// Per-kernel call tallies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelCounts {
    pub getrf: u64,
    pub trsm: u64,
    pub swptrsm: u64,
    pub gemm: u64,
    pub geqrt: u64,
    pub tsqrt: u64,
    pub tsmqr: u64,
    pub ttqrt: u64,
    pub ttmqr: u64,
    pub unmqr: u64,
}

impl KernelCounts {
    pub fn add(&mut self, kernel: Kernel, count: u64) {
        let slot = match kernel {
            Kernel::Getrf => &mut self.getrf,
            Kernel::Trsm => &mut self.trsm,
            Kernel::Swptrsm => &mut self.swptrsm,
            Kernel::Gemm => &mut self.gemm,
            Kernel::Geqrt => &mut self.geqrt,
            Kernel::Tsqrt => &mut self.tsqrt,
            Kernel::Tsmqr => &mut self.tsmqr,
            Kernel::Ttqrt => &mut self.ttqrt,
            Kernel::Ttmqr => &mut self.ttmqr,
            Kernel::Unmqr => &mut self.unmqr,
        };
        *slot += count;
    }

    pub fn merge(&mut self, other: &KernelCounts) {
        for (k, c) in other.entries() {
            self.add(k, c);
        }
    }

    pub fn entries(&self) -> [(Kernel, u64); 10] {
        [
            (Kernel::Getrf, self.getrf),
            (Kernel::Trsm, self.trsm),
            (Kernel::Swptrsm, self.swptrsm),
            (Kernel::Gemm, self.gemm),
            (Kernel::Geqrt, self.geqrt),
            (Kernel::Tsqrt, self.tsqrt),
            (Kernel::Tsmqr, self.tsmqr),
            (Kernel::Ttqrt, self.ttqrt),
            (Kernel::Ttmqr, self.ttmqr),
            (Kernel::Unmqr, self.unmqr),
        ]
    }

    /// Total cost in `nb^3` units.
    pub fn units(&self) -> f64 {
        self.entries()
            .iter()
            .map(|&(k, c)| k.units() * c as f64)
            .sum()
    }

    pub fn flops(&self, nb: usize) -> f64 {
        self.units() * (nb as f64).powi(3)
    }

    pub fn total_calls(&self) -> u64 {
        self.entries().iter().map(|&(_, c)| c).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qr_kernels_cost_twice_lu() {
        assert_eq!(Kernel::Geqrt.units(), 2.0 * Kernel::Getrf.units());
        assert_eq!(Kernel::Tsqrt.units(), 2.0 * Kernel::Trsm.units());
        assert_eq!(Kernel::Unmqr.units(), 2.0 * Kernel::Swptrsm.units());
        assert_eq!(Kernel::Tsmqr.units(), 2.0 * Kernel::Gemm.units());
        assert_eq!(
            Kernel::Geqrt.units() + Kernel::Ttqrt.units(),
            Kernel::Tsqrt.units()
        );
        assert_eq!(
            Kernel::Unmqr.units() + Kernel::Ttmqr.units(),
            Kernel::Tsmqr.units()
        );
    }

    #[test]
    fn counts_accumulate() {
        let mut c = KernelCounts::default();
        c.add(Kernel::Getrf, 1);
        c.add(Kernel::Gemm, 3);
        assert_eq!(c.units(), 2.0 / 3.0 + 6.0);
        assert_eq!(c.flops(2), (2.0 / 3.0 + 6.0) * 8.0);
        let mut d = KernelCounts::default();
        d.merge(&c);
        d.merge(&c);
        assert_eq!(d.gemm, 6);
        assert_eq!(d.total_calls(), 8);
    }
}
