pub mod cli;
pub mod criteria;
pub mod error;
pub mod factorization;
pub mod kernels;
pub mod matgen;
pub mod metrics;
pub mod serde_util;
pub mod tiled;
pub mod trees;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
