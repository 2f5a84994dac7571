//! Branch-and-price vertex coloring with an emulated neutral-atom pricing
//! oracle.

pub mod bench;
pub mod bnp;
pub mod bounds;
pub mod embedding;
pub mod emulator;
pub mod error;
pub mod graph;
pub mod hcg;
pub mod lp;
pub mod pricing;

pub use error::{Error, Result};
