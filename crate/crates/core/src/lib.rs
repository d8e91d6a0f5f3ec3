//! Exact and Monte Carlo analysis of the minimal step-reinforced random walk
//! and of bond percolation on uniform random recursive trees.

pub mod checks;
pub mod error;
pub mod exact;
pub mod io;
pub mod mittag_leffler;
pub mod params;
pub mod rng;
pub mod rrt;
pub mod special;
pub mod stats;
pub mod walk;

pub use error::{Error, Result};
pub use params::WalkParams;
