//! Inputs shared by the benchmarks.

use g2rc::crystal::Weight;
use g2rc::paths::{enumerate_paths, Path};
use g2rc::rigged_config::{enumerate_rc, RiggedConfiguration};

/// The largest cell at `L = 5` by number of configurations.
pub const LAMBDA: Weight = Weight::new(3, 0);
pub const BIG_L: usize = 5;

pub fn configurations() -> Vec<RiggedConfiguration> {
    enumerate_rc(LAMBDA, BIG_L).expect("within bound")
}

pub fn paths() -> Vec<Path> {
    enumerate_paths(LAMBDA, BIG_L).expect("within bound")
}
