pub mod alloc;
pub mod binom;
pub mod decompose;
pub mod embed;
pub mod gen;
pub mod hampath;
pub mod regular;
pub mod sumner;

use tourney_core::rng::derive;

/// Seed of batch instance `i` for one purpose (`salt`).
pub fn instance_seed(base: u64, i: usize, salt: u64) -> u64 {
    derive(derive(base, i as u64), salt)
}
