//! Tree decompositions: weights, core tree, splits, tidy orders, leading
//! paths, the extended tree, sink/source peeling and contraction.

mod contract;
mod core;
mod extended;
mod leading;
mod order;
mod peel;
mod split;
mod weights;

pub use contract::{contract, Contracted};
pub use core::core_tree;
pub use extended::{extended_tree, ExtendedTree};
pub use leading::leading_paths;
pub use order::{max_open, tidy_ancestral_order};
pub use peel::{peel_split, peel_violation, Peel};
pub use split::{segment_split, single_split, SplitPair, TreeSplit};
pub use weights::{edge_weights, set_weights, WeightTable};
