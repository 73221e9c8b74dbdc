//! Exact embedding search and the small-case oracles built on it.

mod enumerate;
mod hampath;
mod search;
mod transitive;
mod universality;

pub use enumerate::{canonical_code, enumerate_directed_trees, MAX_ENUMERATE};
pub use hampath::{hamilton_directed_path, hamilton_path_on, is_hamilton_path};
pub use search::{find_embedding, EmbedRequest, Search, SearchOutcome, SearchStats, DEFAULT_NODE_LIMIT};
pub use transitive::embed_in_transitive_order;
pub use universality::{
    tournament_from_mask, verify_universality, verify_universality_with, Counterexample, Mode,
    UniversalityReport, MAX_EXHAUSTIVE_HOST,
};
