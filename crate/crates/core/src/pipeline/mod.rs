//! End-to-end routes: host decomposition, the almost-transitive
//! recursion, the expander route and the main embedder.

mod decompose;
mod expander_route;
mod main_route;
mod params;
mod transitive;

pub use decompose::{audit, decompose, DecomposeAudit, DecomposeOutcome, Decomposition, OneSided, PartitionState, SplitKind, StepRecord};
pub use params::{HierarchyViolation, Params, DESK_PRESET};
pub use transitive::{embed_almost_transitive, TransitiveEmbedding, TransitiveStats, EXACT_BASE, MAX_DEPTH};
pub use expander_route::{embed_unbounded_in_expander, CycleInfo, ExpanderEmbedding, ExpanderPath, ExpanderReport, MIN_RESTRICTED_CLUSTER};
pub use main_route::{
    embed_main, Betas, DecompositionSummary, MainEmbedding, MainReport, MainRoute, PartMethod, SplitCase, SplitReport, StageTiming,
    MAX_MAIN_DEPTH,
};
