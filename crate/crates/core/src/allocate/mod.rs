//! Randomized cluster allocation and the embeddings built on it: allocated
//! embedding with reserved sets, bounded-degree and small-tree embedding in
//! a cluster cycle, leading-path components and restricted embedding.

mod alloc;
mod embed;
mod leading;
mod restricted;

pub use alloc::{
    allocate, allocate_with, binom_mod_k_exact, canonical_allocation, canonical_tree, is_semi_canonical, Allocation,
    CanonicalTree, SemiCanonicalViolation,
};
pub use embed::{
    check_root_vertex, embed_allocated, embed_bounded_tree_in_cycle, embed_small_tree_uniform, AllocatedEmbedding,
    BoundedEmbedding, EmbedParams, SmallTreeEmbedding, TraceStep,
};
pub use leading::{embed_leading_path_component, leading_path_allocation, LeadingEmbedding, LeadingOptions};
pub use restricted::{embed_with_restrictions, ComponentCounts, RestrictParams, RestrictedEmbedding};
