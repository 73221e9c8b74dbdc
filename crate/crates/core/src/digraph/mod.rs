//! Tournaments, directed trees, embeddings and generators.

mod embedding;
pub mod formats;
pub mod generate;
mod tournament;
mod tree;

pub use embedding::{validate_embedding, Embedding, Violation};
pub use tournament::{vertex_set, Tournament};
pub use tree::{Dir, DirectedTree};
