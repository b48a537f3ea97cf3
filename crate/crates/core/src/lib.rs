//! Steiner triple systems, 3-uniform hypertrees, and a constructive pipeline
//! that embeds any hypertree on at most `(1 - ε)n` vertices into an `n`-vertex
//! Steiner triple system.
//!
//! The crate is organised bottom-up:
//!
//! - [`sts`] stores linear 3-graphs with an O(1) pair index and builds Steiner
//!   triple systems (Bose, Skolem, randomized hill climbing).
//! - [`hypertree`] validates and generates hypertrees and answers structural
//!   queries (leaf edges, matching leaf sets, bare and semi-bare paths).
//! - [`split`] decomposes a hypertree into the stage chain
//!   `T_0 ⊆ T_1 ⊆ … ⊆ T_ℓ = T` consumed by the embedding pipeline.
//! - [`partition`] samples singleton-pair partitions and checks the
//!   concentration events the pipeline relies on.
//! - [`embed`] holds the embedding engine: greedy small-tree embedding,
//!   star embedding with augmenting switches, nibble matchings, length-3 path
//!   routing and the staged pipeline.
//! - [`oracle`] contains exact brute-force references for small instances.
//! - [`io`] reads and writes the plain-text file formats.

pub mod embed;
pub mod hypertree;
pub mod io;
pub mod oracle;
pub mod partition;
pub mod split;
pub mod sts;
mod vset;

pub use embed::{
    embed_hypertree, verify_embedding, Embedding, EmbedError, PipelineConfig, PipelineOutcome,
};
pub use hypertree::{validate_hypertree, Hypertree, PathDescriptor, TreeShape};
pub use split::{split_hypertree, validate_split, SplitParams, SplitPlan};
pub use sts::{LinearThreeGraph, SteinerTripleSystem, Triple, Vertex};
pub use vset::VertexSet;
