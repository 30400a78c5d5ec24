//! Proof-graph construction: SLD expansion, edge features, transition
//! probabilities, and local (push-based) and full grounding.

mod expander;
mod full;
mod graph;
mod nibble;
mod node;
mod params;
mod prover;
mod transition;

pub use expander::{Expander, GraphExpander, OutEdge, ProofExpander};
pub use full::ground_full;
pub use graph::{Edge, EdgeKind, GroundedGraph, Label, Solution};
pub use nibble::{pagerank_nibble_prove, NibbleOutcome, PushEngine, PushStats};
pub use node::ProofNode;
pub use params::GroundingParams;
pub use prover::{Expansion, Prover};
pub use transition::{normalize_weights, transition_distribution, Normalization, Transitions};
