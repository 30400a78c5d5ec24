//! Probabilistic logic programming where inference is personalized PageRank
//! over SLD proof graphs.
//!
//! A program is a set of definite clauses whose edges carry feature
//! annotations (`head :- body # features.`). Answering a query walks the
//! proof graph with restarts to the query; local grounding by the push
//! algorithm keeps the explored graph below `1 / (alpha' * epsilon)` edges
//! regardless of database size. Feature weights can be trained from ranked
//! answer labels with SGD, in parallel across examples.

pub mod cli;
pub mod error;
pub mod facts;
pub mod feature;
pub mod grounder;
pub mod inference;
pub mod kb;
pub mod learner;
pub mod logic;
pub mod seed;
pub mod symbol;
pub mod synth;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
pub use facts::FactStore;
pub use feature::{Feature, FeatureVector, ParameterVector, WeightFn};
pub use grounder::{ground_full, pagerank_nibble_prove, GroundedGraph, GroundingParams};
pub use inference::{extract_answers, power_iterate, AnswerList};
pub use kb::KnowledgeBase;
