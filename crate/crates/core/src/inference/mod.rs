//! Exact PageRank on grounded graphs, answer extraction, and ranking metrics.

mod compiled;
mod metrics;

pub use compiled::{CompiledGraph, EdgeProbabilities, FeatureTable};
pub use metrics::{auc, average_precision, mean_average_precision, rank_metrics, RankMetrics};

use std::fmt::Write as _;

use crate::error::Result;
use crate::feature::{ParameterVector, WeightFn};
use crate::grounder::GroundedGraph;

/// Default L1 convergence tolerance for power iteration.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Mass per node of a grounded graph.
#[derive(Clone, Debug, PartialEq)]
pub struct PprVector(pub Vec<f64>);

impl PprVector {
    pub fn get(&self, u: usize) -> f64 {
        self.0.get(u).copied().unwrap_or(0.0)
    }

    pub fn l1(&self) -> f64 {
        self.0.iter().map(|x| x.abs()).sum()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// `v^T` of the restart walk on `g` started at its start node.
pub fn power_iterate(
    g: &GroundedGraph,
    w: &ParameterVector,
    f: WeightFn,
    alpha_prime: f64,
    max_t: usize,
    tol: f64,
) -> Result<PprVector> {
    let mut table = FeatureTable::new();
    let compiled = CompiledGraph::compile(g, &mut table)?;
    let weights = table.weights(w);
    Ok(PprVector(compiled.power_iterate(
        &weights,
        f,
        alpha_prime,
        max_t,
        tol,
    )?))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Answer {
    pub answer: String,
    pub probability: f64,
    pub node: usize,
}

/// Answers ranked by probability (descending, ties by node id).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AnswerList {
    pub answers: Vec<Answer>,
    /// Total mass on solution nodes before renormalization. Zero means no
    /// solution node received mass.
    pub total_mass: f64,
}

impl AnswerList {
    pub fn is_empty(&self) -> bool {
        self.answers.is_empty()
    }

    pub fn len(&self) -> usize {
        self.answers.len()
    }

    pub fn no_mass(&self) -> bool {
        self.total_mass == 0.0
    }

    pub fn probability_of(&self, answer: &str) -> Option<f64> {
        self.answers
            .iter()
            .find(|a| a.answer == answer)
            .map(|a| a.probability)
    }

    /// `rank<TAB>probability<TAB>answer` lines, ranks from 1.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.answers.iter().enumerate() {
            let _ = writeln!(out, "{}\t{}\t{}", i + 1, a.probability, a.answer);
        }
        out
    }

    /// `(answer, score)` pairs in rank order.
    pub fn scored(&self) -> Vec<(String, f64)> {
        self.answers
            .iter()
            .map(|a| (a.answer.clone(), a.probability))
            .collect()
    }
}

/// Renormalizes the mass on solution nodes with positive mass.
pub fn extract_answers(g: &GroundedGraph, v: &[f64]) -> AnswerList {
    let mut answers: Vec<Answer> = g
        .solutions
        .iter()
        .filter(|s| v.get(s.node).copied().unwrap_or(0.0) > 0.0)
        .map(|s| Answer {
            answer: s.answer.clone(),
            probability: v[s.node],
            node: s.node,
        })
        .collect();
    let total_mass: f64 = answers.iter().map(|a| a.probability).sum();
    if total_mass > 0.0 {
        for a in &mut answers {
            a.probability /= total_mass;
        }
    }
    answers.sort_by(|a, b| {
        b.probability
            .total_cmp(&a.probability)
            .then(a.node.cmp(&b.node))
    });
    AnswerList {
        answers,
        total_mass,
    }
}
