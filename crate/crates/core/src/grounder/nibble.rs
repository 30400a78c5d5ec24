//! Local grounding by approximate personalized PageRank ("push").
//!
//! Every node keeps an estimate `p[u]` and a residual `r[u]`, starting from
//! `r[start] = 1`. Pushing `u` moves `alpha' * r[u]` into `p[u]` and spreads
//! the rest over `u`'s out-edges. Since every node restarts with probability
//! at least `alpha'`, the walk decomposes as
//! `W = alpha' * 1 e_start^T + (1 - alpha') * M`, and the push spreads
//! `(1 - alpha') * M[u, v] * r[u] = (W[u, v] - alpha' [v restart]) * r[u]`.
//! This keeps `p + ppr_M(r)` equal to the exact stationary vector after
//! every push, and `|p|_1 + |r|_1 = 1`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::feature::{ParameterVector, WeightFn};
use crate::grounder::expander::{Expander, OutEdge, ProofExpander};
use crate::grounder::graph::{Edge, EdgeKind, GroundedGraph, Solution};
use crate::grounder::node::ProofNode;
use crate::grounder::params::GroundingParams;
use crate::grounder::prover::Prover;
use crate::grounder::transition::normalize_weights;
use crate::kb::KnowledgeBase;
use crate::logic::{format_atoms, Atom};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PushStats {
    pub pushes: usize,
    /// Sum of `|N(u)|` over every push, counting repeats.
    pub degree_sum: usize,
    /// Nodes whose out-edges were computed (pushed or degree-checked).
    pub expanded: usize,
    /// `1 / (alpha' * epsilon)`.
    pub bound: f64,
}

struct NodeOut {
    edges: Vec<OutEdge>,
    probs: Vec<f64>,
}

/// Mutable push state over an [`Expander`].
pub struct PushEngine<'w, E: Expander> {
    expander: E,
    weights: &'w ParameterVector,
    weight_fn: WeightFn,
    alpha_prime: f64,
    epsilon: f64,
    p: Vec<f64>,
    r: Vec<f64>,
    out: Vec<Option<NodeOut>>,
    pushed: Vec<bool>,
    push_order: Vec<usize>,
    stats: PushStats,
}

impl<'w, E: Expander> PushEngine<'w, E> {
    pub fn new(
        expander: E,
        weights: &'w ParameterVector,
        weight_fn: WeightFn,
        alpha_prime: f64,
        epsilon: f64,
    ) -> Self {
        let mut engine = PushEngine {
            expander,
            weights,
            weight_fn,
            alpha_prime,
            epsilon,
            p: Vec::new(),
            r: Vec::new(),
            out: Vec::new(),
            pushed: Vec::new(),
            push_order: Vec::new(),
            stats: PushStats {
                bound: 1.0 / (alpha_prime * epsilon),
                ..Default::default()
            },
        };
        engine.grow();
        engine.r[0] = 1.0;
        engine
    }

    fn grow(&mut self) {
        let n = self.expander.node_count();
        if self.p.len() < n {
            self.p.resize(n, 0.0);
            self.r.resize(n, 0.0);
            self.out.resize_with(n, || None);
            self.pushed.resize(n, false);
        }
    }

    pub fn expander(&self) -> &E {
        &self.expander
    }

    pub fn estimate(&self) -> &[f64] {
        &self.p
    }

    pub fn residual(&self) -> &[f64] {
        &self.r
    }

    pub fn stats(&self) -> PushStats {
        self.stats
    }

    fn load(&mut self, u: usize) -> Result<&NodeOut> {
        if self.out[u].is_none() {
            let edges = self.expander.out_edges(u)?;
            self.grow();
            let restart = edges
                .iter()
                .position(|e| e.kind == EdgeKind::Restart)
                .ok_or(Error::RestartBelowBound {
                    node: u,
                    found: 0.0,
                    bound: self.alpha_prime,
                })?;
            let mut probs: Vec<f64> = edges
                .iter()
                .map(|e| self.weight_fn.weight(&e.features, self.weights))
                .collect();
            normalize_weights(&mut probs, restart, self.alpha_prime)?;
            self.stats.expanded += 1;
            self.out[u] = Some(NodeOut { edges, probs });
        }
        Ok(self.out[u].as_ref().unwrap())
    }

    /// `|N(u)|`: number of out-edges, restart included.
    pub fn degree(&mut self, u: usize) -> Result<usize> {
        Ok(self.load(u)?.edges.len())
    }

    /// Outgoing `(dst, kind, probability)` of `u`.
    pub fn transitions(&mut self, u: usize) -> Result<Vec<(usize, EdgeKind, f64)>> {
        let out = self.load(u)?;
        Ok(out
            .edges
            .iter()
            .zip(&out.probs)
            .map(|(e, p)| (e.dst, e.kind, *p))
            .collect())
    }

    /// One push at `u`. The caller decides whether `u` is above threshold.
    pub fn push(&mut self, u: usize) -> Result<()> {
        let alpha_prime = self.alpha_prime;
        self.load(u)?;
        let out = self.out[u].as_ref().unwrap();
        let mass = self.r[u];
        self.p[u] += alpha_prime * mass;
        self.r[u] = 0.0;
        for (e, &prob) in out.edges.iter().zip(&out.probs) {
            let share = if e.kind == EdgeKind::Restart {
                if prob < alpha_prime * (1.0 - 1e-12) {
                    return Err(Error::RestartBelowBound {
                        node: u,
                        found: prob,
                        bound: alpha_prime,
                    });
                }
                (prob - alpha_prime).max(0.0)
            } else {
                prob
            };
            self.r[e.dst] += share * mass;
        }
        if !self.pushed[u] {
            self.pushed[u] = true;
            self.push_order.push(u);
        }
        self.stats.pushes += 1;
        self.stats.degree_sum += out.edges.len();
        Ok(())
    }

    /// Pushes until every node satisfies `r[u] <= epsilon * |N(u)|`, taking
    /// nodes from a LIFO stack so that exploration is depth-first.
    pub fn run(&mut self) -> Result<()> {
        let mut stack = vec![0usize];
        while let Some(u) = stack.pop() {
            // |N(u)| >= 1, so r[u] <= epsilon rules u out without expanding it
            if self.r[u] <= self.epsilon {
                continue;
            }
            let degree = self.degree(u)?;
            if self.r[u] / degree as f64 <= self.epsilon {
                continue;
            }
            self.push(u)?;
            if self.r[u] > self.epsilon {
                stack.push(u);
            }
            let out = self.out[u].as_ref().unwrap();
            for e in out.edges.iter().rev() {
                if e.dst != u && self.r[e.dst] > self.epsilon {
                    stack.push(e.dst);
                }
            }
        }
        Ok(())
    }

    /// Builds the local grounding: every pushed node with all of its
    /// out-edges. Node ids are compacted in expander-id order; the start node
    /// stays 0. Returns the graph, the estimate on its nodes, and the map
    /// from local to expander ids.
    pub fn into_grounding(self, query: String) -> (GroundedGraph, Vec<f64>, Vec<usize>) {
        let mut keep: Vec<usize> = vec![0];
        for &u in &self.push_order {
            keep.push(u);
            for e in &self.out[u].as_ref().unwrap().edges {
                keep.push(e.dst);
            }
        }
        keep.sort_unstable();
        keep.dedup();
        let local: HashMap<usize, usize> =
            keep.iter().enumerate().map(|(i, &u)| (u, i)).collect();

        let mut edges = Vec::new();
        let mut order = self.push_order.clone();
        order.sort_unstable();
        for &u in &order {
            for e in &self.out[u].as_ref().unwrap().edges {
                edges.push(Edge {
                    src: local[&u],
                    dst: local[&e.dst],
                    kind: e.kind,
                    features: e.features.clone(),
                });
            }
        }
        let solutions = keep
            .iter()
            .filter_map(|&u| {
                self.expander.answer(u).map(|answer| Solution {
                    node: local[&u],
                    answer,
                    label: None,
                })
            })
            .collect();
        let nodes = keep
            .iter()
            .map(|&u| self.expander.proof_node(u).cloned())
            .collect::<Option<Vec<_>>>();
        let p = keep.iter().map(|&u| self.p[u]).collect();
        let graph = GroundedGraph {
            query,
            start: 0,
            num_nodes: keep.len(),
            edges,
            solutions,
            nodes,
        };
        (graph, p, keep)
    }
}

/// Result of a local grounding run.
#[derive(Clone, Debug)]
pub struct NibbleOutcome {
    pub graph: GroundedGraph,
    /// Approximate PageRank on the nodes of `graph`.
    pub estimate: Vec<f64>,
    pub stats: PushStats,
}

/// Locally grounds `query`, returning a graph with at most
/// `1 / (alpha' * epsilon)` edges and an approximate PageRank vector on it.
pub fn pagerank_nibble_prove(
    query: &[Atom],
    kb: &KnowledgeBase,
    params: &GroundingParams,
    w: &ParameterVector,
    f: WeightFn,
) -> Result<NibbleOutcome> {
    params.validate()?;
    kb.check_query(query)?;
    let prover = Prover::new(kb, params.alpha);
    let expander = ProofExpander::new(prover, ProofNode::root(query), params.max_nodes);
    let mut engine = PushEngine::new(expander, w, f, params.alpha_prime, params.epsilon);
    engine.run()?;
    let stats = engine.stats();
    let (graph, estimate, _) = engine.into_grounding(format_atoms(query));
    debug_assert!((stats.degree_sum as f64) < stats.bound || stats.pushes == 0);
    debug_assert!(graph.edges.len() as f64 <= stats.bound);
    Ok(NibbleOutcome {
        graph,
        estimate,
        stats,
    })
}
