use crate::error::Result;
use crate::grounder::expander::{Expander, ProofExpander};
use crate::grounder::graph::{Edge, GroundedGraph, Solution};
use crate::grounder::node::ProofNode;
use crate::grounder::params::GroundingParams;
use crate::grounder::prover::Prover;
use crate::kb::KnowledgeBase;
use crate::logic::{format_atoms, Atom};

/// Breadth-first grounding of every state reachable from the root within
/// `params.max_t` steps: exactly the nodes a `max_t`-step power iteration
/// can put mass on. Nodes at depth `max_t` are included without edges.
pub fn ground_full(
    query: &[Atom],
    kb: &KnowledgeBase,
    params: &GroundingParams,
) -> Result<GroundedGraph> {
    params.validate()?;
    kb.check_query(query)?;
    let prover = Prover::new(kb, params.alpha);
    let mut expander = ProofExpander::new(prover, ProofNode::root(query), params.max_nodes);
    let mut edges = Vec::new();
    let mut frontier = vec![0usize];
    let mut expanded = vec![false; 1];
    for _ in 0..params.max_t {
        let mut next = Vec::new();
        for &u in &frontier {
            if expanded[u] {
                continue;
            }
            expanded[u] = true;
            for e in expander.out_edges(u)? {
                if expanded.len() < expander.node_count() {
                    expanded.resize(expander.node_count(), false);
                }
                if !expanded[e.dst] {
                    next.push(e.dst);
                }
                edges.push(Edge {
                    src: u,
                    dst: e.dst,
                    kind: e.kind,
                    features: e.features,
                });
            }
        }
        next.sort_unstable();
        next.dedup();
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let num_nodes = expander.node_count();
    let solutions = (0..num_nodes)
        .filter_map(|u| {
            expander.answer(u).map(|answer| Solution {
                node: u,
                answer,
                label: None,
            })
        })
        .collect();
    Ok(GroundedGraph {
        query: format_atoms(query),
        start: 0,
        num_nodes,
        edges,
        solutions,
        nodes: Some(expander.nodes().to_vec()),
    })
}
