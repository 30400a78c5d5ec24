use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::feature::{Feature, FeatureVector};
use crate::grounder::graph::{EdgeKind, GroundedGraph};
use crate::grounder::node::ProofNode;
use crate::grounder::prover::Prover;

/// An outgoing edge as produced by an [`Expander`].
#[derive(Clone, Debug, PartialEq)]
pub struct OutEdge {
    pub dst: usize,
    pub kind: EdgeKind,
    pub features: FeatureVector,
}

/// Lazily enumerates a rooted graph. Node 0 is the start node; the expander
/// assigns ids to nodes as it discovers them.
pub trait Expander {
    /// All edges leaving `u`, including its restart edge.
    fn out_edges(&mut self, u: usize) -> Result<Vec<OutEdge>>;

    /// Number of node ids handed out so far.
    fn node_count(&self) -> usize;

    fn proof_node(&self, _u: usize) -> Option<&ProofNode> {
        None
    }

    /// Answer text when `u` is a solution node.
    fn answer(&self, u: usize) -> Option<String>;
}

/// Expands proof states with SLD steps, merging alpha-equivalent states.
pub struct ProofExpander<'a> {
    prover: Prover<'a>,
    nodes: Vec<ProofNode>,
    index: HashMap<ProofNode, usize>,
    max_nodes: usize,
}

impl<'a> ProofExpander<'a> {
    pub fn new(prover: Prover<'a>, root: ProofNode, max_nodes: usize) -> Self {
        let mut index = HashMap::new();
        index.insert(root.clone(), 0);
        ProofExpander {
            prover,
            nodes: vec![root],
            index,
            max_nodes,
        }
    }

    fn intern(&mut self, node: ProofNode) -> Result<usize> {
        if let Some(&id) = self.index.get(&node) {
            return Ok(id);
        }
        if self.nodes.len() >= self.max_nodes {
            return Err(Error::NodeBudget(self.max_nodes));
        }
        let id = self.nodes.len();
        self.index.insert(node.clone(), id);
        self.nodes.push(node);
        Ok(id)
    }

    pub fn nodes(&self) -> &[ProofNode] {
        &self.nodes
    }
}

impl Expander for ProofExpander<'_> {
    fn out_edges(&mut self, u: usize) -> Result<Vec<OutEdge>> {
        let node = &self.nodes[u];
        if node.is_solution() {
            return Ok(vec![
                OutEdge {
                    dst: u,
                    kind: EdgeKind::SelfLoop,
                    features: FeatureVector::single(Feature::self_loop(), 1.0),
                },
                OutEdge {
                    dst: 0,
                    kind: EdgeKind::Restart,
                    features: FeatureVector::single(Feature::restart(), 1.0),
                },
            ]);
        }
        let expansion = self.prover.expansion(node)?;
        let mut edges = Vec::with_capacity(expansion.successors.len() + 1);
        for (succ, features) in expansion.successors {
            let dst = self.intern(succ)?;
            edges.push(OutEdge {
                dst,
                kind: EdgeKind::Clause,
                features,
            });
        }
        edges.push(OutEdge {
            dst: 0,
            kind: EdgeKind::Restart,
            features: expansion.restart,
        });
        Ok(edges)
    }

    fn node_count(&self) -> usize {
        self.nodes.len()
    }

    fn proof_node(&self, u: usize) -> Option<&ProofNode> {
        self.nodes.get(u)
    }

    fn answer(&self, u: usize) -> Option<String> {
        let node = &self.nodes[u];
        node.is_solution().then(|| node.answer_text())
    }
}

/// Walks an already materialized graph. Nodes without stored edges get a
/// lone restart edge.
pub struct GraphExpander {
    out: Vec<Vec<OutEdge>>,
    answers: HashMap<usize, String>,
    start: usize,
}

impl GraphExpander {
    /// The start node of `graph` is mapped to id 0 by swapping ids with it.
    pub fn new(graph: &GroundedGraph) -> Self {
        let start = graph.start;
        let remap = |v: usize| {
            if v == start {
                0
            } else if v == 0 {
                start
            } else {
                v
            }
        };
        let mut out = vec![Vec::new(); graph.num_nodes];
        for e in &graph.edges {
            out[remap(e.src)].push(OutEdge {
                dst: remap(e.dst),
                kind: e.kind,
                features: e.features.clone(),
            });
        }
        let answers = graph
            .solutions
            .iter()
            .map(|s| (remap(s.node), s.answer.clone()))
            .collect();
        GraphExpander {
            out,
            answers,
            start,
        }
    }

    /// Maps an id used by this expander back to the source graph's id.
    pub fn original_id(&self, v: usize) -> usize {
        if v == 0 {
            self.start
        } else if v == self.start {
            0
        } else {
            v
        }
    }
}

impl Expander for GraphExpander {
    fn out_edges(&mut self, u: usize) -> Result<Vec<OutEdge>> {
        let edges = &self.out[u];
        if edges.is_empty() {
            return Ok(vec![OutEdge {
                dst: 0,
                kind: EdgeKind::Restart,
                features: FeatureVector::single(Feature::restart(), 1.0),
            }]);
        }
        Ok(edges.clone())
    }

    fn node_count(&self) -> usize {
        self.out.len()
    }

    fn answer(&self, u: usize) -> Option<String> {
        self.answers.get(&u).cloned()
    }
}
