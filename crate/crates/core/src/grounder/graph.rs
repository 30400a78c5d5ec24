use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::feature::{Feature, FeatureVector};
use crate::grounder::node::ProofNode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// Produced by resolving a subgoal with a clause or fact.
    Clause,
    /// Back to the start node.
    Restart,
    /// Solution-node self-loop.
    SelfLoop,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub kind: EdgeKind,
    pub features: FeatureVector,
}

/// Training label attached to a solution node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub node: usize,
    pub answer: String,
    pub label: Option<Label>,
}

/// A feature-annotated proof graph rooted at `start`.
///
/// Nodes are `0..num_nodes`. A node without outgoing edges (the frontier of
/// a local grounding) is walked as if it only had its restart edge.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GroundedGraph {
    pub query: String,
    pub start: usize,
    pub num_nodes: usize,
    pub edges: Vec<Edge>,
    pub solutions: Vec<Solution>,
    /// Proof states, when the graph came from the prover.
    pub nodes: Option<Vec<ProofNode>>,
}

impl GroundedGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges grouped by source: `out[u]` lists indices into `edges`.
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_nodes];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.src].push(i);
        }
        out
    }

    pub fn solution_for(&self, answer: &str) -> Option<&Solution> {
        self.solutions.iter().find(|s| s.answer == answer)
    }

    pub fn set_label(&mut self, answer: &str, label: Label) -> bool {
        match self.solutions.iter_mut().find(|s| s.answer == answer) {
            Some(s) => {
                s.label = Some(label);
                true
            }
            None => false,
        }
    }

    /// Writes one record:
    ///
    /// ```text
    /// query<TAB>start<TAB>num_nodes<TAB>num_edges
    /// sol<TAB>node<TAB>answer[<TAB>+|-]
    /// edge<TAB>src<TAB>dst<TAB>feat=val,...
    /// ```
    ///
    /// Solutions are sorted by node id and edges by source node (stable).
    pub fn write_record(&self, out: &mut String) {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            self.query,
            self.start,
            self.num_nodes,
            self.edges.len()
        );
        let mut sols: Vec<&Solution> = self.solutions.iter().collect();
        sols.sort_by_key(|s| s.node);
        for s in sols {
            let _ = write!(out, "sol\t{}\t{}", s.node, s.answer);
            match s.label {
                Some(Label::Positive) => out.push_str("\t+"),
                Some(Label::Negative) => out.push_str("\t-"),
                None => {}
            }
            out.push('\n');
        }
        let mut order: Vec<usize> = (0..self.edges.len()).collect();
        order.sort_by_key(|&i| self.edges[i].src);
        for i in order {
            let e = &self.edges[i];
            let _ = writeln!(out, "edge\t{}\t{}\t{}", e.src, e.dst, e.features);
        }
    }

    pub fn to_record(&self) -> String {
        let mut s = String::new();
        self.write_record(&mut s);
        s
    }

    /// Reads every record in `text`.
    pub fn read_records(text: &str) -> Result<Vec<GroundedGraph>> {
        let mut graphs = Vec::new();
        let mut lines = text.lines().enumerate().peekable();
        while let Some((i, line)) = lines.next() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |line: usize, message: String| Error::Format {
                what: "grounded graph",
                line: line + 1,
                message,
            };
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 4 || cols[0] == "sol" || cols[0] == "edge" {
                return Err(bad(i, "expected a header line".into()));
            }
            let num = |s: &str| s.parse::<usize>().map_err(|_| bad(i, format!("bad number '{s}'")));
            let mut g = GroundedGraph {
                query: cols[0].to_string(),
                start: num(cols[1])?,
                num_nodes: num(cols[2])?,
                ..Default::default()
            };
            let num_edges = num(cols[3])?;
            while let Some((j, line)) = lines.peek().copied() {
                let cols: Vec<&str> = line.split('\t').collect();
                let node = |s: &str| -> Result<usize> {
                    let n: usize = s.parse().map_err(|_| bad(j, format!("bad node id '{s}'")))?;
                    if n >= g.num_nodes {
                        return Err(bad(j, format!("node id {n} out of range")));
                    }
                    Ok(n)
                };
                match cols[0] {
                    "sol" if cols.len() == 3 || cols.len() == 4 => {
                        let label = match cols.get(3) {
                            None => None,
                            Some(&"+") => Some(Label::Positive),
                            Some(&"-") => Some(Label::Negative),
                            Some(other) => return Err(bad(j, format!("bad label '{other}'"))),
                        };
                        g.solutions.push(Solution {
                            node: node(cols[1])?,
                            answer: cols[2].to_string(),
                            label,
                        });
                    }
                    "edge" if cols.len() == 4 => {
                        let src = node(cols[1])?;
                        let dst = node(cols[2])?;
                        let features = FeatureVector::parse(cols[3]).map_err(|m| bad(j, m))?;
                        let kind = if features.get(Feature::restart()).is_some() {
                            EdgeKind::Restart
                        } else if src == dst && features.get(Feature::self_loop()).is_some() {
                            EdgeKind::SelfLoop
                        } else {
                            EdgeKind::Clause
                        };
                        g.edges.push(Edge {
                            src,
                            dst,
                            kind,
                            features,
                        });
                    }
                    "sol" | "edge" => return Err(bad(j, "wrong column count".into())),
                    _ => break,
                }
                lines.next();
            }
            if g.edges.len() != num_edges {
                return Err(bad(
                    i,
                    format!("header says {num_edges} edges, found {}", g.edges.len()),
                ));
            }
            graphs.push(g);
        }
        Ok(graphs)
    }
}
