use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::feature::{Feature, ParameterVector, WeightFn};
use crate::grounder::{normalize_weights, EdgeKind, GroundedGraph, Label, Normalization};

/// Dense numbering of features shared by a set of compiled graphs.
#[derive(Clone, Debug, Default)]
pub struct FeatureTable {
    index: HashMap<Feature, u32>,
    features: Vec<Feature>,
}

impl FeatureTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, f: Feature) -> u32 {
        if let Some(&i) = self.index.get(&f) {
            return i;
        }
        let i = self.features.len() as u32;
        self.index.insert(f, i);
        self.features.push(f);
        i
    }

    pub fn get(&self, f: Feature) -> Option<u32> {
        self.index.get(&f).copied()
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn feature(&self, i: u32) -> Feature {
        self.features[i as usize]
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    /// Weights aligned with this table.
    pub fn weights(&self, w: &ParameterVector) -> Vec<f64> {
        self.features.iter().map(|f| w.get(*f)).collect()
    }
}

const NO_EDGES: u32 = u32::MAX;

/// A grounded graph in CSR form with features resolved to table indices.
#[derive(Clone, Debug)]
pub struct CompiledGraph {
    pub num_nodes: usize,
    pub start: usize,
    /// Edges of node `u` are `offsets[u]..offsets[u+1]`.
    pub(crate) offsets: Vec<u32>,
    pub(crate) dst: Vec<u32>,
    /// Absolute index of each node's restart edge, or `NO_EDGES`.
    pub(crate) restart: Vec<u32>,
    pub(crate) feat_offsets: Vec<u32>,
    pub(crate) feat_idx: Vec<u32>,
    pub(crate) feat_val: Vec<f64>,
    /// Features appearing on at least one edge, sorted.
    pub(crate) touched: Vec<u32>,
    pub solutions: Vec<(usize, String, Option<Label>)>,
}

/// Per-edge probabilities plus what is needed to differentiate them.
#[derive(Clone, Debug)]
pub struct EdgeProbabilities {
    pub prob: Vec<f64>,
    pub(crate) weight: Vec<f64>,
    pub(crate) score: Vec<f64>,
    pub(crate) norm: Vec<Normalization>,
}

impl CompiledGraph {
    pub fn compile(g: &GroundedGraph, table: &mut FeatureTable) -> Result<CompiledGraph> {
        let n = g.num_nodes;
        let by_src = g.out_edges();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut dst = Vec::with_capacity(g.edges.len());
        let mut restart = vec![NO_EDGES; n];
        let mut feat_offsets = vec![0u32];
        let mut feat_idx = Vec::new();
        let mut feat_val = Vec::new();
        offsets.push(0);
        for (u, edge_ids) in by_src.iter().enumerate() {
            for &i in edge_ids {
                let e = &g.edges[i];
                if e.kind == EdgeKind::Restart {
                    if restart[u] != NO_EDGES {
                        return Err(Error::InvalidParams(format!("node {u} has two restart edges")));
                    }
                    restart[u] = dst.len() as u32;
                }
                dst.push(e.dst as u32);
                for (f, v) in e.features.iter() {
                    feat_idx.push(table.intern(f));
                    feat_val.push(v);
                }
                feat_offsets.push(feat_idx.len() as u32);
            }
            if !edge_ids.is_empty() && restart[u] == NO_EDGES {
                return Err(Error::InvalidParams(format!("node {u} has edges but no restart edge")));
            }
            offsets.push(dst.len() as u32);
        }
        let mut touched = feat_idx.clone();
        touched.sort_unstable();
        touched.dedup();
        Ok(CompiledGraph {
            num_nodes: n,
            start: g.start,
            offsets,
            dst,
            restart,
            feat_offsets,
            feat_idx,
            feat_val,
            touched,
            solutions: g
                .solutions
                .iter()
                .map(|s| (s.node, s.answer.clone(), s.label))
                .collect(),
        })
    }

    pub fn edge_count(&self) -> usize {
        self.dst.len()
    }

    pub fn dst(&self, e: usize) -> usize {
        self.dst[e] as usize
    }

    pub fn edges_of(&self, u: usize) -> std::ops::Range<usize> {
        self.offsets[u] as usize..self.offsets[u + 1] as usize
    }

    pub(crate) fn edge_features(&self, e: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.feat_offsets[e] as usize..self.feat_offsets[e + 1] as usize;
        self.feat_idx[r.clone()]
            .iter()
            .zip(&self.feat_val[r])
            .map(|(i, v)| (*i as usize, *v))
    }

    /// Table indices of the features used by this graph.
    pub fn touched_features(&self) -> &[u32] {
        &self.touched
    }

    pub fn probabilities(
        &self,
        weights: &[f64],
        f: WeightFn,
        alpha_prime: f64,
    ) -> Result<EdgeProbabilities> {
        let m = self.dst.len();
        let mut score = vec![0.0; m];
        for (e, s) in score.iter_mut().enumerate() {
            *s = self.edge_features(e).map(|(i, v)| weights[i] * v).sum();
        }
        let weight: Vec<f64> = score.iter().map(|s| f.apply(*s)).collect();
        let mut prob = weight.clone();
        let mut norm = Vec::with_capacity(self.num_nodes);
        for u in 0..self.num_nodes {
            let r = self.edges_of(u);
            if r.is_empty() {
                norm.push(Normalization::RestartOnly);
                continue;
            }
            let restart = self.restart[u] as usize - r.start;
            norm.push(normalize_weights(&mut prob[r], restart, alpha_prime)?);
        }
        Ok(EdgeProbabilities {
            prob,
            weight,
            score,
            norm,
        })
    }

    /// One step `next = W^T v`. Nodes without edges send their mass to start.
    pub(crate) fn step(&self, prob: &[f64], v: &[f64], next: &mut [f64]) {
        next.iter_mut().for_each(|x| *x = 0.0);
        for (u, &mass) in v.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let r = self.edges_of(u);
            if r.is_empty() {
                next[self.start] += mass;
                continue;
            }
            for e in r {
                next[self.dst[e] as usize] += prob[e] * mass;
            }
        }
    }

    /// `v^t` for `t = 0..=steps`, starting from the start node.
    pub(crate) fn unroll(&self, prob: &[f64], steps: usize) -> Vec<Vec<f64>> {
        let mut vs = Vec::with_capacity(steps + 1);
        let mut v = vec![0.0; self.num_nodes];
        v[self.start] = 1.0;
        vs.push(v);
        for t in 0..steps {
            let mut next = vec![0.0; self.num_nodes];
            self.step(prob, &vs[t], &mut next);
            vs.push(next);
        }
        vs
    }

    /// Power iteration from the start node; stops after `max_t` steps or
    /// once the L1 change drops below `tol`.
    pub fn power_iterate(
        &self,
        weights: &[f64],
        f: WeightFn,
        alpha_prime: f64,
        max_t: usize,
        tol: f64,
    ) -> Result<Vec<f64>> {
        let probs = self.probabilities(weights, f, alpha_prime)?;
        let mut v = vec![0.0; self.num_nodes];
        v[self.start] = 1.0;
        let mut next = vec![0.0; self.num_nodes];
        for _ in 0..max_t {
            self.step(&probs.prob, &v, &mut next);
            let change: f64 = v.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
            std::mem::swap(&mut v, &mut next);
            if change < tol {
                break;
            }
        }
        Ok(v)
    }
}
