//! Exact derivatives of `T` unrolled power-iteration steps on a fixed
//! grounded graph.
//!
//! Per node `u` with raw edge weights `g_e = f(w . phi_e)` the transition
//! probabilities are either proportional (`P_e = g_e / S`) or floored (the
//! restart edge is held at `alpha'` and the rest share `1 - alpha'` in
//! proportion to their weights). Both cases are differentiated exactly; the
//! floored restart probability is constant and so has zero derivative.

use std::collections::HashMap;

use crate::error::Result;
use crate::feature::{Feature, WeightFn};
use crate::grounder::Normalization;
use crate::inference::{CompiledGraph, EdgeProbabilities, FeatureTable};

use super::example::GroundedExample;
use super::loss::Loss;

/// `d v^T[u] / d w[i]` for every node `u` and every feature `i` the graph
/// touches.
#[derive(Clone, Debug)]
pub struct PprGradient {
    /// Table indices of the touched features, in column order.
    pub features: Vec<u32>,
    /// `v^T`.
    pub value: Vec<f64>,
    /// Row-major `num_nodes x features.len()`.
    d: Vec<f64>,
}

impl PprGradient {
    pub fn get(&self, node: usize, feature: u32) -> f64 {
        match self.features.binary_search(&feature) {
            Ok(j) => self.d[node * self.features.len() + j],
            Err(_) => 0.0,
        }
    }

    /// The gradient restricted to `nodes`, keyed by feature.
    pub fn restricted(
        &self,
        table: &FeatureTable,
        nodes: &[usize],
    ) -> HashMap<Feature, HashMap<usize, f64>> {
        self.features
            .iter()
            .map(|&i| {
                let per_node = nodes.iter().map(|&u| (u, self.get(u, i))).collect();
                (table.feature(i), per_node)
            })
            .collect()
    }
}

/// Edge coefficients `k_e` with `sum_e c_e dP_e = sum_e k_e dg_e` for the
/// edges of node `u`.
fn pullback(
    g: &CompiledGraph,
    probs: &EdgeProbabilities,
    u: usize,
    c: &[f64],
    alpha_prime: f64,
    k: &mut [f64],
) {
    let edges = g.edges_of(u);
    match probs.norm[u] {
        Normalization::RestartOnly => {
            for e in edges {
                k[e] = 0.0;
            }
        }
        Normalization::Proportional { total } => {
            let mean: f64 = edges.clone().map(|e| c[e] * probs.prob[e]).sum();
            for e in edges {
                k[e] = (c[e] - mean) / total;
            }
        }
        Normalization::Floored { successor_total } => {
            let r = g.restart[u] as usize;
            let mean: f64 = edges
                .clone()
                .filter(|&e| e != r)
                .map(|e| c[e] * probs.weight[e])
                .sum::<f64>()
                / successor_total;
            for e in edges {
                k[e] = if e == r {
                    0.0
                } else {
                    (1.0 - alpha_prime) * (c[e] - mean) / successor_total
                };
            }
        }
    }
}

/// Forward-mode derivative of `v^T` with respect to every touched feature.
pub fn ppr_gradient(
    g: &CompiledGraph,
    weights: &[f64],
    f: WeightFn,
    alpha_prime: f64,
    steps: usize,
) -> Result<PprGradient> {
    let probs = g.probabilities(weights, f, alpha_prime)?;
    let features = g.touched_features().to_vec();
    let nf = features.len();
    let n = g.num_nodes;
    let col = |i: usize| features.binary_search(&(i as u32)).unwrap();

    // dP_e as dense rows over the touched features: columns of the pullback
    // with unit upstream on each edge in turn would be quadratic, so the
    // derivative of each normalization is written out directly instead.
    let m = g.edge_count();
    let mut dp = vec![0.0; m * nf];
    let mut dg = vec![0.0; nf];
    let mut ds = vec![0.0; nf];
    for u in 0..n {
        let edges = g.edges_of(u);
        let (scale, total, skip) = match probs.norm[u] {
            Normalization::RestartOnly => continue,
            Normalization::Proportional { total } => (1.0, total, usize::MAX),
            Normalization::Floored { successor_total } => {
                (1.0 - alpha_prime, successor_total, g.restart[u] as usize)
            }
        };
        ds.iter_mut().for_each(|x| *x = 0.0);
        for e in edges.clone().filter(|&e| e != skip) {
            let slope = f.derivative(probs.score[e]);
            for (i, v) in g.edge_features(e) {
                ds[col(i)] += slope * v;
            }
        }
        for e in edges.filter(|&e| e != skip) {
            dg.iter_mut().for_each(|x| *x = 0.0);
            let slope = f.derivative(probs.score[e]);
            for (i, v) in g.edge_features(e) {
                dg[col(i)] += slope * v;
            }
            let share = probs.weight[e] / total;
            let row = &mut dp[e * nf..(e + 1) * nf];
            for j in 0..nf {
                row[j] = scale * (dg[j] - share * ds[j]) / total;
            }
        }
    }

    let mut v = vec![0.0; n];
    v[g.start] = 1.0;
    let mut d = vec![0.0; n * nf];
    let mut next_v = vec![0.0; n];
    let mut next_d = vec![0.0; n * nf];
    for _ in 0..steps {
        next_d.iter_mut().for_each(|x| *x = 0.0);
        for u in 0..n {
            let du = &d[u * nf..(u + 1) * nf];
            let edges = g.edges_of(u);
            if edges.is_empty() {
                let s = g.start;
                for j in 0..nf {
                    next_d[s * nf + j] += du[j];
                }
                continue;
            }
            for e in edges {
                let dst = g.dst[e] as usize;
                let p = probs.prob[e];
                let row = &dp[e * nf..(e + 1) * nf];
                for j in 0..nf {
                    next_d[dst * nf + j] += p * du[j] + v[u] * row[j];
                }
            }
        }
        g.step(&probs.prob, &v, &mut next_v);
        std::mem::swap(&mut v, &mut next_v);
        std::mem::swap(&mut d, &mut next_d);
    }
    Ok(PprGradient {
        features,
        value: v,
        d,
    })
}

/// Objective value and gradient of one example.
#[derive(Clone, Debug, PartialEq)]
pub struct ExampleGradient {
    /// Pair losses plus `mu * ||w||^2` over the touched features.
    pub loss: f64,
    /// `(table index, derivative)` for each touched feature.
    pub grad: Vec<(u32, f64)>,
    /// Pairs whose loss term was nonzero.
    pub violated: usize,
}

/// Learning settings that shape the per-example objective.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Objective {
    pub loss: Loss,
    pub mu: f64,
    pub weight_fn: WeightFn,
    pub alpha_prime: f64,
    /// Unrolled power-iteration steps.
    pub steps: usize,
}

impl Objective {
    /// Pair losses on `v^T` only, without gradient or regularizer.
    pub fn pair_loss(&self, ex: &GroundedExample, weights: &[f64]) -> Result<f64> {
        let probs = ex.graph.probabilities(weights, self.weight_fn, self.alpha_prime)?;
        let v = ex.graph.unroll(&probs.prob, self.steps).pop().unwrap();
        let mut total = 0.0;
        for &a in &ex.positives {
            for &b in &ex.negatives {
                total += self.loss.eval(v[a], v[b]).0;
            }
        }
        Ok(total)
    }

    /// Reverse-mode gradient of the example's full objective.
    pub fn example_gradient(
        &self,
        ex: &GroundedExample,
        weights: &[f64],
    ) -> Result<ExampleGradient> {
        let g = &ex.graph;
        let probs = g.probabilities(weights, self.weight_fn, self.alpha_prime)?;
        let vs = g.unroll(&probs.prob, self.steps);
        let v_t = &vs[self.steps];

        let n = g.num_nodes;
        let mut adj = vec![0.0; n];
        let mut loss = 0.0;
        let mut violated = 0;
        for &a in &ex.positives {
            for &b in &ex.negatives {
                let (l, d_pos, d_neg) = self.loss.eval(v_t[a], v_t[b]);
                loss += l;
                if l > 0.0 {
                    violated += 1;
                }
                adj[a] += d_pos;
                adj[b] += d_neg;
            }
        }

        let touched = g.touched_features();
        let mut grad: Vec<(u32, f64)> = touched
            .iter()
            .map(|&i| {
                let w = weights[i as usize];
                loss += self.mu * w * w;
                (i, 2.0 * self.mu * w)
            })
            .collect();
        if adj.iter().all(|&x| x == 0.0) {
            return Ok(ExampleGradient {
                loss,
                grad,
                violated,
            });
        }

        // c_e = sum_t adj^t[dst_e] * v^{t-1}[src_e]
        let m = g.edge_count();
        let mut c = vec![0.0; m];
        let mut prev = vec![0.0; n];
        for t in (1..=self.steps).rev() {
            let v_prev = &vs[t - 1];
            for u in 0..n {
                let edges = g.edges_of(u);
                if edges.is_empty() {
                    prev[u] = adj[g.start];
                    continue;
                }
                let mut acc = 0.0;
                for e in edges {
                    let a = adj[g.dst[e] as usize];
                    c[e] += a * v_prev[u];
                    acc += probs.prob[e] * a;
                }
                prev[u] = acc;
            }
            std::mem::swap(&mut adj, &mut prev);
        }

        let mut k = vec![0.0; m];
        for u in 0..n {
            pullback(g, &probs, u, &c, self.alpha_prime, &mut k);
        }
        for (e, &ke) in k.iter().enumerate() {
            if ke == 0.0 {
                continue;
            }
            let slope = ke * self.weight_fn.derivative(probs.score[e]);
            if slope == 0.0 {
                continue;
            }
            for (i, v) in g.edge_features(e) {
                let j = touched.binary_search(&(i as u32)).unwrap();
                grad[j].1 += slope * v;
            }
        }
        Ok(ExampleGradient {
            loss,
            grad,
            violated,
        })
    }
}
