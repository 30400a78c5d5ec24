#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use proppr::feature::{Feature, FeatureVector, ParameterVector, WeightFn};
use proppr::grounder::{Edge, EdgeKind, GroundedGraph, Label, Solution};
use proppr::inference::FeatureTable;

/// Facts for the four-document hyperlink example used throughout the tests.
pub const HYPERLINK_FACTS: &str = "\
handLabeled\ta\tfashion
links\ta\tb
handLabeled\tb\tsport
hasWord\ta\tsprinter
hasWord\tb\tsprinter
";

/// Row-stochastic transition matrix, computed directly from the edge
/// features: weight `f(w . phi)`, normalize, and raise a restart share below
/// `floor` to exactly `floor`. Nodes without edges restart with probability 1.
pub fn dense_transitions(
    g: &GroundedGraph,
    w: &ParameterVector,
    f: WeightFn,
    floor: f64,
) -> DMatrix<f64> {
    let n = g.num_nodes;
    let mut m = DMatrix::zeros(n, n);
    for u in 0..n {
        let out: Vec<&Edge> = g.edges.iter().filter(|e| e.src == u).collect();
        if out.is_empty() {
            m[(u, g.start)] += 1.0;
            continue;
        }
        let raw: Vec<f64> = out
            .iter()
            .map(|e| {
                let s: f64 = e.features.iter().map(|(k, v)| w.get(k) * v).sum();
                match f {
                    WeightFn::Linear => s.max(1e-9),
                    WeightFn::Exp => s.exp(),
                }
            })
            .collect();
        if out.len() == 1 {
            m[(u, out[0].dst)] += 1.0;
            continue;
        }
        let total: f64 = raw.iter().sum();
        let ri = out.iter().position(|e| e.kind == EdgeKind::Restart).unwrap();
        let restart_share = raw[ri] / total;
        for (k, e) in out.iter().enumerate() {
            let p = if restart_share >= floor {
                raw[k] / total
            } else if k == ri {
                floor
            } else {
                (1.0 - floor) * raw[k] / (total - raw[ri])
            };
            m[(u, e.dst)] += p;
        }
    }
    m
}

/// Stationary distribution of the walk, by a dense linear solve of
/// `pi (I - W) = 0` with `sum(pi) = 1`.
pub fn dense_stationary(w: &DMatrix<f64>) -> Vec<f64> {
    let n = w.nrows();
    let mut a = DMatrix::identity(n, n) - w.transpose();
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(n);
    b[n - 1] = 1.0;
    let x = a.lu().solve(&b).expect("singular system");
    x.iter().copied().collect()
}

/// `v^T` by explicit matrix powers.
pub fn dense_steps(w: &DMatrix<f64>, start: usize, steps: usize) -> Vec<f64> {
    let n = w.nrows();
    let mut v = DVector::zeros(n);
    v[start] = 1.0;
    let wt = w.transpose();
    for _ in 0..steps {
        v = &wt * v;
    }
    v.iter().copied().collect()
}

fn restart_edge(src: usize, value: f64) -> Edge {
    Edge {
        src,
        dst: 0,
        kind: EdgeKind::Restart,
        features: FeatureVector::single(Feature::restart(), value),
    }
}

/// A random rooted graph shaped like a proof graph: every node reachable
/// from node 0, one restart edge per node, some solution nodes with
/// self-loops, and edge features drawn from a small vocabulary.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, vocab: usize) -> GroundedGraph {
    let mut edges = Vec::new();
    let mut solutions = Vec::new();
    let feature = |i: usize| Feature::named(&format!("f{i}"));
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 1..n {
        let parent = rng.gen_range(0..v);
        children[parent].push(v);
    }
    for u in 0..n {
        let is_solution = u > 0 && children[u].is_empty() && rng.gen_bool(0.6);
        if is_solution {
            edges.push(Edge {
                src: u,
                dst: u,
                kind: EdgeKind::SelfLoop,
                features: FeatureVector::single(Feature::self_loop(), 1.0),
            });
            edges.push(restart_edge(u, 1.0));
            solutions.push(Solution {
                node: u,
                answer: format!("ans{u}"),
                label: None,
            });
            continue;
        }
        let mut targets = children[u].clone();
        let extra = rng.gen_range(0..3);
        for _ in 0..extra {
            targets.push(rng.gen_range(0..n));
        }
        for dst in targets {
            let mut phi = FeatureVector::new();
            for _ in 0..rng.gen_range(1..3) {
                phi.add(feature(rng.gen_range(0..vocab)), rng.gen_range(0.5..1.5));
            }
            edges.push(Edge {
                src: u,
                dst,
                kind: EdgeKind::Clause,
                features: phi,
            });
        }
        edges.push(restart_edge(u, rng.gen_range(0.2..2.0)));
    }
    GroundedGraph {
        query: "random".into(),
        start: 0,
        num_nodes: n,
        edges,
        solutions,
        nodes: None,
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random weights in `[lo, hi)` for features `f0..f{vocab}`.
pub fn random_weights(rng: &mut ChaCha8Rng, vocab: usize, lo: f64, hi: f64) -> ParameterVector {
    (0..vocab)
        .map(|i| (Feature::named(&format!("f{i}")), rng.gen_range(lo..hi)))
        .collect()
}

/// Finite-difference step for gradient checks.
pub const FD_STEP: f64 = 1e-5;

/// Central difference of `h` around `w[i]`.
pub fn central(w: &[f64], i: usize, h: f64, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
    let mut plus = w.to_vec();
    plus[i] += h;
    let mut minus = w.to_vec();
    minus[i] -= h;
    (f(&plus) - f(&minus)) / (2.0 * h)
}

/// Relative error with an absolute floor of 1e-8.
pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    let scale = analytic.abs().max(numeric.abs());
    if scale < 1e-8 {
        0.0
    } else {
        (analytic - numeric).abs() / scale
    }
}

/// A random graph with its solutions split into positives and negatives;
/// `None` when it has fewer than two solutions.
pub fn labeled_graph(seed: u64, max_nodes: usize) -> Option<GroundedGraph> {
    let mut r = rng(seed);
    let n = r.gen_range(5..=max_nodes);
    let mut g = random_graph(&mut r, n, 6);
    let mut sols: Vec<usize> = (0..g.solutions.len()).collect();
    if sols.len() < 2 {
        return None;
    }
    sols.shuffle(&mut r);
    let split = r.gen_range(1..sols.len());
    for (k, &s) in sols.iter().enumerate() {
        g.solutions[s].label = Some(if k < split {
            Label::Positive
        } else {
            Label::Negative
        });
    }
    Some(g)
}

/// Weights in `[0.3, 2)` for the features of `table`.
pub fn weights_for(seed: u64, table: &FeatureTable) -> Vec<f64> {
    let mut r = rng(seed ^ 0x5eed);
    table.weights(&random_weights(&mut r, 6, 0.3, 2.0))
}
