mod common;

use proppr::feature::WeightFn;
use proppr::inference::FeatureTable;
use proppr::learner::{ppr_gradient, GroundedExample, Loss, Objective};

use common::{central, labeled_graph, rel_err, weights_for, FD_STEP};

const STEPS: usize = 10;

#[test]
fn ppr_gradient_matches_finite_differences() {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for seed in 0..50 {
        let Some(g) = labeled_graph(seed, 30) else {
            continue;
        };
        for f in [WeightFn::Linear, WeightFn::Exp] {
            let mut table = FeatureTable::new();
            let ex = GroundedExample::new(&g, &mut table, None).unwrap();
            let w = weights_for(seed, &table);
            let grad = ppr_gradient(&ex.graph, &w, f, 0.1, STEPS).unwrap();
            let value = |w: &[f64]| {
                let p = ex.graph.probabilities(w, f, 0.1).unwrap();
                let mut v = vec![0.0; ex.graph.num_nodes];
                v[ex.graph.start] = 1.0;
                for _ in 0..STEPS {
                    let mut next = vec![0.0; v.len()];
                    for u in 0..v.len() {
                        let edges = ex.graph.edges_of(u);
                        if edges.is_empty() {
                            next[ex.graph.start] += v[u];
                        }
                        for e in edges {
                            next[ex.graph.dst(e)] += p.prob[e] * v[u];
                        }
                    }
                    v = next;
                }
                v
            };
            for &i in ex.graph.touched_features() {
                let fd = central(&w, i as usize, 1e-6, |w| value(w)[0]);
                // A wider step for every node: some derivatives are ~1e-7,
                // where 1e-6 steps lose digits to cancellation.
                let fd_nodes: Vec<f64> = {
                    let mut plus = w.clone();
                    plus[i as usize] += FD_STEP;
                    let mut minus = w.clone();
                    minus[i as usize] -= FD_STEP;
                    let (a, b) = (value(&plus), value(&minus));
                    a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * FD_STEP)).collect()
                };
                assert!(rel_err(grad.get(0, i), fd) < 1e-4);
                for (u, d) in fd_nodes.iter().enumerate() {
                    worst = worst.max(rel_err(grad.get(u, i), *d));
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
    assert!(worst < 1e-4, "worst relative error {worst}");
}

#[test]
fn example_gradient_matches_finite_differences() {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for seed in 100..150 {
        let Some(g) = labeled_graph(seed, 50) else {
            continue;
        };
        for f in [WeightFn::Linear, WeightFn::Exp] {
            for loss in [Loss::SquaredHinge, Loss::Log] {
                let mut table = FeatureTable::new();
                let ex = GroundedExample::new(&g, &mut table, None).unwrap();
                let w = weights_for(seed, &table);
                let obj = Objective {
                    loss,
                    mu: 0.01,
                    weight_fn: f,
                    alpha_prime: 0.1,
                    steps: STEPS,
                };
                let grad = obj.example_gradient(&ex, &w).unwrap();
                let full = |w: &[f64]| {
                    let reg: f64 = ex
                        .graph
                        .touched_features()
                        .iter()
                        .map(|&i| 0.01 * w[i as usize] * w[i as usize])
                        .sum();
                    obj.pair_loss(&ex, w).unwrap() + reg
                };
                assert!((grad.loss - full(&w)).abs() < 1e-12 * grad.loss.abs().max(1.0));
                for &(i, d) in &grad.grad {
                    let fd = central(&w, i as usize, FD_STEP, full);
                    worst = worst.max(rel_err(d, fd));
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 200);
    assert!(worst < 1e-4, "worst relative error {worst}");
}

#[test]
fn untouched_feature_has_zero_gradient() {
    let g = labeled_graph(3, 20).unwrap();
    let mut table = FeatureTable::new();
    let ex = GroundedExample::new(&g, &mut table, None).unwrap();
    let unused = table.intern(proppr::Feature::named("neverUsed"));
    let w = vec![1.0; table.len()];
    let grad = ppr_gradient(&ex.graph, &w, WeightFn::Linear, 0.1, STEPS).unwrap();
    for u in 0..ex.graph.num_nodes {
        assert_eq!(grad.get(u, unused), 0.0);
    }
}

#[test]
fn satisfied_pairs_leave_only_the_regularizer() {
    for seed in 0..40 {
        let Some(g) = labeled_graph(seed, 30) else {
            continue;
        };
        let mut table = FeatureTable::new();
        let ex = GroundedExample::new(&g, &mut table, None).unwrap();
        let w = weights_for(seed, &table);
        let obj = Objective {
            loss: Loss::SquaredHinge,
            mu: 0.001,
            weight_fn: WeightFn::Linear,
            alpha_prime: 0.1,
            steps: STEPS,
        };
        let grad = obj.example_gradient(&ex, &w).unwrap();
        if grad.violated == 0 {
            for (i, d) in grad.grad {
                assert_eq!(d, 2.0 * 0.001 * w[i as usize]);
            }
            return;
        }
    }
    panic!("no example with all pairs satisfied");
}
