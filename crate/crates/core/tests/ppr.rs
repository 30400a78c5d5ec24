mod common;

use rand::Rng;

use proppr::grounder::{GraphExpander, PushEngine};
use proppr::logic::parse_query;
use proppr::synth::LABEL_PROPAGATION_RULES;
use proppr::{
    extract_answers, ground_full, pagerank_nibble_prove, power_iterate, Error, GroundingParams,
    KnowledgeBase, ParameterVector, WeightFn,
};

use common::{
    dense_stationary, dense_steps, dense_transitions, random_graph, random_weights, rng,
    HYPERLINK_FACTS,
};

const ALPHA_PRIME: f64 = 0.1;

fn weight_fn(seed: u64) -> WeightFn {
    if seed.is_multiple_of(2) {
        WeightFn::Linear
    } else {
        WeightFn::Exp
    }
}

#[test]
fn power_iteration_matches_matrix_powers() {
    for seed in 0..40 {
        let mut r = rng(seed);
        let n = r.gen_range(2..80);
        let g = random_graph(&mut r, n, 5);
        let w = random_weights(&mut r, 5, 0.1, 2.0);
        let f = weight_fn(seed);
        let m = dense_transitions(&g, &w, f, ALPHA_PRIME);
        for t in [0, 1, 3, 10] {
            let v = power_iterate(&g, &w, f, ALPHA_PRIME, t, 0.0).unwrap();
            let oracle = dense_steps(&m, g.start, t);
            for u in 0..n {
                assert!((v.get(u) - oracle[u]).abs() < 1e-12, "seed {seed} t {t} node {u}");
            }
        }
    }
}

#[test]
fn power_iteration_converges_to_stationary_distribution() {
    for seed in 0..40 {
        let mut r = rng(100 + seed);
        let n = r.gen_range(2..120);
        let g = random_graph(&mut r, n, 5);
        let w = random_weights(&mut r, 5, 0.1, 2.0);
        let f = weight_fn(seed);
        let v = power_iterate(&g, &w, f, ALPHA_PRIME, 10_000, 1e-14).unwrap();
        let pi = dense_stationary(&dense_transitions(&g, &w, f, ALPHA_PRIME));
        assert!((v.l1() - 1.0).abs() < 1e-12);
        for u in 0..n {
            assert!((v.get(u) - pi[u]).abs() < 1e-8, "seed {seed} node {u}");
        }
    }
}

/// Push state against the exact vector: `p` never overshoots, the missing
/// mass is exactly the residual, and every residual ends below threshold.
#[test]
fn push_invariants_hold_on_random_graphs() {
    for seed in 0..60 {
        let mut r = rng(200 + seed);
        let n = r.gen_range(2..300);
        let g = random_graph(&mut r, n, 6);
        let w = random_weights(&mut r, 6, 0.2, 2.0);
        let f = weight_fn(seed);
        let epsilon = [1e-2, 1e-3, 1e-4, 1e-5][seed as usize % 4];
        let exact = dense_stationary(&dense_transitions(&g, &w, f, ALPHA_PRIME));
        let mut engine = PushEngine::new(GraphExpander::new(&g), &w, f, ALPHA_PRIME, epsilon);
        engine.run().unwrap();
        let mut degree = vec![0usize; n];
        for e in &g.edges {
            degree[e.src] += 1;
        }
        let (mut p_mass, mut r_mass) = (0.0, 0.0);
        for (v, (&p, &res)) in engine.estimate().iter().zip(engine.residual()).enumerate() {
            let u = engine.expander().original_id(v);
            assert!(p <= exact[u] + 1e-12, "seed {seed}: p exceeds ppr at {u}");
            assert!(res >= 0.0);
            assert!(res <= epsilon * degree[u].max(1) as f64 + 1e-15);
            p_mass += p;
            r_mass += res;
        }
        let gap = exact.iter().sum::<f64>() - p_mass;
        assert!((p_mass + r_mass - 1.0).abs() < 1e-12);
        assert!((gap - r_mass).abs() < 1e-9, "seed {seed}: gap {gap} vs residual {r_mass}");
        let stats = engine.stats();
        assert!((stats.degree_sum as f64) < stats.bound);
    }
}

#[test]
fn push_converges_as_epsilon_shrinks() {
    let mut r = rng(7);
    let g = random_graph(&mut r, 150, 6);
    let w = random_weights(&mut r, 6, 0.2, 2.0);
    let exact = dense_stationary(&dense_transitions(&g, &w, WeightFn::Linear, ALPHA_PRIME));
    let mut last = f64::INFINITY;
    for epsilon in [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7] {
        let mut engine = PushEngine::new(GraphExpander::new(&g), &w, WeightFn::Linear, ALPHA_PRIME, epsilon);
        engine.run().unwrap();
        let err = exact.iter().sum::<f64>() - engine.estimate().iter().sum::<f64>();
        assert!(err <= last + 1e-12);
        last = err;
    }
    assert!(last < 1e-4, "L1 error at eps 1e-7 is {last}");
}

fn hyperlink_kb() -> KnowledgeBase {
    KnowledgeBase::from_sources(LABEL_PROPAGATION_RULES, HYPERLINK_FACTS).unwrap()
}

#[test]
fn local_grounding_approaches_exact_answers() {
    let kb = hyperlink_kb();
    let q = parse_query("about(a,Z)").unwrap();
    let w = ParameterVector::new();
    let params = GroundingParams {
        epsilon: 1e-8,
        max_t: 10_000,
        ..Default::default()
    };
    let local = pagerank_nibble_prove(&q, &kb, &params, &w, WeightFn::Linear).unwrap();
    let full = ground_full(&q, &kb, &params).unwrap();
    assert_eq!(local.graph.num_nodes, full.num_nodes);
    assert_eq!(local.graph.edges.len(), full.edges.len());
    let v = power_iterate(&full, &w, WeightFn::Linear, params.alpha_prime, 10_000, 1e-15).unwrap();
    let exact = extract_answers(&full, v.as_slice());
    let approx = extract_answers(&local.graph, &local.estimate);
    assert_eq!(exact.len(), 2);
    for a in &exact.answers {
        let p = approx.probability_of(&a.answer).unwrap();
        assert!((p - a.probability).abs() < 1e-5, "{}: {p} vs {}", a.answer, a.probability);
    }
}

#[test]
fn local_grounding_is_deterministic() {
    let kb = hyperlink_kb();
    let q = parse_query("about(a,Z)").unwrap();
    let params = GroundingParams::default();
    let w = ParameterVector::new();
    let a = pagerank_nibble_prove(&q, &kb, &params, &w, WeightFn::Exp).unwrap();
    let b = pagerank_nibble_prove(&q, &kb, &params, &w, WeightFn::Exp).unwrap();
    assert_eq!(a.graph, b.graph);
    assert_eq!(a.estimate, b.estimate);
}

#[test]
fn epsilon_one_grounds_only_the_start() {
    let kb = hyperlink_kb();
    let q = parse_query("about(a,Z)").unwrap();
    let params = GroundingParams {
        epsilon: 1.0,
        ..Default::default()
    };
    let o = pagerank_nibble_prove(&q, &kb, &params, &ParameterVector::new(), WeightFn::Linear).unwrap();
    assert_eq!(o.stats.pushes, 0);
    assert!(o.graph.edges.is_empty());
    assert!(extract_answers(&o.graph, &o.estimate).no_mass());
}

#[test]
fn node_budget_is_enforced() {
    let kb = hyperlink_kb();
    let q = parse_query("about(a,Z)").unwrap();
    let params = GroundingParams {
        epsilon: 1e-6,
        max_nodes: 3,
        ..Default::default()
    };
    let err = pagerank_nibble_prove(&q, &kb, &params, &ParameterVector::new(), WeightFn::Linear)
        .unwrap_err();
    assert!(matches!(err, Error::NodeBudget(_)), "{err}");
    assert!(matches!(ground_full(&q, &kb, &params), Err(Error::NodeBudget(_))));
}

#[test]
fn unknown_predicate_in_query_is_rejected() {
    let kb = hyperlink_kb();
    let q = parse_query("nosuch(a,Z)").unwrap();
    let err = pagerank_nibble_prove(&q, &kb, &GroundingParams::default(), &ParameterVector::new(), WeightFn::Linear)
        .unwrap_err();
    assert_eq!(err.kind(), "unknown_predicate");
}
