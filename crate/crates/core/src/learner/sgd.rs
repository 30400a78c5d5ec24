use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::feature::{ParameterVector, WeightFn};
use crate::grounder::{pagerank_nibble_prove, GroundedGraph, GroundingParams};
use crate::inference::FeatureTable;
use crate::kb::KnowledgeBase;
use crate::seed::named_rng;

use super::example::{GroundedExample, TrainingExample};
use super::gradient::Objective;
use super::loss::Loss;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SgdConfig {
    /// L2 coefficient.
    pub mu: f64,
    /// Initial learning rate; epoch `e` uses `eta / e^2`.
    pub eta: f64,
    pub epochs: usize,
    pub threads: usize,
    pub loss: Loss,
    pub weight_fn: WeightFn,
    pub alpha_prime: f64,
    /// Power-iteration steps unrolled for the forward pass and gradient.
    pub steps: usize,
    pub seed: u64,
    /// Training aborts once any weight leaves `[-max_weight, max_weight]`.
    pub max_weight: f64,
}

impl Default for SgdConfig {
    fn default() -> Self {
        SgdConfig {
            mu: 0.001,
            eta: 1.0,
            epochs: 5,
            threads: 1,
            loss: Loss::SquaredHinge,
            weight_fn: WeightFn::Linear,
            alpha_prime: 0.1,
            steps: 10,
            seed: 0,
            max_weight: 1e6,
        }
    }
}

impl SgdConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if !(self.mu >= 0.0 && self.mu.is_finite()) {
            return bad(format!("mu {} must be >= 0", self.mu));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return bad(format!("eta {} must be > 0", self.eta));
        }
        if self.threads == 0 {
            return bad("threads must be >= 1".into());
        }
        if self.steps == 0 {
            return bad("unrolled steps must be >= 1".into());
        }
        if !(self.alpha_prime > 0.0 && self.alpha_prime < 1.0) {
            return bad(format!("alpha' {} not in (0,1)", self.alpha_prime));
        }
        Ok(())
    }

    pub fn objective(&self) -> Objective {
        Objective {
            loss: self.loss,
            mu: self.mu,
            weight_fn: self.weight_fn,
            alpha_prime: self.alpha_prime,
            steps: self.steps,
        }
    }
}

/// Compiled groundings ready for SGD, sharing one feature table.
#[derive(Clone, Debug, Default)]
pub struct TrainingSet {
    pub table: FeatureTable,
    pub examples: Vec<GroundedExample>,
    /// Queries with no positive or no negative in their grounding.
    pub skipped: Vec<String>,
    /// Labeled pairs lost because a node is missing from the grounding.
    pub missing_pairs: usize,
}

impl TrainingSet {
    /// Builds from labeled groundings. `expected[k]` is the number of
    /// labeled positives and negatives of example `k`, when known.
    pub fn from_graphs(
        graphs: &[GroundedGraph],
        expected: Option<&[(usize, usize)]>,
    ) -> Result<TrainingSet> {
        let mut set = TrainingSet::default();
        for (k, g) in graphs.iter().enumerate() {
            let ex = GroundedExample::new(g, &mut set.table, expected.map(|e| e[k]))?;
            set.missing_pairs += ex.missing_pairs;
            if ex.usable() {
                set.examples.push(ex);
            } else {
                set.skipped.push(ex.query);
            }
        }
        Ok(set)
    }

    /// Pairs that contribute to the objective.
    pub fn pair_count(&self) -> usize {
        self.examples.iter().map(|e| e.pair_count()).sum()
    }
}

/// Locally grounds every example under unit weights and labels its
/// solutions. Work is spread over `threads` workers; output order follows
/// `data`.
pub fn ground_examples(
    data: &[TrainingExample],
    kb: &KnowledgeBase,
    params: &GroundingParams,
    f: WeightFn,
    threads: usize,
) -> Result<Vec<GroundedGraph>> {
    let unit = ParameterVector::new();
    let results = parallel_map(data, threads, |ex| {
        let mut g = pagerank_nibble_prove(&ex.query, kb, params, &unit, f)?.graph;
        ex.label(&mut g);
        Ok(g)
    });
    results.into_iter().collect()
}

/// Maps `op` over `items` with up to `threads` scoped workers pulling from a
/// shared counter. Results keep the input order.
pub fn parallel_map<T: Sync, R: Send>(
    items: &[T],
    threads: usize,
    op: impl Fn(&T) -> R + Sync,
) -> Vec<R> {
    if threads <= 1 || items.len() <= 1 {
        return items.iter().map(op).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    thread::scope(|s| {
        for _ in 0..threads.min(items.len()) {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= items.len() {
                    break;
                }
                *slots[k].lock().unwrap() = Some(op(&items[k]));
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().unwrap().unwrap())
        .collect()
}

#[derive(Clone, Debug)]
pub struct TrainReport {
    pub params: ParameterVector,
    /// Sum of example objectives seen during each epoch.
    pub epoch_losses: Vec<f64>,
    /// SGD updates applied.
    pub updates: usize,
    pub examples_used: usize,
    pub skipped: Vec<String>,
    pub pairs: usize,
    pub missing_pairs: usize,
}

impl TrainReport {
    /// `epoch<TAB>loss` lines.
    pub fn loss_log(&self) -> String {
        self.epoch_losses
            .iter()
            .enumerate()
            .map(|(e, l)| format!("{}\t{l}\n", e + 1))
            .collect()
    }
}

/// Single-threaded training: ground each example once, then SGD.
pub fn train(
    data: &[TrainingExample],
    kb: &KnowledgeBase,
    params: &GroundingParams,
    cfg: &SgdConfig,
) -> Result<TrainReport> {
    train_parallel(data, kb, params, &SgdConfig { threads: 1, ..*cfg })
}

/// Training with `cfg.threads` workers sharing one parameter vector.
pub fn train_parallel(
    data: &[TrainingExample],
    kb: &KnowledgeBase,
    params: &GroundingParams,
    cfg: &SgdConfig,
) -> Result<TrainReport> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::NoUsableExamples);
    }
    let graphs = ground_examples(data, kb, params, cfg.weight_fn, cfg.threads)?;
    let expected: Vec<(usize, usize)> = data
        .iter()
        .map(|e| (e.positives.len(), e.negatives.len()))
        .collect();
    let set = TrainingSet::from_graphs(&graphs, Some(&expected))?;
    train_set(&set, cfg)
}

/// `w[i] = 1 + delta_i`, `delta_i ~ U[0, 0.01]`, drawn in feature-name order.
pub fn initial_weights(table: &FeatureTable, seed: u64) -> Vec<f64> {
    let mut order: Vec<usize> = (0..table.len()).collect();
    order.sort_by_key(|&i| table.feature(i as u32).as_str());
    let mut rng = named_rng(seed, "init");
    let mut w = vec![1.0; table.len()];
    for i in order {
        w[i] = 1.0 + rng.gen_range(0.0..=0.01);
    }
    w
}

/// SGD over already grounded examples.
///
/// Workers claim examples from the epoch's shuffled order through a shared
/// counter and update the shared weights entry by entry without locking;
/// concurrent updates to one entry may be lost. With one thread this is
/// plain sequential SGD and fully deterministic.
pub fn train_set(set: &TrainingSet, cfg: &SgdConfig) -> Result<TrainReport> {
    cfg.validate()?;
    if set.examples.is_empty() {
        return Err(Error::NoUsableExamples);
    }
    let objective = cfg.objective();
    let shared: Vec<AtomicU64> = initial_weights(&set.table, cfg.seed)
        .into_iter()
        .map(|w| AtomicU64::new(w.to_bits()))
        .collect();
    let mut shuffle_rng = named_rng(cfg.seed, "shuffle");
    let mut order: Vec<usize> = (0..set.examples.len()).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let mut updates = 0;
    let failed = AtomicBool::new(false);

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        let rate = cfg.eta / (epoch * epoch) as f64;
        let next = AtomicUsize::new(0);
        let workers = cfg.threads.min(order.len());
        let worker = || -> Result<(f64, usize)> {
            let mut local = vec![0.0; shared.len()];
            let mut loss = 0.0;
            let mut applied = 0;
            loop {
                if failed.load(Ordering::Relaxed) {
                    break;
                }
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k >= order.len() {
                    break;
                }
                let ex = &set.examples[order[k]];
                for &i in ex.graph.touched_features() {
                    local[i as usize] = f64::from_bits(shared[i as usize].load(Ordering::Relaxed));
                }
                let step = objective.example_gradient(ex, &local).inspect_err(|_| {
                    failed.store(true, Ordering::Relaxed);
                })?;
                loss += step.loss;
                for (i, g) in step.grad {
                    let cell = &shared[i as usize];
                    let w = f64::from_bits(cell.load(Ordering::Relaxed)) - rate * g;
                    cell.store(w.to_bits(), Ordering::Relaxed);
                    if !w.is_finite() || w.abs() > cfg.max_weight {
                        failed.store(true, Ordering::Relaxed);
                        return Err(Error::Divergence {
                            feature: set.table.feature(i).to_string(),
                            value: w,
                        });
                    }
                }
                applied += 1;
            }
            Ok((loss, applied))
        };
        let results: Vec<Result<(f64, usize)>> = if workers <= 1 {
            vec![worker()]
        } else {
            thread::scope(|s| {
                let handles: Vec<_> = (0..workers).map(|_| s.spawn(worker)).collect();
                handles.into_iter().map(|h| h.join().unwrap()).collect()
            })
        };
        let mut epoch_loss = 0.0;
        for r in results {
            let (l, n) = r?;
            epoch_loss += l;
            updates += n;
        }
        epoch_losses.push(epoch_loss);
    }

    let params = set
        .table
        .features()
        .iter()
        .zip(&shared)
        .map(|(f, w)| (*f, f64::from_bits(w.load(Ordering::Relaxed))))
        .collect();
    Ok(TrainReport {
        params,
        epoch_losses,
        updates,
        examples_used: set.examples.len(),
        skipped: set.skipped.clone(),
        pairs: set.pair_count(),
        missing_pairs: set.missing_pairs,
    })
}
