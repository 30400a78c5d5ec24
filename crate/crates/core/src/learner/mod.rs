//! Weight learning from ranked answer labels: pairwise losses, exact
//! gradients of unrolled PageRank on fixed groundings, and SGD that can run
//! several workers over one shared parameter vector.

mod example;
mod gradient;
mod loss;
mod sgd;

pub use example::{GroundedExample, TrainingExample};
pub use gradient::{ppr_gradient, ExampleGradient, Objective, PprGradient};
pub use loss::{pair_loss, Loss};
pub use sgd::{
    ground_examples, initial_weights, parallel_map, train, train_parallel, train_set, SgdConfig,
    TrainReport, TrainingSet,
};
