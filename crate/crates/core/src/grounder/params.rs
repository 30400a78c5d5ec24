use crate::error::{Error, Result};

/// Settings shared by local and full grounding.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroundingParams {
    /// Restart calibration for database goals.
    pub alpha: f64,
    /// Lower bound enforced on every node's restart probability.
    pub alpha_prime: f64,
    /// Residual-per-edge threshold for pushing a node.
    pub epsilon: f64,
    /// Iteration cap for power iteration and full grounding depth.
    pub max_t: usize,
    /// Hard cap on proof states created by one grounding run.
    pub max_nodes: usize,
}

impl Default for GroundingParams {
    fn default() -> Self {
        GroundingParams {
            alpha: 0.2,
            alpha_prime: 0.1,
            epsilon: 1e-4,
            max_t: 100,
            max_nodes: 2_000_000,
        }
    }
}

impl GroundingParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha {} not in (0,1)", self.alpha));
        }
        if !(self.alpha_prime > 0.0 && self.alpha_prime < 1.0) {
            return bad(format!("alpha' {} not in (0,1)", self.alpha_prime));
        }
        if self.alpha_prime > self.alpha {
            return bad(format!(
                "alpha' {} exceeds alpha {}",
                self.alpha_prime, self.alpha
            ));
        }
        // epsilon = 1 is accepted: it is the degenerate "never push" setting.
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return bad(format!("epsilon {} not in (0,1]", self.epsilon));
        }
        if self.max_nodes == 0 {
            return bad("max_nodes must be positive".into());
        }
        Ok(())
    }

    /// `1 / (alpha' * epsilon)`: bound on pushed degree and on local-grounding edges.
    pub fn work_bound(&self) -> f64 {
        1.0 / (self.alpha_prime * self.epsilon)
    }
}
