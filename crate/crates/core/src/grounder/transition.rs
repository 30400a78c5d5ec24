use crate::error::{Error, Result};
use crate::feature::{FeatureVector, ParameterVector, WeightFn};

/// How a node's outgoing weights were normalized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Normalization {
    /// No successors: the restart edge carries all mass.
    RestartOnly,
    /// Plain `weight / sum`.
    Proportional { total: f64 },
    /// The restart share fell below the lower bound and was raised to it;
    /// the other edges share the remainder in proportion to their weights.
    Floored { successor_total: f64 },
}

/// Normalizes raw edge weights in place into probabilities.
///
/// `restart` indexes the restart edge. Its probability is clamped from below
/// at `restart_floor`.
pub fn normalize_weights(
    weights: &mut [f64],
    restart: usize,
    restart_floor: f64,
) -> Result<Normalization> {
    for &w in weights.iter() {
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::BadEdgeWeight(w));
        }
    }
    if weights.len() == 1 {
        weights[0] = 1.0;
        return Ok(Normalization::RestartOnly);
    }
    let total: f64 = weights.iter().sum();
    if weights[restart] / total < restart_floor {
        let successor_total = total - weights[restart];
        let scale = (1.0 - restart_floor) / successor_total;
        for (i, w) in weights.iter_mut().enumerate() {
            *w = if i == restart { restart_floor } else { *w * scale };
        }
        Ok(Normalization::Floored { successor_total })
    } else {
        for w in weights.iter_mut() {
            *w /= total;
        }
        Ok(Normalization::Proportional { total })
    }
}

/// Outgoing distribution of one node.
#[derive(Clone, Debug, PartialEq)]
pub struct Transitions<T> {
    pub successors: Vec<(T, f64)>,
    pub restart: f64,
}

/// `Pr(v|u) = f(w, phi_uv) / Z` over the successors and the restart edge,
/// with the restart probability held at or above `restart_floor`.
pub fn transition_distribution<T: Clone>(
    successors: &[(T, FeatureVector)],
    restart: &FeatureVector,
    w: &ParameterVector,
    f: WeightFn,
    restart_floor: f64,
) -> Result<Transitions<T>> {
    let mut weights: Vec<f64> = successors
        .iter()
        .map(|(_, phi)| f.weight(phi, w))
        .collect();
    weights.push(f.weight(restart, w));
    let restart_index = weights.len() - 1;
    normalize_weights(&mut weights, restart_index, restart_floor)?;
    Ok(Transitions {
        successors: successors
            .iter()
            .zip(&weights)
            .map(|((t, _), p)| (t.clone(), *p))
            .collect(),
        restart: weights[restart_index],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::Feature;

    fn unit(name: &str) -> FeatureVector {
        FeatureVector::single(Feature::named(name), 1.0)
    }

    #[test]
    fn uniform_weights() {
        let succ = vec![("a", unit("x")), ("b", unit("y"))];
        let t = transition_distribution(&succ, &unit("defRestart"), &ParameterVector::new(), WeightFn::Linear, 0.1)
            .unwrap();
        for (_, p) in &t.successors {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!((t.restart - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn database_calibration() {
        // n = 4, alpha = 0.2: restart feature 4 * 0.2 / 0.8 = 1.0
        let succ: Vec<_> = (0..4).map(|i| (i, unit("db"))).collect();
        let restart = FeatureVector::single(Feature::restart(), 4.0 * 0.2 / 0.8);
        let t = transition_distribution(&succ, &restart, &ParameterVector::new(), WeightFn::Linear, 0.1)
            .unwrap();
        assert!((t.restart - 0.2).abs() < 1e-12);
        for (_, p) in &t.successors {
            assert!((p - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn direct_normalization() {
        let succ = vec![((), FeatureVector::single(Feature::named("x"), 3.0))];
        let t = transition_distribution(&succ, &unit("defRestart"), &ParameterVector::new(), WeightFn::Linear, 0.1)
            .unwrap();
        assert!((t.successors[0].1 - 0.75).abs() < 1e-15);
        assert!((t.restart - 0.25).abs() < 1e-15);
    }

    #[test]
    fn floor_raises_restart() {
        let succ: Vec<_> = (0..20).map(|i| (i, unit("x"))).collect();
        let t = transition_distribution(&succ, &unit("defRestart"), &ParameterVector::new(), WeightFn::Linear, 0.1)
            .unwrap();
        assert_eq!(t.restart, 0.1);
        let total: f64 = t.successors.iter().map(|(_, p)| p).sum::<f64>() + t.restart;
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dead_end_is_restart_only() {
        let t = transition_distribution::<()>(&[], &unit("defRestart"), &ParameterVector::new(), WeightFn::Linear, 0.1)
            .unwrap();
        assert_eq!(t.restart, 1.0);
    }

    #[test]
    fn non_finite_weight_rejected() {
        let mut w = ParameterVector::new();
        w.set(Feature::named("x"), 1e6);
        let succ = vec![((), unit("x"))];
        let err = transition_distribution(&succ, &unit("defRestart"), &w, WeightFn::Exp, 0.1).unwrap_err();
        assert!(matches!(err, Error::BadEdgeWeight(_)));
    }
}
