use std::fmt;
use std::str::FromStr;

/// Squared hinge on the score difference `h = p+ - p-`.
pub fn pair_loss(h: f64) -> (f64, f64) {
    if h < 0.0 {
        (h * h, 2.0 * h)
    } else {
        (0.0, 0.0)
    }
}

/// Per-pair ranking loss.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Loss {
    /// `h^2` when `h = p+ - p- < 0`, else 0.
    #[default]
    SquaredHinge,
    /// `-ln p+ - ln(1 - p-)`.
    Log,
}

const LOG_CLAMP: f64 = 1e-12;

impl Loss {
    /// Loss of one (positive, negative) pair and its partial derivatives
    /// with respect to the two scores.
    pub fn eval(self, p_pos: f64, p_neg: f64) -> (f64, f64, f64) {
        match self {
            Loss::SquaredHinge => {
                let (l, d) = pair_loss(p_pos - p_neg);
                (l, d, -d)
            }
            Loss::Log => {
                // Clamped regions are flat, with zero derivative.
                let (pos, d_pos) = if p_pos > LOG_CLAMP {
                    (p_pos, -1.0 / p_pos)
                } else {
                    (LOG_CLAMP, 0.0)
                };
                let (neg, d_neg) = if p_neg < 1.0 - LOG_CLAMP {
                    (p_neg, 1.0 / (1.0 - p_neg))
                } else {
                    (1.0 - LOG_CLAMP, 0.0)
                };
                (-pos.ln() - (1.0 - neg).ln(), d_pos, d_neg)
            }
        }
    }
}

impl FromStr for Loss {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "squared" | "squared-hinge" => Ok(Loss::SquaredHinge),
            "log" => Ok(Loss::Log),
            other => Err(format!("unknown loss '{other}'")),
        }
    }
}

impl fmt::Display for Loss {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Loss::SquaredHinge => "squared",
            Loss::Log => "log",
        })
    }
}
