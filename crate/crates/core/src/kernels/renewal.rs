//! Renewal mixtures: after the most recent `+1` at distance `l`, the next
//! symbol copies the symbol `n` steps further back with probability `q_n^l`.

use serde::{Deserialize, Serialize};

use super::{last_one, require_skeleton, round_down, Kernel, KernelFamily};
use crate::error::{Result, SimError};
use crate::skeletons::Skeleton;
use crate::Symbol;

/// The family of copy distributions `{q_n^l}_n`, one per distance `l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RenewalWeights {
    /// Geometric with success probability `l^(-exponent)`, so that
    /// `sum_{n <= k} q_n^l = 1 - (1 - l^(-exponent))^k`.
    PowerGeometric { exponent: f64 },
    /// Uniform on `1..=support`, independent of `l`.
    Uniform { support: u32 },
}

impl RenewalWeights {
    /// `q_n^l`, `n, l >= 1`.
    pub fn weight(&self, l: usize, n: usize) -> f64 {
        match *self {
            RenewalWeights::PowerGeometric { exponent } => {
                let p = (l as f64).powf(-exponent);
                p * (1.0 - p).powi(n as i32 - 1)
            }
            RenewalWeights::Uniform { support } => {
                if n <= support as usize {
                    1.0 / support as f64
                } else {
                    0.0
                }
            }
        }
    }

    /// `sum_{n <= k} q_n^l`.
    pub fn cumulative(&self, l: usize, k: usize) -> f64 {
        match *self {
            RenewalWeights::PowerGeometric { exponent } => {
                let p = (l as f64).powf(-exponent);
                if k == 0 {
                    0.0
                } else if p >= 1.0 {
                    1.0
                } else {
                    -(k as f64 * (-p).ln_1p()).exp_m1()
                }
            }
            RenewalWeights::Uniform { support } => k.min(support as usize) as f64 / support as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenewalMixture {
    epsilon: f64,
    weights: RenewalWeights,
}

impl RenewalMixture {
    pub fn new(epsilon: f64, weights: RenewalWeights) -> Result<Self> {
        const F: &str = "renewal";
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(SimError::param(F, "epsilon must lie in (0, 1/2)"));
        }
        match weights {
            RenewalWeights::PowerGeometric { exponent } if !(exponent > 0.0 && exponent.is_finite()) => {
                return Err(SimError::param(F, "weight exponent must be positive"));
            }
            RenewalWeights::Uniform { support: 0 } => {
                return Err(SimError::param(F, "uniform weight support must be positive"));
            }
            _ => {}
        }
        Ok(Self { epsilon, weights })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn weights(&self) -> RenewalWeights {
        self.weights
    }

    fn pair(&self, past: &[Symbol]) -> (f64, f64) {
        let e = self.epsilon;
        let Some(l) = last_one(past) else {
            return (e, e);
        };
        let mut mass = [0.0f64; 2];
        for (n, &a) in past[l..].iter().enumerate() {
            mass[a as usize] += self.weights.weight(l, n + 1);
        }
        let scale = 1.0 - 2.0 * e;
        let lower = |m: f64| if m == 0.0 { e } else { round_down(e + scale * m).max(e) };
        (lower(mass[0]), lower(mass[1]))
    }
}

impl Kernel for RenewalMixture {
    fn family(&self) -> KernelFamily {
        KernelFamily::RenewalMixture
    }

    fn alphabet_size(&self) -> usize {
        2
    }

    fn lower_prob(&self, a: Symbol, past: &[Symbol]) -> f64 {
        let (p0, p1) = self.pair(past);
        if a == 0 {
            p0
        } else {
            p1
        }
    }

    fn lower_probs(&self, past: &[Symbol], out: &mut [f64]) {
        let (p0, p1) = self.pair(past);
        out[0] = p0;
        out[1] = p1;
    }

    fn alpha_floor(&self) -> f64 {
        2.0 * self.epsilon
    }

    fn natural_skeleton(&self) -> Skeleton {
        Skeleton::renewal()
    }

    /// `2 eps + (1 - 2 eps) min_{l <= i} sum_{n <= k} q_n^l`; both weight
    /// families are worst at the largest distance.
    fn alpha_table(&self, skeleton: &Skeleton, k: usize, i: usize) -> Result<f64> {
        require_skeleton(self, skeleton)?;
        let e = self.epsilon;
        let cum = self.weights.cumulative(i.max(1), k);
        if cum >= 1.0 {
            return Ok(1.0);
        }
        Ok(round_down(2.0 * e + (1.0 - 2.0 * e) * cum).max(2.0 * e))
    }
}
