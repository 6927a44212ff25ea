//! Majority kernels: after the most recent `+1` at distance `l`, the next
//! symbol follows the majority of the `h(l)` symbols preceding it.

use serde::{Deserialize, Serialize};

use super::{last_one, require_skeleton, Kernel, KernelFamily};
use crate::error::{Result, SimError};
use crate::skeletons::Skeleton;
use crate::Symbol;

/// Odd, nondecreasing, unbounded window lengths `h(l)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WindowFn {
    /// `h(l) = 2 floor(l / step) + 1`
    Linear { step: u64 },
    /// `h(l) = 2 floor(scale ln(1 + l)) + 1`
    Logarithmic { scale: f64 },
}

impl WindowFn {
    pub fn eval(&self, l: usize) -> usize {
        match *self {
            WindowFn::Linear { step } => 2 * (l / step as usize) + 1,
            WindowFn::Logarithmic { scale } => 2 * (scale * (l as f64).ln_1p()).floor() as usize + 1,
        }
    }

    /// Smallest `l >= 1` with `h(l) > k`, or `None` beyond `2^50`.
    pub fn inverse(&self, k: usize) -> Option<usize> {
        let (mut lo, mut hi) = (1usize, 1usize << 50);
        if self.eval(hi) <= k {
            return None;
        }
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.eval(mid) > k {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(lo)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MajorityKernel {
    window: WindowFn,
    eps_odd: f64,
    eps_even: f64,
    epsilon: f64,
    p_inf: f64,
}

impl MajorityKernel {
    /// `eps_odd` and `eps_even` are the flip probabilities at odd and even
    /// distances; `p_inf` is `P(+1)` after the all `-1` past.
    pub fn new(window: WindowFn, eps_odd: f64, eps_even: f64, epsilon: f64, p_inf: f64) -> Result<Self> {
        const F: &str = "majority";
        match window {
            WindowFn::Linear { step: 0 } => return Err(SimError::param(F, "window step must be positive")),
            WindowFn::Logarithmic { scale } if !(scale > 0.0 && scale.is_finite()) => {
                return Err(SimError::param(F, "window scale must be positive"))
            }
            _ => {}
        }
        if !(epsilon > 0.0 && epsilon < 0.25) {
            return Err(SimError::param(F, "epsilon must lie in (0, 1/4)"));
        }
        for e in [eps_odd, eps_even] {
            if !(e > epsilon && e < 0.5 - epsilon) {
                return Err(SimError::param(F, "flip probabilities must lie in (epsilon, 1/2 - epsilon)"));
            }
        }
        if !(p_inf >= epsilon && p_inf <= 1.0 - epsilon) {
            return Err(SimError::param(F, "p_inf must lie in [epsilon, 1 - epsilon]"));
        }
        Ok(Self {
            window,
            eps_odd,
            eps_even,
            epsilon,
            p_inf,
        })
    }

    fn eps_at(&self, l: usize) -> f64 {
        if l % 2 == 1 {
            self.eps_odd
        } else {
            self.eps_even
        }
    }

    fn eps_min(&self) -> f64 {
        self.eps_odd.min(self.eps_even)
    }

    fn pair(&self, past: &[Symbol]) -> (f64, f64) {
        let Some(l) = last_one(past) else {
            let e = self.eps_min();
            return (e.min(1.0 - self.p_inf), e.min(self.p_inf));
        };
        let h = self.window.eval(l);
        let end = past.len().min(l + h);
        let ones = past[l..end].iter().filter(|&&a| a == 1).count();
        let zeros = end - l - ones;
        let need = h.div_ceil(2);
        let e = self.eps_at(l);
        if ones >= need {
            (e, 1.0 - e)
        } else if zeros >= need {
            (1.0 - e, e)
        } else {
            (e, e)
        }
    }
}

impl Kernel for MajorityKernel {
    fn family(&self) -> KernelFamily {
        KernelFamily::Majority
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

    fn natural_skeleton(&self) -> Skeleton {
        Skeleton::renewal()
    }

    /// One once `k >= h(l)` for every context length `l <= i`, otherwise
    /// twice the smallest flip probability among the undecided lengths.
    fn alpha_table(&self, skeleton: &Skeleton, k: usize, i: usize) -> Result<f64> {
        require_skeleton(self, skeleton)?;
        let i = i.max(1);
        let a = match self.window.inverse(k) {
            Some(l0) if l0 <= i => {
                if l0 < i {
                    2.0 * self.eps_min()
                } else {
                    2.0 * self.eps_at(l0)
                }
            }
            _ => 1.0,
        };
        Ok(a.max(self.alpha_floor()))
    }

    fn slc_threshold(&self, i: usize) -> Option<usize> {
        Some(self.window.eval(i.max(1)))
    }
}
