//! Kernels whose continuity is only controlled after several concatenated
//! run-boundary contexts.

use serde::{Deserialize, Serialize};

use super::{round_down, sign, unsupported, Coefficients, ContinuityClass, Kernel, KernelFamily, Series};
use crate::error::{Result, SimError};
use crate::skeletons::Skeleton;
use crate::Symbol;

/// Increasing unbounded `f` with `f(1) >= 1 / (1 - 2 eps)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GrowthFn {
    /// `scale * k^exponent`
    Power { scale: f64, exponent: f64 },
    /// `scale * exp(rate * k)`
    Exponential { scale: f64, rate: f64 },
}

impl GrowthFn {
    pub fn eval(&self, k: usize) -> f64 {
        match *self {
            GrowthFn::Power { scale, exponent } => scale * (k as f64).powf(exponent),
            GrowthFn::Exponential { scale, rate } => scale * (rate * k as f64).exp(),
        }
    }
}

/// Decreasing `f: [0, inf) -> [0, 1]` with `f(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DampingFn {
    /// `exp(-x)`
    Exponential,
    /// `(1 + x)^(-exponent)`
    Power { exponent: f64 },
}

impl DampingFn {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            DampingFn::Exponential => (-x).exp(),
            DampingFn::Power { exponent } => (1.0 + x).powf(-exponent),
        }
    }
}

/// `P(+1 | past) = eps + 1 / f(K(past))` where `K` is the index from which
/// the past is constant (infinite if it never becomes constant).
#[derive(Debug, Clone, PartialEq)]
pub struct RunLengthKernel {
    epsilon: f64,
    growth: GrowthFn,
}

impl RunLengthKernel {
    pub fn new(epsilon: f64, growth: GrowthFn) -> Result<Self> {
        const F: &str = "run_length";
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(SimError::param(F, "epsilon must lie in (0, 1/2)"));
        }
        let increasing = match growth {
            GrowthFn::Power { scale, exponent } => scale.is_finite() && exponent > 0.0 && exponent.is_finite(),
            GrowthFn::Exponential { scale, rate } => scale.is_finite() && rate > 0.0 && rate.is_finite(),
        };
        if !increasing {
            return Err(SimError::param(F, "f must be increasing and unbounded"));
        }
        if !(growth.eval(1) >= 1.0 / (1.0 - 2.0 * epsilon)) {
            return Err(SimError::param(F, "f(1) must be at least 1 / (1 - 2 epsilon)"));
        }
        Ok(Self { epsilon, growth })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Smallest value of `K` compatible with the known past.
    fn k_min(past: &[Symbol]) -> usize {
        (1..past.len()).rev().find(|&i| past[i - 1] != past[i]).map_or(1, |i| i + 1)
    }

    fn pair(&self, past: &[Symbol]) -> (f64, f64) {
        let k = Self::k_min(past);
        (round_down(1.0 - self.epsilon - 1.0 / self.growth.eval(k)), self.epsilon)
    }
}

impl Kernel for RunLengthKernel {
    fn family(&self) -> KernelFamily {
        KernelFamily::RunLength
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
        Skeleton::RunBoundary
    }

    fn continuity(&self) -> ContinuityClass {
        ContinuityClass::Extended
    }

    fn alpha_table(&self, skeleton: &Skeleton, _k: usize, _i: usize) -> Result<f64> {
        Err(unsupported(self, skeleton))
    }

    /// `1 - 1 / f(2k + 2)`: `k + 1` run-boundary contexts span at least
    /// `2k + 2` symbols and end on a sign change.
    fn alpha_bar_table(&self, skeleton: &Skeleton, k: usize) -> Result<f64> {
        if *skeleton != Skeleton::RunBoundary {
            return Err(unsupported(self, skeleton));
        }
        Ok(round_down(1.0 - 1.0 / self.growth.eval(2 * k + 2)).max(self.alpha_floor()))
    }
}

/// `P(+1 | past) = 1/2 + sum_k theta_k a_{-k} f(beta S_k)` where `S_k`
/// counts the sign changes among the `k` most recent symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct SignChangeKernel {
    series: Series,
    damping: DampingFn,
    beta: f64,
}

impl SignChangeKernel {
    pub fn new(coefficients: Coefficients, damping: DampingFn, beta: f64) -> Result<Self> {
        const F: &str = "sign_change";
        let series = Series::new(coefficients, F)?;
        if !(series.total() < 0.5) {
            return Err(SimError::param(F, "sum of |theta_k| must be below 1/2"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(SimError::param(F, "beta must be positive"));
        }
        if let DampingFn::Power { exponent } = damping {
            if !(exponent > 0.0 && exponent.is_finite()) {
                return Err(SimError::param(F, "damping exponent must be positive"));
            }
        }
        Ok(Self { series, damping, beta })
    }

    fn pair(&self, past: &[Symbol]) -> (f64, f64) {
        let mut changes = 0usize;
        let mut known = 0.0;
        for (j, &a) in past.iter().enumerate() {
            if j >= 1 && past[j - 1] != a {
                changes += 1;
            }
            known += self.series.coef(j + 1) * sign(a) * self.damping.eval(self.beta * changes as f64);
        }
        let unknown = self.damping.eval(self.beta * changes as f64) * self.series.tail(past.len());
        (round_down(0.5 - known - unknown), round_down(0.5 + known - unknown))
    }
}

impl Kernel for SignChangeKernel {
    fn family(&self) -> KernelFamily {
        KernelFamily::SignChange
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
        Skeleton::RunBoundary
    }

    fn continuity(&self) -> ContinuityClass {
        ContinuityClass::Extended
    }

    fn alpha_table(&self, skeleton: &Skeleton, _k: usize, _i: usize) -> Result<f64> {
        Err(unsupported(self, skeleton))
    }

    /// `1 - 2 f(beta k) r_{2k+2}`: the concatenation has at least `k` sign
    /// changes and `2k + 2` symbols.
    fn alpha_bar_table(&self, skeleton: &Skeleton, k: usize) -> Result<f64> {
        if *skeleton != Skeleton::RunBoundary {
            return Err(unsupported(self, skeleton));
        }
        let a = 1.0 - 2.0 * self.damping.eval(self.beta * k as f64) * self.series.tail(2 * k + 2);
        Ok(round_down(a).max(self.alpha_floor()))
    }
}
