//! Binary auto-regressive kernels with a logistic link.

use super::{
    last_one, logistic, require_skeleton, round_down, sign, Coefficients, Kernel, KernelFamily,
    Series,
};
use crate::error::Result;
use crate::skeletons::Skeleton;
use crate::Symbol;

/// `P(+1 | past) = psi(intercept + sum_k theta_k a_{-k})` with `psi` logistic.
#[derive(Debug, Clone, PartialEq)]
pub struct ArModel {
    intercept: f64,
    series: Series,
}

impl ArModel {
    pub fn new(intercept: f64, coefficients: Coefficients, family: &'static str) -> Result<Self> {
        if !intercept.is_finite() {
            return Err(crate::SimError::param(family, "intercept must be finite"));
        }
        Ok(Self {
            intercept,
            series: Series::new(coefficients, family)?,
        })
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn series(&self) -> &Series {
        &self.series
    }

    fn known_sum(&self, past: &[Symbol]) -> f64 {
        self.intercept
            + past
                .iter()
                .enumerate()
                .map(|(j, &a)| self.series.coef(j + 1) * sign(a))
                .sum::<f64>()
    }

    /// `(lower_prob(0, w), lower_prob(1, w))`.
    pub fn lower_pair(&self, past: &[Symbol]) -> (f64, f64) {
        let x = self.known_sum(past);
        let r = self.series.tail(past.len());
        (round_down(logistic(-x - r)), round_down(logistic(x - r)))
    }

    /// Infimum of `omega_k` over all pasts: the worst known sum is the point
    /// of `[intercept - R_k, intercept + R_k]` closest to zero.
    pub fn uniform_floor(&self, k: usize) -> f64 {
        let reach = self.series.prefix_abs(k);
        let x = 0.0f64.clamp(self.intercept - reach, self.intercept + reach);
        let r = self.series.tail(k);
        round_down(logistic(x - r) + logistic(-x - r))
    }

    /// Infimum of `omega_n` over every known sum: `1 - tanh(r_n / 2)`.
    pub fn depth_floor(&self, n: usize) -> f64 {
        round_down(2.0 * logistic(-self.series.tail(n)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinaryAr {
    model: ArModel,
}

impl BinaryAr {
    pub fn new(intercept: f64, coefficients: Coefficients) -> Result<Self> {
        Ok(Self {
            model: ArModel::new(intercept, coefficients, "binary_ar")?,
        })
    }

    pub fn model(&self) -> &ArModel {
        &self.model
    }
}

impl Kernel for BinaryAr {
    fn family(&self) -> KernelFamily {
        KernelFamily::BinaryAr
    }

    fn alphabet_size(&self) -> usize {
        2
    }

    fn lower_prob(&self, a: Symbol, past: &[Symbol]) -> f64 {
        let (p0, p1) = self.model.lower_pair(past);
        if a == 0 {
            p0
        } else {
            p1
        }
    }

    fn lower_probs(&self, past: &[Symbol], out: &mut [f64]) {
        let (p0, p1) = self.model.lower_pair(past);
        out[0] = p0;
        out[1] = p1;
    }

    fn natural_skeleton(&self) -> Skeleton {
        Skeleton::Empty
    }

    fn alpha_table(&self, skeleton: &Skeleton, k: usize, _i: usize) -> Result<f64> {
        require_skeleton(self, skeleton)?;
        Ok(self.model.uniform_floor(k).max(self.alpha_floor()))
    }
}

/// Two auto-regressive models selected by the parity of the distance to the
/// most recent `+1`: the standard model when it is odd, the alternative when
/// it is even or there is no `+1` at all.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityAr {
    standard: ArModel,
    alternative: ArModel,
    floor: f64,
}

impl ParityAr {
    pub fn new(standard: ArModel, alternative: ArModel) -> Result<Self> {
        let (s0, s1) = standard.lower_pair(&[]);
        let (a0, a1) = alternative.lower_pair(&[]);
        Ok(Self {
            floor: s0.min(a0) + s1.min(a1),
            standard,
            alternative,
        })
    }
}

impl Kernel for ParityAr {
    fn family(&self) -> KernelFamily {
        KernelFamily::ParityAr
    }

    fn alphabet_size(&self) -> usize {
        2
    }

    fn lower_prob(&self, a: Symbol, past: &[Symbol]) -> f64 {
        let mut out = [0.0; 2];
        self.lower_probs(past, &mut out);
        out[a as usize]
    }

    fn lower_probs(&self, past: &[Symbol], out: &mut [f64]) {
        let (p0, p1) = match last_one(past) {
            Some(l) if l % 2 == 1 => self.standard.lower_pair(past),
            Some(_) => self.alternative.lower_pair(past),
            None => {
                // the distance may still turn out odd, even or infinite
                let (s0, s1) = self.standard.lower_pair(past);
                let (a0, a1) = self.alternative.lower_pair(past);
                (s0.min(a0), s1.min(a1))
            }
        };
        out[0] = p0;
        out[1] = p1;
    }

    fn alpha_floor(&self) -> f64 {
        self.floor
    }

    fn natural_skeleton(&self) -> Skeleton {
        Skeleton::renewal()
    }

    fn alpha_table(&self, skeleton: &Skeleton, k: usize, i: usize) -> Result<f64> {
        require_skeleton(self, skeleton)?;
        // contexts of odd length l use the standard model with r_{l+k}, the
        // worst being l = 1; even lengths use the alternative, worst l = 2
        let mut a = self.standard.depth_floor(1 + k);
        if i >= 2 {
            a = a.min(self.alternative.depth_floor(2 + k));
        }
        Ok(a.max(self.floor))
    }
}
