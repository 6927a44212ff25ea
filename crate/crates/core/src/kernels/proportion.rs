//! The proportion kernel: past dependence weighted by `beta` before the first
//! depth where the proportion of `+1` reaches `sigma`, and by `gamma` after.

use super::{require_skeleton, round_down, Coefficients, Kernel, KernelFamily, Series};
use crate::error::{Result, SimError};
use crate::skeletons::{ContextLen, Skeleton};
use crate::Symbol;

#[derive(Debug, Clone, PartialEq)]
pub struct ProportionKernel {
    b1: f64,
    c: f64,
    sigma: f64,
    beta: Series,
    gamma: Series,
}

impl ProportionKernel {
    pub fn new(b1: f64, c: f64, sigma: f64, beta: Coefficients, gamma: Coefficients) -> Result<Self> {
        const F: &str = "proportion";
        if !(b1 > 0.0 && b1 < 1.0) {
            return Err(SimError::param(F, "b1 must lie in (0,1)"));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(SimError::param(F, "c must be positive"));
        }
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(SimError::param(F, "sigma must lie in (0,1)"));
        }
        let (bs, gs) = (Series::new(beta, F)?, Series::new(gamma, F)?);
        let dominated = match (beta, gamma) {
            (
                Coefficients::Geometric { scale: sb, ratio: rb },
                Coefficients::Geometric { scale: sg, ratio: rg },
            ) => sb >= sg && rb >= rg && sg >= 0.0 && rg >= 0.0,
            (
                Coefficients::PowerLaw { scale: sb, exponent: pb },
                Coefficients::PowerLaw { scale: sg, exponent: pg },
            ) => sb >= sg && pb <= pg && sg >= 0.0,
            _ => false,
        };
        if !dominated {
            return Err(SimError::param(
                F,
                "beta and gamma must be nonnegative sequences of the same family with gamma <= beta termwise",
            ));
        }
        if !(b1 * (1.0 - c * bs.total()) > sigma) {
            return Err(SimError::param(F, "b1 (1 - c sum beta) must exceed sigma"));
        }
        Ok(Self {
            b1,
            c,
            sigma,
            beta: bs,
            gamma: gs,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    fn pair(&self, past: &[Symbol]) -> (f64, f64) {
        let n = past.len();
        let t = Skeleton::Proportion { sigma: self.sigma }.context_len(past);
        let split = match t {
            ContextLen::Determined(t) => t,
            ContextLen::NeedMore => usize::MAX,
        };
        let known: f64 = past
            .iter()
            .enumerate()
            .filter(|(_, &a)| a == 0)
            .map(|(j, _)| {
                let i = j + 1;
                if i < split {
                    self.beta.coef(i)
                } else {
                    self.gamma.coef(i)
                }
            })
            .sum();
        let unknown = if split <= n { self.gamma.tail(n) } else { self.beta.tail(n) };
        let p1 = self.b1 * (1.0 - self.c * (known + unknown));
        let p0 = 1.0 - self.b1 * (1.0 - self.c * known);
        (round_down(p0), round_down(p1))
    }
}

impl Kernel for ProportionKernel {
    fn family(&self) -> KernelFamily {
        KernelFamily::Proportion
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
        Skeleton::Proportion { sigma: self.sigma }
    }

    /// Exact infimum: it is attained by the shortest context (a single `+1`),
    /// so it does not depend on `i`.
    fn alpha_table(&self, skeleton: &Skeleton, k: usize, _i: usize) -> Result<f64> {
        require_skeleton(self, skeleton)?;
        let a = round_down(1.0 - self.b1 * self.c * self.gamma.tail(k + 1));
        Ok(a.max(self.alpha_floor()))
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_support::{check_monotone_subnormalized, words};
    use super::*;

    pub(crate) fn sample() -> ProportionKernel {
        ProportionKernel::new(
            0.9,
            0.5,
            0.4,
            Coefficients::Geometric { scale: 0.5, ratio: 0.6 },
            Coefficients::Geometric { scale: 0.3, ratio: 0.5 },
        )
        .unwrap()
    }

    #[test]
    fn validates_domain() {
        let g = Coefficients::Geometric { scale: 0.5, ratio: 0.6 };
        let small = Coefficients::Geometric { scale: 0.3, ratio: 0.5 };
        assert!(ProportionKernel::new(0.9, 0.5, 0.4, small, g).is_err());
        assert!(ProportionKernel::new(0.5, 0.5, 0.45, g, small).is_err());
        assert!(ProportionKernel::new(1.2, 0.5, 0.4, g, small).is_err());
    }

    #[test]
    fn monotone_and_subnormalized() {
        check_monotone_subnormalized(&sample(), 10);
    }

    #[test]
    fn alpha_table_bounds_omega_over_contexts() {
        let k = sample();
        let sk = k.natural_skeleton();
        for i in 1..6 {
            for kk in 0..5 {
                let a = k.alpha_table(&sk, kk, i).unwrap();
                let mut worst = f64::INFINITY;
                for len in 1..=i {
                    for w in words(len + kk) {
                        if sk.context_len(&w) == ContextLen::Determined(len) {
                            worst = worst.min(k.omega(&w));
                        }
                    }
                }
                assert!(a <= worst + 1e-12, "i={i} k={kk}");
                // attained at the length-one context
                assert!((a - worst).abs() < 1e-9 || a == k.alpha_floor(), "i={i} k={kk}: {a} vs {worst}");
            }
        }
    }

    #[test]
    fn empty_past() {
        let k = sample();
        let b = 0.5 / 0.4; // sum beta = 0.5 * 0.6 / 0.4
        let expect1 = 0.9 * (1.0 - 0.5 * b * 0.6);
        assert!((k.lower_prob(1, &[]) - expect1).abs() < 1e-9);
        assert!((k.lower_prob(0, &[]) - 0.1).abs() < 1e-9);
    }
}
