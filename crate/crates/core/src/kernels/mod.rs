//! Transition kernels described by their lower conditional probabilities
//! `inf_z P(a | w z)` over finite pasts `w` (most recent symbol first).
//!
//! All built-in families are binary except [`MarkovEmbedded`]. Internally the
//! binary symbols are `0` (presented as `-1`) and `1` (presented as `+1`).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::skeletons::Skeleton;
use crate::Symbol;

mod ar;
mod extended;
mod majority;
mod markov;
mod proportion;
mod renewal;

pub use ar::{ArModel, BinaryAr, ParityAr};
pub use extended::{DampingFn, GrowthFn, RunLengthKernel, SignChangeKernel};
pub use majority::{MajorityKernel, WindowFn};
pub use markov::MarkovEmbedded;
pub use proportion::ProportionKernel;
pub use renewal::{RenewalMixture, RenewalWeights};

/// How the kernel's continuity is organised around its skeleton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContinuityClass {
    /// Continuity rates `alpha_k^i` after a single context.
    Local,
    /// Continuity rates `alpha_bar_k` after `k` concatenated contexts.
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    MarkovEmbedded,
    BinaryAr,
    Proportion,
    RenewalMixture,
    ParityAr,
    Majority,
    RunLength,
    SignChange,
}

impl KernelFamily {
    pub fn name(self) -> &'static str {
        match self {
            KernelFamily::MarkovEmbedded => "markov",
            KernelFamily::BinaryAr => "binary_ar",
            KernelFamily::Proportion => "proportion",
            KernelFamily::RenewalMixture => "renewal",
            KernelFamily::ParityAr => "parity_ar",
            KernelFamily::Majority => "majority",
            KernelFamily::RunLength => "run_length",
            KernelFamily::SignChange => "sign_change",
        }
    }
}

pub trait Kernel: Send + Sync + fmt::Debug {
    fn family(&self) -> KernelFamily;

    fn alphabet_size(&self) -> usize;

    /// `inf_z P(a | w z)` with `past[0]` the most recent symbol. Any rounding
    /// is downward.
    fn lower_prob(&self, a: Symbol, past: &[Symbol]) -> f64;

    /// All lower probabilities at once; `out.len()` is the alphabet size.
    fn lower_probs(&self, past: &[Symbol], out: &mut [f64]) {
        for (a, slot) in out.iter_mut().enumerate() {
            *slot = self.lower_prob(a as Symbol, past);
        }
    }

    /// The minorization vector `alpha(a) = inf P(a | .)`.
    fn alphas(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.alphabet_size()];
        self.lower_probs(&[], &mut out);
        out
    }

    /// `alpha_-1 = sum_a alpha(a)`.
    fn alpha_floor(&self) -> f64 {
        self.alphas().iter().sum()
    }

    /// `omega_{|w|}(w) = sum_a lower_prob(a, w)`.
    fn omega(&self, past: &[Symbol]) -> f64 {
        let mut out = vec![0.0; self.alphabet_size()];
        self.lower_probs(past, &mut out);
        out.iter().sum()
    }

    /// The skeleton the continuity rates are computed against.
    fn natural_skeleton(&self) -> Skeleton;

    fn continuity(&self) -> ContinuityClass {
        ContinuityClass::Local
    }

    /// `alpha_k^i` for `k >= 0`: a lower bound on the total lower mass once a
    /// context of length at most `i` and `k` further symbols are known.
    /// Floored at `alpha_-1`.
    fn alpha_table(&self, skeleton: &Skeleton, k: usize, i: usize) -> Result<f64>;

    /// `alpha_bar_k`: a lower bound on the total lower mass once a context
    /// followed by `k` concatenated contexts is known.
    fn alpha_bar_table(&self, skeleton: &Skeleton, _k: usize) -> Result<f64> {
        Err(unsupported(self, skeleton))
    }

    /// For strongly locally continuous pairings: the depth after which
    /// `alpha_k^i = 1` for every context of length at most `i`.
    fn slc_threshold(&self, _i: usize) -> Option<usize> {
        None
    }

    /// Presentation value of an internal symbol.
    fn present(&self, a: Symbol) -> i64 {
        if self.alphabet_size() == 2 {
            if a == 0 {
                -1
            } else {
                1
            }
        } else {
            a as i64
        }
    }

    fn describe(&self) -> String {
        format!("{:?}", self)
    }
}

pub(crate) fn unsupported<K: Kernel + ?Sized>(kernel: &K, skeleton: &Skeleton) -> SimError {
    SimError::UnsupportedPairing {
        kernel: kernel.family().name().into(),
        skeleton: skeleton.describe(),
    }
}

pub(crate) fn require_skeleton<K: Kernel + ?Sized>(kernel: &K, skeleton: &Skeleton) -> Result<()> {
    if *skeleton == kernel.natural_skeleton() {
        Ok(())
    } else {
        Err(unsupported(kernel, skeleton))
    }
}

/// Rounds a probability down by a few ulps.
#[inline]
pub(crate) fn round_down(p: f64) -> f64 {
    (p - p.abs() * 4.0 * f64::EPSILON).max(0.0)
}

/// Rounds a nonnegative tail sum up.
#[inline]
pub(crate) fn round_up(x: f64) -> f64 {
    x + x.abs() * 1e-12
}

#[inline]
pub(crate) fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Summable coefficient sequences `theta_k`, `k >= 1`, with closed-form or
/// rigorously bounded tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Coefficients {
    /// `theta_k = scale * ratio^k`
    Geometric { scale: f64, ratio: f64 },
    /// `theta_k = scale * k^(-exponent)`, `exponent > 1`
    PowerLaw { scale: f64, exponent: f64 },
}

const TABLE: usize = 4096;
const EM_START: usize = 64;

impl Coefficients {
    pub fn validate(&self, family: &'static str) -> Result<()> {
        match *self {
            Coefficients::Geometric { scale, ratio } => {
                if !scale.is_finite() || !(ratio.abs() < 1.0) {
                    return Err(SimError::param(family, "geometric coefficients need finite scale and |ratio| < 1"));
                }
            }
            Coefficients::PowerLaw { scale, exponent } => {
                if !scale.is_finite() || !(exponent > 1.0) || !exponent.is_finite() {
                    return Err(SimError::param(family, "power-law coefficients need finite scale and exponent > 1"));
                }
            }
        }
        Ok(())
    }

    /// `theta_k` for `k >= 1`.
    pub fn coef(&self, k: usize) -> f64 {
        match *self {
            Coefficients::Geometric { scale, ratio } => scale * ratio.powi(k as i32),
            Coefficients::PowerLaw { scale, exponent } => scale * (k as f64).powf(-exponent),
        }
    }

    /// Upper bound on `sum_{k > n} |theta_k|` computed without tables.
    fn analytic_tail(&self, n: usize) -> f64 {
        match *self {
            Coefficients::Geometric { scale, ratio } => {
                let r = ratio.abs();
                scale.abs() * r.powi(n as i32 + 1) / (1.0 - r)
            }
            Coefficients::PowerLaw { scale, exponent: p } => {
                let direct: f64 = ((n + 1)..=EM_START.max(n)).map(|k| (k as f64).powf(-p)).sum();
                let big_n = EM_START.max(n) as f64;
                // Euler-Maclaurin with the first neglected term added as margin
                let em = big_n.powf(1.0 - p) / (p - 1.0) - 0.5 * big_n.powf(-p)
                    + p * big_n.powf(-p - 1.0) / 12.0
                    + p * (p + 1.0) * (p + 2.0) * big_n.powf(-p - 3.0) / 720.0;
                scale.abs() * (direct + em)
            }
        }
    }
}

/// A coefficient sequence with cached coefficients, tails and prefix sums.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    coeffs: Coefficients,
    theta: Vec<f64>,
    tails: Vec<f64>,
    prefix_abs: Vec<f64>,
}

impl Series {
    pub fn new(coeffs: Coefficients, family: &'static str) -> Result<Self> {
        coeffs.validate(family)?;
        let theta: Vec<f64> = (0..=TABLE).map(|k| if k == 0 { 0.0 } else { coeffs.coef(k) }).collect();
        let mut tails = vec![0.0; TABLE + 1];
        tails[TABLE] = round_up(coeffs.analytic_tail(TABLE));
        for n in (0..TABLE).rev() {
            tails[n] = tails[n + 1] + theta[n + 1].abs();
        }
        for (n, t) in tails.iter_mut().enumerate() {
            *t = round_up(*t).max(round_up(coeffs.analytic_tail(n)));
        }
        let mut prefix_abs = vec![0.0; TABLE + 1];
        for k in 1..=TABLE {
            prefix_abs[k] = prefix_abs[k - 1] + theta[k].abs();
        }
        prefix_abs.iter_mut().for_each(|p| *p = round_up(*p));
        Ok(Self {
            coeffs,
            theta,
            tails,
            prefix_abs,
        })
    }

    pub fn coefficients(&self) -> Coefficients {
        self.coeffs
    }

    #[inline]
    pub fn coef(&self, k: usize) -> f64 {
        if k <= TABLE {
            self.theta[k]
        } else {
            self.coeffs.coef(k)
        }
    }

    /// `r_n = sum_{k > n} |theta_k|`, rounded up.
    #[inline]
    pub fn tail(&self, n: usize) -> f64 {
        if n <= TABLE {
            self.tails[n]
        } else {
            round_up(self.coeffs.analytic_tail(n))
        }
    }

    /// `sum_{k <= n} |theta_k|`, rounded up.
    #[inline]
    pub fn prefix_abs(&self, n: usize) -> f64 {
        if n <= TABLE {
            self.prefix_abs[n]
        } else {
            self.tails[0]
        }
    }

    /// `sum_k |theta_k|`, rounded up.
    pub fn total(&self) -> f64 {
        self.tails[0]
    }
}

/// `+-1` value of an internal binary symbol.
#[inline]
pub(crate) fn sign(a: Symbol) -> f64 {
    if a == 0 {
        -1.0
    } else {
        1.0
    }
}

/// Position of the most recent `1` in the past, 1-based.
#[inline]
pub(crate) fn last_one(past: &[Symbol]) -> Option<usize> {
    past.iter().position(|&a| a == 1).map(|p| p + 1)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Enumerates every binary word of the given length, most recent first.
    pub fn words(len: usize) -> impl Iterator<Item = Vec<Symbol>> {
        (0u64..(1u64 << len)).map(move |m| (0..len).map(|j| ((m >> j) & 1) as Symbol).collect())
    }

    /// Lower probabilities must be monotone under extension and
    /// sub-normalized.
    pub fn check_monotone_subnormalized(k: &dyn Kernel, max_len: usize) {
        let m = k.alphabet_size();
        for len in 0..max_len {
            for w in words(len) {
                let base: Vec<f64> = (0..m).map(|a| k.lower_prob(a as Symbol, &w)).collect();
                assert!(base.iter().sum::<f64>() <= 1.0 + 1e-12, "{w:?}");
                assert!(base.iter().all(|p| *p >= 0.0));
                for b in 0..m as Symbol {
                    let mut longer = w.clone();
                    longer.push(b);
                    for a in 0..m {
                        let ext = k.lower_prob(a as Symbol, &longer);
                        assert!(ext >= base[a] - 1e-14, "{:?} a={a} {w:?} + {b}: {ext} < {}", k.family(), base[a]);
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_tail_closed_form() {
        let s = Series::new(Coefficients::Geometric { scale: 0.2, ratio: 0.5 }, "t").unwrap();
        assert!((s.tail(1) - 0.1).abs() < 1e-12);
        assert!(s.tail(1) >= 0.2 * 0.25 / 0.5);
        assert!((s.total() - 0.2).abs() < 1e-12);
        assert!(s.tail(5000) <= s.tail(4000));
    }

    #[test]
    fn power_tail_is_upper_bound_and_tight() {
        let c = Coefficients::PowerLaw { scale: 1.0, exponent: 2.0 };
        let s = Series::new(c, "t").unwrap();
        let exact0 = std::f64::consts::PI.powi(2) / 6.0;
        assert!(s.total() >= exact0 && s.total() - exact0 < 1e-9, "{}", s.total() - exact0);
        for n in [1usize, 10, 63, 64, 65, 500, 4096, 10_000] {
            let brute: f64 = ((n + 1)..2_000_000).map(|k| (k as f64).powi(-2)).sum::<f64>() + 1.0 / 2_000_000.0;
            let t = s.tail(n);
            assert!(t >= brute - 1e-15 && t - brute < 1e-9, "n={n}: {t} vs {brute}");
        }
    }

    #[test]
    fn logistic_is_symmetric() {
        for x in [-30.0, -2.0, 0.0, 0.7, 40.0] {
            assert!((logistic(x) + logistic(-x) - 1.0).abs() < 1e-15);
        }
        assert_eq!(logistic(0.0), 0.5);
    }

    #[test]
    fn rejects_bad_coefficients() {
        assert!(Series::new(Coefficients::Geometric { scale: 1.0, ratio: 1.0 }, "t").is_err());
        assert!(Series::new(Coefficients::PowerLaw { scale: 1.0, exponent: 1.0 }, "t").is_err());
    }
}
