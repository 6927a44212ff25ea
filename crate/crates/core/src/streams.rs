//! Index-addressable uniform variables and their quantization into the
//! spontaneous-symbol stream.
//!
//! A [`RandomStream`] is a keyed counter hash: `U_i` is a pure function of
//! `(seed, i)`, so the past can be extended backward one index at a time
//! without buffering anything.

use crate::error::{Result, SimError};
use crate::Symbol;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const SEED_SALT: u64 = 0x6A09_E667_F3BC_C909;
const INV_2_53: f64 = 1.0 / (1u64 << 53) as f64;

/// SplitMix64 finalizer.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic uniform variables `U_i`, `i` ranging over all of `i64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomStream {
    seed: u64,
    key: u64,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            key: mix64(seed ^ SEED_SALT),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Raw 64 bits at index `i`.
    #[inline]
    pub fn bits_at(&self, i: i64) -> u64 {
        let z = mix64(self.key.wrapping_add((i as u64).wrapping_mul(GOLDEN)));
        mix64(z ^ self.key.rotate_left(29))
    }

    /// `U_i` in `[0, 1)` with 53 bits of resolution.
    #[inline]
    pub fn uniform_at(&self, i: i64) -> f64 {
        (self.bits_at(i) >> 11) as f64 * INV_2_53
    }

    /// An independent stream derived from this one; used for auxiliary
    /// randomness (bootstrap, permutations) that must not touch `U`.
    pub fn derive(&self, tag: u64) -> RandomStream {
        RandomStream::new(mix64(self.seed ^ mix64(tag.wrapping_add(GOLDEN))))
    }

    /// Uniform integer in `0..n` drawn from index `i`.
    pub fn index_at(&self, i: i64, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.bits_at(i) as u128 * n as u128) >> 64) as usize
    }
}

/// A value of the `Y` stream: either a spontaneously determined symbol or
/// the undetermined mark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum YSymbol {
    Symbol(Symbol),
    Star,
}

impl YSymbol {
    pub fn symbol(self) -> Option<Symbol> {
        match self {
            YSymbol::Symbol(a) => Some(a),
            YSymbol::Star => None,
        }
    }

    pub fn is_star(self) -> bool {
        matches!(self, YSymbol::Star)
    }
}

/// Running sums in a fixed left-to-right order. Every threshold comparison
/// in the crate goes through this so that the `Y` partition and the depth-0
/// layer of the update function agree bit for bit.
pub fn cumulative_sums(weights: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect()
}

/// Maps `U_i` to `Y_i` using the minorization vector `{alpha(a)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct YQuantizer {
    cumulative: Vec<f64>,
}

impl YQuantizer {
    pub fn new(alphas: &[f64]) -> Result<Self> {
        if alphas.is_empty() {
            return Err(SimError::InvalidArgument("empty alpha vector".into()));
        }
        if let Some(bad) = alphas.iter().find(|a| !a.is_finite() || **a < 0.0) {
            return Err(SimError::InvalidArgument(format!(
                "alpha values must be finite and nonnegative, got {bad}"
            )));
        }
        let cumulative = cumulative_sums(alphas);
        let total = *cumulative.last().unwrap();
        if total <= 0.0 {
            return Err(SimError::WeakNonNullness { alpha_floor: total });
        }
        if total > 1.0 + 1e-12 {
            return Err(SimError::InvalidArgument(format!(
                "alpha mass {total} exceeds one"
            )));
        }
        Ok(Self { cumulative })
    }

    /// `alpha_-1`, the total spontaneous mass.
    pub fn alpha_floor(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn alphabet_size(&self) -> usize {
        self.cumulative.len()
    }

    #[inline]
    pub fn classify(&self, u: f64) -> YSymbol {
        if u >= self.alpha_floor() {
            return YSymbol::Star;
        }
        // u < total, so some interval matches
        let a = self.cumulative.iter().position(|&c| u < c).unwrap();
        YSymbol::Symbol(a as Symbol)
    }

    #[inline]
    pub fn y_at(&self, stream: &RandomStream, i: i64) -> YSymbol {
        self.classify(stream.uniform_at(i))
    }

    /// `Y_i(a)`: the spontaneous symbol if any, else the filler's symbol at `i`.
    pub fn y_completed<F>(&self, stream: &RandomStream, i: i64, filler: F) -> Symbol
    where
        F: Fn(i64) -> Symbol,
    {
        match self.y_at(stream, i) {
            YSymbol::Symbol(a) => a,
            YSymbol::Star => filler(i),
        }
    }
}

/// Free-function form of [`YQuantizer::y_at`].
pub fn y_at(stream: &RandomStream, i: i64, alphas: &[f64]) -> Result<YSymbol> {
    Ok(YQuantizer::new(alphas)?.y_at(stream, i))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_index_same_value() {
        let s = RandomStream::new(17);
        assert_eq!(s.uniform_at(-5).to_bits(), s.uniform_at(-5).to_bits());
        let t = RandomStream::new(17);
        assert_eq!(s.uniform_at(-5).to_bits(), t.uniform_at(-5).to_bits());
    }

    #[test]
    fn backward_and_forward_order_agree() {
        let s = RandomStream::new(3);
        let back: Vec<f64> = (0..100).map(|k| s.uniform_at(-k)).collect();
        let mut fwd: Vec<f64> = (-99..=0).map(|i| s.uniform_at(i)).collect();
        fwd.reverse();
        assert_eq!(back, fwd);
    }

    #[test]
    fn seeds_differ() {
        let a = RandomStream::new(1);
        let b = RandomStream::new(2);
        let same = (0..1000).filter(|&i| a.uniform_at(i) == b.uniform_at(i)).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn mean_is_one_half() {
        let s = RandomStream::new(99);
        let n = 1_000_000;
        let mean: f64 = (-(n as i64) + 1..=0).map(|i| s.uniform_at(i)).sum::<f64>() / n as f64;
        // 3 sigma with sigma = (12 n)^(-1/2)
        let tol = 3.0 / (12.0 * n as f64).sqrt();
        assert!((mean - 0.5).abs() < tol.max(0.002), "mean {mean}");
    }

    #[test]
    fn autocorrelation_vanishes() {
        let s = RandomStream::new(5);
        let n = 1_000_000usize;
        let xs: Vec<f64> = (0..n as i64).map(|i| s.uniform_at(i) - 0.5).collect();
        let var: f64 = xs.iter().map(|x| x * x).sum::<f64>() / n as f64;
        for lag in 1..=10 {
            let c: f64 = xs.iter().zip(&xs[lag..]).map(|(a, b)| a * b).sum::<f64>()
                / (n - lag) as f64
                / var;
            assert!(c.abs() < 3.0 / (n as f64).sqrt(), "lag {lag}: {c}");
        }
    }

    #[test]
    fn quantizer_examples() {
        let q = YQuantizer::new(&[0.3, 0.3]).unwrap();
        assert_eq!(q.classify(0.0), YSymbol::Symbol(0));
        assert_eq!(q.classify(0.3), YSymbol::Symbol(1));
        assert_eq!(q.classify(0.7), YSymbol::Star);
        assert_eq!(q.classify(0.6), YSymbol::Star);
    }

    #[test]
    fn quantizer_rejects_zero_mass() {
        assert!(matches!(
            YQuantizer::new(&[0.0, 0.0]),
            Err(SimError::WeakNonNullness { .. })
        ));
    }

    #[test]
    fn star_frequency() {
        let q = YQuantizer::new(&[0.3, 0.3]).unwrap();
        let s = RandomStream::new(11);
        let n = 100_000;
        let stars = (0..n).filter(|&i| q.y_at(&s, i).is_star()).count();
        let p = stars as f64 / n as f64;
        assert!((p - 0.4).abs() < 0.005, "{p}");
    }

    #[test]
    fn completion_frequency() {
        let q = YQuantizer::new(&[0.3, 0.3]).unwrap();
        let s = RandomStream::new(12);
        let n = 100_000;
        let ones = (0..n).filter(|&i| q.y_completed(&s, i, |_| 1) == 1).count();
        let p = ones as f64 / n as f64;
        assert!((p - 0.7).abs() < 0.005, "{p}");
        assert!((0..1000).all(|i| match q.y_at(&s, i) {
            YSymbol::Symbol(a) => q.y_completed(&s, i, |_| 0) == a,
            YSymbol::Star => q.y_completed(&s, i, |_| 0) == 0,
        }));
    }
}
