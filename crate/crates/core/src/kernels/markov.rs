//! Finite-order Markov chains viewed as kernels of infinite order.

use super::{require_skeleton, Kernel, KernelFamily};
use crate::error::{Result, SimError};
use crate::skeletons::Skeleton;
use crate::Symbol;

const MAX_ROWS: usize = 1 << 20;

/// Order-`r` chain on `m` symbols. Row `j` of the table holds
/// `P(. | past)` where `j = sum_t past[t] * m^t` (most recent symbol is the
/// least significant digit).
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovEmbedded {
    order: usize,
    alphabet: usize,
    /// `mins[d][row][a]`: minimum of `P(a | .)` over pasts whose `d` most
    /// recent symbols encode to `row`; `mins[order]` is the table itself.
    mins: Vec<Vec<Vec<f64>>>,
    /// `omega_d` minimized over pasts of length `d < order`.
    uniform: Vec<f64>,
}

impl MarkovEmbedded {
    pub fn new(order: usize, alphabet: usize, table: Vec<Vec<f64>>) -> Result<Self> {
        const F: &str = "markov";
        if alphabet < 2 {
            return Err(SimError::param(F, "alphabet size must be at least 2"));
        }
        let rows = alphabet
            .checked_pow(order as u32)
            .filter(|&r| r <= MAX_ROWS)
            .ok_or_else(|| SimError::param(F, format!("alphabet^order must not exceed {MAX_ROWS}")))?;
        if table.len() != rows {
            return Err(SimError::param(F, format!("expected {rows} rows, got {}", table.len())));
        }
        for (j, row) in table.iter().enumerate() {
            if row.len() != alphabet {
                return Err(SimError::param(F, format!("row {j} has {} entries, expected {alphabet}", row.len())));
            }
            if row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                return Err(SimError::param(F, format!("row {j} has an entry outside [0,1]")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(SimError::param(F, format!("row {j} sums to {s}, not 1")));
            }
        }
        let mut mins = vec![Vec::new(); order + 1];
        mins[order] = table;
        for d in (0..order).rev() {
            let width = alphabet.pow(d as u32);
            let mut level = vec![vec![f64::INFINITY; alphabet]; width];
            for (j, row) in mins[d + 1].iter().enumerate() {
                let target = &mut level[j % width];
                for (t, p) in target.iter_mut().zip(row) {
                    *t = t.min(*p);
                }
            }
            mins[d] = level;
        }
        let uniform = (0..order)
            .map(|d| mins[d].iter().map(|row| row.iter().sum::<f64>()).fold(f64::INFINITY, f64::min))
            .collect();
        let floor: f64 = mins[0][0].iter().sum();
        if floor <= 0.0 {
            return Err(SimError::WeakNonNullness { alpha_floor: floor });
        }
        Ok(Self {
            order,
            alphabet,
            mins,
            uniform,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// The full transition table.
    pub fn table(&self) -> &[Vec<f64>] {
        &self.mins[self.order]
    }

    fn row(&self, past: &[Symbol]) -> &[f64] {
        let d = past.len().min(self.order);
        let mut j = 0usize;
        for &a in past[..d].iter().rev() {
            j = j * self.alphabet + a as usize;
        }
        &self.mins[d][j]
    }

    /// Stationary law by power iteration on the lifted chain.
    pub fn stationary(&self) -> Vec<f64> {
        if self.order == 0 {
            return self.table()[0].clone();
        }
        let rows = self.table().len();
        let mut pi = vec![1.0 / rows as f64; rows];
        let top = rows / self.alphabet.max(1);
        for _ in 0..100_000 {
            let mut next = vec![0.0; rows];
            for (j, p) in pi.iter().enumerate() {
                for (a, q) in self.table()[j].iter().enumerate() {
                    // drop the oldest digit, shift in a as the newest
                    let k = (j % top) * self.alphabet + a;
                    next[k] += p * q;
                }
            }
            let diff: f64 = next.iter().zip(&pi).map(|(a, b)| (a - b).abs()).sum();
            pi = next;
            if diff < 1e-15 {
                break;
            }
        }
        let mut marg = vec![0.0; self.alphabet];
        for (j, p) in pi.iter().enumerate() {
            marg[j % self.alphabet] += p;
        }
        marg
    }
}

impl Kernel for MarkovEmbedded {
    fn family(&self) -> KernelFamily {
        KernelFamily::MarkovEmbedded
    }

    fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    fn lower_prob(&self, a: Symbol, past: &[Symbol]) -> f64 {
        self.row(past)[a as usize]
    }

    fn lower_probs(&self, past: &[Symbol], out: &mut [f64]) {
        out.copy_from_slice(self.row(past));
    }

    fn natural_skeleton(&self) -> Skeleton {
        Skeleton::Empty
    }

    fn alpha_table(&self, skeleton: &Skeleton, k: usize, _i: usize) -> Result<f64> {
        require_skeleton(self, skeleton)?;
        Ok(if k >= self.order { 1.0 } else { self.uniform[k] })
    }

    fn slc_threshold(&self, _i: usize) -> Option<usize> {
        Some(self.order)
    }

    fn present(&self, a: Symbol) -> i64 {
        a as i64
    }
}

#[cfg(test)]
mod tests {
    use super::super::test_support::check_monotone_subnormalized;
    use super::*;

    fn two_state() -> MarkovEmbedded {
        MarkovEmbedded::new(1, 2, vec![vec![0.9, 0.1], vec![0.2, 0.8]]).unwrap()
    }

    #[test]
    fn saturates_at_order() {
        let k = two_state();
        assert_eq!(k.lower_prob(0, &[0]), 0.9);
        assert_eq!(k.lower_prob(0, &[0, 1, 1, 0]), 0.9);
        assert_eq!(k.lower_prob(0, &[]), 0.2);
        assert_eq!(k.lower_prob(1, &[]), 0.1);
        assert!((k.alpha_floor() - 0.3).abs() < 1e-15);
        assert_eq!(k.alpha_table(&Skeleton::Empty, 1, 0).unwrap(), 1.0);
    }

    #[test]
    fn stationary_two_state() {
        let pi = two_state().stationary();
        assert!((pi[0] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn order_two_minima() {
        // rows: past (a_-1, a_-2) encoded a_-1 + 2 a_-2
        let t = vec![vec![0.5, 0.5], vec![0.3, 0.7], vec![0.6, 0.4], vec![0.1, 0.9]];
        let k = MarkovEmbedded::new(2, 2, t).unwrap();
        assert_eq!(k.lower_prob(0, &[1, 0]), 0.3);
        assert_eq!(k.lower_prob(0, &[1]), 0.1);
        assert_eq!(k.lower_prob(1, &[0]), 0.4);
        assert_eq!(k.lower_prob(1, &[]), 0.4);
        assert!((k.alpha_table(&Skeleton::Empty, 1, 0).unwrap() - 0.8).abs() < 1e-15);
        check_monotone_subnormalized(&k, 5);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(MarkovEmbedded::new(1, 2, vec![vec![0.9, 0.2], vec![0.2, 0.8]]).is_err());
        assert!(MarkovEmbedded::new(1, 2, vec![vec![1.0, 0.0]]).is_err());
        assert!(matches!(
            MarkovEmbedded::new(1, 2, vec![vec![1.0, 0.0], vec![0.0, 1.0]]),
            Err(SimError::WeakNonNullness { .. })
        ));
    }
}
