//! Context trees as procedural suffix matchers, the star-adversarial
//! maximum context length, and good coalescence time detectors.
//!
//! Pasts are passed most-recent-first: `past[0]` is `a_{-1}`, `past[1]` is
//! `a_{-2}` and so on. Words that are compared against the `Y` stream in
//! time order (terminal strings) are stored oldest-first.

use std::fmt;
use std::sync::Arc;

use crate::error::{Result, SimError};
use crate::streams::{RandomStream, YQuantizer, YSymbol};
use crate::Symbol;

/// Outcome of matching a finite past against a context tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContextLen {
    Determined(usize),
    /// No context is a suffix of the word; more past is required.
    NeedMore,
}

impl ContextLen {
    pub fn determined(self) -> Option<usize> {
        match self {
            ContextLen::Determined(l) => Some(l),
            ContextLen::NeedMore => None,
        }
    }
}

/// Incremental, star-adversarial computation of the maximum context length
/// over a `Y` window fed in time order.
pub trait ContextTrack: Send {
    fn push(&mut self, y: YSymbol);
    /// Supremum over star completions of the context length of the window
    /// pushed so far, or `NeedMore` when some completion is not matched
    /// inside the window.
    fn current(&self) -> ContextLen;
}

/// A user-supplied skeleton. It must bring its own tracker and good
/// coalescence time detector; none is inferred.
pub trait CustomSkeleton: Send + Sync + fmt::Debug {
    fn name(&self) -> String;
    fn context_len(&self, past: &[Symbol]) -> ContextLen;
    fn tracker(&self, alphabet_size: usize) -> Box<dyn ContextTrack>;
    /// A member of the good coalescence set for time `m`.
    fn good_time(
        &self,
        quantizer: &YQuantizer,
        stream: &RandomStream,
        m: i64,
        max_steps: u64,
    ) -> Result<i64>;
    /// Whether every index of the detected window has its context inside the
    /// window, as the extended construction requires.
    fn strong_certified(&self) -> bool {
        false
    }
    fn min_context_len(&self) -> usize {
        1
    }
}

/// Family tags for the built-in skeletons.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkeletonFamily {
    Empty,
    TerminalString,
    Proportion,
    RunBoundary,
    Custom,
}

#[derive(Clone)]
pub enum Skeleton {
    /// The empty tree: every past has the empty context.
    Empty,
    /// Contexts are the shortest suffixes that begin with an occurrence of
    /// the word (oldest symbol first). The word `[1]` gives the renewal tree
    /// whose only infinite branch is the all-zero past.
    TerminalString(Vec<Symbol>),
    /// Contexts are `a_{-T}^{-1}` where `T` is the first depth at which the
    /// proportion of symbol 1 reaches `sigma`.
    Proportion { sigma: f64 },
    /// Contexts are the most recent run plus the symbol that ends it.
    RunBoundary,
    Custom(Arc<dyn CustomSkeleton>),
}

impl fmt::Debug for Skeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe())
    }
}

impl PartialEq for Skeleton {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Skeleton::Empty, Skeleton::Empty) => true,
            (Skeleton::TerminalString(a), Skeleton::TerminalString(b)) => a == b,
            (Skeleton::Proportion { sigma: a }, Skeleton::Proportion { sigma: b }) => a == b,
            (Skeleton::RunBoundary, Skeleton::RunBoundary) => true,
            (Skeleton::Custom(a), Skeleton::Custom(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

/// Analytic tail of the good coalescence time, `n -> P(theta_bar[0] <= -n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailValue {
    pub value: f64,
    /// `false` when `value` is only an upper bound.
    pub exact: bool,
}

/// `E|theta_bar[0]|`, exact or an upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanValue {
    pub value: f64,
    pub exact: bool,
}

impl Skeleton {
    /// The renewal tree: terminal string `1`.
    pub fn renewal() -> Self {
        Skeleton::TerminalString(vec![1])
    }

    pub fn terminal_string(word: Vec<Symbol>) -> Result<Self> {
        if word.is_empty() {
            return Err(SimError::InvalidArgument("terminal string must be nonempty".into()));
        }
        Ok(Skeleton::TerminalString(word))
    }

    pub fn proportion(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(SimError::InvalidArgument(format!("sigma must lie in (0,1), got {sigma}")));
        }
        Ok(Skeleton::Proportion { sigma })
    }

    pub fn family(&self) -> SkeletonFamily {
        match self {
            Skeleton::Empty => SkeletonFamily::Empty,
            Skeleton::TerminalString(_) => SkeletonFamily::TerminalString,
            Skeleton::Proportion { .. } => SkeletonFamily::Proportion,
            Skeleton::RunBoundary => SkeletonFamily::RunBoundary,
            Skeleton::Custom(_) => SkeletonFamily::Custom,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Skeleton::Empty => "empty".into(),
            Skeleton::TerminalString(w) => format!("terminal_string{w:?}"),
            Skeleton::Proportion { sigma } => format!("proportion(sigma={sigma})"),
            Skeleton::RunBoundary => "run_boundary".into(),
            Skeleton::Custom(c) => format!("custom({})", c.name()),
        }
    }

    /// Shortest length in `N(tau)`, or 0 for the empty tree.
    pub fn min_context_len(&self) -> usize {
        match self {
            Skeleton::Empty => 0,
            Skeleton::TerminalString(w) => w.len(),
            Skeleton::Proportion { .. } => 1,
            Skeleton::RunBoundary => 2,
            Skeleton::Custom(c) => c.min_context_len(),
        }
    }

    /// The unique context that is a suffix of `past`.
    pub fn context_len(&self, past: &[Symbol]) -> ContextLen {
        match self {
            Skeleton::Empty => ContextLen::Determined(0),
            Skeleton::TerminalString(w) => {
                let n = w.len();
                // occurrence starting at a_{-s}: w[j] == past[s - 1 - j]
                (n..=past.len())
                    .find(|&s| w.iter().enumerate().all(|(j, &x)| past[s - 1 - j] == x))
                    .map_or(ContextLen::NeedMore, ContextLen::Determined)
            }
            Skeleton::Proportion { sigma } => {
                let mut ones = 0usize;
                for (k, &a) in past.iter().enumerate() {
                    ones += (a == 1) as usize;
                    if proportion_reached(ones, k + 1, *sigma) {
                        return ContextLen::Determined(k + 1);
                    }
                }
                ContextLen::NeedMore
            }
            Skeleton::RunBoundary => match past.first() {
                None => ContextLen::NeedMore,
                Some(&s) => match past.iter().position(|&a| a != s) {
                    Some(r) => ContextLen::Determined(r + 1),
                    None => ContextLen::NeedMore,
                },
            },
            Skeleton::Custom(c) => c.context_len(past),
        }
    }

    pub fn tracker(&self, alphabet_size: usize) -> Box<dyn ContextTrack> {
        match self {
            Skeleton::Empty => Box::new(EmptyTracker),
            Skeleton::TerminalString(w) => Box::new(TerminalTracker::new(w, alphabet_size)),
            Skeleton::Proportion { sigma } => Box::new(ProportionTracker {
                sigma: *sigma,
                ones: Vec::new(),
            }),
            Skeleton::RunBoundary => Box::new(RunTracker::new(alphabet_size)),
            Skeleton::Custom(c) => c.tracker(alphabet_size),
        }
    }

    /// Whether the detector keeps every context of its window inside the
    /// window (the condition of the extended construction).
    pub fn strong_certified(&self) -> bool {
        match self {
            Skeleton::Custom(c) => c.strong_certified(),
            _ => true,
        }
    }

    /// The good coalescence time `theta_bar[m]`.
    ///
    /// For the built-in families this is the supremum of the good set; the
    /// detected index always carries a spontaneous symbol (or equals `m` for
    /// the empty tree).
    pub fn good_time(
        &self,
        quantizer: &YQuantizer,
        stream: &RandomStream,
        m: i64,
        max_steps: u64,
    ) -> Result<i64> {
        let exceeded = |i: i64| SimError::DepthExceeded {
            probed: (m - i) as u64,
            blocks: 0,
        };
        match self {
            Skeleton::Empty => Ok(m),
            Skeleton::TerminalString(w) => {
                let n = w.len() as i64;
                let mut i = m - n + 1;
                loop {
                    if (m - i) as u64 > max_steps {
                        return Err(exceeded(i));
                    }
                    let hit = w.iter().enumerate().all(|(j, &x)| {
                        quantizer.y_at(stream, i + j as i64) == YSymbol::Symbol(x)
                    });
                    if hit {
                        return Ok(i);
                    }
                    i -= 1;
                }
            }
            Skeleton::Proportion { sigma } => {
                let mut ones = 0usize;
                let mut k = 1usize;
                loop {
                    let i = m - k as i64 + 1;
                    if (m - i) as u64 > max_steps {
                        return Err(exceeded(i));
                    }
                    ones += (quantizer.y_at(stream, i) == YSymbol::Symbol(1)) as usize;
                    if proportion_reached(ones, k, *sigma) {
                        return Ok(i);
                    }
                    k += 1;
                }
            }
            Skeleton::RunBoundary => {
                let mut newer = quantizer.y_at(stream, m);
                let mut i = m - 1;
                loop {
                    if (m - i) as u64 > max_steps {
                        return Err(exceeded(i));
                    }
                    let older = quantizer.y_at(stream, i);
                    if let (YSymbol::Symbol(a), YSymbol::Symbol(b)) = (older, newer) {
                        if a != b {
                            return Ok(i);
                        }
                    }
                    newer = older;
                    i -= 1;
                }
            }
            Skeleton::Custom(c) => c.good_time(quantizer, stream, m, max_steps),
        }
    }

    /// `n -> P(theta_bar[0] <= -n)`, exact where known, otherwise an upper
    /// bound. `alphas` is the minorization vector of the paired kernel.
    pub fn theta_bar_tail(&self, alphas: &[f64], n: u64) -> Result<TailValue> {
        if n == 0 {
            return Ok(TailValue { value: 1.0, exact: true });
        }
        match self {
            Skeleton::Empty => Ok(TailValue { value: 0.0, exact: true }),
            Skeleton::TerminalString(w) => {
                let p = word_probability(w, alphas);
                let len = w.len() as u64;
                let blocks = (n + 1).saturating_sub(len) / len;
                Ok(TailValue {
                    value: (1.0 - p).powf(blocks as f64),
                    exact: len == 1,
                })
            }
            Skeleton::RunBoundary => {
                let p = distinct_pair_probability(alphas);
                let blocks = (n + 1).saturating_sub(2) / 2;
                Ok(TailValue {
                    value: (1.0 - p).powf(blocks as f64),
                    exact: false,
                })
            }
            Skeleton::Proportion { sigma } => {
                let d = proportion_rate(*sigma, alphas)?;
                Ok(TailValue {
                    value: (-(n as f64) * d).exp(),
                    exact: false,
                })
            }
            Skeleton::Custom(c) => Err(SimError::UnsupportedPairing {
                kernel: "theta_bar_tail".into(),
                skeleton: c.name(),
            }),
        }
    }

    /// `E|theta_bar[0]|` from the tail above: exact for the empty tree and
    /// single-symbol terminal strings, an upper bound otherwise.
    pub fn theta_bar_mean(&self, alphas: &[f64]) -> Result<MeanValue> {
        match self {
            Skeleton::Empty => Ok(MeanValue { value: 0.0, exact: true }),
            Skeleton::TerminalString(w) => {
                let p = word_probability(w, alphas);
                if p <= 0.0 {
                    return Err(SimError::InvalidArgument(
                        "terminal string has zero spontaneous probability".into(),
                    ));
                }
                let len = w.len() as f64;
                Ok(MeanValue {
                    value: 2.0 * (len - 1.0) + len * (1.0 - p) / p,
                    exact: w.len() == 1,
                })
            }
            Skeleton::RunBoundary => {
                let p = distinct_pair_probability(alphas);
                if p <= 0.0 {
                    return Err(SimError::InvalidArgument(
                        "run boundary needs two symbols with positive alpha".into(),
                    ));
                }
                Ok(MeanValue {
                    value: 2.0 + 2.0 * (1.0 - p) / p,
                    exact: false,
                })
            }
            Skeleton::Proportion { sigma } => {
                let d = proportion_rate(*sigma, alphas)?;
                Ok(MeanValue {
                    value: 1.0 / d.exp_m1(),
                    exact: false,
                })
            }
            Skeleton::Custom(c) => Err(SimError::UnsupportedPairing {
                kernel: "theta_bar_mean".into(),
                skeleton: c.name(),
            }),
        }
    }

    /// Analytic law of `c_tau^{-1}` when it is known in closed form:
    /// `Some(pmf)` with `pmf(j) = P(c = j)`.
    pub fn context_law(&self, alphas: &[f64]) -> Option<ContextLaw> {
        match self {
            Skeleton::Empty => Some(ContextLaw::Degenerate),
            Skeleton::TerminalString(w) if w.len() == 1 => {
                let p = alphas.get(w[0] as usize).copied().unwrap_or(0.0);
                (p > 0.0).then_some(ContextLaw::Geometric { p })
            }
            _ => None,
        }
    }
}

/// Closed-form laws of the maximum context length at a fixed time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContextLaw {
    /// `c = 0` almost surely.
    Degenerate,
    /// `P(c = j) = (1-p)^{j-1} p`, `j >= 1`.
    Geometric { p: f64 },
}

impl ContextLaw {
    pub fn pmf(&self, j: usize) -> f64 {
        match *self {
            ContextLaw::Degenerate => (j == 0) as u8 as f64,
            ContextLaw::Geometric { p } => {
                if j == 0 {
                    0.0
                } else {
                    (1.0 - p).powi(j as i32 - 1) * p
                }
            }
        }
    }

    /// `P(c > j)`.
    pub fn survival(&self, j: usize) -> f64 {
        match *self {
            ContextLaw::Degenerate => 0.0,
            ContextLaw::Geometric { p } => (1.0 - p).powi(j as i32),
        }
    }
}

#[inline]
fn proportion_reached(ones: usize, k: usize, sigma: f64) -> bool {
    ones as f64 >= sigma * k as f64
}

fn word_probability(w: &[Symbol], alphas: &[f64]) -> f64 {
    w.iter()
        .map(|&a| alphas.get(a as usize).copied().unwrap_or(0.0))
        .product()
}

fn distinct_pair_probability(alphas: &[f64]) -> f64 {
    let total: f64 = alphas.iter().sum();
    total * total - alphas.iter().map(|a| a * a).sum::<f64>()
}

/// Chernoff rate `KL(sigma || p)` with `p` the spontaneous mass of symbol 1.
fn proportion_rate(sigma: f64, alphas: &[f64]) -> Result<f64> {
    let p = alphas.get(1).copied().unwrap_or(0.0);
    if p <= sigma {
        return Err(SimError::InvalidArgument(format!(
            "proportion detector needs alpha(1) = {p} > sigma = {sigma}"
        )));
    }
    let kl = sigma * (sigma / p).ln() + (1.0 - sigma) * ((1.0 - sigma) / (1.0 - p)).ln();
    Ok(kl)
}

/// Star-adversarial maximum context length of a whole window given in time
/// order; `NeedMore` plays the role of "unbounded".
pub fn max_context_len(skeleton: &Skeleton, alphabet_size: usize, window: &[YSymbol]) -> ContextLen {
    let mut t = skeleton.tracker(alphabet_size);
    for &y in window {
        t.push(y);
    }
    t.current()
}

struct EmptyTracker;

impl ContextTrack for EmptyTracker {
    fn push(&mut self, _y: YSymbol) {}
    fn current(&self) -> ContextLen {
        ContextLen::Determined(0)
    }
}

/// Dynamic program over the KMP automaton of the terminal word. For each
/// automaton state it keeps the oldest possible start of the most recent
/// occurrence (or "none yet"), which is what the adversary maximizes.
struct TerminalTracker {
    word_len: usize,
    alphabet: usize,
    delta: Vec<Vec<usize>>,
    reach: Vec<Reach>,
    scratch: Vec<Reach>,
    pushed: i64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Reach {
    Unreachable,
    NoOccurrence,
    Since(i64),
}

impl Reach {
    fn merge(self, other: Reach) -> Reach {
        match (self, other) {
            (Reach::Unreachable, x) | (x, Reach::Unreachable) => x,
            (Reach::NoOccurrence, _) | (_, Reach::NoOccurrence) => Reach::NoOccurrence,
            (Reach::Since(a), Reach::Since(b)) => Reach::Since(a.min(b)),
        }
    }
}

impl TerminalTracker {
    fn new(word: &[Symbol], alphabet: usize) -> Self {
        let n = word.len();
        let alphabet = alphabet.max(word.iter().map(|&a| a as usize + 1).max().unwrap_or(1));
        // failure function
        let mut fail = vec![0usize; n + 1];
        let mut k = 0;
        for i in 1..n {
            while k > 0 && word[i] != word[k] {
                k = fail[k];
            }
            if word[i] == word[k] {
                k += 1;
            }
            fail[i + 1] = k;
        }
        let mut delta = vec![vec![0usize; alphabet]; n + 1];
        for q in 0..=n {
            for (s, slot) in delta[q].iter_mut().enumerate() {
                let mut st = if q == n { fail[n] } else { q };
                loop {
                    if st < n && word[st] as usize == s {
                        st += 1;
                        break;
                    }
                    if st == 0 {
                        break;
                    }
                    st = fail[st];
                }
                *slot = st;
            }
        }
        let mut reach = vec![Reach::Unreachable; n + 1];
        reach[0] = Reach::NoOccurrence;
        Self {
            word_len: n,
            alphabet,
            delta,
            scratch: reach.clone(),
            reach,
            pushed: 0,
        }
    }
}

impl ContextTrack for TerminalTracker {
    fn push(&mut self, y: YSymbol) {
        self.scratch.iter_mut().for_each(|r| *r = Reach::Unreachable);
        let t = self.pushed;
        for q in 0..=self.word_len {
            let r = self.reach[q];
            if r == Reach::Unreachable {
                continue;
            }
            let mut step = |s: usize| {
                let q2 = self.delta[q][s];
                let v = if q2 == self.word_len {
                    Reach::Since(t - self.word_len as i64 + 1)
                } else {
                    r
                };
                self.scratch[q2] = self.scratch[q2].merge(v);
            };
            match y {
                YSymbol::Symbol(a) => step(a as usize),
                YSymbol::Star => (0..self.alphabet).for_each(step),
            }
        }
        std::mem::swap(&mut self.reach, &mut self.scratch);
        self.pushed += 1;
    }

    fn current(&self) -> ContextLen {
        let mut oldest: Option<i64> = None;
        for r in &self.reach {
            match *r {
                Reach::Unreachable => {}
                Reach::NoOccurrence => return ContextLen::NeedMore,
                Reach::Since(s) => oldest = Some(oldest.map_or(s, |o| o.min(s))),
            }
        }
        match oldest {
            Some(s) => ContextLen::Determined((self.pushed - s) as usize),
            None => ContextLen::NeedMore,
        }
    }
}

/// Stars are completed by 0, which minimizes every prefix proportion.
struct ProportionTracker {
    sigma: f64,
    ones: Vec<bool>,
}

impl ContextTrack for ProportionTracker {
    fn push(&mut self, y: YSymbol) {
        self.ones.push(y == YSymbol::Symbol(1));
    }

    fn current(&self) -> ContextLen {
        let mut count = 0usize;
        for (k, &one) in self.ones.iter().rev().enumerate() {
            count += one as usize;
            if proportion_reached(count, k + 1, self.sigma) {
                return ContextLen::Determined(k + 1);
            }
        }
        ContextLen::NeedMore
    }
}

/// For every candidate run symbol, the length of the longest suffix that
/// can be completed into a run of it, and whether a certain different
/// symbol closes that suffix inside the window.
struct RunTracker {
    run: Vec<usize>,
    closed: Vec<bool>,
}

impl RunTracker {
    fn new(alphabet: usize) -> Self {
        Self {
            run: vec![0; alphabet.max(2)],
            closed: vec![false; alphabet.max(2)],
        }
    }
}

impl ContextTrack for RunTracker {
    fn push(&mut self, y: YSymbol) {
        for s in 0..self.run.len() {
            match y {
                YSymbol::Star => self.run[s] += 1,
                YSymbol::Symbol(a) if a as usize == s => self.run[s] += 1,
                YSymbol::Symbol(_) => {
                    self.run[s] = 0;
                    self.closed[s] = true;
                }
            }
        }
    }

    fn current(&self) -> ContextLen {
        let mut best = None;
        for s in 0..self.run.len() {
            if self.run[s] == 0 {
                continue;
            }
            if !self.closed[s] {
                return ContextLen::NeedMore;
            }
            best = Some(best.map_or(self.run[s] + 1, |b: usize| b.max(self.run[s] + 1)));
        }
        best.map_or(ContextLen::NeedMore, ContextLen::Determined)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const S: YSymbol = YSymbol::Star;
    fn y(a: Symbol) -> YSymbol {
        YSymbol::Symbol(a)
    }

    /// Enumerates all completions of the stars; the oracle for the tracker.
    fn enumerate_max(sk: &Skeleton, window: &[YSymbol]) -> ContextLen {
        let stars: Vec<usize> = (0..window.len()).filter(|&i| window[i].is_star()).collect();
        let mut best = 0usize;
        for mask in 0u32..(1 << stars.len()) {
            let mut word: Vec<Symbol> = window.iter().map(|y| y.symbol().unwrap_or(0)).collect();
            for (b, &i) in stars.iter().enumerate() {
                word[i] = (mask >> b) & 1;
            }
            word.reverse();
            match sk.context_len(&word) {
                ContextLen::NeedMore => return ContextLen::NeedMore,
                ContextLen::Determined(l) => best = best.max(l),
            }
        }
        ContextLen::Determined(best)
    }

    #[test]
    fn renewal_tree_matcher() {
        let t = Skeleton::renewal();
        assert_eq!(t.context_len(&[1]), ContextLen::Determined(1));
        assert_eq!(t.context_len(&[0, 0, 1, 0]), ContextLen::Determined(3));
        for k in 0..20 {
            assert_eq!(t.context_len(&vec![0; k]), ContextLen::NeedMore);
        }
        assert_eq!(Skeleton::Empty.context_len(&[0, 1, 1]), ContextLen::Determined(0));
    }

    #[test]
    fn max_context_examples() {
        let t = Skeleton::renewal();
        assert_eq!(max_context_len(&t, 2, &[S, y(1)]), ContextLen::Determined(1));
        assert_eq!(max_context_len(&t, 2, &[y(1), S, S]), ContextLen::Determined(3));
        assert_eq!(enumerate_max(&t, &[y(1), S, S]), ContextLen::Determined(3));
        let p = Skeleton::proportion(0.5).unwrap();
        assert_eq!(max_context_len(&p, 2, &[y(1), y(1)]), ContextLen::Determined(1));
        assert_eq!(enumerate_max(&p, &[y(1), y(1)]), ContextLen::Determined(1));
        assert_eq!(max_context_len(&Skeleton::RunBoundary, 2, &[y(0), S, y(1)]), ContextLen::Determined(3));
    }

    #[test]
    fn good_time_examples() {
        let q = YQuantizer::new(&[0.2, 0.2]).unwrap();
        let s = RandomStream::new(4);
        assert_eq!(Skeleton::Empty.good_time(&q, &s, 0, 100).unwrap(), 0);
        let t = Skeleton::renewal().good_time(&q, &s, 0, 10_000).unwrap();
        assert_eq!(q.y_at(&s, t), y(1));
        assert!(((t + 1)..=0).all(|i| q.y_at(&s, i) != y(1)));
    }

    #[test]
    fn depth_cap_is_reported() {
        // alpha(1) = 0 means a certain 1 never appears
        let q = YQuantizer::new(&[0.5, 0.0]).unwrap();
        let s = RandomStream::new(1);
        let err = Skeleton::renewal().good_time(&q, &s, 0, 1000).unwrap_err();
        assert!(err.is_depth_exceeded());
    }

    #[test]
    fn theta_bar_tail_single_symbol() {
        let v = Skeleton::renewal().theta_bar_tail(&[0.3, 0.2], 3).unwrap();
        assert!((v.value - 0.512).abs() < 1e-12 && v.exact);
        assert_eq!(Skeleton::renewal().theta_bar_tail(&[0.3, 0.2], 0).unwrap().value, 1.0);
        let m = Skeleton::renewal().theta_bar_mean(&[0.3, 0.2]).unwrap();
        assert!((m.value - 4.0).abs() < 1e-12);
    }

    fn families() -> Vec<Skeleton> {
        vec![
            Skeleton::Empty,
            Skeleton::renewal(),
            Skeleton::TerminalString(vec![0, 1]),
            Skeleton::TerminalString(vec![1, 1, 0]),
            Skeleton::proportion(0.4).unwrap(),
            Skeleton::proportion(0.7).unwrap(),
            Skeleton::RunBoundary,
        ]
    }

    #[test]
    fn tracker_matches_enumeration_on_random_windows() {
        let stream = RandomStream::new(77);
        let mut idx = 0i64;
        for sk in families() {
            for _ in 0..300 {
                let len = 1 + stream.index_at(idx, 14);
                idx += 1;
                let mut window = Vec::with_capacity(len);
                let mut stars = 0;
                for _ in 0..len {
                    let r = stream.index_at(idx, 3);
                    idx += 1;
                    if r == 2 && stars < 10 {
                        stars += 1;
                        window.push(S);
                    } else {
                        window.push(y((r % 2) as Symbol));
                    }
                }
                assert_eq!(
                    max_context_len(&sk, 2, &window),
                    enumerate_max(&sk, &window),
                    "{sk:?} {window:?}"
                );
            }
        }
    }

    #[test]
    fn strong_condition_holds_on_detected_windows() {
        let q = YQuantizer::new(&[0.25, 0.35]).unwrap();
        for sk in [Skeleton::renewal(), Skeleton::proportion(0.3).unwrap(), Skeleton::RunBoundary] {
            for seed in 0..300 {
                let s = RandomStream::new(seed);
                let m = 0;
                let start = sk.good_time(&q, &s, m, 100_000).unwrap();
                let mut tr = sk.tracker(2);
                // c^{j-1} <= j - start for every j in (start, m + 1]; the
                // run-boundary window opens with two certain symbols, so its
                // first context closes one step later
                let first = start + (sk == Skeleton::RunBoundary) as i64;
                assert!(!q.y_at(&s, first).is_star());
                for j in start..=m {
                    tr.push(q.y_at(&s, j));
                    if j < first {
                        continue;
                    }
                    let c = tr.current().determined().expect("context inside window");
                    assert!(c as i64 <= j + 1 - start, "{sk:?} seed {seed}");
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn suffix_property(word in proptest::collection::vec(0u32..2, 0..40),
                               ext in proptest::collection::vec(0u32..2, 0..20)) {
                for sk in families() {
                    if let ContextLen::Determined(l) = sk.context_len(&word) {
                        let mut longer = word.clone();
                        longer.extend_from_slice(&ext);
                        prop_assert_eq!(sk.context_len(&longer), ContextLen::Determined(l));
                    }
                }
            }

            #[test]
            fn unique_context(word in proptest::collection::vec(0u32..2, 60..61)) {
                // the matched context is the only suffix of the word that is itself a context
                for sk in families() {
                    if let ContextLen::Determined(l) = sk.context_len(&word) {
                        for k in 0..l {
                            let shorter = &word[..k];
                            prop_assert_ne!(sk.context_len(shorter), ContextLen::Determined(k));
                        }
                    }
                }
            }
        }
    }
}
