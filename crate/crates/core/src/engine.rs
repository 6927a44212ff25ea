//! Block coalescence and forward reconstruction.
//!
//! The past is cut into blocks `B_k = [theta^k, theta^{k-1} - 1]` where
//! `theta^k` is the good coalescence time of `theta^{k-1} - 1`. Inside a
//! block every undetermined step knows a bound `c` on its context length,
//! and `zeta` is the number of further symbols the continuity rates ask for.
//! With `L_k` the largest `zeta` of block `k`, coalescence holds from the
//! start of block `N` as soon as `L_j <= N - j` for every `j <= N`.

use std::sync::Arc;

use crate::error::{Result, SimError};
use crate::kernels::{ContinuityClass, Kernel};
use crate::skeletons::{ContextLen, Skeleton};
use crate::streams::{RandomStream, YQuantizer, YSymbol};
use crate::Symbol;

/// Search limits that turn non-termination into an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Deepest time index probed into the past, relative to the target.
    pub max_steps: u64,
    pub max_blocks: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Self {
            max_steps: 1_000_000,
            max_blocks: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub start: i64,
    pub end: i64,
    /// Largest lookback requested by a step of the block.
    pub max_zeta: u64,
}

impl Block {
    pub fn len(&self) -> u64 {
        (self.end - self.start + 1) as u64
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoalescenceRecord {
    pub window_start: i64,
    pub target: i64,
    /// Blocks from the one containing the target backward.
    pub blocks: Vec<Block>,
    /// Block-level coalescence index (non-positive).
    pub theta: i64,
    /// `target - sum of block sizes`.
    pub lambda: i64,
    /// First reconstructed time, `lambda + 1`.
    pub start: i64,
    /// Per-step depth bounds `c + zeta` from `start` to `target` (local
    /// variant only).
    pub bounds: Vec<u64>,
    /// Uniforms that landed exactly on a threshold.
    pub ties: u64,
}

impl CoalescenceRecord {
    /// `target - lambda`, the length of the certified history.
    pub fn depth(&self) -> u64 {
        (self.target - self.lambda) as u64
    }
}

/// A reconstructed stretch of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub start: i64,
    pub symbols: Vec<Symbol>,
    /// Resolution depth of every step.
    pub depths: Vec<u64>,
    pub ties: u64,
}

impl Trajectory {
    pub fn symbol_at(&self, i: i64) -> Option<Symbol> {
        usize::try_from(i - self.start).ok().and_then(|k| self.symbols.get(k).copied())
    }

    pub fn depth_at(&self, i: i64) -> Option<u64> {
        usize::try_from(i - self.start).ok().and_then(|k| self.depths.get(k).copied())
    }
}

/// A window sample `X_m .. X_n` with its certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub window_start: i64,
    pub symbols: Vec<Symbol>,
    pub depths: Vec<u64>,
    pub record: CoalescenceRecord,
}

/// A kernel paired with a skeleton, ready to simulate.
#[derive(Debug, Clone)]
pub struct Model {
    kernel: Arc<dyn Kernel>,
    skeleton: Skeleton,
    variant: ContinuityClass,
    quantizer: YQuantizer,
    floor: f64,
    caps: Caps,
}

impl Model {
    pub fn new(kernel: Arc<dyn Kernel>, skeleton: Skeleton, caps: Caps) -> Result<Self> {
        let alphas = kernel.alphas();
        let quantizer = YQuantizer::new(&alphas)?;
        let floor = quantizer.alpha_floor();
        let variant = kernel.continuity();
        match variant {
            ContinuityClass::Local => {
                kernel.alpha_table(&skeleton, 0, skeleton.min_context_len().max(1))?;
            }
            ContinuityClass::Extended => {
                kernel.alpha_bar_table(&skeleton, 0)?;
                if !skeleton.strong_certified() {
                    return Err(SimError::UncertifiedDetector(skeleton.describe()));
                }
            }
        }
        Ok(Self {
            kernel,
            skeleton,
            variant,
            quantizer,
            floor,
            caps,
        })
    }

    /// The kernel's own skeleton with default caps.
    pub fn natural(kernel: Arc<dyn Kernel>) -> Result<Self> {
        let sk = kernel.natural_skeleton();
        Self::new(kernel, sk, Caps::default())
    }

    pub fn with_caps(mut self, caps: Caps) -> Self {
        self.caps = caps;
        self
    }

    pub fn kernel(&self) -> &dyn Kernel {
        self.kernel.as_ref()
    }

    pub fn kernel_arc(&self) -> Arc<dyn Kernel> {
        self.kernel.clone()
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn variant(&self) -> ContinuityClass {
        self.variant
    }

    pub fn quantizer(&self) -> &YQuantizer {
        &self.quantizer
    }

    pub fn alpha_floor(&self) -> f64 {
        self.floor
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    fn rate(&self, k: u64, c: usize) -> Result<f64> {
        let k = k as usize;
        match self.variant {
            ContinuityClass::Local => self.kernel.alpha_table(&self.skeleton, k, c),
            ContinuityClass::Extended => self.kernel.alpha_bar_table(&self.skeleton, k),
        }
    }

    /// Lookback requested by a uniform `u` after a context of length at most
    /// `c`: zero below `alpha_-1`, otherwise the smallest `k` with
    /// `u < alpha_k^c` (or `alpha_bar_k` for the extended variant).
    pub fn zeta(&self, u: f64, c: usize) -> Result<u64> {
        if u < self.floor {
            return Ok(0);
        }
        if u < self.rate(0, c)? {
            return Ok(0);
        }
        let (mut lo, mut hi) = (0u64, 1u64);
        loop {
            if hi > self.caps.max_steps {
                return Err(SimError::DepthExceeded {
                    probed: hi,
                    blocks: 0,
                });
            }
            if u < self.rate(hi, c)? {
                break;
            }
            lo = hi;
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if u < self.rate(mid, c)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// `(zeta_l, c^{l-1})` for every `l` of the block `[start, end]`; `c` is
    /// 0 before the first context closes and for the extended variant.
    fn block_steps(&self, stream: &RandomStream, start: i64, end: i64) -> Result<Vec<(u64, u64)>> {
        let mut out = Vec::with_capacity((end - start + 1) as usize);
        let mut tracker = match self.variant {
            ContinuityClass::Local => Some(self.skeleton.tracker(self.quantizer.alphabet_size())),
            ContinuityClass::Extended => None,
        };
        for l in start..=end {
            let u = stream.uniform_at(l);
            let y = self.quantizer.classify(u);
            let c = match tracker.as_ref().map(|t| t.current()) {
                None => None,
                Some(ContextLen::Determined(c)) => Some(c),
                Some(ContextLen::NeedMore) if u < self.floor => None,
                Some(ContextLen::NeedMore) => {
                    return Err(SimError::InternalInvariant(format!(
                        "context at time {l} is not contained in its block [{start}, {end}]"
                    )))
                }
            };
            let step = if u < self.floor {
                (0, c.unwrap_or(0) as u64)
            } else {
                let c = c.unwrap_or(0);
                (self.zeta(u, c)?, c as u64)
            };
            out.push(step);
            if let Some(t) = tracker.as_mut() {
                t.push(y);
            }
        }
        Ok(out)
    }

    fn exceeded(&self, probed: u64, blocks: u64) -> SimError {
        SimError::DepthExceeded { probed, blocks }
    }

    /// Builds blocks backward from `target` until coalescence holds and the
    /// certified start lies at or before `window_start`.
    pub fn block_coalescence(&self, stream: &RandomStream, window_start: i64, target: i64) -> Result<CoalescenceRecord> {
        if window_start > target {
            return Err(SimError::InvalidArgument(format!("empty window [{window_start}, {target}]")));
        }
        let mut blocks: Vec<Block> = Vec::new();
        let mut steps: Vec<Vec<(u64, u64)>> = Vec::new();
        let mut reach = 0u64;
        let mut end = target;
        loop {
            let index = blocks.len() as u64;
            if index >= self.caps.max_blocks {
                return Err(self.exceeded((target - end) as u64, index));
            }
            let budget = self.caps.max_steps.saturating_sub((target - end) as u64);
            let start = self
                .skeleton
                .good_time(&self.quantizer, stream, end, budget)
                .map_err(|e| match e {
                    SimError::DepthExceeded { probed, .. } => self.exceeded((target - end) as u64 + probed, index),
                    other => other,
                })?;
            if start > end {
                return Err(SimError::InternalInvariant(format!(
                    "detector returned {start} after its time {end}"
                )));
            }
            if (target - start) as u64 > self.caps.max_steps {
                return Err(self.exceeded((target - start) as u64, index));
            }
            let st = self.block_steps(stream, start, end)?;
            let max_zeta = st.iter().map(|s| s.0).max().unwrap_or(0);
            blocks.push(Block { start, end, max_zeta });
            steps.push(st);
            reach = reach.max(max_zeta + index);
            if reach <= index && start <= window_start {
                break;
            }
            end = start - 1;
        }
        let start = blocks.last().unwrap().start;
        let mut bounds = Vec::new();
        if self.variant == ContinuityClass::Local {
            bounds.reserve((target - start + 1) as usize);
            for st in steps.iter().rev() {
                bounds.extend(st.iter().map(|&(z, c)| z + c));
            }
        }
        Ok(CoalescenceRecord {
            window_start,
            target,
            theta: -((blocks.len() - 1) as i64),
            lambda: start - 1,
            start,
            blocks,
            bounds,
            ties: 0,
        })
    }

    /// The block ending at `target` with `(zeta, c)` for each of its steps;
    /// `c` is the bound on the context length ending one step earlier (0
    /// where no context has closed yet).
    pub fn first_block(&self, stream: &RandomStream, target: i64) -> Result<(Block, Vec<(u64, u64)>)> {
        let start = self
            .skeleton
            .good_time(&self.quantizer, stream, target, self.caps.max_steps)
            .map_err(|e| match e {
                SimError::DepthExceeded { probed, .. } => self.exceeded(probed, 0),
                other => other,
            })?;
        let st = self.block_steps(stream, start, target)?;
        let block = Block {
            start,
            end: target,
            max_zeta: st.iter().map(|s| s.0).max().unwrap_or(0),
        };
        Ok((block, st))
    }

    /// The first `count` blocks behind `target`, without stopping rule.
    pub fn block_sequence(&self, stream: &RandomStream, target: i64, count: usize) -> Result<Vec<Block>> {
        let mut out = Vec::with_capacity(count);
        let mut end = target;
        for index in 0..count {
            let budget = self.caps.max_steps.saturating_sub((target - end) as u64);
            let start = self
                .skeleton
                .good_time(&self.quantizer, stream, end, budget)
                .map_err(|e| match e {
                    SimError::DepthExceeded { probed, .. } => self.exceeded((target - end) as u64 + probed, index as u64),
                    other => other,
                })?;
            let st = self.block_steps(stream, start, end)?;
            out.push(Block {
                start,
                end,
                max_zeta: st.iter().map(|s| s.0).max().unwrap_or(0),
            });
            end = start - 1;
        }
        Ok(out)
    }

    /// Resolves one step: the smallest depth whose cumulative lower mass
    /// exceeds `u`, and the symbol owning the interval that contains `u`.
    fn resolve(&self, u: f64, past: &[Symbol], lo_buf: &mut [f64], hi_buf: &mut [f64], ties: &mut u64) -> Option<(Symbol, u64)> {
        if u < self.floor {
            return self.quantizer.classify(u).symbol().map(|a| (a, 0));
        }
        if u == self.floor {
            *ties += 1;
        }
        let omega = |d: usize, buf: &mut [f64]| -> f64 {
            self.kernel.lower_probs(&past[..d], buf);
            buf.iter().sum()
        };
        let avail = past.len();
        if avail == 0 {
            return None;
        }
        // gallop, then bisect on the monotone coverage
        let (mut lo, mut hi) = (0usize, 1usize);
        loop {
            let w = omega(hi, hi_buf);
            if u < w {
                break;
            }
            if w == u {
                *ties += 1;
            }
            if hi == avail {
                return None;
            }
            lo = hi;
            hi = (hi * 2).min(avail);
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if u < omega(mid, hi_buf) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let depth = hi;
        self.kernel.lower_probs(&past[..depth], hi_buf);
        let mut acc = if depth == 1 {
            self.quantizer.alpha_floor()
        } else {
            omega(depth - 1, lo_buf)
        };
        if depth == 1 {
            lo_buf.copy_from_slice(&self.kernel.alphas());
        }
        let last = hi_buf.len() - 1;
        for a in 0..last {
            acc += (hi_buf[a] - lo_buf[a]).max(0.0);
            if u < acc {
                return Some((a as Symbol, depth as u64));
            }
        }
        Some((last as Symbol, depth as u64))
    }

    /// Forward construction from `record.start` to `record.target`, using
    /// nothing older than `record.start`.
    pub fn reconstruct(&self, stream: &RandomStream, record: &CoalescenceRecord) -> Result<Trajectory> {
        self.run_forward(stream, record, None, 0)
    }

    /// Same construction, but the resolution may also read `extra` filler
    /// symbols placed before `record.start`. With a valid certificate the
    /// output does not depend on the filler.
    pub fn reconstruct_with_filler(
        &self,
        stream: &RandomStream,
        record: &CoalescenceRecord,
        filler: &dyn Fn(i64) -> Symbol,
        extra: usize,
    ) -> Result<Trajectory> {
        self.run_forward(stream, record, Some(filler), extra)
    }

    fn run_forward(
        &self,
        stream: &RandomStream,
        record: &CoalescenceRecord,
        filler: Option<&dyn Fn(i64) -> Symbol>,
        extra: usize,
    ) -> Result<Trajectory> {
        let len = (record.target - record.start + 1) as usize;
        let extra = if filler.is_some() { extra } else { 0 };
        // buf holds the trajectory in reverse time order followed by the
        // filler, so that buf[pos + 1..] is the past of the step at pos
        let mut buf = vec![0 as Symbol; len + extra];
        if let Some(f) = filler {
            for j in 0..extra {
                buf[len + j] = f(record.start - 1 - j as i64);
            }
        }
        let m = self.quantizer.alphabet_size();
        let (mut lo_buf, mut hi_buf) = (vec![0.0; m], vec![0.0; m]);
        let mut depths = Vec::with_capacity(len);
        let mut ties = record.ties;
        for step in 0..len {
            let l = record.start + step as i64;
            let pos = len - 1 - step;
            let u = stream.uniform_at(l);
            let (a, d) = self
                .resolve(u, &buf[pos + 1..], &mut lo_buf, &mut hi_buf, &mut ties)
                .ok_or_else(|| {
                    SimError::InternalInvariant(format!(
                        "step at time {l} did not resolve within {} symbols of history",
                        buf.len() - pos - 1
                    ))
                })?;
            if filler.is_none() {
                if d > step as u64 {
                    return Err(SimError::InternalInvariant(format!(
                        "step at time {l} resolved at depth {d} beyond the certified history {step}"
                    )));
                }
                if let Some(&b) = record.bounds.get(step) {
                    if d > b {
                        return Err(SimError::InternalInvariant(format!(
                            "step at time {l} resolved at depth {d} above its bound {b}"
                        )));
                    }
                }
            }
            if let YSymbol::Symbol(y) = self.quantizer.classify(u) {
                if y != a {
                    return Err(SimError::InternalInvariant(format!(
                        "step at time {l} disagrees with its spontaneous symbol"
                    )));
                }
            }
            buf[pos] = a;
            depths.push(d);
        }
        let mut symbols: Vec<Symbol> = buf[..len].to_vec();
        symbols.reverse();
        Ok(Trajectory {
            start: record.start,
            symbols,
            depths,
            ties,
        })
    }

    /// Exact stationary sample of `X_m .. X_n` driven by the stream of
    /// `seed`.
    pub fn sample_window(&self, seed: u64, window_start: i64, target: i64) -> Result<Sample> {
        let stream = RandomStream::new(seed);
        self.sample_window_on(&stream, window_start, target)
    }

    pub fn sample_window_on(&self, stream: &RandomStream, window_start: i64, target: i64) -> Result<Sample> {
        let record = self.block_coalescence(stream, window_start, target)?;
        let tr = self.reconstruct(stream, &record)?;
        let skip = (window_start - tr.start) as usize;
        let mut record = record;
        record.ties = tr.ties;
        Ok(Sample {
            window_start,
            symbols: tr.symbols[skip..].to_vec(),
            depths: tr.depths[skip..].to_vec(),
            record,
        })
    }
}
