//! Diagnostics built on top of the engine: regime classification from the
//! `A_k` sequence, empirical tails of the coalescence depth, regeneration
//! blocks and compatibility checks against the kernel.

use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::Model;
use crate::error::{Result, SimError};
use crate::kernels::ContinuityClass;
use crate::skeletons::{ContextLaw, ContextLen};
use crate::stats::{self, Interval};
use crate::streams::RandomStream;
use crate::Symbol;

/// Which bound on `P(U_0 > alpha_k^c)` feeds `A_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shortcut {
    /// Mixture over the law of the context bound.
    #[default]
    General,
    /// `1 - alpha_k` with the rate taken uniformly over context lengths.
    Uniform,
    /// Rates equal one beyond the finite range `h`; only the probability
    /// that the context outgrows `h^{-1}(k)` remains.
    FiniteRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    AlmostSurelyFinite,
    SummableTail,
    ExponentialTail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LawSource {
    Degenerate,
    Geometric { p: f64 },
    Empirical { samples: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeOptions {
    pub shortcut: Shortcut,
    /// Replicas for quantities without closed form.
    pub samples: u64,
    pub seed: u64,
}

impl Default for RegimeOptions {
    fn default() -> Self {
        Self {
            shortcut: Shortcut::General,
            samples: 20_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub horizon: usize,
    pub shortcut: Shortcut,
    pub alpha_floor: f64,
    /// `E|theta_bar[0]|` as used (upper end of the interval when estimated).
    pub theta_mean: f64,
    pub theta_mean_exact: bool,
    pub theta_mean_interval: Option<Interval>,
    pub context_law: LawSource,
    /// `A_0 .. A_K`.
    pub a: Vec<f64>,
    /// `sum_{k=1}^{K} prod_{j<k} A_j` after each `k`.
    pub product_sums: Vec<f64>,
    /// `sum_{k<=K} (1 - A_k)` after each `k`.
    pub defect_sums: Vec<f64>,
    /// Increment of the defect sum over the last tenth of the horizon.
    pub defect_increment: f64,
    pub theta_tail_exponential: bool,
    pub defect_exponential: bool,
    pub regime: Regime,
}

enum Law {
    Analytic(ContextLaw),
    /// `pmf[j] = P(c = j)`.
    Table(Vec<f64>),
}

impl Law {
    fn pmf(&self, j: usize) -> f64 {
        match self {
            Law::Analytic(l) => l.pmf(j),
            Law::Table(t) => t.get(j).copied().unwrap_or(0.0),
        }
    }

    fn survival(&self, j: usize) -> f64 {
        match self {
            Law::Analytic(l) => l.survival(j),
            Law::Table(t) => t.iter().skip(j + 1).sum(),
        }
    }

    /// Last index worth summing before the remainder is negligible.
    fn support_end(&self) -> usize {
        match self {
            Law::Analytic(ContextLaw::Degenerate) => 0,
            Law::Analytic(ContextLaw::Geometric { p }) => {
                let p = p.clamp(1e-12, 1.0);
                if p >= 1.0 {
                    1
                } else {
                    ((1e-16f64).ln() / (1.0 - p).ln()).ceil().min(1e6) as usize + 1
                }
            }
            Law::Table(t) => t.len().saturating_sub(1),
        }
    }
}

/// `-theta_bar[0]` for `samples` streams.
fn theta_bar_samples(model: &Model, samples: u64, seed: u64) -> Result<Vec<f64>> {
    let base = RandomStream::new(seed);
    (0..samples)
        .into_par_iter()
        .map(|r| {
            let s = base.derive(r);
            let t = model
                .skeleton()
                .good_time(model.quantizer(), &s, 0, model.caps().max_steps)?;
            Ok(-t as f64)
        })
        .collect()
}

/// Empirical law of the context bound carried into time 0.
fn empirical_context_law(model: &Model, samples: u64, seed: u64) -> Result<Vec<f64>> {
    let base = RandomStream::new(seed ^ 0x5bd1_e995);
    let cs: Vec<usize> = (0..samples)
        .into_par_iter()
        .map(|r| {
            let s = base.derive(r);
            let start = model
                .skeleton()
                .good_time(model.quantizer(), &s, 0, model.caps().max_steps)?;
            let mut t = model.skeleton().tracker(model.quantizer().alphabet_size());
            for l in start..0 {
                t.push(model.quantizer().y_at(&s, l));
            }
            Ok(match t.current() {
                ContextLen::Determined(c) => c,
                ContextLen::NeedMore => 0,
            })
        })
        .collect::<Result<_>>()?;
    let top = cs.iter().copied().max().unwrap_or(0);
    let mut pmf = vec![0.0; top + 1];
    for c in &cs {
        pmf[*c] += 1.0 / samples as f64;
    }
    Ok(pmf)
}

/// Defects below this are rounding noise of the truncated mixture.
const DEFECT_FLOOR: f64 = 1e-13;

/// Compares the log-decrement of `xs` over the two last quarters of the
/// range where it is above the rounding floor: exponential decay doubles
/// it, polynomial and stretched-exponential decay grow it by less.
fn decays_exponentially(xs: &[f64]) -> bool {
    let Some(k) = xs.iter().rposition(|&x| x > DEFECT_FLOOR) else {
        return true;
    };
    if k + 1 < xs.len() && k < 8 {
        // reaches the floor almost at once: finite range
        return true;
    }
    if k < 8 {
        return false;
    }
    let (q, h, e) = (xs[k / 4], xs[k / 2], xs[k]);
    let d1 = (h / q).ln();
    let d2 = (e / h).ln();
    d1 < 0.0 && d2 <= 1.8 * d1
}

/// The `A_k` sequence up to `horizon` and the regime it certifies.
pub fn a_sequence(model: &Model, horizon: usize, opts: &RegimeOptions) -> Result<RegimeReport> {
    if horizon == 0 {
        return Err(SimError::InvalidArgument("horizon must be positive".into()));
    }
    let kernel = model.kernel();
    let sk = model.skeleton();
    let floor = model.alpha_floor();
    let alphas = kernel.alphas();

    let (theta_mean, theta_mean_exact, theta_mean_interval) = match sk.theta_bar_mean(&alphas) {
        Ok(m) if m.value.is_finite() => (m.value, m.exact, None),
        _ => {
            let xs = theta_bar_samples(model, opts.samples.max(100), opts.seed)?;
            let ci = stats::mean_interval(&xs, stats::z_for_level(0.99));
            (ci.hi, false, Some(ci))
        }
    };

    let extended = model.variant() == ContinuityClass::Extended;
    let (law, context_law) = if extended {
        (Law::Analytic(ContextLaw::Degenerate), LawSource::Degenerate)
    } else {
        match sk.context_law(&alphas) {
            Some(l @ ContextLaw::Degenerate) => (Law::Analytic(l), LawSource::Degenerate),
            Some(l @ ContextLaw::Geometric { p }) => (Law::Analytic(l), LawSource::Geometric { p }),
            None => {
                let n = opts.samples.max(100);
                (
                    Law::Table(empirical_context_law(model, n, opts.seed)?),
                    LawSource::Empirical { samples: n },
                )
            }
        }
    };

    let rate = |k: usize, j: usize| -> Result<f64> {
        if extended {
            kernel.alpha_bar_table(sk, k)
        } else {
            kernel.alpha_table(sk, k, j)
        }
    };
    let jmax = law.support_end();
    let hinv = |k: usize| -> Option<usize> {
        (0..=jmax).find(|&j| kernel.slc_threshold(j).is_some_and(|h| h > k))
    };
    if opts.shortcut == Shortcut::FiniteRange && kernel.slc_threshold(1).is_none() {
        return Err(SimError::InvalidArgument(format!(
            "{} has no finite-range bound",
            kernel.family().name()
        )));
    }

    let mut a = Vec::with_capacity(horizon + 1);
    a.push(floor);
    for k in 1..=horizon {
        let exceed = match opts.shortcut {
            Shortcut::General => {
                let mut p = 0.0;
                for j in 0..=jmax {
                    let w = law.pmf(j);
                    if w > 0.0 {
                        p += w * (1.0 - rate(k, j)?);
                    }
                }
                p + law.survival(jmax) * (1.0 - floor)
            }
            Shortcut::Uniform => 1.0 - rate(k, 1 << 40)?,
            Shortcut::FiniteRange => match hinv(k) {
                Some(0) => 1.0 - floor,
                Some(j) => (1.0 - floor) * law.survival(j - 1),
                None => 0.0,
            },
        };
        let v = (1.0 - (theta_mean + 1.0) * exceed.max(0.0)).max(floor).min(1.0);
        a.push(v);
    }

    let mut product_sums = Vec::with_capacity(horizon + 1);
    let mut defect_sums = Vec::with_capacity(horizon + 1);
    let (mut prod, mut psum, mut dsum) = (1.0, 0.0, 0.0);
    for (k, &ak) in a.iter().enumerate() {
        if k >= 1 {
            prod *= a[k - 1];
            psum += prod;
        }
        dsum += 1.0 - ak;
        product_sums.push(psum);
        defect_sums.push(dsum);
    }
    let tenth = horizon - horizon / 10;
    let defect_increment = dsum - defect_sums[tenth.min(horizon)];
    let defects: Vec<f64> = a.iter().map(|x| 1.0 - x).collect();
    let defect_exponential = decays_exponentially(&defects);
    let theta_tail_exponential = !matches!(sk, crate::Skeleton::Custom(_));

    let summable = defect_increment < 1e-6;
    // the product's last terms keep a fixed fraction of their midpoint value
    let half = horizon / 2;
    let diverges = {
        let last = product_sums[horizon] - product_sums[horizon - 1];
        let mid = if half >= 1 {
            product_sums[half] - product_sums[half - 1]
        } else {
            last
        };
        mid > 0.0 && last >= 0.5 * mid
    };
    let regime = if summable && defect_exponential && theta_tail_exponential {
        Regime::ExponentialTail
    } else if summable {
        Regime::SummableTail
    } else if diverges {
        Regime::AlmostSurelyFinite
    } else {
        Regime::Inconclusive
    };

    Ok(RegimeReport {
        horizon,
        shortcut: opts.shortcut,
        alpha_floor: floor,
        theta_mean,
        theta_mean_exact,
        theta_mean_interval,
        context_law,
        a,
        product_sums,
        defect_sums,
        defect_increment,
        theta_tail_exponential,
        defect_exponential,
        regime,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailPoint {
    pub n: u64,
    /// Replicas with `-Lambda[0] > n`.
    pub hits: u64,
    pub survival: f64,
    pub band: Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub interval: Interval,
    pub from: u64,
    pub to: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub replicas: u64,
    /// Replicas stopped by the depth cap, counted as exceeding every `n`.
    pub censored: u64,
    pub level: f64,
    pub points: Vec<TailPoint>,
    /// Mean of `-Lambda[0]` over uncensored replicas.
    pub mean_depth: f64,
    pub mean_interval: Interval,
    /// Fit of `ln P(-Lambda[0] > n)` against `n`; absent when censoring
    /// exceeds 1% or too few hits remain.
    pub slope: Option<SlopeFit>,
}

/// `-Lambda[0]` for every seed, `None` when the depth cap was hit.
pub fn coalescence_depths(model: &Model, seeds: Range<u64>) -> Result<Vec<Option<u64>>> {
    seeds
        .into_par_iter()
        .map(|seed| {
            let s = RandomStream::new(seed);
            match model.block_coalescence(&s, 0, 0) {
                Ok(r) => Ok(Some((-r.lambda) as u64)),
                Err(e) if e.is_depth_exceeded() => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect()
}

fn survival_curve(depths: &[Option<u64>], max_n: u64) -> Vec<u64> {
    let mut hist = vec![0u64; max_n as usize + 2];
    for d in depths {
        let i = d.map_or(max_n + 1, |d| d.min(max_n + 1));
        hist[i as usize] += 1;
    }
    // hits(n) = #{d > n}
    let mut hits = vec![0u64; max_n as usize + 1];
    let mut acc = 0;
    for n in (0..=max_n as usize).rev() {
        acc += hist[n + 1];
        hits[n] = acc;
    }
    hits
}

fn fit_log_tail(hits: &[u64], replicas: u64) -> Option<(f64, u64, u64)> {
    let top = hits.iter().rposition(|&h| h >= 30)?;
    let from = (top / 10).max(1).min(top);
    if top < from + 2 {
        return None;
    }
    let xs: Vec<f64> = (from..=top).map(|n| n as f64).collect();
    let ys: Vec<f64> = (from..=top).map(|n| (hits[n] as f64 / replicas as f64).ln()).collect();
    stats::fit_line(&xs, &ys).map(|f| (f.slope, from as u64, top as u64))
}

/// Empirical survival of `-Lambda[0]` over the given seeds.
pub fn estimate_tail(model: &Model, seeds: Range<u64>, max_n: u64, level: f64) -> Result<TailEstimate> {
    let replicas = seeds.end.saturating_sub(seeds.start);
    if replicas < 100 {
        return Err(SimError::InvalidArgument(format!(
            "tail estimation needs at least 100 replicas, got {replicas}"
        )));
    }
    let depths = coalescence_depths(model, seeds.clone())?;
    Ok(summarize_tail(&depths, max_n, level, seeds.start))
}

/// Tail summary of precomputed depths; `seed` drives the bootstrap.
pub fn summarize_tail(depths: &[Option<u64>], max_n: u64, level: f64, seed: u64) -> TailEstimate {
    let replicas = depths.len() as u64;
    let censored = depths.iter().filter(|d| d.is_none()).count() as u64;
    let z = stats::z_for_level(level);
    let hits = survival_curve(depths, max_n);
    let points = hits
        .iter()
        .enumerate()
        .map(|(n, &h)| TailPoint {
            n: n as u64,
            hits: h,
            survival: h as f64 / replicas as f64,
            band: stats::wilson(h, replicas, z),
        })
        .collect();
    let done: Vec<f64> = depths.iter().flatten().map(|&d| d as f64).collect();
    let mean_depth = stats::mean(&done);
    let mean_interval = stats::mean_interval(&done, z);

    let slope = if censored * 100 > replicas {
        None
    } else {
        // the fit needs survival beyond max_n too
        let top = done.iter().fold(0.0f64, |a, &b| a.max(b)) as u64;
        let full = survival_curve(depths, top.max(max_n));
        fit_log_tail(&full, replicas).map(|(slope, from, to)| {
            let stream = RandomStream::new(seed).derive(0x7a11);
            let ci = stats::bootstrap(
                depths,
                |d| {
                    let h = survival_curve(d, to);
                    let xs: Vec<f64> = (from..=to).map(|n| n as f64).collect();
                    let ys: Vec<f64> = (from..=to)
                        .map(|n| (h[n as usize].max(1) as f64 / d.len() as f64).ln())
                        .collect();
                    stats::fit_line(&xs, &ys).map_or(f64::NAN, |f| f.slope)
                },
                200,
                level,
                &stream,
            );
            SlopeFit {
                slope,
                interval: ci,
                from,
                to,
            }
        })
    };

    TailEstimate {
        replicas,
        censored,
        level,
        points,
        mean_depth,
        mean_interval,
        slope,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegenBlock {
    pub start: i64,
    pub len: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegenerationReport {
    pub window_start: i64,
    pub target: i64,
    /// Times from which the forward construction never reads further back,
    /// up to the end of the horizon.
    pub renewals: Vec<i64>,
    /// Blocks between consecutive renewals; the stretch after the last
    /// renewal is right-censored and left out.
    pub blocks: Vec<RegenBlock>,
    pub censored_tail: u64,
    pub symbols: Vec<Symbol>,
    pub density: f64,
    pub mean_len: f64,
    pub var_len: f64,
    pub lag_correlation: f64,
}

impl RegenerationReport {
    pub fn block_symbols(&self, b: &RegenBlock) -> &[Symbol] {
        let i = (b.start - self.window_start) as usize;
        &self.symbols[i..i + b.len as usize]
    }
}

/// Renewal times of a perfect sample of `[m, n]`: `t` qualifies when every
/// step `l` in `[t, n]` resolves with depth at most `l - t`.
pub fn extract_regeneration(model: &Model, seed: u64, window_start: i64, target: i64) -> Result<RegenerationReport> {
    let sample = model.sample_window(seed, window_start, target)?;
    Ok(regeneration_from(window_start, target, &sample.symbols, &sample.depths))
}

pub fn regeneration_from(window_start: i64, target: i64, symbols: &[Symbol], depths: &[u64]) -> RegenerationReport {
    let len = depths.len();
    let mut renewals = Vec::new();
    let mut suffix_min = i64::MAX;
    for k in (0..len).rev() {
        let l = window_start + k as i64;
        suffix_min = suffix_min.min(l - depths[k] as i64);
        if suffix_min >= l {
            renewals.push(l);
        }
    }
    renewals.reverse();
    let blocks: Vec<RegenBlock> = renewals
        .windows(2)
        .map(|w| RegenBlock {
            start: w[0],
            len: (w[1] - w[0]) as u64,
        })
        .collect();
    let lens: Vec<f64> = blocks.iter().map(|b| b.len as f64).collect();
    RegenerationReport {
        window_start,
        target,
        censored_tail: renewals.last().map_or(len as u64, |&t| (target - t + 1) as u64),
        density: renewals.len() as f64 / len.max(1) as f64,
        mean_len: stats::mean(&lens),
        var_len: stats::variance(&lens),
        lag_correlation: stats::lag_correlation(&lens),
        renewals,
        blocks,
        symbols: symbols.to_vec(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityOutcome {
    /// Conditioning suffix, most recent symbol first.
    pub probe: Vec<Symbol>,
    pub symbol: Symbol,
    pub events: u64,
    pub hits: u64,
    pub estimate: f64,
    pub interval: Interval,
    pub bracket: Interval,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    pub replicas: u64,
    pub censored: u64,
    pub outcomes: Vec<CompatibilityOutcome>,
}

impl CompatibilityReport {
    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| o.verdict == Verdict::Fail).count()
    }

    pub fn passes(&self) -> usize {
        self.outcomes.iter().filter(|o| o.verdict == Verdict::Pass).count()
    }
}

/// Wilson multiplier used by the compatibility checks.
pub const COMPAT_Z: f64 = 4.0;
/// Fewer conditioning events than this make a probe inconclusive.
pub const MIN_EVENTS: u64 = 200;

/// Perfect samples of `X_{-depth} .. X_0`, one per seed.
fn probe_windows(model: &Model, seeds: Range<u64>, depth: usize) -> Result<(Vec<Vec<Symbol>>, u64)> {
    let res: Vec<Option<Vec<Symbol>>> = seeds
        .into_par_iter()
        .map(|seed| match model.sample_window(seed, -(depth as i64), 0) {
            Ok(s) => Ok(Some(s.symbols)),
            Err(e) if e.is_depth_exceeded() => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let censored = res.iter().filter(|w| w.is_none()).count() as u64;
    Ok((res.into_iter().flatten().collect(), censored))
}

fn bracket(model: &Model, probe: &[Symbol], a: Symbol) -> Interval {
    let k = model.kernel();
    let m = model.quantizer().alphabet_size();
    let mut lp = vec![0.0; m];
    k.lower_probs(probe, &mut lp);
    let others: f64 = lp.iter().enumerate().filter(|&(b, _)| b != a as usize).map(|(_, p)| p).sum();
    Interval {
        lo: lp[a as usize],
        hi: 1.0 - others,
    }
}

fn outcome(model: &Model, probe: Vec<Symbol>, a: Symbol, events: u64, hits: u64) -> CompatibilityOutcome {
    let interval = stats::wilson(hits, events, COMPAT_Z);
    let bracket = bracket(model, &probe, a);
    // slack for the rounding applied to lower probabilities
    let widened = Interval {
        lo: bracket.lo - 1e-9,
        hi: bracket.hi + 1e-9,
    };
    let verdict = if events < MIN_EVENTS {
        Verdict::Inconclusive
    } else if interval.intersects(&widened) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    CompatibilityOutcome {
        probe,
        symbol: a,
        events,
        hits,
        estimate: if events > 0 { hits as f64 / events as f64 } else { f64::NAN },
        interval,
        bracket,
        verdict,
    }
}

/// Empirical `P(X_0 = a | X_{-|w|}^{-1} = w)` against the kernel's bracket.
pub fn verify_compatibility(model: &Model, seeds: Range<u64>, probe: &[Symbol], a: Symbol) -> Result<CompatibilityOutcome> {
    let m = model.quantizer().alphabet_size();
    if probe.iter().chain(std::iter::once(&a)).any(|&s| s as usize >= m) {
        return Err(SimError::InvalidArgument("probe symbol outside the alphabet".into()));
    }
    let d = probe.len();
    let (windows, _) = probe_windows(model, seeds, d)?;
    let (mut events, mut hits) = (0, 0);
    for w in &windows {
        // w[d] is X_0, w[d - 1 - t] is X_{-1-t}
        if (0..d).all(|t| w[d - 1 - t] == probe[t]) {
            events += 1;
            hits += (w[d] == a) as u64;
        }
    }
    Ok(outcome(model, probe.to_vec(), a, events, hits))
}

/// Every probe of length `1..=max_depth` and every symbol, from one batch of
/// samples.
pub fn compatibility_sweep(model: &Model, seeds: Range<u64>, max_depth: usize) -> Result<CompatibilityReport> {
    let m = model.quantizer().alphabet_size();
    if max_depth == 0 || (m as f64).powi(max_depth as i32) > 1e6 {
        return Err(SimError::InvalidArgument("probe depth must be in 1..=log_m(10^6)".into()));
    }
    let replicas = seeds.end.saturating_sub(seeds.start);
    let (windows, censored) = probe_windows(model, seeds, max_depth)?;
    let mut outcomes = Vec::new();
    for d in 1..=max_depth {
        let rows = m.pow(d as u32);
        let mut counts = vec![vec![0u64; m]; rows];
        for w in &windows {
            let x0 = w[max_depth] as usize;
            let mut idx = 0;
            for t in (0..d).rev() {
                idx = idx * m + w[max_depth - 1 - t] as usize;
            }
            counts[idx][x0] += 1;
        }
        for (idx, row) in counts.iter().enumerate() {
            let mut probe = Vec::with_capacity(d);
            let mut r = idx;
            for _ in 0..d {
                probe.push((r % m) as Symbol);
                r /= m;
            }
            let events: u64 = row.iter().sum();
            for a in 0..m {
                outcomes.push(outcome(model, probe.clone(), a as Symbol, events, row[a]));
            }
        }
    }
    Ok(CompatibilityReport {
        replicas,
        censored,
        outcomes,
    })
}

/// `2 exp(-2 eps^2 / ((1 + E)^2 |delta f|^2))` for a function with
/// oscillation vector norm `delta_f_norm`.
pub fn concentration_bound(mean_depth: f64, epsilon: f64, delta_f_norm: f64) -> Result<f64> {
    if !(mean_depth >= 0.0 && mean_depth.is_finite()) {
        return Err(SimError::InvalidArgument("mean depth must be finite and nonnegative".into()));
    }
    if !(delta_f_norm > 0.0) {
        return Err(SimError::InvalidArgument("oscillation norm must be positive".into()));
    }
    let d = (1.0 + mean_depth) * delta_f_norm;
    Ok(2.0 * (-2.0 * epsilon * epsilon / (d * d)).exp())
}
