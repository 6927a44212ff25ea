mod common;

use std::sync::Arc;

use chainsim::analysis::{self, Regime, RegimeOptions, Shortcut};
use chainsim::engine::Model;
use chainsim::kernels::{RenewalMixture, RenewalWeights};
use chainsim::stats;
use chainsim::RandomStream;
use proptest::prelude::*;
use rayon::prelude::*;

#[test]
fn markov_tail_slope_matches_single_step_failure() {
    let t = analysis::estimate_tail(&common::model("markov"), 0..20_000, 30, 0.99).unwrap();
    let s = t.slope.unwrap();
    let target = 0.7f64.ln();
    assert!((s.slope - target).abs() <= 0.15 * target.abs(), "{s:?}");
    assert_eq!(t.points[0].survival, 1.0);
    for w in t.points.windows(2) {
        assert!(w[1].survival <= w[0].survival);
    }
}

#[test]
fn finite_range_renewal_has_exponential_tail() {
    let k = Arc::new(RenewalMixture::new(0.2, RenewalWeights::Uniform { support: 3 }).unwrap());
    let m = Model::natural(k).unwrap();
    let t = analysis::estimate_tail(&m, 0..5000, 60, 0.99).unwrap();
    let s = t.slope.unwrap();
    assert!(s.interval.hi < 0.0, "{s:?}");
    let r = analysis::a_sequence(&m, 200, &RegimeOptions::default()).unwrap();
    assert_eq!(r.regime, Regime::ExponentialTail);
}

#[test]
fn tail_is_reproducible_across_seed_ranges() {
    let m = common::model("binary_ar");
    let a = analysis::estimate_tail(&m, 0..5000, 20, 0.99).unwrap();
    let b = analysis::estimate_tail(&m, 5000..10_000, 20, 0.99).unwrap();
    for (p, q) in a.points.iter().zip(&b.points) {
        assert!(p.band.intersects(&q.band), "n = {}", p.n);
    }
}

#[test]
fn renewal_regime_two_bound() {
    let r = analysis::a_sequence(&common::model("renewal"), 300, &RegimeOptions::default()).unwrap();
    assert_eq!(r.a[0], r.alpha_floor);
    assert!((r.theta_mean - 4.0).abs() < 1e-12 && r.theta_mean_exact);
    // 1 - A_k <= (1 + E) sum_j P(c = j)(1 - 2 eps)(1 - j^{-a})^k
    for k in 1..=300 {
        let bound: f64 = (1..2000)
            .map(|j| 0.8f64.powi(j - 1) * 0.2 * 0.6 * (1.0 - (j as f64).powf(-0.5)).powi(k as i32))
            .sum::<f64>()
            * 5.0;
        assert!(1.0 - r.a[k] <= bound + 1e-9, "k = {k}");
    }
}

#[test]
fn regeneration_blocks_are_consistent() {
    let m = common::model("renewal");
    let r = analysis::extract_regeneration(&m, 5, 0, 200_000).unwrap();
    assert!(r.blocks.len() >= 10_000, "{}", r.blocks.len());
    let covered: u64 = r.blocks.iter().map(|b| b.len).sum::<u64>() + r.censored_tail;
    assert_eq!(covered as i64, 200_001 - (r.renewals[0] - r.window_start));
    let lens: Vec<f64> = r.blocks.iter().map(|b| b.len as f64).collect();
    let ci = stats::mean_interval(&lens, 3.0);
    let inverse_density = (r.renewals.last().unwrap() - r.renewals[0]) as f64 / (r.renewals.len() - 1) as f64;
    assert!(ci.contains(inverse_density));
    let p = stats::permutation_test(&lens, |x| stats::lag_correlation(x).abs(), 199, &RandomStream::new(1));
    assert!(p >= 0.01, "p = {p}");
    assert_eq!(r.block_symbols(&r.blocks[0]).len() as u64, r.blocks[0].len);
}

#[test]
fn concentration_bound_holds_for_markov_means() {
    let m = common::model("markov");
    let depth = analysis::estimate_tail(&m, 0..2000, 10, 0.99).unwrap().mean_depth;
    let n = 1000usize;
    let bound = analysis::concentration_bound(depth, 0.1, (1.0 / n as f64).sqrt()).unwrap();
    let deviations: usize = (0..10_000u64)
        .into_par_iter()
        .map(|seed| {
            let s = m.sample_window(seed, 1, n as i64).unwrap();
            let mean = s.symbols.iter().map(|&a| m.kernel().present(a) as f64).sum::<f64>() / n as f64;
            ((mean - 1.0 / 3.0).abs() > 0.1) as usize
        })
        .sum();
    let freq = deviations as f64 / 1e4;
    assert!(freq <= bound, "{freq} > {bound}");
}

#[test]
fn iid_kernel_is_memoryless_under_every_probe() {
    let m = Model::natural(Arc::new(
        chainsim::kernels::MarkovEmbedded::new(0, 2, vec![vec![0.3, 0.7]]).unwrap(),
    ))
    .unwrap();
    let r = analysis::compatibility_sweep(&m, 0..20_000, 3).unwrap();
    assert_eq!(r.failures(), 0);
    for o in &r.outcomes {
        let exact = if o.symbol == 0 { 0.3 } else { 0.7 };
        assert!((o.bracket.lo - exact).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn uniform_shortcut_never_exceeds_general(pick in 0usize..6, horizon in 5usize..60) {
        let (_, m) = &common::builtins()[pick];
        let opts = RegimeOptions { samples: 2000, ..Default::default() };
        let g = analysis::a_sequence(m, horizon, &opts).unwrap();
        let u = analysis::a_sequence(m, horizon, &RegimeOptions { shortcut: Shortcut::Uniform, ..opts }).unwrap();
        for (x, y) in u.a.iter().zip(&g.a) {
            prop_assert!(*x <= y + 1e-12);
        }
        prop_assert!(g.a.iter().all(|&x| x >= g.alpha_floor));
    }
}
