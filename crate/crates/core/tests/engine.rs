mod common;

use chainsim::engine::Model;
use chainsim::{RandomStream, Symbol, YSymbol};
use proptest::prelude::*;

fn fast_models() -> Vec<(&'static str, Model)> {
    common::builtins()
        .into_iter()
        .filter(|(n, _)| *n != "sign_change")
        .collect()
}

#[test]
fn every_builtin_samples_deterministically() {
    for (name, m) in common::builtins() {
        for seed in 0..50 {
            let a = m.sample_window(seed, -4, 3).unwrap();
            let b = m.sample_window(seed, -4, 3).unwrap();
            assert_eq!(a, b, "{name} seed {seed}");
            assert_eq!(a.symbols.len(), 8);
        }
    }
}

#[test]
fn markov_marginal_is_stationary() {
    let m = common::model("markov");
    let zeros = (0..20_000u64)
        .filter(|&s| m.sample_window(s, 0, 0).unwrap().symbols[0] == 0)
        .count();
    let p = zeros as f64 / 20_000.0;
    assert!((p - 2.0 / 3.0).abs() < 0.012, "{p}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn windows_agree_on_overlaps(seed in 0u64..1_000_000, a in -30i64..0, len in 1i64..20, shift in 1i64..15, pick in 0usize..7) {
        let (_, m) = &fast_models()[pick];
        let first = m.sample_window(seed, a, a + len).unwrap();
        let second = m.sample_window(seed, a + shift, a + len + shift).unwrap();
        for t in (a + shift)..=(a + len) {
            let x = first.symbols[(t - a) as usize];
            let y = second.symbols[(t - a - shift) as usize];
            prop_assert_eq!(x, y);
        }
    }

    #[test]
    fn fillers_never_change_the_sample(seed in 0u64..1_000_000, fill in any::<u64>(), pick in 0usize..7) {
        let (_, m) = &fast_models()[pick];
        let s = RandomStream::new(seed);
        let r = m.block_coalescence(&s, -3, 0).unwrap();
        let base = m.reconstruct(&s, &r).unwrap();
        let f = move |i: i64| ((fill >> (i.rem_euclid(64))) & 1) as Symbol;
        let other = m.reconstruct_with_filler(&s, &r, &f, 96).unwrap();
        prop_assert_eq!(base.symbols, other.symbols);
    }

    #[test]
    fn spontaneous_symbols_are_kept(seed in 0u64..1_000_000, pick in 0usize..7) {
        let (_, m) = &fast_models()[pick];
        let s = RandomStream::new(seed);
        let sample = m.sample_window_on(&s, -10, 0).unwrap();
        for (k, &x) in sample.symbols.iter().enumerate() {
            if let YSymbol::Symbol(y) = m.quantizer().y_at(&s, -10 + k as i64) {
                prop_assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn blocks_tile_the_certified_history(seed in 0u64..1_000_000, pick in 0usize..7) {
        let (_, m) = &fast_models()[pick];
        let s = RandomStream::new(seed);
        let r = m.block_coalescence(&s, -2, 2).unwrap();
        let total: u64 = r.blocks.iter().map(|b| b.len()).sum();
        prop_assert_eq!(total, r.depth());
        prop_assert_eq!(r.theta, 1 - r.blocks.len() as i64);
        prop_assert!(r.start <= -2);
        // lookbacks fit in the blocks behind them
        let n = r.blocks.len() as u64 - 1;
        for (j, b) in r.blocks.iter().enumerate() {
            prop_assert!(b.max_zeta + j as u64 <= n);
        }
        let tr = m.reconstruct(&s, &r).unwrap();
        for (k, &d) in tr.depths.iter().enumerate() {
            prop_assert!(d <= k as u64);
        }
    }
}
