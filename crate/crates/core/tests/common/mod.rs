//! Built-in kernel fixtures shared by the integration suites.
#![allow(dead_code)]

use std::sync::Arc;

use chainsim::cli::{ArParams, KernelConfig};
use chainsim::engine::Model;
use chainsim::kernels::{Coefficients, DampingFn, GrowthFn, RenewalWeights, WindowFn};
use chainsim::Kernel;

pub fn geo(scale: f64, ratio: f64) -> Coefficients {
    Coefficients::Geometric { scale, ratio }
}

pub fn builtin_configs() -> Vec<(&'static str, KernelConfig)> {
    vec![
        (
            "markov",
            KernelConfig::Markov {
                order: 1,
                alphabet: 2,
                table: vec![vec![0.9, 0.1], vec![0.2, 0.8]],
            },
        ),
        (
            "binary_ar",
            KernelConfig::BinaryAr {
                intercept: 0.2,
                coefficients: geo(0.8, 0.5),
            },
        ),
        (
            "parity_ar",
            KernelConfig::ParityAr {
                standard: ArParams {
                    intercept: 0.5,
                    coefficients: geo(0.5, 0.5),
                },
                alternative: ArParams {
                    intercept: -0.5,
                    coefficients: geo(-0.7, 0.4),
                },
            },
        ),
        (
            "proportion",
            KernelConfig::Proportion {
                b1: 0.6,
                c: 0.5,
                sigma: 0.3,
                beta: geo(0.5, 0.5),
                gamma: geo(0.25, 0.5),
            },
        ),
        (
            "renewal",
            KernelConfig::Renewal {
                epsilon: 0.2,
                weights: RenewalWeights::PowerGeometric { exponent: 0.5 },
            },
        ),
        (
            "majority",
            KernelConfig::Majority {
                window: WindowFn::Logarithmic { scale: 1.0 },
                eps_odd: 0.35,
                eps_even: 0.38,
                epsilon: 0.1,
                p_inf: 0.4,
            },
        ),
        (
            "run_length",
            KernelConfig::RunLength {
                epsilon: 0.2,
                growth: GrowthFn::Power {
                    scale: 2.0,
                    exponent: 2.0,
                },
            },
        ),
        (
            "sign_change",
            KernelConfig::SignChange {
                coefficients: geo(0.4, 0.5),
                damping: DampingFn::Exponential,
                beta: 1.0,
            },
        ),
    ]
}

pub fn kernel(name: &str) -> Arc<dyn Kernel> {
    builtin_configs()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, c)| c.build().unwrap())
        .unwrap_or_else(|| panic!("no built-in {name}"))
}

pub fn model(name: &str) -> Model {
    Model::natural(kernel(name)).unwrap()
}

pub fn builtins() -> Vec<(&'static str, Model)> {
    builtin_configs()
        .into_iter()
        .map(|(n, c)| (n, Model::natural(c.build().unwrap()).unwrap()))
        .collect()
}
