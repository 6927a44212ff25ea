//! Small statistical helpers for the replica farms.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::streams::RandomStream;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn excludes_zero(&self) -> bool {
        !self.contains(0.0)
    }
}

/// Two-sided standard normal quantile for a confidence `level`.
pub fn z_for_level(level: f64) -> f64 {
    let n = Normal::standard();
    n.inverse_cdf(0.5 + level / 2.0)
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: u64, n: u64, z: f64) -> Interval {
    if n == 0 {
        return Interval { lo: 0.0, hi: 1.0 };
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    Interval {
        lo: (centre - half).max(0.0),
        hi: (centre + half).min(1.0),
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Normal-approximation interval for the mean.
pub fn mean_interval(xs: &[f64], z: f64) -> Interval {
    let m = mean(xs);
    let half = z * (variance(xs) / xs.len() as f64).sqrt();
    Interval { lo: m - half, hi: m + half }
}

/// Pearson correlation of consecutive terms.
pub fn lag_correlation(xs: &[f64]) -> f64 {
    if xs.len() < 3 {
        return 0.0;
    }
    pearson(&xs[..xs.len() - 1], &xs[1..])
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let (ma, mb) = (mean(a), mean(b));
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    sab / (saa * sbb).sqrt()
}

fn shuffle<T>(xs: &mut [T], stream: &RandomStream, round: u64) {
    let base = (round as i64) << 32;
    for i in (1..xs.len()).rev() {
        let j = stream.index_at(base + i as i64, i + 1);
        xs.swap(i, j);
    }
}

/// Permutation p-value for `statistic`, larger meaning more extreme. The
/// observed value counts as one of the permutations.
pub fn permutation_test<T: Clone>(
    data: &[T],
    statistic: impl Fn(&[T]) -> f64,
    resamples: u64,
    stream: &RandomStream,
) -> f64 {
    let observed = statistic(data);
    let mut work = data.to_vec();
    let mut extreme = 1u64;
    for r in 0..resamples {
        shuffle(&mut work, stream, r);
        if statistic(&work) >= observed {
            extreme += 1;
        }
    }
    extreme as f64 / (resamples + 1) as f64
}

/// Percentile bootstrap interval of `statistic` at confidence `level`.
pub fn bootstrap<T: Clone>(
    data: &[T],
    statistic: impl Fn(&[T]) -> f64,
    resamples: u64,
    level: f64,
    stream: &RandomStream,
) -> Interval {
    let n = data.len();
    let mut values = Vec::with_capacity(resamples as usize);
    let mut work = Vec::with_capacity(n);
    for r in 0..resamples {
        work.clear();
        let base = (r as i64) << 32;
        work.extend((0..n).map(|i| data[stream.index_at(base + i as i64, n)].clone()));
        let v = statistic(&work);
        if v.is_finite() {
            values.push(v);
        }
    }
    if values.is_empty() {
        return Interval {
            lo: f64::NAN,
            hi: f64::NAN,
        };
    }
    values.sort_by(f64::total_cmp);
    let q = |p: f64| values[((p * (values.len() - 1) as f64).round() as usize).min(values.len() - 1)];
    let tail = (1.0 - level) / 2.0;
    Interval {
        lo: q(tail),
        hi: q(1.0 - tail),
    }
}

/// Ordinary least squares `y = intercept + slope x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let (mx, my) = (mean(xs), mean(ys));
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_se = if n > 2 {
        let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        (rss / (n - 2) as f64 / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    Some(LineFit {
        slope,
        intercept,
        slope_se,
    })
}
