//! Small statistical helpers shared by the interval methods.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::scalar::Real;

/// Standard normal quantile.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// 1-based order index of the nearest-rank `p` quantile in a sample of `n`.
pub fn nearest_rank_index(p: f64, n: usize) -> usize {
    let k = (p * n as f64 - 1e-9).ceil() as usize;
    k.clamp(1, n)
}

/// Nearest-rank empirical quantile: the smallest sample value with at least a
/// fraction `p` of the sample at or below it.
pub fn nearest_rank_quantile<T: Real>(values: &[T], p: f64) -> T {
    assert!(!values.is_empty(), "quantile of empty sample");
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("NaN in quantile input"));
    v[nearest_rank_index(p, v.len()) - 1]
}

/// Within-sample ranks `1..=n`, ties broken by position (earlier index ranks lower).
pub fn stable_ranks<T: PartialOrd>(values: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("NaN in rank input"));
    let mut ranks = vec![0usize; values.len()];
    for (r, &i) in order.iter().enumerate() {
        ranks[i] = r + 1;
    }
    ranks
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample variance with `n - 1` denominator.
pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() as f64 - 1.0)
}
