//! Parametric bootstrap replicates and the intervals calibrated on them.
//!
//! One ensemble feeds every bootstrap method: symmetric, asymmetric and
//! marginal calibration, the max-absolute-studentized-residual quantile and
//! the rank-based simultaneous set.

pub mod calibrate;
pub mod rank;

pub use calibrate::{
    asymmetric_calibration, bisection_calibrate, marginal_calibration, masr_interval,
    symmetric_calibration, Calibration, CalibrationSettings, SortedThresholds,
};
pub use rank::{rank_scs_interval, rank_summary, RankSummary};

use rayon::prelude::*;

use crate::dm::{generate_dataset_with, sample_dm_vector, Dispersion};
use crate::error::{Error, Result};
use crate::model::{clamp_dispersion, fit_model, prediction_se, FutureSpec, HistoricalDataset, ModelFit};
use crate::rng::RngStream;
use crate::scalar::Real;

pub const DEFAULT_REPLICATES: usize = 10_000;

/// B x C matrices of bootstrap quantities, stored row-major (replicate-major).
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapEnsemble<T> {
    replicates: usize,
    categories: usize,
    y_hat: Vec<T>,
    sep: Vec<T>,
    y: Vec<u64>,
    z: Vec<T>,
}

impl<T: Real> BootstrapEnsemble<T> {
    /// Assembles an ensemble from per-replicate rows; `z` is derived.
    pub fn from_rows(y_hat: Vec<Vec<T>>, sep: Vec<Vec<T>>, y: Vec<Vec<u64>>) -> Result<Self> {
        let replicates = y_hat.len();
        let categories = y_hat.first().map_or(0, Vec::len);
        if sep.len() != replicates || y.len() != replicates {
            return Err(Error::Validation("ensemble rows disagree in length".into()));
        }
        let flat = |v: Vec<Vec<T>>| -> Result<Vec<T>> {
            if v.iter().any(|r| r.len() != categories) {
                return Err(Error::Validation("ragged ensemble row".into()));
            }
            Ok(v.into_iter().flatten().collect())
        };
        let y_hat = flat(y_hat)?;
        let sep = flat(sep)?;
        if y.iter().any(|r| r.len() != categories) {
            return Err(Error::Validation("ragged ensemble row".into()));
        }
        let y: Vec<u64> = y.into_iter().flatten().collect();
        if let Some(i) = sep.iter().position(|&s| !(s > T::zero())) {
            return Err(Error::Validation(format!(
                "non-positive bootstrap standard error at replicate {}, category {}",
                i / categories.max(1),
                i % categories.max(1)
            )));
        }
        let z = (0..y.len())
            .map(|i| (T::of_u64(y[i]) - y_hat[i]) / sep[i])
            .collect();
        Ok(Self {
            replicates,
            categories,
            y_hat,
            sep,
            y,
            z,
        })
    }

    pub fn replicates(&self) -> usize {
        self.replicates
    }

    pub fn categories(&self) -> usize {
        self.categories
    }

    pub fn y_hat(&self, b: usize, c: usize) -> T {
        self.y_hat[b * self.categories + c]
    }

    pub fn sep(&self, b: usize, c: usize) -> T {
        self.sep[b * self.categories + c]
    }

    pub fn y(&self, b: usize, c: usize) -> u64 {
        self.y[b * self.categories + c]
    }

    /// Studentized residual `(y* - y_hat*) / sep*`.
    pub fn z(&self, b: usize, c: usize) -> T {
        self.z[b * self.categories + c]
    }

    pub fn z_row(&self, b: usize) -> &[T] {
        &self.z[b * self.categories..(b + 1) * self.categories]
    }

    pub fn z_column(&self, c: usize) -> Vec<T> {
        (0..self.replicates).map(|b| self.z(b, c)).collect()
    }
}

fn replicate<T: Real>(
    fit: &ModelFit<T>,
    sizes: &[u64],
    pi: &[f64],
    m: u64,
    stream: RngStream,
) -> Result<(Vec<T>, Vec<T>, Vec<u64>)> {
    let mut rng = stream.rng();
    let phi_raw = fit.phi_raw.f64();
    let hist = generate_dataset_with(sizes, pi, Dispersion::ClampedPerCluster(phi_raw), &mut rng, true)?;
    let future = sample_dm_vector(m, pi, clamp_dispersion(phi_raw, m), &mut rng)?;
    let refit = fit_model::<T>(&hist)?;
    let mt = T::of_u64(m);
    let y_hat = refit.pi_hat.iter().map(|&p| mt * p).collect();
    let sep = refit
        .pi_hat
        .iter()
        .map(|&p| prediction_se(p, refit.phi_hat, m, refit.n_hist))
        .collect();
    Ok((y_hat, sep, future))
}

/// Draws `b` replicates: a historical dataset with the observed cluster sizes
/// (zero columns repaired), a future vector of size `m`, and the refit's
/// expected counts and standard errors. Replicate `i` uses stream `i`.
pub fn build_ensemble<T: Real>(
    fit: &ModelFit<T>,
    data: &HistoricalDataset,
    spec: &FutureSpec,
    b: usize,
    stream: &RngStream,
) -> Result<BootstrapEnsemble<T>> {
    if b < 2 {
        return Err(Error::Validation(format!("need at least 2 bootstrap replicates, got {b}")));
    }
    let pi: Vec<f64> = fit.pi_hat.iter().map(|p| p.f64()).collect();
    let sizes = data.cluster_sizes();
    let rows: Vec<(Vec<T>, Vec<T>, Vec<u64>)> = (0..b)
        .into_par_iter()
        .map(|i| replicate(fit, sizes, &pi, spec.m, stream.stream(i as u64)))
        .collect::<Result<_>>()?;
    let mut y_hat = Vec::with_capacity(b);
    let mut sep = Vec::with_capacity(b);
    let mut y = Vec::with_capacity(b);
    for (h, s, f) in rows {
        y_hat.push(h);
        sep.push(s);
        y.push(f);
    }
    BootstrapEnsemble::from_rows(y_hat, sep, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dm::generate_dataset;

    fn data(seed: u64, phi: f64) -> HistoricalDataset {
        generate_dataset(&[50; 10], &[0.25, 0.25, 0.5], Dispersion::Fixed(phi), &RngStream::new(seed), true).unwrap()
    }

    #[test]
    fn future_means_match_expectation() {
        let d = data(1, 5.0);
        let fit = fit_model::<f64>(&d).unwrap();
        let spec = FutureSpec::new(50, 0.05).unwrap();
        let e = build_ensemble(&fit, &d, &spec, 10_000, &RngStream::new(2)).unwrap();
        let phi = clamp_dispersion(fit.phi_raw, 50);
        for c in 0..3 {
            let mean = (0..e.replicates()).map(|b| e.y(b, c) as f64).sum::<f64>() / 10_000.0;
            let p = fit.pi_hat[c];
            let se = (phi * 50.0 * p * (1.0 - p) / 10_000.0).sqrt();
            assert!((mean - 50.0 * p).abs() < 3.0 * se, "c={c} mean={mean}");
        }
        for b in 0..e.replicates() {
            assert_eq!((0..3).map(|c| e.y(b, c)).sum::<u64>(), 50);
        }
    }

    #[test]
    fn residuals_are_near_pivotal_without_overdispersion() {
        let d = data(3, 1.01);
        let mut fit = fit_model::<f64>(&d).unwrap();
        fit.phi_raw = 1.01;
        fit.phi_hat = 1.01;
        let spec = FutureSpec::new(50, 0.05).unwrap();
        let e = build_ensemble(&fit, &d, &spec, 4_000, &RngStream::new(4)).unwrap();
        for c in 0..3 {
            let col: Vec<f64> = e.z_column(c);
            let sd = crate::stats::variance(&col).sqrt();
            assert!((0.9..=1.15).contains(&sd), "c={c} sd={sd}");
        }
    }

    #[test]
    fn ensemble_is_deterministic_across_thread_counts() {
        let d = data(5, 5.0);
        let fit = fit_model::<f64>(&d).unwrap();
        let spec = FutureSpec::new(50, 0.05).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| build_ensemble(&fit, &d, &spec, 1_000, &RngStream::new(6)).unwrap());
        let b = four.install(|| build_ensemble(&fit, &d, &spec, 1_000, &RngStream::new(6)).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn rare_categories_keep_positive_standard_errors() {
        let d = HistoricalDataset::new(vec![vec![1, 9], vec![0, 10], vec![0, 10]]).unwrap();
        let fit = fit_model::<f64>(&d).unwrap();
        let spec = FutureSpec::new(10, 0.05).unwrap();
        let e = build_ensemble(&fit, &d, &spec, 2_000, &RngStream::new(7)).unwrap();
        assert!((0..e.replicates()).all(|b| e.sep(b, 0) > 0.0));
    }
}
