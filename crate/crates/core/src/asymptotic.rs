//! Normal-approximation intervals: pointwise, Bonferroni and the
//! multivariate-normal equicoordinate construction.

use nalgebra::{DMatrix, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::PredictionIntervalSet;
use crate::model::{FutureSpec, ModelFit, PredictionPoint};
use crate::rng::RngStream;
use crate::scalar::Real;
use crate::stats::{nearest_rank_quantile, normal_quantile};

pub const DEFAULT_MVN_DRAWS: usize = 100_000;
const EIGEN_DROP: f64 = 1e-10;
const EIGEN_NEGATIVE: f64 = -1e-8;
const DRAW_CHUNK: usize = 8_192;

/// Covariance of the prediction error vector and its correlation matrix.
#[derive(Debug, Clone)]
pub struct PredCovariance {
    pub sigma: DMatrix<f64>,
    pub corr: DMatrix<f64>,
}

impl PredCovariance {
    /// `phi m (1 + m/N_hist) (Diag(pi) - pi pi^T)`.
    pub fn new<T: Real>(fit: &ModelFit<T>, m: u64) -> Self {
        let pi: Vec<f64> = fit.pi_hat.iter().map(|p| p.f64()).collect();
        let c = pi.len();
        let mf = m as f64;
        let scale = fit.phi_hat.f64() * mf * (1.0 + mf / fit.n_hist as f64);
        let sigma = DMatrix::from_fn(c, c, |i, j| {
            let d = if i == j { pi[i] } else { 0.0 };
            scale * (d - pi[i] * pi[j])
        });
        let sd: Vec<f64> = (0..c).map(|i| sigma[(i, i)].max(0.0).sqrt()).collect();
        let corr = DMatrix::from_fn(c, c, |i, j| {
            if i == j {
                1.0
            } else if sd[i] > 0.0 && sd[j] > 0.0 {
                sigma[(i, j)] / (sd[i] * sd[j])
            } else {
                0.0
            }
        });
        Self { sigma, corr }
    }

    /// Correlation restricted to categories with positive variance.
    pub fn active_corr(&self) -> DMatrix<f64> {
        let idx: Vec<usize> = (0..self.sigma.nrows()).filter(|&i| self.sigma[(i, i)] > 0.0).collect();
        DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.corr[(idx[a], idx[b])])
    }
}

pub fn pointwise_interval<T: Real>(fit: &ModelFit<T>, spec: &FutureSpec) -> PredictionIntervalSet<T> {
    let z = T::of(normal_quantile(1.0 - spec.alpha / 2.0));
    let p = PredictionPoint::new(fit, spec.m);
    PredictionIntervalSet::symmetric("pointwise", spec.alpha, spec.m, p.y_hat, p.sep, z)
}

pub fn bonferroni_interval<T: Real>(fit: &ModelFit<T>, spec: &FutureSpec) -> PredictionIntervalSet<T> {
    let c = fit.pi_hat.len() as f64;
    let z = T::of(normal_quantile(1.0 - spec.alpha / (2.0 * c)));
    let p = PredictionPoint::new(fit, spec.m);
    PredictionIntervalSet::symmetric("bonferroni", spec.alpha, spec.m, p.y_hat, p.sep, z)
}

/// Monte-Carlo `(1 - alpha)` quantile of `max_c |z_c|` for `z ~ N(0, R)`.
///
/// `R` may be singular; draws are generated from the eigendecomposition with
/// eigenvalues below `1e-10` dropped.
pub fn equicoordinate_quantile(
    corr: &DMatrix<f64>,
    alpha: f64,
    n_draws: usize,
    stream: &RngStream,
) -> Result<f64> {
    let c = corr.nrows();
    if c == 0 {
        return Ok(0.0);
    }
    let eig = SymmetricEigen::new(corr.clone());
    let mut factors: Vec<(f64, Vec<f64>)> = Vec::new();
    for (i, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda < EIGEN_NEGATIVE {
            return Err(Error::NotPsd(lambda));
        }
        if lambda > EIGEN_DROP {
            let v = eig.eigenvectors.column(i);
            factors.push((lambda.sqrt(), v.iter().copied().collect()));
        }
    }
    let chunks = n_draws.div_ceil(DRAW_CHUNK);
    let maxima: Vec<f64> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|chunk| {
            let mut rng = stream.stream(chunk as u64).rng();
            let len = DRAW_CHUNK.min(n_draws - chunk * DRAW_CHUNK);
            let mut z = vec![0.0; c];
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                z.iter_mut().for_each(|v| *v = 0.0);
                for (s, v) in &factors {
                    let xi: f64 = StandardNormal.sample(&mut rng);
                    for (zj, vj) in z.iter_mut().zip(v) {
                        *zj += s * vj * xi;
                    }
                }
                out.push(z.iter().fold(0.0f64, |a, x| a.max(x.abs())));
            }
            out
        })
        .collect();
    Ok(nearest_rank_quantile(&maxima, 1.0 - alpha))
}

pub fn mvn_interval<T: Real>(
    fit: &ModelFit<T>,
    spec: &FutureSpec,
    n_draws: usize,
    stream: &RngStream,
) -> Result<PredictionIntervalSet<T>> {
    let cov = PredCovariance::new(fit, spec.m);
    let q = equicoordinate_quantile(&cov.active_corr(), spec.alpha, n_draws, stream)?;
    let p = PredictionPoint::new(fit, spec.m);
    Ok(PredictionIntervalSet::symmetric("mvn", spec.alpha, spec.m, p.y_hat, p.sep, T::of(q)))
}
