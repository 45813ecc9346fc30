//! Historical control data, the quasi-multinomial fit and prediction standard errors.
//!
//! The fit is the intercept-only multinomial model: the pooled proportions are the
//! exact MLE, and overdispersion is estimated with the bias-corrected Pearson
//! estimator `(chi2 / df) / (1 + s_bar)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Lower clamp applied to dispersion estimates at or below one.
pub const PHI_FLOOR: f64 = 1.01;
/// Fraction of the draw size used as the upper clamp on dispersion.
pub const PHI_CEILING_FRACTION: f64 = 0.975;

/// K x C matrix of historical counts, one row per study.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoricalDataset {
    counts: Vec<Vec<u64>>,
    sizes: Vec<u64>,
    categories: Vec<String>,
    studies: Vec<String>,
}

impl HistoricalDataset {
    /// Builds a dataset with generated labels (`cat1..`, `study1..`).
    pub fn new(counts: Vec<Vec<u64>>) -> Result<Self> {
        let c = counts.first().map_or(0, Vec::len);
        let categories = (1..=c).map(|i| format!("cat{i}")).collect();
        let studies = (1..=counts.len()).map(|i| format!("study{i}")).collect();
        Self::with_labels(counts, categories, studies)
    }

    pub fn with_labels(
        counts: Vec<Vec<u64>>,
        categories: Vec<String>,
        studies: Vec<String>,
    ) -> Result<Self> {
        let k = counts.len();
        let c = categories.len();
        if k < 2 {
            return Err(Error::DegenerateDesign(format!(
                "need at least 2 clusters, got K={k}"
            )));
        }
        if c < 2 {
            return Err(Error::DegenerateDesign(format!(
                "need at least 2 categories, got C={c}"
            )));
        }
        if studies.len() != k {
            return Err(Error::Validation(format!(
                "{} study labels for {k} rows",
                studies.len()
            )));
        }
        let mut sizes = Vec::with_capacity(k);
        for (i, row) in counts.iter().enumerate() {
            if row.len() != c {
                return Err(Error::Validation(format!(
                    "row {} has {} cells, expected {c}",
                    i + 1,
                    row.len()
                )));
            }
            let n: u64 = row.iter().sum();
            if n == 0 {
                return Err(Error::Validation(format!(
                    "row {} ({}) has zero total count",
                    i + 1,
                    studies[i]
                )));
            }
            sizes.push(n);
        }
        Ok(Self {
            counts,
            sizes,
            categories,
            studies,
        })
    }

    pub fn clusters(&self) -> usize {
        self.counts.len()
    }

    pub fn categories(&self) -> usize {
        self.categories.len()
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn row(&self, k: usize) -> &[u64] {
        &self.counts[k]
    }

    pub fn cluster_sizes(&self) -> &[u64] {
        &self.sizes
    }

    pub fn category_labels(&self) -> &[String] {
        &self.categories
    }

    pub fn study_labels(&self) -> &[String] {
        &self.studies
    }

    /// Total number of historical units, `N_hist`.
    pub fn total(&self) -> u64 {
        self.sizes.iter().sum()
    }

    pub fn column_totals(&self) -> Vec<u64> {
        let mut totals = vec![0u64; self.categories()];
        for row in &self.counts {
            for (t, &x) in totals.iter_mut().zip(row) {
                *t += x;
            }
        }
        totals
    }

    pub fn min_cluster_size(&self) -> u64 {
        self.sizes.iter().copied().min().unwrap_or(0)
    }

    pub fn relabel_categories(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.categories() {
            return Err(Error::Validation(format!(
                "{} labels for {} categories",
                labels.len(),
                self.categories()
            )));
        }
        self.categories = labels;
        Ok(self)
    }
}

/// Result of fitting the intercept-only quasi-multinomial model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFit<T> {
    pub pi_hat: Vec<T>,
    /// Dispersion after clamping to `(1, 0.975 * min n_k]`.
    pub phi_hat: T,
    /// Unclamped bias-corrected estimate.
    pub phi_raw: T,
    pub chi_square: T,
    pub s_bar: T,
    pub df: u64,
    /// Non-redundant parameter count, `C - 1`.
    pub n_params: u64,
    pub n_hist: u64,
    pub clusters: usize,
}

/// Size of the concurrent control and the simultaneous error rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FutureSpec {
    pub m: u64,
    pub alpha: f64,
}

impl FutureSpec {
    pub fn new(m: u64, alpha: f64) -> Result<Self> {
        if m < 1 {
            return Err(Error::Validation("future size m must be >= 1".into()));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Validation(format!("alpha must lie in (0,1), got {alpha}")));
        }
        Ok(Self { m, alpha })
    }
}

/// Expected future counts and their prediction standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionPoint<T> {
    pub y_hat: Vec<T>,
    pub sep: Vec<T>,
}

impl<T: Real> PredictionPoint<T> {
    pub fn new(fit: &ModelFit<T>, m: u64) -> Self {
        let mt = T::of_u64(m);
        let y_hat = fit.pi_hat.iter().map(|&p| mt * p).collect();
        let sep = fit
            .pi_hat
            .iter()
            .map(|&p| prediction_se(p, fit.phi_hat, m, fit.n_hist))
            .collect();
        Self { y_hat, sep }
    }
}

fn check_pi<T: Real>(data: &HistoricalDataset, pi: &[T]) -> Result<()> {
    if pi.len() != data.categories() {
        return Err(Error::Validation(format!(
            "probability vector has {} entries for {} categories",
            pi.len(),
            data.categories()
        )));
    }
    if let Some(c) = pi.iter().position(|&p| !(p > T::zero())) {
        return Err(Error::ZeroProbability { category: c });
    }
    Ok(())
}

/// Pearson statistic `sum_k sum_c (x_kc - n_k pi_c)^2 / (n_k pi_c)`.
pub fn pearson_chi_square<T: Real>(data: &HistoricalDataset, pi: &[T]) -> Result<T> {
    check_pi(data, pi)?;
    let mut chi = T::zero();
    for (row, &n) in data.counts().iter().zip(data.cluster_sizes()) {
        let n = T::of_u64(n);
        for (&x, &p) in row.iter().zip(pi) {
            let e = n * p;
            let d = T::of_u64(x) - e;
            chi = chi + d * d / e;
        }
    }
    Ok(chi)
}

/// Bias-correction term `s_bar`: mean relative residual over the `KC - K` cells.
pub fn s_bar<T: Real>(data: &HistoricalDataset, pi: &[T]) -> Result<T> {
    check_pi(data, pi)?;
    let k = data.clusters() as u64;
    let c = data.categories() as u64;
    let mut s = T::zero();
    for (row, &n) in data.counts().iter().zip(data.cluster_sizes()) {
        let n = T::of_u64(n);
        for (&x, &p) in row.iter().zip(pi) {
            let e = n * p;
            s = s + (T::of_u64(x) - e) / e;
        }
    }
    Ok(s / T::of_u64(k * c - k))
}

/// Residual degrees of freedom `KC - K - (C - 1)`.
pub fn residual_df(data: &HistoricalDataset) -> u64 {
    let k = data.clusters() as u64;
    let c = data.categories() as u64;
    (k * c - k).saturating_sub(c - 1)
}

/// Bias-corrected Pearson dispersion estimate `(chi2/df) / (1 + s_bar)`, unclamped.
pub fn afroz_fletcher_dispersion<T: Real>(data: &HistoricalDataset, pi: &[T]) -> Result<T> {
    let df = residual_df(data);
    if df == 0 {
        return Err(Error::DegenerateDesign("zero residual degrees of freedom".into()));
    }
    let chi = pearson_chi_square(data, pi)?;
    let s = s_bar(data, pi)?;
    Ok(chi / T::of_u64(df) / (T::one() + s))
}

/// Clamp a dispersion estimate into the range a DM draw of size `size_bound` can realise.
pub fn clamp_dispersion<T: Real>(phi_raw: T, size_bound: u64) -> T {
    let ceiling = T::of(PHI_CEILING_FRACTION) * T::of_u64(size_bound);
    if phi_raw <= T::one() || phi_raw.is_nan() {
        T::of(PHI_FLOOR)
    } else if phi_raw >= ceiling {
        ceiling
    } else {
        phi_raw
    }
}

/// `sqrt(phi m pi (1 - pi) (1 + m / N_hist))`: future sampling variance plus
/// the variance of the plug-in expected count.
pub fn prediction_se<T: Real>(pi_c: T, phi: T, m: u64, n_hist: u64) -> T {
    let m = T::of_u64(m);
    let v = phi * m * pi_c * (T::one() - pi_c);
    let var = v + v * m / T::of_u64(n_hist);
    var.max(T::zero()).sqrt()
}

/// Pooled proportions and dispersion for the intercept-only model.
pub fn fit_model<T: Real>(data: &HistoricalDataset) -> Result<ModelFit<T>> {
    let k = data.clusters();
    let c = data.categories();
    if k < 2 || c < 2 {
        return Err(Error::DegenerateDesign(format!("K={k}, C={c}")));
    }
    let totals = data.column_totals();
    if let Some(cat) = totals.iter().position(|&t| t == 0) {
        return Err(Error::ZeroCategory { category: cat });
    }
    let n_hist = data.total();
    let nt = T::of_u64(n_hist);
    let pi_hat: Vec<T> = totals.iter().map(|&t| T::of_u64(t) / nt).collect();

    let chi_square = pearson_chi_square(data, &pi_hat)?;
    let s = s_bar(data, &pi_hat)?;
    let df = residual_df(data);
    let phi_raw = chi_square / T::of_u64(df) / (T::one() + s);
    let phi_hat = clamp_dispersion(phi_raw, data.min_cluster_size());
    Ok(ModelFit {
        pi_hat,
        phi_hat,
        phi_raw,
        chi_square,
        s_bar: s,
        df,
        n_params: (c - 1) as u64,
        n_hist,
        clusters: k,
    })
}
