use super::predictive::PredictiveSamples;
use crate::bootstrap::rank::{rank_bounds, rank_summary};
use crate::error::Result;
use crate::interval::PredictionIntervalSet;
use crate::stats::{nearest_rank_index, nearest_rank_quantile};

fn method_name(base: &str, pred: &PredictiveSamples) -> String {
    match pred.prior {
        Some(p) => format!("{base}-{}", p.name()),
        None => base.to_string(),
    }
}

fn sorted_column(pred: &PredictiveSamples, c: usize) -> Vec<u64> {
    let mut v = pred.column(c);
    v.sort_unstable();
    v
}

/// Per-category nearest-rank `alpha/(2C)` and `1 - alpha/(2C)` quantiles of
/// the predictive counts.
pub fn bayes_bonferroni_interval(pred: &PredictiveSamples, alpha: f64) -> PredictionIntervalSet<f64> {
    let c = pred.categories();
    let s = pred.draws();
    let a = alpha / (2.0 * c as f64);
    let (lower, upper): (Vec<f64>, Vec<f64>) = (0..c)
        .map(|k| {
            let v = sorted_column(pred, k);
            (v[nearest_rank_index(a, s) - 1] as f64, v[nearest_rank_index(1.0 - a, s) - 1] as f64)
        })
        .unzip();
    PredictionIntervalSet::from_bounds(
        method_name("bayes-marginal", pred),
        alpha,
        pred.m,
        lower,
        upper,
        pred.mean.clone(),
        pred.sd.clone(),
    )
}

/// `mean_c +/- q sd_c` with `q` the `(1 - alpha)` quantile of the largest
/// standardized deviation per draw. Categories with zero spread are skipped
/// in the maximum and collapse to `[mean, mean]`.
pub fn bayes_mean_centered_interval(pred: &PredictiveSamples, alpha: f64) -> PredictionIntervalSet<f64> {
    let zmax: Vec<f64> = pred
        .y_pred
        .iter()
        .map(|row| {
            row.iter()
                .zip(pred.mean.iter().zip(&pred.sd))
                .filter(|(_, (_, &sd))| sd > 0.0)
                .map(|(&y, (&mu, &sd))| (y as f64 - mu).abs() / sd)
                .fold(0.0, f64::max)
        })
        .collect();
    let q = nearest_rank_quantile(&zmax, 1.0 - alpha);
    PredictionIntervalSet::symmetric(
        method_name("bayes-mean", pred),
        alpha,
        pred.m,
        pred.mean.clone(),
        pred.sd.clone(),
        q,
    )
}

/// Rank-based simultaneous set computed on the predictive counts directly.
pub fn bayes_rank_scs_interval(pred: &PredictiveSamples, alpha: f64) -> Result<PredictionIntervalSet<f64>> {
    let columns: Vec<Vec<u64>> = (0..pred.categories()).map(|c| pred.column(c)).collect();
    let summary = rank_summary(&columns, alpha)?;
    let (lower, upper): (Vec<f64>, Vec<f64>) = rank_bounds(&columns, &summary)
        .into_iter()
        .map(|(l, u)| (l as f64, u as f64))
        .unzip();
    let mut set = PredictionIntervalSet::from_bounds(
        method_name("bayes-scs", pred),
        alpha,
        pred.m,
        lower,
        upper,
        pred.mean.clone(),
        pred.sd.clone(),
    );
    if summary.tau_star == pred.draws() {
        set.diagnostics
            .push("critical rank equals S: bounds are the extreme predictive counts".into());
    }
    Ok(set)
}
