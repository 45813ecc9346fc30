use crate::error::{Error, Result};
use crate::interval::PredictionIntervalSet;
use crate::model::{FutureSpec, ModelFit, PredictionPoint};
use crate::scalar::Real;
use crate::stats::stable_ranks;

use super::BootstrapEnsemble;

/// Column ranks, per-row extremeness scores and the critical rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankSummary {
    /// `ranks[c][b]`, 1 = smallest within column `c`.
    pub ranks: Vec<Vec<usize>>,
    /// `w_b = max(max_c r_bc, B + 1 - min_c r_bc)`.
    pub scores: Vec<usize>,
    /// Position `k` of the critical rank in the sorted scores (1-based).
    pub k: usize,
    pub tau_star: usize,
}

impl RankSummary {
    pub fn replicates(&self) -> usize {
        self.scores.len()
    }

    /// 1-based order statistic used for the lower bound, `B + 1 - tau*`.
    pub fn lower_order(&self) -> usize {
        self.replicates() + 1 - self.tau_star
    }
}

/// Ranks each column (ties broken by row index), scores rows by their most
/// extreme rank and takes the score at position `round((1 - alpha) B)`.
pub fn rank_summary<V: PartialOrd>(columns: &[Vec<V>], alpha: f64) -> Result<RankSummary> {
    let b = columns.first().map_or(0, Vec::len);
    if b < 2 {
        return Err(Error::DegenerateRank(format!("need at least 2 replicates, got {b}")));
    }
    if columns.iter().any(|c| c.len() != b) {
        return Err(Error::Validation("rank columns differ in length".into()));
    }
    let ranks: Vec<Vec<usize>> = columns.iter().map(|c| stable_ranks(c)).collect();
    let scores: Vec<usize> = (0..b)
        .map(|row| {
            let (lo, hi) = ranks
                .iter()
                .fold((usize::MAX, 0), |(lo, hi), col| (lo.min(col[row]), hi.max(col[row])));
            hi.max(b + 1 - lo)
        })
        .collect();
    let mut sorted = scores.clone();
    sorted.sort_unstable();
    let k = (((1.0 - alpha) * b as f64) + 0.5).floor() as usize;
    let k = k.clamp(1, b);
    Ok(RankSummary {
        ranks,
        scores,
        k,
        tau_star: sorted[k - 1],
    })
}

/// Order statistics `(v_(B+1-tau*), v_(tau*))` of each column.
pub(crate) fn rank_bounds<V: PartialOrd + Copy>(columns: &[Vec<V>], summary: &RankSummary) -> Vec<(V, V)> {
    columns
        .iter()
        .map(|col| {
            let mut s = col.clone();
            s.sort_by(|a, b| a.partial_cmp(b).expect("NaN in rank column"));
            (s[summary.lower_order() - 1], s[summary.tau_star - 1])
        })
        .collect()
}

/// Rectangular simultaneous set from the ranks of the studentized residuals.
///
/// Lower multiplier `|z_c,(B+1-tau*)|`, upper multiplier `z_c,(tau*)`.
pub fn rank_scs_interval<T: Real>(
    e: &BootstrapEnsemble<T>,
    fit: &ModelFit<T>,
    spec: &FutureSpec,
) -> Result<PredictionIntervalSet<T>> {
    if e.categories() != fit.pi_hat.len() {
        return Err(Error::Validation("ensemble and fit disagree on categories".into()));
    }
    let columns: Vec<Vec<T>> = (0..e.categories()).map(|c| e.z_column(c)).collect();
    let summary = rank_summary(&columns, spec.alpha)?;
    let bounds = rank_bounds(&columns, &summary);
    let mut diag = Vec::new();
    if summary.tau_star == e.replicates() {
        diag.push("critical rank equals B: bounds are the extreme residuals".to_string());
    }
    let mut ql = Vec::with_capacity(bounds.len());
    let mut qu = Vec::with_capacity(bounds.len());
    for (c, &(lo, hi)) in bounds.iter().enumerate() {
        if lo > T::zero() {
            diag.push(format!("category {}: lower critical residual {lo} is positive", c + 1));
        }
        if hi < T::zero() {
            diag.push(format!("category {}: upper critical residual {hi} is negative", c + 1));
        }
        ql.push(lo.abs());
        qu.push(hi);
    }
    let p = PredictionPoint::new(fit, spec.m);
    let mut set = PredictionIntervalSet::from_multipliers("rank-scs", spec.alpha, spec.m, p.y_hat, p.sep, ql, qu);
    set.diagnostics = diag;
    Ok(set)
}
