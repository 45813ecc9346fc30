use crate::error::{Error, Result};
use crate::interval::PredictionIntervalSet;
use crate::model::{FutureSpec, ModelFit, PredictionPoint};
use crate::scalar::Real;
use crate::stats::nearest_rank_quantile;

use super::BootstrapEnsemble;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationSettings {
    /// Accepted distance between empirical and target coverage.
    pub tolerance: f64,
    pub lower: f64,
    pub upper: f64,
    pub max_iterations: usize,
    /// Times the upper end may double before giving up.
    pub max_doublings: usize,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self {
            tolerance: 0.0025,
            lower: 0.0,
            upper: 20.0,
            max_iterations: 60,
            max_doublings: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Calibration<T> {
    pub multiplier: T,
    pub coverage: f64,
    /// False when the tolerance was never met and the conservative end was returned.
    pub converged: bool,
}

/// Bisection for a multiplier whose empirical coverage is within the
/// tolerance of `target`.
///
/// `coverage` must be nondecreasing. If the tolerance cannot be met (empirical
/// coverage is a step function), the smallest examined multiplier with
/// coverage at or above the target is returned with `converged == false`.
pub fn bisection_calibrate<T: Real>(
    coverage: impl Fn(T) -> f64,
    target: f64,
    settings: &CalibrationSettings,
) -> Result<Calibration<T>> {
    let tol = settings.tolerance;
    let mut lo = T::of(settings.lower);
    let c_lo = coverage(lo);
    if c_lo >= target || (c_lo - target).abs() <= tol {
        return Ok(Calibration {
            multiplier: lo,
            coverage: c_lo,
            converged: (c_lo - target).abs() <= tol,
        });
    }
    let mut hi = T::of(settings.upper);
    let mut c_hi = coverage(hi);
    let mut doublings = 0;
    while c_hi < target {
        if doublings == settings.max_doublings {
            return Err(Error::Bracket {
                coverage: c_hi,
                target,
                upper: hi.f64(),
            });
        }
        lo = hi;
        hi = hi + hi;
        c_hi = coverage(hi);
        doublings += 1;
    }
    let two = T::of(2.0);
    for _ in 0..settings.max_iterations {
        let mid = (lo + hi) / two;
        let c = coverage(mid);
        if (c - target).abs() <= tol {
            return Ok(Calibration {
                multiplier: mid,
                coverage: c,
                converged: true,
            });
        }
        if c < target {
            lo = mid;
        } else {
            hi = mid;
            c_hi = c;
        }
    }
    Ok(Calibration {
        multiplier: hi,
        coverage: c_hi,
        converged: false,
    })
}

/// Per-replicate thresholds `t_b` for an event of the form `t_b <= q`,
/// sorted so empirical coverage is a binary search.
#[derive(Debug, Clone)]
pub struct SortedThresholds<T> {
    sorted: Vec<T>,
}

impl<T: Real> SortedThresholds<T> {
    pub fn new(mut thresholds: Vec<T>) -> Self {
        thresholds.sort_by(|a, b| a.partial_cmp(b).expect("NaN threshold"));
        Self { sorted: thresholds }
    }

    /// Fraction of replicates with `t_b <= q`.
    pub fn coverage(&self, q: T) -> f64 {
        self.sorted.partition_point(|&t| t <= q) as f64 / self.sorted.len() as f64
    }

    pub fn as_slice(&self) -> &[T] {
        &self.sorted
    }
}

/// `max_c |z_bc|`: replicate `b` lies inside the symmetric box iff this is `<= q`.
pub(crate) fn max_abs_thresholds<T: Real>(e: &BootstrapEnsemble<T>) -> Vec<T> {
    (0..e.replicates())
        .map(|b| e.z_row(b).iter().fold(T::zero(), |a, z| a.max(z.abs())))
        .collect()
}

/// `max_c -z_bc`: every lower bound `y_hat* - q sep*` is at or below `y*` iff `<= q`.
fn lower_thresholds<T: Real>(e: &BootstrapEnsemble<T>) -> Vec<T> {
    (0..e.replicates())
        .map(|b| e.z_row(b).iter().fold(T::neg_infinity(), |a, &z| a.max(-z)))
        .collect()
}

fn upper_thresholds<T: Real>(e: &BootstrapEnsemble<T>) -> Vec<T> {
    (0..e.replicates())
        .map(|b| e.z_row(b).iter().fold(T::neg_infinity(), |a, &z| a.max(z)))
        .collect()
}

fn calibrate_on<T: Real>(
    thresholds: Vec<T>,
    target: f64,
    settings: &CalibrationSettings,
    label: &str,
    diagnostics: &mut Vec<String>,
) -> Result<T> {
    let sorted = SortedThresholds::new(thresholds);
    let cal = bisection_calibrate(|q| sorted.coverage(q), target, settings)?;
    if !cal.converged {
        diagnostics.push(format!(
            "{label}: tolerance not met, conservative multiplier {:.6} with coverage {:.6}",
            cal.multiplier, cal.coverage
        ));
    }
    Ok(cal.multiplier)
}

fn check_dims<T: Real>(e: &BootstrapEnsemble<T>, fit: &ModelFit<T>) -> Result<()> {
    if e.categories() != fit.pi_hat.len() {
        return Err(Error::Validation(format!(
            "ensemble has {} categories, fit has {}",
            e.categories(),
            fit.pi_hat.len()
        )));
    }
    Ok(())
}

/// One multiplier calibrated to simultaneous coverage `1 - alpha`.
pub fn symmetric_calibration<T: Real>(
    e: &BootstrapEnsemble<T>,
    fit: &ModelFit<T>,
    spec: &FutureSpec,
    settings: &CalibrationSettings,
) -> Result<PredictionIntervalSet<T>> {
    check_dims(e, fit)?;
    let mut diag = Vec::new();
    let q = calibrate_on(max_abs_thresholds(e), 1.0 - spec.alpha, settings, "symmetric", &mut diag)?;
    let p = PredictionPoint::new(fit, spec.m);
    let mut set = PredictionIntervalSet::symmetric("sym-calib", spec.alpha, spec.m, p.y_hat, p.sep, q);
    set.diagnostics = diag;
    Ok(set)
}

/// Common lower and upper multipliers, each calibrated to simultaneous
/// one-sided coverage `1 - alpha/2`.
pub fn asymmetric_calibration<T: Real>(
    e: &BootstrapEnsemble<T>,
    fit: &ModelFit<T>,
    spec: &FutureSpec,
    settings: &CalibrationSettings,
) -> Result<PredictionIntervalSet<T>> {
    check_dims(e, fit)?;
    let target = 1.0 - spec.alpha / 2.0;
    let mut diag = Vec::new();
    let ql = calibrate_on(lower_thresholds(e), target, settings, "asymmetric lower", &mut diag)?;
    let qu = calibrate_on(upper_thresholds(e), target, settings, "asymmetric upper", &mut diag)?;
    let c = e.categories();
    let p = PredictionPoint::new(fit, spec.m);
    let mut set = PredictionIntervalSet::from_multipliers(
        "asym-calib",
        spec.alpha,
        spec.m,
        p.y_hat,
        p.sep,
        vec![ql; c],
        vec![qu; c],
    );
    set.diagnostics = diag;
    Ok(set)
}

/// Category-specific lower and upper multipliers, each calibrated to marginal
/// coverage `1 - alpha/(2C)`.
pub fn marginal_calibration<T: Real>(
    e: &BootstrapEnsemble<T>,
    fit: &ModelFit<T>,
    spec: &FutureSpec,
    settings: &CalibrationSettings,
) -> Result<PredictionIntervalSet<T>> {
    check_dims(e, fit)?;
    let c = e.categories();
    let target = 1.0 - spec.alpha / (2.0 * c as f64);
    let mut diag = Vec::new();
    let mut ql = Vec::with_capacity(c);
    let mut qu = Vec::with_capacity(c);
    for cat in 0..c {
        let col = e.z_column(cat);
        let lower: Vec<T> = col.iter().map(|&z| -z).collect();
        ql.push(calibrate_on(lower, target, settings, &format!("marginal lower c{}", cat + 1), &mut diag)?);
        qu.push(calibrate_on(col, target, settings, &format!("marginal upper c{}", cat + 1), &mut diag)?);
    }
    let p = PredictionPoint::new(fit, spec.m);
    let mut set = PredictionIntervalSet::from_multipliers("marginal", spec.alpha, spec.m, p.y_hat, p.sep, ql, qu);
    set.diagnostics = diag;
    Ok(set)
}

/// `(1 - alpha)` nearest-rank quantile of `max_c |z_bc|`.
pub fn masr_interval<T: Real>(
    e: &BootstrapEnsemble<T>,
    fit: &ModelFit<T>,
    spec: &FutureSpec,
) -> Result<PredictionIntervalSet<T>> {
    check_dims(e, fit)?;
    let q = nearest_rank_quantile(&max_abs_thresholds(e), 1.0 - spec.alpha);
    let p = PredictionPoint::new(fit, spec.m);
    Ok(PredictionIntervalSet::symmetric("masr", spec.alpha, spec.m, p.y_hat, p.sep, q))
}
