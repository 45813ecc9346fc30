use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Per-category simultaneous prediction bounds from one method.
///
/// `scale` is the prediction standard error for the frequentist methods and the
/// posterior-predictive standard deviation for the Bayesian ones. Multipliers
/// are `None` for methods whose bounds are read off directly (Bayesian
/// marginal quantiles and rank sets).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionIntervalSet<T> {
    pub method: String,
    pub alpha: f64,
    pub m: u64,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
    pub y_hat: Vec<T>,
    pub scale: Vec<T>,
    pub multiplier_lower: Vec<Option<T>>,
    pub multiplier_upper: Vec<Option<T>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
}

impl<T: Real> PredictionIntervalSet<T> {
    /// `[y_hat - q_L * scale, y_hat + q_U * scale]`, clipped to `[0, m]`.
    pub fn from_multipliers(
        method: impl Into<String>,
        alpha: f64,
        m: u64,
        y_hat: Vec<T>,
        scale: Vec<T>,
        q_lower: Vec<T>,
        q_upper: Vec<T>,
    ) -> Self {
        let mt = T::of_u64(m);
        let clip = |v: T| v.max(T::zero()).min(mt);
        let lower = (0..y_hat.len())
            .map(|c| clip(y_hat[c] - q_lower[c] * scale[c]))
            .collect();
        let upper = (0..y_hat.len())
            .map(|c| clip(y_hat[c] + q_upper[c] * scale[c]))
            .collect();
        Self {
            method: method.into(),
            alpha,
            m,
            lower,
            upper,
            y_hat,
            scale,
            multiplier_lower: q_lower.into_iter().map(Some).collect(),
            multiplier_upper: q_upper.into_iter().map(Some).collect(),
            diagnostics: Vec::new(),
        }
    }

    /// Same multiplier for every bound.
    pub fn symmetric(
        method: impl Into<String>,
        alpha: f64,
        m: u64,
        y_hat: Vec<T>,
        scale: Vec<T>,
        q: T,
    ) -> Self {
        let c = y_hat.len();
        Self::from_multipliers(method, alpha, m, y_hat, scale, vec![q; c], vec![q; c])
    }

    /// Bounds given directly; still clipped to `[0, m]`.
    pub fn from_bounds(
        method: impl Into<String>,
        alpha: f64,
        m: u64,
        lower: Vec<T>,
        upper: Vec<T>,
        y_hat: Vec<T>,
        scale: Vec<T>,
    ) -> Self {
        let mt = T::of_u64(m);
        let clip = |v: &T| v.max(T::zero()).min(mt);
        let c = lower.len();
        Self {
            method: method.into(),
            alpha,
            m,
            lower: lower.iter().map(clip).collect(),
            upper: upper.iter().map(clip).collect(),
            y_hat,
            scale,
            multiplier_lower: vec![None; c],
            multiplier_upper: vec![None; c],
            diagnostics: Vec::new(),
        }
    }

    pub fn categories(&self) -> usize {
        self.lower.len()
    }

    pub fn contains_category(&self, c: usize, y: u64) -> bool {
        let y = T::of_u64(y);
        self.lower[c] <= y && y <= self.upper[c]
    }

    /// Simultaneous containment of a future count vector.
    pub fn contains(&self, y: &[u64]) -> bool {
        y.len() == self.categories() && (0..y.len()).all(|c| self.contains_category(c, y[c]))
    }

    pub fn below(&self, c: usize, y: u64) -> bool {
        T::of_u64(y) < self.lower[c]
    }

    pub fn above(&self, c: usize, y: u64) -> bool {
        T::of_u64(y) > self.upper[c]
    }

    pub fn width(&self, c: usize) -> T {
        self.upper[c] - self.lower[c]
    }

    pub fn to_f64(&self) -> PredictionIntervalSet<f64> {
        let conv = |v: &Vec<T>| v.iter().map(|x| x.f64()).collect::<Vec<_>>();
        let conv_opt = |v: &Vec<Option<T>>| v.iter().map(|x| x.map(Real::f64)).collect::<Vec<_>>();
        PredictionIntervalSet {
            method: self.method.clone(),
            alpha: self.alpha,
            m: self.m,
            lower: conv(&self.lower),
            upper: conv(&self.upper),
            y_hat: conv(&self.y_hat),
            scale: conv(&self.scale),
            multiplier_lower: conv_opt(&self.multiplier_lower),
            multiplier_upper: conv_opt(&self.multiplier_upper),
            diagnostics: self.diagnostics.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clipping_keeps_bounds_in_range() {
        let s = PredictionIntervalSet::<f64>::symmetric("x", 0.05, 10, vec![1.0, 9.0], vec![2.0, 2.0], 2.0);
        assert_eq!(s.lower, vec![0.0, 5.0]);
        assert_eq!(s.upper, vec![5.0, 10.0]);
        assert!(s.contains(&[0, 10]));
        assert!(!s.contains(&[0, 4]));
        assert!(s.below(1, 4));
        assert!(!s.above(1, 10));
    }
}
