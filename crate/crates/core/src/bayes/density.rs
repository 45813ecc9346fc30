use statrs::function::beta::ln_beta;
use statrs::function::gamma::{digamma, ln_gamma};

use crate::error::{Error, Result};
use crate::model::HistoricalDataset;

/// Hyperprior on the Dirichlet precision `eta0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorChoice {
    /// `eta0 ~ Cauchy+(0, scale)`.
    HalfCauchy { scale: f64 },
    /// `rho = 1 / (1 + eta0) ~ Beta(a, b)`.
    BetaRho { a: f64, b: f64 },
}

impl PriorChoice {
    pub fn cauchy() -> Self {
        PriorChoice::HalfCauchy { scale: 5.0 }
    }

    pub fn beta() -> Self {
        PriorChoice::BetaRho { a: 1.0, b: 10.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PriorChoice::HalfCauchy { .. } => "cauchy",
            PriorChoice::BetaRho { .. } => "beta",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            PriorChoice::HalfCauchy { scale } => scale > 0.0,
            PriorChoice::BetaRho { a, b } => a > 0.0 && b > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid prior parameters {self:?}")))
        }
    }

    /// Log density of `eta0` (including the change of variables for the Beta variant).
    pub fn log_density(&self, eta0: f64) -> f64 {
        if !(eta0 > 0.0) {
            return f64::NEG_INFINITY;
        }
        match *self {
            PriorChoice::HalfCauchy { scale } => {
                (2.0 / (std::f64::consts::PI * scale)).ln() - (1.0 + (eta0 / scale).powi(2)).ln()
            }
            PriorChoice::BetaRho { a, b } => {
                let l1 = eta0.ln_1p();
                // rho = 1/(1+eta0), 1 - rho = eta0/(1+eta0), |d rho / d eta0| = (1+eta0)^-2
                -(a - 1.0) * l1 + (b - 1.0) * (eta0.ln() - l1) - ln_beta(a, b) - 2.0 * l1
            }
        }
    }

    /// Derivative of [`Self::log_density`] in `eta0`.
    pub fn d_log_density(&self, eta0: f64) -> f64 {
        match *self {
            PriorChoice::HalfCauchy { scale } => -2.0 * eta0 / (scale * scale + eta0 * eta0),
            PriorChoice::BetaRho { a, b } => {
                -(a - 1.0) / (1.0 + eta0) + (b - 1.0) * (1.0 / eta0 - 1.0 / (1.0 + eta0)) - 2.0 / (1.0 + eta0)
            }
        }
    }
}

fn ln_factorial(n: u64) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

/// Dirichlet-multinomial log probability of `x` (size `n`) under precision vector `eta`.
pub fn dm_log_pmf(x: &[u64], n: u64, eta: &[f64]) -> Result<f64> {
    if x.len() != eta.len() {
        return Err(Error::Validation("count and precision vectors differ in length".into()));
    }
    if x.iter().sum::<u64>() != n {
        return Err(Error::Validation(format!("counts do not sum to n={n}")));
    }
    if let Some(e) = eta.iter().find(|e| !(**e >= 0.0) || !e.is_finite()) {
        return Err(Error::Domain(format!("Dirichlet parameter {e} is not a nonnegative finite value")));
    }
    let eta0: f64 = eta.iter().sum();
    if !(eta0 > 0.0) {
        return Err(Error::Domain("all Dirichlet parameters are zero".into()));
    }
    let mut lp = ln_factorial(n) + ln_gamma(eta0) - ln_gamma(n as f64 + eta0);
    for (&xc, &ec) in x.iter().zip(eta) {
        if ec == 0.0 {
            if xc > 0 {
                return Ok(f64::NEG_INFINITY);
            }
            continue;
        }
        lp += ln_gamma(xc as f64 + ec) - ln_gamma(ec) - ln_factorial(xc);
    }
    Ok(lp)
}

/// Unconstrained parameterisation: additive log-ratios of `pi_global`
/// against the last category, then `log eta0`.
pub fn to_unconstrained(pi: &[f64], eta0: f64) -> Vec<f64> {
    let last = pi[pi.len() - 1];
    let mut theta: Vec<f64> = pi[..pi.len() - 1].iter().map(|p| (p / last).ln()).collect();
    theta.push(eta0.ln());
    theta
}

/// Inverse of [`to_unconstrained`]: `(pi_global, eta0)`.
pub fn from_unconstrained(theta: &[f64]) -> (Vec<f64>, f64) {
    let alr = &theta[..theta.len() - 1];
    let max = alr.iter().copied().fold(0.0f64, f64::max);
    let mut pi: Vec<f64> = alr.iter().map(|a| (a - max).exp()).collect();
    pi.push((-max).exp());
    let s: f64 = pi.iter().sum();
    pi.iter_mut().for_each(|p| *p /= s);
    (pi, theta[theta.len() - 1].exp())
}

/// Marginal posterior of `(pi_global, eta0)` with the cluster-level
/// probabilities integrated out.
#[derive(Debug, Clone)]
pub struct LogPosterior {
    counts: Vec<Vec<u64>>,
    sizes: Vec<u64>,
    prior: PriorChoice,
    /// `ln Gamma(C)`: the flat Dirichlet(1) density on the simplex.
    log_flat: f64,
    log_multinomial_coef: f64,
}

impl LogPosterior {
    pub fn new(data: &HistoricalDataset, prior: PriorChoice) -> Result<Self> {
        prior.validate()?;
        let log_multinomial_coef = data
            .counts()
            .iter()
            .zip(data.cluster_sizes())
            .map(|(row, &n)| ln_factorial(n) - row.iter().map(|&x| ln_factorial(x)).sum::<f64>())
            .sum();
        Ok(Self {
            counts: data.counts().to_vec(),
            sizes: data.cluster_sizes().to_vec(),
            prior,
            log_flat: ln_gamma(data.categories() as f64),
            log_multinomial_coef,
        })
    }

    pub fn dim(&self) -> usize {
        self.counts[0].len()
    }

    pub fn prior(&self) -> PriorChoice {
        self.prior
    }

    /// Log density on the unconstrained scale, Jacobians included.
    /// Returns `-inf` when the transform is not finite.
    pub fn log_density(&self, theta: &[f64]) -> f64 {
        if theta.iter().any(|t| !t.is_finite()) {
            return f64::NEG_INFINITY;
        }
        let (pi, eta0) = from_unconstrained(theta);
        if !(eta0 > 0.0 && eta0.is_finite()) || pi.iter().any(|&p| !(p > 0.0)) {
            return f64::NEG_INFINITY;
        }
        let eta: Vec<f64> = pi.iter().map(|p| eta0 * p).collect();
        let lg_eta: Vec<f64> = eta.iter().map(|&e| ln_gamma(e)).collect();
        let lg_eta0 = ln_gamma(eta0);
        let mut ll = self.log_multinomial_coef;
        for (row, &n) in self.counts.iter().zip(&self.sizes) {
            ll += lg_eta0 - ln_gamma(n as f64 + eta0);
            for ((&x, &e), &lg) in row.iter().zip(&eta).zip(&lg_eta) {
                if x > 0 {
                    ll += ln_gamma(x as f64 + e) - lg;
                }
            }
        }
        let jacobian: f64 = pi.iter().map(|p| p.ln()).sum::<f64>() + eta0.ln();
        let lp = ll + self.prior.log_density(eta0) + self.log_flat + jacobian;
        if lp.is_nan() {
            f64::NEG_INFINITY
        } else {
            lp
        }
    }

    /// Analytic gradient of [`Self::log_density`].
    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        let (pi, eta0) = from_unconstrained(theta);
        let c = pi.len();
        let eta: Vec<f64> = pi.iter().map(|p| eta0 * p).collect();
        let dg_eta: Vec<f64> = eta.iter().map(|&e| digamma(e)).collect();
        // g[c] = d loglik / d eta_c
        let mut g = vec![0.0; c];
        for (row, &n) in self.counts.iter().zip(&self.sizes) {
            let common = digamma(eta0) - digamma(n as f64 + eta0);
            for j in 0..c {
                g[j] += common + digamma(row[j] as f64 + eta[j]) - dg_eta[j];
            }
        }
        let pg: f64 = pi.iter().zip(&g).map(|(p, gj)| p * gj).sum();
        let mut grad = Vec::with_capacity(c);
        for i in 0..c - 1 {
            grad.push(pi[i] * eta0 * (g[i] - pg) + 1.0 - c as f64 * pi[i]);
        }
        grad.push(eta0 * (pg + self.prior.d_log_density(eta0)) + 1.0);
        grad
    }
}
