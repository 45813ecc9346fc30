use rayon::prelude::*;

use super::density::PriorChoice;
use super::mcmc::PosteriorDraws;
use crate::dm::{sample_dirichlet, sample_multinomial};
use crate::error::{Error, Result};
use crate::rng::RngStream;

const CHUNK: usize = 1024;

/// `S x C` posterior-predictive counts for a future study of size `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveSamples {
    pub m: u64,
    pub y_pred: Vec<Vec<u64>>,
    pub mean: Vec<f64>,
    /// Column standard deviations (`S - 1` denominator).
    pub sd: Vec<f64>,
    pub prior: Option<PriorChoice>,
}

impl PredictiveSamples {
    /// Builds the summaries from raw rows; all rows must sum to `m`.
    pub fn from_rows(m: u64, y_pred: Vec<Vec<u64>>) -> Result<Self> {
        let c = y_pred.first().map_or(0, Vec::len);
        if y_pred.is_empty() || c == 0 {
            return Err(Error::Validation("empty predictive sample".into()));
        }
        if let Some(s) = y_pred.iter().position(|r| r.len() != c || r.iter().sum::<u64>() != m) {
            return Err(Error::Validation(format!("predictive row {s} has wrong length or does not sum to m")));
        }
        let s = y_pred.len() as f64;
        let mut mean = vec![0.0; c];
        for row in &y_pred {
            for (a, &v) in mean.iter_mut().zip(row) {
                *a += v as f64;
            }
        }
        mean.iter_mut().for_each(|v| *v /= s);
        let mut ss = vec![0.0; c];
        for row in &y_pred {
            for ((a, &v), mu) in ss.iter_mut().zip(row).zip(&mean) {
                *a += (v as f64 - mu).powi(2);
            }
        }
        let sd = ss
            .iter()
            .map(|v| if s > 1.0 { (v / (s - 1.0)).sqrt() } else { 0.0 })
            .collect();
        Ok(Self {
            m,
            y_pred,
            mean,
            sd,
            prior: None,
        })
    }

    pub fn draws(&self) -> usize {
        self.y_pred.len()
    }

    pub fn categories(&self) -> usize {
        self.mean.len()
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        self.y_pred.iter().map(|r| r[c]).collect()
    }
}

/// One future study per retained draw: `pi ~ Dir(eta0 * pi_global)`, then
/// `y ~ Mult(m, pi)`. Draws are processed in fixed chunks, chunk `j` on
/// stream `j`.
pub fn posterior_predictive(draws: &PosteriorDraws, m: u64, stream: &RngStream) -> Result<PredictiveSamples> {
    if draws.is_empty() {
        return Err(Error::Validation("no posterior draws".into()));
    }
    let n = draws.len();
    let rows: Vec<Vec<u64>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .flat_map_iter(|j| {
            let mut rng = stream.stream(j as u64).rng();
            (j * CHUNK..((j + 1) * CHUNK).min(n))
                .map(|s| {
                    let eta: Vec<f64> = draws.pi_global[s].iter().map(|p| p * draws.eta0[s]).collect();
                    let p = sample_dirichlet(&eta, &mut rng);
                    sample_multinomial(m, &p, &mut rng)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let mut out = PredictiveSamples::from_rows(m, rows)?;
    out.prior = Some(draws.prior);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixed_draws(pi: Vec<f64>, eta0: f64, s: usize) -> PosteriorDraws {
        PosteriorDraws {
            pi_global: vec![pi; s],
            eta0: vec![eta0; s],
            rho: vec![1.0 / (1.0 + eta0); s],
            chains: 1,
            per_chain: s,
            rhat: vec![],
            chain_diagnostics: vec![],
            warnings: vec![],
            prior: PriorChoice::cauchy(),
        }
    }

    #[test]
    fn rows_sum_to_m_and_means_match() {
        let pi = vec![0.2, 0.5, 0.3];
        let d = fixed_draws(pi.clone(), 4.0, 20_000);
        let p = posterior_predictive(&d, 40, &RngStream::new(9)).unwrap();
        assert!(p.y_pred.iter().all(|r| r.iter().sum::<u64>() == 40));
        for (c, pc) in pi.iter().enumerate() {
            let se = p.sd[c] / (p.draws() as f64).sqrt();
            assert!((p.mean[c] - 40.0 * pc).abs() < 3.0 * se, "{c}");
        }
    }

    #[test]
    fn huge_precision_gives_multinomial_variance() {
        let d = fixed_draws(vec![0.3, 0.7], 1e9, 40_000);
        let p = posterior_predictive(&d, 50, &RngStream::new(2)).unwrap();
        let v = p.sd[0].powi(2);
        assert!((v / (50.0 * 0.3 * 0.7) - 1.0).abs() < 0.05, "{v}");
    }

    #[test]
    fn thread_count_does_not_matter() {
        let d = fixed_draws(vec![0.1, 0.9], 3.0, 3000);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let a = one.install(|| posterior_predictive(&d, 10, &RngStream::new(5)).unwrap());
        let b = posterior_predictive(&d, 10, &RngStream::new(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn from_rows_rejects_bad_sums() {
        assert!(PredictiveSamples::from_rows(3, vec![vec![1, 1]]).is_err());
    }
}
