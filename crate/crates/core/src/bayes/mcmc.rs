//! Adaptive random-walk Metropolis on the unconstrained posterior.
//!
//! Each sweep updates one coordinate at a time with a Gaussian step. During
//! warmup the per-coordinate log step size follows a Robbins-Monro recursion
//! towards the target acceptance rate; it is frozen for sampling.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::density::{from_unconstrained, to_unconstrained, LogPosterior, PriorChoice};
use crate::dm::derive_eta0;
use crate::error::{Error, Result};
use crate::model::{clamp_dispersion, fit_model, HistoricalDataset};
use crate::rng::RngStream;

const TARGET_ACCEPTANCE: f64 = 0.35;
const MAX_RESTARTS: usize = 100;
pub const RHAT_THRESHOLD: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McmcSettings {
    pub chains: usize,
    pub sampling_iters: usize,
    pub warmup: usize,
}

impl Default for McmcSettings {
    fn default() -> Self {
        Self {
            chains: 4,
            sampling_iters: 2_500,
            warmup: 1_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainDiagnostics {
    /// Post-warmup acceptance rate per unconstrained coordinate.
    pub acceptance: Vec<f64>,
    /// Adapted step sizes.
    pub step_sizes: Vec<f64>,
}

/// Retained draws of `(pi_global, eta0)` from every chain, chain-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorDraws {
    pub pi_global: Vec<Vec<f64>>,
    pub eta0: Vec<f64>,
    pub rho: Vec<f64>,
    pub chains: usize,
    pub per_chain: usize,
    /// Split-R-hat for `pi_global[c]` (c = 0..C) followed by `log eta0`.
    pub rhat: Vec<f64>,
    pub chain_diagnostics: Vec<ChainDiagnostics>,
    pub warnings: Vec<String>,
    pub prior: PriorChoice,
}

impl PosteriorDraws {
    pub fn len(&self) -> usize {
        self.eta0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta0.is_empty()
    }

    pub fn max_rhat(&self) -> f64 {
        self.rhat.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean_pi(&self) -> Vec<f64> {
        let c = self.pi_global[0].len();
        let mut m = vec![0.0; c];
        for p in &self.pi_global {
            for (a, b) in m.iter_mut().zip(p) {
                *a += b;
            }
        }
        m.iter_mut().for_each(|v| *v /= self.len() as f64);
        m
    }

    pub fn median_rho(&self) -> f64 {
        let mut r = self.rho.clone();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = r.len();
        if n % 2 == 1 {
            r[n / 2]
        } else {
            0.5 * (r[n / 2 - 1] + r[n / 2])
        }
    }
}

/// Split-R-hat over equal-length chains of one scalar parameter.
pub fn split_rhat(chains: &[Vec<f64>]) -> f64 {
    let half = chains.iter().map(Vec::len).min().unwrap_or(0) / 2;
    if half < 2 {
        return f64::NAN;
    }
    let seqs: Vec<&[f64]> = chains
        .iter()
        .flat_map(|c| [&c[..half], &c[c.len() - half..]])
        .collect();
    let n = half as f64;
    let means: Vec<f64> = seqs.iter().map(|s| s.iter().sum::<f64>() / n).collect();
    let grand = means.iter().sum::<f64>() / means.len() as f64;
    let between = n / (means.len() as f64 - 1.0) * means.iter().map(|m| (m - grand).powi(2)).sum::<f64>();
    let within = seqs
        .iter()
        .zip(&means)
        .map(|(s, m)| s.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0))
        .sum::<f64>()
        / seqs.len() as f64;
    if within == 0.0 {
        return if between == 0.0 { 1.0 } else { f64::INFINITY };
    }
    let var_plus = (n - 1.0) / n * within + between / n;
    (var_plus / within).sqrt()
}

/// Pooled proportions and the moment-matched precision from the clamped
/// dispersion estimate (floored at 0.5).
fn initial_point(data: &HistoricalDataset) -> Vec<f64> {
    let totals = data.column_totals();
    let denom = data.total() as f64 + 0.5 * totals.len() as f64;
    let pi: Vec<f64> = totals.iter().map(|&t| (t as f64 + 0.5) / denom).collect();
    let n = data.min_cluster_size();
    let phi = match fit_model::<f64>(data) {
        Ok(f) => f.phi_hat,
        Err(_) => clamp_dispersion(2.0, n),
    };
    let eta0 = derive_eta0(n, phi).unwrap_or(1.0).max(0.5);
    to_unconstrained(&pi, eta0)
}

struct ChainOutput {
    draws: Vec<Vec<f64>>,
    diagnostics: ChainDiagnostics,
}

fn run_chain(
    post: &LogPosterior,
    start: &[f64],
    settings: &McmcSettings,
    stream: RngStream,
) -> Result<ChainOutput> {
    let mut rng = stream.rng();
    let dim = start.len();
    let mut theta = start.to_vec();
    let mut lp = f64::NEG_INFINITY;
    for attempt in 0..=MAX_RESTARTS {
        theta = start
            .iter()
            .map(|&t| {
                let z: f64 = StandardNormal.sample(&mut rng);
                t + if attempt == 0 { 0.1 } else { 0.5 } * z
            })
            .collect();
        lp = post.log_density(&theta);
        if lp.is_finite() {
            break;
        }
    }
    if !lp.is_finite() {
        return Err(Error::Initialization(format!(
            "log posterior is -inf after {MAX_RESTARTS} jittered restarts"
        )));
    }

    let mut log_step = vec![(0.5f64).ln(); dim];
    let mut accepted = vec![0usize; dim];
    let mut draws = Vec::with_capacity(settings.sampling_iters);
    for iter in 0..settings.warmup + settings.sampling_iters {
        let warm = iter < settings.warmup;
        for j in 0..dim {
            let step = log_step[j].exp();
            let z: f64 = StandardNormal.sample(&mut rng);
            let old = theta[j];
            theta[j] = old + step * z;
            let lp_new = post.log_density(&theta);
            let log_ratio = lp_new - lp;
            let accept = log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio;
            if accept {
                lp = lp_new;
            } else {
                theta[j] = old;
            }
            if warm {
                let rate = if accept { 1.0 } else { 0.0 };
                let gain = (iter as f64 + 10.0).powf(-0.6);
                log_step[j] = (log_step[j] + gain * (rate - TARGET_ACCEPTANCE) * 3.0).clamp(-12.0, 5.0);
            } else if accept {
                accepted[j] += 1;
            }
        }
        if !warm {
            draws.push(theta.clone());
        }
    }
    let n = settings.sampling_iters.max(1) as f64;
    Ok(ChainOutput {
        draws,
        diagnostics: ChainDiagnostics {
            acceptance: accepted.iter().map(|&a| a as f64 / n).collect(),
            step_sizes: log_step.iter().map(|l| l.exp()).collect(),
        },
    })
}

/// Samples `p(pi_global, eta0 | X)` with `chains` independent chains
/// (chain `i` uses stream `i`), pooling post-warmup draws in chain order.
pub fn mcmc_sample(
    data: &HistoricalDataset,
    prior: PriorChoice,
    settings: &McmcSettings,
    stream: &RngStream,
) -> Result<PosteriorDraws> {
    if settings.chains == 0 || settings.sampling_iters == 0 {
        return Err(Error::Validation("need at least one chain and one sampling iteration".into()));
    }
    // the largest category serves as the log-ratio reference; a rare
    // reference couples every coordinate through its noisy log probability
    let c = data.categories();
    let totals = data.column_totals();
    let top = (0..c).max_by_key(|&j| (totals[j], std::cmp::Reverse(j))).expect("C >= 2");
    let mut perm: Vec<usize> = (0..c).collect();
    perm.swap(top, c - 1);
    let permuted = HistoricalDataset::new(
        data.counts().iter().map(|row| perm.iter().map(|&j| row[j]).collect()).collect(),
    )?;
    let post = LogPosterior::new(&permuted, prior)?;
    let start = initial_point(&permuted);
    let outputs: Vec<ChainOutput> = (0..settings.chains)
        .into_par_iter()
        .map(|i| run_chain(&post, &start, settings, stream.stream(i as u64)))
        .collect::<Result<_>>()?;

    let mut pi_global = Vec::with_capacity(settings.chains * settings.sampling_iters);
    let mut eta0 = Vec::with_capacity(pi_global.capacity());
    // per-parameter, per-chain traces for R-hat
    let mut traces: Vec<Vec<Vec<f64>>> = vec![Vec::with_capacity(settings.chains); c + 1];
    for out in &outputs {
        let mut chain_traces: Vec<Vec<f64>> = vec![Vec::with_capacity(out.draws.len()); c + 1];
        for theta in &out.draws {
            let (pi_perm, e) = from_unconstrained(theta);
            let mut pi = vec![0.0; c];
            for (k, &j) in perm.iter().enumerate() {
                pi[j] = pi_perm[k];
            }
            for (t, &p) in chain_traces.iter_mut().zip(&pi) {
                t.push(p);
            }
            chain_traces[c].push(e.ln());
            pi_global.push(pi);
            eta0.push(e);
        }
        for (t, ct) in traces.iter_mut().zip(chain_traces) {
            t.push(ct);
        }
    }
    let rhat: Vec<f64> = traces.iter().map(|t| split_rhat(t)).collect();
    let mut warnings = Vec::new();
    for (i, r) in rhat.iter().enumerate() {
        if *r > RHAT_THRESHOLD {
            let name = if i < c { format!("pi_global[{}]", i + 1) } else { "log_eta0".to_string() };
            warnings.push(format!("convergence: split R-hat for {name} is {r:.3}"));
        }
    }
    let rho = eta0.iter().map(|e| 1.0 / (1.0 + e)).collect();
    Ok(PosteriorDraws {
        pi_global,
        eta0,
        rho,
        chains: settings.chains,
        per_chain: settings.sampling_iters,
        rhat,
        chain_diagnostics: outputs.into_iter().map(|o| o.diagnostics).collect(),
        warnings,
        prior,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rhat_of_identical_iid_chains_is_near_one() {
        let mut rng = RngStream::new(1).rng();
        let chains: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..1000).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        let r = split_rhat(&chains);
        assert!((r - 1.0).abs() < 0.01, "{r}");
    }

    #[test]
    fn rhat_flags_disjoint_chains() {
        let chains = vec![vec![0.0, 0.1, 0.0, 0.1], vec![5.0, 5.1, 5.0, 5.1]];
        assert!(split_rhat(&chains) > 2.0);
    }

    #[test]
    fn reproducible_and_thread_independent() {
        let data = HistoricalDataset::new(vec![vec![5, 3, 2], vec![1, 4, 5], vec![3, 3, 4], vec![2, 5, 3]]).unwrap();
        let s = McmcSettings {
            chains: 2,
            sampling_iters: 200,
            warmup: 100,
        };
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let a = one.install(|| mcmc_sample(&data, PriorChoice::cauchy(), &s, &RngStream::new(4)).unwrap());
        let b = mcmc_sample(&data, PriorChoice::cauchy(), &s, &RngStream::new(4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 400);
        assert!(a.pi_global.iter().all(|p| (p.iter().sum::<f64>() - 1.0).abs() < 1e-12));
    }
}
