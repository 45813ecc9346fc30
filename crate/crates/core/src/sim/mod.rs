//! Monte-Carlo coverage study.
//!
//! Each iteration draws a historical dataset and one future study from the
//! Dirichlet-multinomial model, computes every requested method on the same
//! data and records joint containment and per-bound violations.

pub mod catalog;

use std::time::Instant;

use rayon::prelude::*;

use crate::bayes::McmcSettings;
use crate::bootstrap::CalibrationSettings;
use crate::dm::{generate_dataset_with, sample_dm_vector, Dispersion};
use crate::error::{Error, Result};
use crate::methods::{compute_intervals, Method, MethodSettings, PriorKind};
use crate::model::FutureSpec;
use crate::rng::RngStream;

pub use catalog::{probability_vector, probability_vectors, scenario_catalog, ProbabilityVector};

/// Largest fraction of iterations allowed to fail before the run is aborted.
pub const FAILURE_CAP: f64 = 0.05;
const TAG_METHODS: u64 = 0x6d65_7468;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub k: usize,
    pub n: u64,
    pub m: u64,
    pub phi: f64,
    pub pi_true: Vec<f64>,
    pub n_iter: usize,
    pub methods: Vec<Method>,
    pub replicates: usize,
    pub chains: usize,
    /// Retained posterior draws per chain; `S = chains * sampling_iters`.
    pub sampling_iters: usize,
    pub warmup: usize,
    pub mvn_draws: usize,
    pub tolerance: f64,
    pub alpha: f64,
    pub seed: u64,
    pub prior: PriorKind,
    pub repair_zero_columns: bool,
}

impl Scenario {
    /// Desk-scale defaults: 500 iterations, `B = 2000`, `S = 4000`.
    pub fn new(pi_true: Vec<f64>, k: usize, n: u64, phi: f64) -> Self {
        Self {
            id: "custom".into(),
            k,
            n,
            m: n,
            phi,
            pi_true,
            n_iter: 500,
            methods: Method::all(),
            replicates: 2_000,
            chains: 4,
            sampling_iters: 1_000,
            warmup: 1_000,
            mvn_draws: 100_000,
            tolerance: 0.0025,
            alpha: 0.05,
            seed: 1,
            prior: PriorKind::Cauchy,
            repair_zero_columns: true,
        }
    }

    /// Switches to 1000 iterations, `B = 10000` and `S = 10000`.
    pub fn full_scale(mut self) -> Self {
        self.n_iter = 1_000;
        self.replicates = 10_000;
        self.sampling_iters = 2_500;
        self
    }

    pub fn categories(&self) -> usize {
        self.pi_true.len()
    }

    /// `min_c pi_c * n`.
    pub fn min_expected_count(&self) -> f64 {
        self.pi_true.iter().fold(f64::INFINITY, |a, &p| a.min(p * self.n as f64))
    }

    /// Fewer than one expected count per cluster in some category: zero
    /// columns are frequent and every method degrades.
    pub fn is_sparse(&self) -> bool {
        self.min_expected_count() < 1.0
    }

    pub fn method_settings(&self) -> MethodSettings {
        MethodSettings {
            replicates: self.replicates,
            calibration: CalibrationSettings {
                tolerance: self.tolerance,
                ..Default::default()
            },
            mvn_draws: self.mvn_draws,
            mcmc: McmcSettings {
                chains: self.chains,
                sampling_iters: self.sampling_iters,
                warmup: self.warmup,
            },
            default_prior: self.prior,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 || self.categories() < 2 {
            return Err(Error::DegenerateDesign(format!(
                "need K >= 2 and C >= 2, got K = {}, C = {}",
                self.k,
                self.categories()
            )));
        }
        let total: f64 = self.pi_true.iter().sum();
        if self.pi_true.iter().any(|&p| !(p > 0.0) || !p.is_finite()) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "pi_true must be strictly positive and sum to 1 (sum = {total})"
            )));
        }
        let bound = self.n.min(self.m) as f64;
        if !(self.phi > 1.0 && self.phi < bound) {
            return Err(Error::InvalidDispersion {
                phi: self.phi,
                n: self.n.min(self.m),
            });
        }
        if self.n_iter == 0 {
            return Err(Error::Validation("n_iter must be positive".into()));
        }
        FutureSpec::new(self.m, self.alpha)?;
        self.method_settings().validate(&self.methods)
    }
}

/// Outcome of one iteration for one method.
#[derive(Debug, Clone, PartialEq)]
struct Outcome {
    contained: bool,
    below: Vec<bool>,
    above: Vec<bool>,
    multiplier_lower: Vec<Option<f64>>,
    multiplier_upper: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: String,
    pub contained: usize,
    pub iterations: usize,
    /// Empirical simultaneous coverage.
    pub coverage: f64,
    pub mc_error: f64,
    pub below: Vec<usize>,
    pub above: Vec<usize>,
    /// `P(y_c < L_c)` per category.
    pub p_below: Vec<f64>,
    /// `P(y_c > U_c)` per category.
    pub p_above: Vec<f64>,
    /// Per successful iteration, in iteration order.
    pub multiplier_lower: Vec<Vec<Option<f64>>>,
    pub multiplier_upper: Vec<Vec<Option<f64>>>,
}

impl MethodSummary {
    /// Mean of a per-iteration multiplier over iterations where it is defined.
    pub fn mean_multiplier(&self, category: usize, upper: bool) -> Option<f64> {
        let trace = if upper { &self.multiplier_upper } else { &self.multiplier_lower };
        let v: Vec<f64> = trace.iter().filter_map(|r| r[category]).collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub scenario: Scenario,
    pub successes: usize,
    pub failures: usize,
    /// First few failure messages, with their iteration index.
    pub failure_messages: Vec<(usize, String)>,
    pub min_expected_count: f64,
    pub methods: Vec<MethodSummary>,
    pub runtime_secs: f64,
}

impl SimulationReport {
    pub fn method(&self, name: &str) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == name)
    }
}

/// Normal-approximation binomial half-width `1.96 sqrt(p (1 - p) / n)`.
pub fn mc_error(p: f64, n: usize) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}

fn run_iteration(s: &Scenario, iter: usize) -> Result<(Vec<String>, Vec<Outcome>)> {
    let stream = RngStream::with_index(s.seed, iter as u64);
    let mut rng = stream.rng();
    let sizes = vec![s.n; s.k];
    let data = generate_dataset_with(&sizes, &s.pi_true, Dispersion::Fixed(s.phi), &mut rng, s.repair_zero_columns)?;
    let future = sample_dm_vector(s.m, &s.pi_true, s.phi, &mut rng)?;
    let spec = FutureSpec::new(s.m, s.alpha)?;
    let res = compute_intervals(&data, &spec, &s.methods, &s.method_settings(), &stream.fork(TAG_METHODS))?;
    let names = res.intervals.iter().map(|i| i.method.clone()).collect();
    let outcomes = res
        .intervals
        .iter()
        .map(|set| Outcome {
            contained: set.contains(&future),
            below: (0..future.len()).map(|c| set.below(c, future[c])).collect(),
            above: (0..future.len()).map(|c| set.above(c, future[c])).collect(),
            multiplier_lower: set.multiplier_lower.clone(),
            multiplier_upper: set.multiplier_upper.clone(),
        })
        .collect();
    Ok((names, outcomes))
}

/// Runs `n_iter` iterations (iteration `i` on stream `(seed, i)`) and
/// aggregates counts. Results do not depend on the thread schedule.
pub fn run_simulation(s: &Scenario) -> Result<SimulationReport> {
    s.validate()?;
    let start = Instant::now();
    let results: Vec<Result<(Vec<String>, Vec<Outcome>)>> =
        (0..s.n_iter).into_par_iter().map(|i| run_iteration(s, i)).collect();

    let c = s.categories();
    let mut names: Option<Vec<String>> = None;
    let mut summaries: Vec<MethodSummary> = Vec::new();
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        let (n, outcomes) = match r {
            Ok(v) => v,
            Err(e) => {
                failures.push((i, e.to_string()));
                continue;
            }
        };
        if names.is_none() {
            summaries = n
                .iter()
                .map(|m| MethodSummary {
                    method: m.clone(),
                    contained: 0,
                    iterations: 0,
                    coverage: 0.0,
                    mc_error: 0.0,
                    below: vec![0; c],
                    above: vec![0; c],
                    p_below: vec![],
                    p_above: vec![],
                    multiplier_lower: vec![],
                    multiplier_upper: vec![],
                })
                .collect();
            names = Some(n);
        }
        for (sum, o) in summaries.iter_mut().zip(outcomes) {
            sum.iterations += 1;
            sum.contained += o.contained as usize;
            for k in 0..c {
                sum.below[k] += o.below[k] as usize;
                sum.above[k] += o.above[k] as usize;
            }
            sum.multiplier_lower.push(o.multiplier_lower);
            sum.multiplier_upper.push(o.multiplier_upper);
        }
    }
    let max_failures = (FAILURE_CAP * s.n_iter as f64).floor() as usize;
    if failures.len() > max_failures || names.is_none() {
        let first = failures.first().map(|(i, m)| format!(" (iteration {i}: {m})")).unwrap_or_default();
        return Err(Error::Simulation(format!(
            "{} of {} iterations failed, above the {:.0}% cap{first}",
            failures.len(),
            s.n_iter,
            FAILURE_CAP * 100.0
        )));
    }
    for sum in &mut summaries {
        let n = sum.iterations as f64;
        sum.coverage = sum.contained as f64 / n;
        sum.mc_error = mc_error(sum.coverage, sum.iterations);
        sum.p_below = sum.below.iter().map(|&v| v as f64 / n).collect();
        sum.p_above = sum.above.iter().map(|&v| v as f64 / n).collect();
    }
    let n_fail = failures.len();
    failures.truncate(10);
    Ok(SimulationReport {
        successes: s.n_iter - n_fail,
        failures: n_fail,
        failure_messages: failures,
        min_expected_count: s.min_expected_count(),
        scenario: s.clone(),
        methods: summaries,
        runtime_secs: start.elapsed().as_secs_f64(),
    })
}

/// Per-bound marginal probabilities for one method and category.
#[derive(Debug, Clone, PartialEq)]
pub struct TailBalanceRow {
    pub method: String,
    pub category: usize,
    /// `P(y_c >= L_c)`.
    pub p_at_or_above_lower: f64,
    /// `P(y_c <= U_c)`.
    pub p_at_or_below_upper: f64,
    /// `1 - alpha / (2C)`.
    pub reference: f64,
    /// Binomial half-width at the reference level.
    pub mc_error: f64,
}

pub fn tail_balance(report: &SimulationReport) -> Vec<TailBalanceRow> {
    let c = report.scenario.categories();
    let reference = 1.0 - report.scenario.alpha / (2.0 * c as f64);
    report
        .methods
        .iter()
        .flat_map(|m| {
            (0..c).map(move |k| TailBalanceRow {
                method: m.method.clone(),
                category: k,
                p_at_or_above_lower: 1.0 - m.p_below[k],
                p_at_or_below_upper: 1.0 - m.p_above[k],
                reference,
                mc_error: mc_error(reference, m.iterations),
            })
        })
        .collect()
}
