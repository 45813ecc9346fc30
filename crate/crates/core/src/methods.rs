//! Method identifiers and the orchestrator that computes several interval
//! methods from one fit, one bootstrap ensemble and one posterior per prior.

use std::fmt;
use std::str::FromStr;

use crate::asymptotic::{bonferroni_interval, mvn_interval, pointwise_interval, DEFAULT_MVN_DRAWS};
use crate::bayes::{
    bayes_bonferroni_interval, bayes_mean_centered_interval, bayes_rank_scs_interval, mcmc_sample,
    posterior_predictive, McmcSettings, PosteriorDraws, PriorChoice,
};
use crate::bootstrap::{
    asymmetric_calibration, build_ensemble, marginal_calibration, masr_interval, rank_scs_interval,
    symmetric_calibration, BootstrapEnsemble, CalibrationSettings, DEFAULT_REPLICATES,
};
use crate::error::{Error, Result};
use crate::interval::PredictionIntervalSet;
use crate::model::{fit_model, FutureSpec, HistoricalDataset, ModelFit};
use crate::rng::RngStream;

const TAG_MVN: u64 = 1;
const TAG_BOOTSTRAP: u64 = 2;
const TAG_MCMC: u64 = 3;
const TAG_PREDICTIVE: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PriorKind {
    Cauchy,
    Beta,
}

impl PriorKind {
    pub fn choice(self) -> PriorChoice {
        match self {
            PriorKind::Cauchy => PriorChoice::cauchy(),
            PriorKind::Beta => PriorChoice::beta(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PriorKind::Cauchy => "cauchy",
            PriorKind::Beta => "beta",
        }
    }
}

impl FromStr for PriorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cauchy" => Ok(PriorKind::Cauchy),
            "beta" => Ok(PriorKind::Beta),
            other => Err(Error::Validation(format!("unknown prior '{other}', expected cauchy or beta"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BayesConstruction {
    Marginal,
    Mean,
    Scs,
}

impl BayesConstruction {
    fn name(self) -> &'static str {
        match self {
            BayesConstruction::Marginal => "marginal",
            BayesConstruction::Mean => "mean",
            BayesConstruction::Scs => "scs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Pointwise,
    Bonferroni,
    Mvn,
    SymCalib,
    AsymCalib,
    Marginal,
    Masr,
    RankScs,
    /// `prior: None` resolves to the run's default prior.
    Bayes {
        construction: BayesConstruction,
        prior: Option<PriorKind>,
    },
}

/// Accepted ids, in display order. `bayes-*` ids also take a `-cauchy` or
/// `-beta` suffix; `all` expands to [`Method::all`].
pub const METHOD_IDS: &[&str] = &[
    "pointwise",
    "bonferroni",
    "mvn",
    "sym-calib",
    "asym-calib",
    "marginal",
    "masr",
    "rank-scs",
    "bayes-marginal",
    "bayes-mean",
    "bayes-scs",
    "bayes-marginal-cauchy",
    "bayes-marginal-beta",
    "bayes-mean-cauchy",
    "bayes-mean-beta",
    "bayes-scs-cauchy",
    "bayes-scs-beta",
    "all",
];

impl Method {
    /// The eight frequentist methods plus the rank-based Bayesian set under both priors.
    pub fn all() -> Vec<Method> {
        use Method::*;
        vec![
            Pointwise,
            Bonferroni,
            Mvn,
            SymCalib,
            AsymCalib,
            Marginal,
            Masr,
            RankScs,
            Bayes {
                construction: BayesConstruction::Scs,
                prior: Some(PriorKind::Beta),
            },
            Bayes {
                construction: BayesConstruction::Scs,
                prior: Some(PriorKind::Cauchy),
            },
        ]
    }

    /// Methods whose intervals were best behaved in coverage and tail balance.
    pub fn six_best() -> Vec<Method> {
        use Method::*;
        vec![
            SymCalib,
            AsymCalib,
            Marginal,
            Masr,
            RankScs,
            Bayes {
                construction: BayesConstruction::Scs,
                prior: Some(PriorKind::Cauchy),
            },
        ]
    }

    pub fn is_bootstrap(&self) -> bool {
        matches!(
            self,
            Method::SymCalib | Method::AsymCalib | Method::Marginal | Method::Masr | Method::RankScs
        )
    }

    pub fn with_default_prior(self, default: PriorKind) -> Method {
        match self {
            Method::Bayes { construction, prior: None } => Method::Bayes {
                construction,
                prior: Some(default),
            },
            other => other,
        }
    }

    /// Comma-separated list; `all` may appear among other ids. Duplicates are dropped.
    pub fn parse_list(s: &str) -> Result<Vec<Method>> {
        let mut out: Vec<Method> = Vec::new();
        for id in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let new = if id.eq_ignore_ascii_case("all") {
                Method::all()
            } else {
                vec![id.parse()?]
            };
            for m in new {
                if !out.contains(&m) {
                    out.push(m);
                }
            }
        }
        Ok(out)
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let id = s.trim().to_ascii_lowercase();
        let m = match id.as_str() {
            "pointwise" => Method::Pointwise,
            "bonferroni" => Method::Bonferroni,
            "mvn" => Method::Mvn,
            "sym-calib" => Method::SymCalib,
            "asym-calib" => Method::AsymCalib,
            "marginal" => Method::Marginal,
            "masr" => Method::Masr,
            "rank-scs" => Method::RankScs,
            _ => {
                let rest = id.strip_prefix("bayes-").ok_or_else(|| unknown(&id))?;
                let (body, prior) = match rest.rsplit_once('-') {
                    Some((b, p)) if p == "cauchy" || p == "beta" => (b, Some(p.parse()?)),
                    _ => (rest, None),
                };
                let construction = match body {
                    "marginal" => BayesConstruction::Marginal,
                    "mean" => BayesConstruction::Mean,
                    "scs" => BayesConstruction::Scs,
                    _ => return Err(unknown(&id)),
                };
                Method::Bayes { construction, prior }
            }
        };
        Ok(m)
    }
}

fn unknown(id: &str) -> Error {
    Error::UnknownMethod {
        id: id.to_string(),
        valid: METHOD_IDS.join(", "),
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Method::Pointwise => "pointwise",
            Method::Bonferroni => "bonferroni",
            Method::Mvn => "mvn",
            Method::SymCalib => "sym-calib",
            Method::AsymCalib => "asym-calib",
            Method::Marginal => "marginal",
            Method::Masr => "masr",
            Method::RankScs => "rank-scs",
            Method::Bayes { construction, prior } => {
                return match prior {
                    Some(p) => write!(f, "bayes-{}-{}", construction.name(), p.name()),
                    None => write!(f, "bayes-{}", construction.name()),
                }
            }
        };
        f.write_str(s)
    }
}

/// Tuning shared by all methods of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSettings {
    pub replicates: usize,
    pub calibration: CalibrationSettings,
    pub mvn_draws: usize,
    pub mcmc: McmcSettings,
    pub default_prior: PriorKind,
}

impl Default for MethodSettings {
    fn default() -> Self {
        Self {
            replicates: DEFAULT_REPLICATES,
            calibration: CalibrationSettings::default(),
            mvn_draws: DEFAULT_MVN_DRAWS,
            mcmc: McmcSettings::default(),
            default_prior: PriorKind::Cauchy,
        }
    }
}

impl MethodSettings {
    pub fn validate(&self, methods: &[Method]) -> Result<()> {
        if methods.iter().any(Method::is_bootstrap) {
            if self.replicates < 2 {
                return Err(Error::Validation(format!("B must be at least 2, got {}", self.replicates)));
            }
            let min_t = 1.0 / self.replicates as f64;
            if self.calibration.tolerance < min_t {
                return Err(Error::Validation(format!(
                    "calibration tolerance {} is below 1/B = {min_t}",
                    self.calibration.tolerance
                )));
            }
        }
        Ok(())
    }
}

/// Everything computed for one dataset.
#[derive(Debug, Clone)]
pub struct MethodResults {
    pub fit: ModelFit<f64>,
    pub intervals: Vec<PredictionIntervalSet<f64>>,
    pub posteriors: Vec<(PriorKind, PosteriorDraws)>,
}

/// Computes the requested methods in order. Random streams are forked per
/// component so adding or removing a method leaves the others unchanged.
pub fn compute_intervals(
    data: &HistoricalDataset,
    spec: &FutureSpec,
    methods: &[Method],
    settings: &MethodSettings,
    stream: &RngStream,
) -> Result<MethodResults> {
    settings.validate(methods)?;
    let fit = fit_model::<f64>(data)?;
    let methods: Vec<Method> = methods.iter().map(|m| m.with_default_prior(settings.default_prior)).collect();

    let ensemble: Option<BootstrapEnsemble<f64>> = if methods.iter().any(Method::is_bootstrap) {
        Some(build_ensemble(&fit, data, spec, settings.replicates, &stream.fork(TAG_BOOTSTRAP))?)
    } else {
        None
    };

    let mut priors: Vec<PriorKind> = methods
        .iter()
        .filter_map(|m| match m {
            Method::Bayes { prior, .. } => *prior,
            _ => None,
        })
        .collect();
    priors.sort();
    priors.dedup();
    let mut posteriors = Vec::new();
    let mut predictive = Vec::new();
    for p in priors {
        let tag = p as u64;
        let draws = mcmc_sample(data, p.choice(), &settings.mcmc, &stream.fork(TAG_MCMC).fork(tag))?;
        let pred = posterior_predictive(&draws, spec.m, &stream.fork(TAG_PREDICTIVE).fork(tag))?;
        predictive.push((p, pred));
        posteriors.push((p, draws));
    }

    let mut intervals = Vec::with_capacity(methods.len());
    for m in &methods {
        let e = || ensemble.as_ref().expect("ensemble built for bootstrap methods");
        let cal = &settings.calibration;
        let mut set = match *m {
            Method::Pointwise => pointwise_interval(&fit, spec),
            Method::Bonferroni => bonferroni_interval(&fit, spec),
            Method::Mvn => mvn_interval(&fit, spec, settings.mvn_draws, &stream.fork(TAG_MVN))?,
            Method::SymCalib => symmetric_calibration(e(), &fit, spec, cal)?,
            Method::AsymCalib => asymmetric_calibration(e(), &fit, spec, cal)?,
            Method::Marginal => marginal_calibration(e(), &fit, spec, cal)?,
            Method::Masr => masr_interval(e(), &fit, spec)?,
            Method::RankScs => rank_scs_interval(e(), &fit, spec)?,
            Method::Bayes { construction, prior } => {
                let prior = prior.expect("default prior resolved");
                let (_, pred) = predictive.iter().find(|(p, _)| *p == prior).expect("posterior computed");
                let mut set = match construction {
                    BayesConstruction::Marginal => bayes_bonferroni_interval(pred, spec.alpha),
                    BayesConstruction::Mean => bayes_mean_centered_interval(pred, spec.alpha),
                    BayesConstruction::Scs => bayes_rank_scs_interval(pred, spec.alpha)?,
                };
                let (_, draws) = posteriors.iter().find(|(p, _)| *p == prior).expect("posterior computed");
                set.diagnostics.extend(draws.warnings.iter().cloned());
                set
            }
        };
        set.method = m.to_string();
        intervals.push(set);
    }
    Ok(MethodResults {
        fit,
        intervals,
        posteriors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for id in METHOD_IDS.iter().filter(|i| **i != "all") {
            let m: Method = id.parse().unwrap();
            assert_eq!(m.to_string(), *id);
        }
    }

    #[test]
    fn all_is_ten_methods() {
        let all = Method::parse_list("all").unwrap();
        assert_eq!(all.len(), 10);
        assert_eq!(Method::parse_list("masr, all ,masr").unwrap().len(), 10);
    }

    #[test]
    fn unknown_id_lists_valid_ids() {
        let err = "bogus".parse::<Method>().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus") && msg.contains("rank-scs") && msg.contains("bayes-scs-beta"), "{msg}");
        assert!("bayes-scs-gamma".parse::<Method>().is_err());
    }

    #[test]
    fn default_prior_fills_in() {
        let m: Method = "bayes-mean".parse().unwrap();
        assert_eq!(m.with_default_prior(PriorKind::Beta).to_string(), "bayes-mean-beta");
    }

    #[test]
    fn tolerance_below_one_over_b_is_rejected() {
        let s = MethodSettings {
            replicates: 100,
            ..Default::default()
        };
        assert!(s.validate(&[Method::Marginal]).is_err());
        assert!(s.validate(&[Method::Pointwise]).is_ok());
    }

    #[test]
    fn methods_share_data_and_are_independent_of_selection() {
        let data = HistoricalDataset::new(vec![
            vec![10, 20, 15],
            vec![12, 18, 15],
            vec![9, 25, 11],
            vec![14, 16, 15],
            vec![11, 22, 12],
        ])
        .unwrap();
        let spec = FutureSpec::new(45, 0.05).unwrap();
        let s = MethodSettings {
            replicates: 400,
            mvn_draws: 20_000,
            mcmc: McmcSettings {
                chains: 2,
                sampling_iters: 300,
                warmup: 200,
            },
            ..Default::default()
        };
        let stream = RngStream::new(3);
        let all = compute_intervals(&data, &spec, &Method::all(), &s, &stream).unwrap();
        let one = compute_intervals(&data, &spec, &[Method::RankScs], &s, &stream).unwrap();
        assert_eq!(all.intervals[7], one.intervals[0]);
        let names: Vec<&str> = all.intervals.iter().map(|i| i.method.as_str()).collect();
        assert_eq!(names[8], "bayes-scs-beta");
        assert_eq!(all.posteriors.len(), 2);
    }
}
