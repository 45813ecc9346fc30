//! Flat TOML simulation configuration.
//!
//! ```toml
//! vector = "C3-05"          # or pi = [0.25, 0.25, 0.5], or catalog = true
//! K = 10                    # scalars or arrays; arrays are crossed
//! n = 50
//! phi = [1.01, 5.0]
//! methods = "pointwise,marginal,rank-scs"
//! n_iter = 500
//! B = 2000
//! seed = 2024
//! ```
//!
//! Other keys: `id`, `m`, `chains`, `S` (total retained draws) or
//! `sampling_iters`, `warmup`, `mvn_draws`, `tolerance`, `alpha`, `prior`,
//! `repair_zero_columns`.

use mnpi::methods::{Method, PriorKind};
use mnpi::sim::{probability_vector, scenario_catalog, Scenario};
use toml::{Table, Value};

use crate::CliError;

const KEYS: &[&str] = &[
    "id",
    "vector",
    "pi",
    "catalog",
    "K",
    "n",
    "m",
    "phi",
    "n_iter",
    "methods",
    "B",
    "chains",
    "S",
    "sampling_iters",
    "warmup",
    "mvn_draws",
    "tolerance",
    "alpha",
    "seed",
    "prior",
    "repair_zero_columns",
];

fn bad(key: &str, expected: &str) -> CliError {
    CliError::Config(format!("key '{key}': expected {expected}"))
}

fn as_u64(key: &str, v: &Value) -> Result<u64, CliError> {
    v.as_integer()
        .filter(|&i| i >= 0)
        .map(|i| i as u64)
        .ok_or_else(|| bad(key, "a non-negative integer"))
}

fn as_f64(key: &str, v: &Value) -> Result<f64, CliError> {
    match v {
        Value::Float(f) => Ok(*f),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(bad(key, "a number")),
    }
}

/// Scalar or array of scalars.
fn many<T>(t: &Table, key: &str, f: impl Fn(&str, &Value) -> Result<T, CliError>) -> Result<Option<Vec<T>>, CliError> {
    match t.get(key) {
        None => Ok(None),
        Some(Value::Array(a)) if !a.is_empty() => a.iter().map(|v| f(key, v)).collect::<Result<_, _>>().map(Some),
        Some(Value::Array(_)) => Err(bad(key, "a non-empty array")),
        Some(v) => Ok(Some(vec![f(key, v)?])),
    }
}

fn one<T>(t: &Table, key: &str, f: impl Fn(&str, &Value) -> Result<T, CliError>) -> Result<Option<T>, CliError> {
    t.get(key).map(|v| f(key, v)).transpose()
}

fn as_str(key: &str, v: &Value) -> Result<String, CliError> {
    v.as_str().map(str::to_string).ok_or_else(|| bad(key, "a string"))
}

/// Expands a configuration into scenarios (vectors x K x n x phi).
pub fn scenarios_from_toml(text: &str, full_scale: bool) -> Result<Vec<Scenario>, CliError> {
    let t: Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
    if let Some(k) = t.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(CliError::Config(format!("unknown key '{k}'; valid keys: {}", KEYS.join(", "))));
    }

    let catalog = one(&t, "catalog", |k, v| v.as_bool().ok_or_else(|| bad(k, "a boolean")))?.unwrap_or(false);
    let mut base: Vec<Scenario> = if catalog {
        for k in ["vector", "pi", "K", "n", "phi", "m", "id"] {
            if t.contains_key(k) {
                return Err(CliError::Config(format!("key '{k}' cannot be combined with catalog = true")));
            }
        }
        scenario_catalog()
    } else {
        let vectors: Vec<(String, Vec<f64>)> = match (t.get("pi"), t.get("vector")) {
            (Some(_), Some(_)) => return Err(CliError::Config("give either 'pi' or 'vector', not both".into())),
            (Some(Value::Array(a)), None) => {
                let pi: Vec<f64> = a.iter().map(|v| as_f64("pi", v)).collect::<Result<_, _>>()?;
                let id = one(&t, "id", as_str)?.unwrap_or_else(|| "custom".into());
                vec![(id, pi)]
            }
            (Some(_), None) => return Err(bad("pi", "an array of probabilities")),
            (None, _) => many(&t, "vector", as_str)?
                .ok_or_else(|| CliError::Config("one of 'pi', 'vector' or 'catalog' is required".into()))?
                .into_iter()
                .map(|id| {
                    probability_vector(&id)
                        .map(|p| (p.id, p.pi))
                        .ok_or_else(|| CliError::Config(format!("unknown probability vector '{id}'")))
                })
                .collect::<Result<_, _>>()?,
        };
        let ks = many(&t, "K", as_u64)?.ok_or_else(|| CliError::Config("missing key 'K'".into()))?;
        let ns = many(&t, "n", as_u64)?.ok_or_else(|| CliError::Config("missing key 'n'".into()))?;
        let phis = many(&t, "phi", as_f64)?.ok_or_else(|| CliError::Config("missing key 'phi'".into()))?;
        let m = one(&t, "m", as_u64)?;
        let mut out = Vec::new();
        for (id, pi) in &vectors {
            for &k in &ks {
                for &n in &ns {
                    for &phi in &phis {
                        let mut s = Scenario::new(pi.clone(), k as usize, n, phi);
                        s.m = m.unwrap_or(n);
                        s.id = format!("{id}_K{k}_n{n}_phi{phi}");
                        out.push(s);
                    }
                }
            }
        }
        out
    };

    let methods = match t.get("methods") {
        None => None,
        Some(Value::String(s)) => Some(Method::parse_list(s)?),
        Some(Value::Array(a)) => {
            let ids: Vec<String> = a.iter().map(|v| as_str("methods", v)).collect::<Result<_, _>>()?;
            Some(Method::parse_list(&ids.join(","))?)
        }
        Some(_) => return Err(bad("methods", "a string or an array of strings")),
    };
    let prior = one(&t, "prior", as_str)?
        .map(|p| p.parse::<PriorKind>().map_err(|e| CliError::Config(e.to_string())))
        .transpose()?;
    let n_iter = one(&t, "n_iter", as_u64)?;
    let b = one(&t, "B", as_u64)?;
    let chains = one(&t, "chains", as_u64)?;
    let total_draws = one(&t, "S", as_u64)?;
    let sampling_iters = one(&t, "sampling_iters", as_u64)?;
    if total_draws.is_some() && sampling_iters.is_some() {
        return Err(CliError::Config("give either 'S' or 'sampling_iters', not both".into()));
    }
    let warmup = one(&t, "warmup", as_u64)?;
    let mvn_draws = one(&t, "mvn_draws", as_u64)?;
    let tolerance = one(&t, "tolerance", as_f64)?;
    let alpha = one(&t, "alpha", as_f64)?;
    let seed = one(&t, "seed", as_u64)?;
    let repair = one(&t, "repair_zero_columns", |k, v| v.as_bool().ok_or_else(|| bad(k, "a boolean")))?;

    for s in &mut base {
        if full_scale {
            *s = s.clone().full_scale();
        }
        if let Some(m) = &methods {
            s.methods = m.clone();
        }
        if let Some(p) = prior {
            s.prior = p;
        }
        if let Some(v) = n_iter {
            s.n_iter = v as usize;
        }
        if let Some(v) = b {
            s.replicates = v as usize;
        }
        if let Some(v) = chains {
            s.chains = v as usize;
        }
        if let Some(v) = sampling_iters {
            s.sampling_iters = v as usize;
        }
        if let Some(v) = total_draws {
            s.sampling_iters = (v as usize).div_ceil(s.chains.max(1));
        }
        if let Some(v) = warmup {
            s.warmup = v as usize;
        }
        if let Some(v) = mvn_draws {
            s.mvn_draws = v as usize;
        }
        if let Some(v) = tolerance {
            s.tolerance = v;
        }
        if let Some(v) = alpha {
            s.alpha = v;
        }
        if let Some(v) = seed {
            s.seed = v;
        }
        if let Some(v) = repair {
            s.repair_zero_columns = v;
        }
    }
    for s in &base {
        s.validate().map_err(|e| match e {
            mnpi::Error::UnknownMethod { .. } => CliError::Core(e),
            other => CliError::Config(format!("scenario {}: {other}", s.id)),
        })?;
    }
    Ok(base)
}
