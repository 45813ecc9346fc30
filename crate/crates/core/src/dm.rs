//! Dirichlet-multinomial generation.
//!
//! A cluster of size `n` with mean probabilities `pi` and dispersion `phi` is
//! drawn as `pi_k ~ Dirichlet(eta0 * pi)`, `x ~ Multinomial(n, pi_k)` where
//! `eta0 = (n - phi) / (phi - 1)`, which makes `(n + eta0) / (1 + eta0) = phi`.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma};

use crate::error::{Error, Result};
use crate::model::{clamp_dispersion, HistoricalDataset};
use crate::rng::RngStream;

/// Dirichlet precision giving overdispersion `phi` for draws of size `n`.
pub fn derive_eta0(n: u64, phi: f64) -> Result<f64> {
    let nf = n as f64;
    if !(phi > 1.0 && phi < nf) {
        return Err(Error::InvalidDispersion { phi, n });
    }
    Ok((nf - phi) / (phi - 1.0))
}

/// Overdispersion factor `(n + eta0) / (1 + eta0)` of a DM with precision `eta0`.
pub fn dm_dispersion(n: u64, eta0: f64) -> f64 {
    (n as f64 + eta0) / (1.0 + eta0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DmParams {
    pub pi_target: Vec<f64>,
    pub phi: f64,
    pub eta0: f64,
    pub eta: Vec<f64>,
    pub n: u64,
}

impl DmParams {
    pub fn new(n: u64, pi: &[f64], phi: f64) -> Result<Self> {
        let eta0 = derive_eta0(n, phi)?;
        Ok(Self {
            pi_target: pi.to_vec(),
            phi,
            eta0,
            eta: pi.iter().map(|p| eta0 * p).collect(),
            n,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        let p = sample_dirichlet(&self.eta, rng);
        sample_multinomial(self.n, &p, rng)
    }
}

/// Normalised Gamma(eta_c, 1) variates.
///
/// Categories with `eta_c == 0` get probability zero. Small shapes are drawn in
/// log space (`G(a) = G(a+1) * U^(1/a)`) so that the normalisation never sees an
/// all-zero vector.
pub fn sample_dirichlet<R: Rng + ?Sized>(eta: &[f64], rng: &mut R) -> Vec<f64> {
    let mut logs = Vec::with_capacity(eta.len());
    for &a in eta {
        if !(a > 0.0) {
            logs.push(f64::NEG_INFINITY);
        } else if a < 1.0 {
            let g: f64 = Gamma::new(a + 1.0, 1.0).expect("shape > 0").sample(rng);
            let u: f64 = 1.0 - rng.random::<f64>();
            logs.push(g.ln() + u.ln() / a);
        } else {
            let g: f64 = Gamma::new(a, 1.0).expect("shape > 0").sample(rng);
            logs.push(g.ln());
        }
    }
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        // no positive shape: nothing sensible to draw
        return vec![0.0; eta.len()];
    }
    let mut p: Vec<f64> = logs.iter().map(|&l| (l - max).exp()).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= s);
    p
}

/// Multinomial draw by sequential conditional binomials.
pub fn sample_multinomial<R: Rng + ?Sized>(n: u64, p: &[f64], rng: &mut R) -> Vec<u64> {
    let c = p.len();
    let mut out = vec![0u64; c];
    let mut left = n;
    let mut mass: f64 = p.iter().sum();
    for i in 0..c {
        if left == 0 {
            break;
        }
        if i + 1 == c {
            out[i] = left;
            break;
        }
        let q = if mass > 0.0 { (p[i] / mass).clamp(0.0, 1.0) } else { 0.0 };
        let x = if q >= 1.0 {
            left
        } else if q <= 0.0 {
            0
        } else {
            Binomial::new(left, q).expect("valid binomial").sample(rng)
        };
        out[i] = x;
        left -= x;
        mass -= p[i];
    }
    out
}

/// One DM count vector of size `n`. Sizes 0 and 1 need no dispersion (a single
/// unit is categorical whatever the precision).
pub fn sample_dm_vector<R: Rng + ?Sized>(
    n: u64,
    pi: &[f64],
    phi: f64,
    rng: &mut R,
) -> Result<Vec<u64>> {
    match n {
        0 => Ok(vec![0; pi.len()]),
        1 => Ok(sample_multinomial(1, pi, rng)),
        _ => Ok(DmParams::new(n, pi, phi)?.sample(rng)),
    }
}

/// How the dispersion of each generated cluster is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dispersion {
    /// Same `phi` for every cluster; must satisfy `1 < phi < n_k`.
    Fixed(f64),
    /// Estimate clamped per cluster to `[1.01, 0.975 n_k]`.
    ClampedPerCluster(f64),
}

impl Dispersion {
    fn for_size(&self, n: u64) -> f64 {
        match *self {
            Dispersion::Fixed(phi) => phi,
            Dispersion::ClampedPerCluster(raw) => clamp_dispersion(raw, n),
        }
    }
}

/// Draws `K = sizes.len()` independent DM clusters.
///
/// With `repair_zero_columns`, each category that ended up with no counts gets a
/// single count added to a uniformly chosen cluster (raising that cluster's size by one).
pub fn generate_dataset(
    sizes: &[u64],
    pi: &[f64],
    dispersion: Dispersion,
    stream: &RngStream,
    repair_zero_columns: bool,
) -> Result<HistoricalDataset> {
    let mut rng = stream.rng();
    generate_dataset_with(sizes, pi, dispersion, &mut rng, repair_zero_columns)
}

pub fn generate_dataset_with<R: Rng + ?Sized>(
    sizes: &[u64],
    pi: &[f64],
    dispersion: Dispersion,
    rng: &mut R,
    repair_zero_columns: bool,
) -> Result<HistoricalDataset> {
    let mut counts = Vec::with_capacity(sizes.len());
    for &n in sizes {
        counts.push(sample_dm_vector(n, pi, dispersion.for_size(n), rng)?);
    }
    if repair_zero_columns {
        repair_zero_columns_in(&mut counts, rng);
    }
    HistoricalDataset::new(counts)
}

pub(crate) fn repair_zero_columns_in<R: Rng + ?Sized>(counts: &mut [Vec<u64>], rng: &mut R) {
    if counts.is_empty() {
        return;
    }
    let c = counts[0].len();
    for cat in 0..c {
        if counts.iter().all(|row| row[cat] == 0) {
            let k = rng.random_range(0..counts.len());
            counts[k][cat] += 1;
        }
    }
}
