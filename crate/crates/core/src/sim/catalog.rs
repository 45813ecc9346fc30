//! Scenario grid: 32 probability vectors crossed with cluster count, cluster
//! size and dispersion.

use super::Scenario;

pub const CLUSTER_COUNTS: [usize; 4] = [5, 10, 20, 100];
pub const CLUSTER_SIZES: [u64; 4] = [10, 50, 100, 500];
pub const DISPERSIONS: [f64; 3] = [1.01, 5.0, 8.0];

const C3: [[f64; 3]; 12] = [
    [0.33, 0.33, 0.33],
    [0.01, 0.01, 0.98],
    [0.25, 0.01, 0.74],
    [0.49, 0.02, 0.49],
    [0.25, 0.25, 0.50],
    [0.10, 0.30, 0.60],
    [0.02, 0.03, 0.95],
    [0.05, 0.05, 0.90],
    [0.05, 0.10, 0.85],
    [0.05, 0.15, 0.80],
    [0.10, 0.20, 0.70],
    [0.05, 0.35, 0.65],
];

const C5: [[f64; 5]; 10] = [
    [0.20, 0.20, 0.20, 0.20, 0.20],
    [0.30, 0.30, 0.20, 0.10, 0.10],
    [0.44, 0.22, 0.11, 0.11, 0.11],
    [0.50, 0.30, 0.10, 0.05, 0.05],
    [0.45, 0.27, 0.18, 0.08, 0.01],
    [0.70, 0.10, 0.10, 0.05, 0.05],
    [0.80, 0.10, 0.05, 0.04, 0.01],
    [0.10, 0.10, 0.20, 0.30, 0.30],
    [0.11, 0.11, 0.11, 0.22, 0.44],
    [0.05, 0.05, 0.10, 0.30, 0.50],
];

const C10: [[f64; 10]; 10] = [
    [0.10, 0.10, 0.10, 0.10, 0.10, 0.10, 0.10, 0.10, 0.10, 0.10],
    [0.05, 0.05, 0.10, 0.10, 0.10, 0.10, 0.10, 0.10, 0.10, 0.20],
    [0.05, 0.05, 0.05, 0.05, 0.10, 0.10, 0.10, 0.10, 0.10, 0.30],
    [0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.10, 0.10, 0.10, 0.40],
    [0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.10, 0.50],
    [0.025, 0.025, 0.025, 0.025, 0.05, 0.05, 0.05, 0.05, 0.10, 0.60],
    [0.025, 0.025, 0.025, 0.025, 0.05, 0.05, 0.05, 0.05, 0.35, 0.35],
    [0.05, 0.05, 0.05, 0.05, 0.05, 0.05, 0.10, 0.20, 0.20, 0.20],
    [0.025, 0.025, 0.025, 0.025, 0.05, 0.05, 0.20, 0.20, 0.20, 0.20],
    [0.025, 0.025, 0.025, 0.025, 0.05, 0.05, 0.10, 0.20, 0.20, 0.30],
];

/// One row of the probability-vector tables.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    /// `C<categories>-<row>`, e.g. `C5-07`.
    pub id: String,
    pub row: usize,
    /// Values as tabulated. A few rows are rounded and do not sum to exactly 1.
    pub tabulated: Vec<f64>,
    /// `tabulated` rescaled to sum to 1.
    pub pi: Vec<f64>,
}

fn entry(c: usize, row: usize, values: &[f64]) -> ProbabilityVector {
    let total: f64 = values.iter().sum();
    ProbabilityVector {
        id: format!("C{c}-{row:02}"),
        row,
        tabulated: values.to_vec(),
        pi: values.iter().map(|v| v / total).collect(),
    }
}

/// The 32 tabulated vectors: 12 with `C = 3`, 10 with `C = 5`, 10 with `C = 10`.
pub fn probability_vectors() -> Vec<ProbabilityVector> {
    let mut out = Vec::with_capacity(32);
    out.extend(C3.iter().enumerate().map(|(i, v)| entry(3, i + 1, v)));
    out.extend(C5.iter().enumerate().map(|(i, v)| entry(5, i + 1, v)));
    out.extend(C10.iter().enumerate().map(|(i, v)| entry(10, i + 1, v)));
    out
}

/// Looks up a vector by id (`C3-5`, `C3-05` and `c3-05` are equivalent).
pub fn probability_vector(id: &str) -> Option<ProbabilityVector> {
    let (c, row) = id.trim().to_ascii_uppercase().strip_prefix('C')?.split_once('-').map(|(c, r)| {
        (c.parse::<usize>().ok(), r.parse::<usize>().ok())
    })?;
    let (c, row) = (c?, row?);
    probability_vectors()
        .into_iter()
        .find(|p| p.pi.len() == c && p.row == row)
}

/// Every vector crossed with `K`, `n = m` and `phi`, with desk-scale defaults.
/// Combinations with `phi >= n` would be dropped; none occur in this grid.
pub fn scenario_catalog() -> Vec<Scenario> {
    let mut out = Vec::new();
    for pv in probability_vectors() {
        for &k in &CLUSTER_COUNTS {
            for &n in &CLUSTER_SIZES {
                for &phi in &DISPERSIONS {
                    if phi >= n as f64 {
                        continue;
                    }
                    let mut s = Scenario::new(pv.pi.clone(), k, n, phi);
                    s.id = format!("{}_K{k}_n{n}_phi{phi}", pv.id);
                    out.push(s);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_examples() {
        let v = probability_vectors();
        assert_eq!(v.len(), 32);
        assert_eq!(v.iter().filter(|p| p.pi.len() == 3).count(), 12);
        assert_eq!(v.iter().filter(|p| p.pi.len() == 5).count(), 10);
        assert_eq!(v.iter().filter(|p| p.pi.len() == 10).count(), 10);
        assert_eq!(probability_vector("C3-5").unwrap().pi, vec![0.25, 0.25, 0.50]);
        assert_eq!(
            probability_vector("c5-07").unwrap().tabulated,
            vec![0.80, 0.10, 0.05, 0.04, 0.01]
        );
        assert!(probability_vector("C4-1").is_none());
    }

    #[test]
    fn normalized_vectors_sum_to_one() {
        for p in probability_vectors() {
            assert!((p.pi.iter().sum::<f64>() - 1.0).abs() < 1e-12, "{}", p.id);
        }
    }

    #[test]
    fn grid_size_and_sparse_flags() {
        let cat = scenario_catalog();
        assert_eq!(cat.len(), 32 * 4 * 4 * 3);
        let sparse = cat.iter().find(|s| s.id == "C10-06_K5_n10_phi8").unwrap();
        assert!(sparse.is_sparse());
        let dense = cat.iter().find(|s| s.id == "C3-05_K10_n50_phi5").unwrap();
        assert!(!dense.is_sparse());
        assert_eq!(dense.m, 50);
    }
}
