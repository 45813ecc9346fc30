use approx::assert_relative_eq;
use mnpi::asymptotic::{bonferroni_interval, mvn_interval, pointwise_interval, PredCovariance};
use mnpi::bootstrap::{
    asymmetric_calibration, build_ensemble, marginal_calibration, masr_interval, rank_scs_interval, rank_summary,
    symmetric_calibration, BootstrapEnsemble, CalibrationSettings,
};
use mnpi::dm::{derive_eta0, dm_dispersion, generate_dataset, sample_dm_vector, Dispersion};
use mnpi::model::prediction_se;
use mnpi::{fit_model, FutureSpec, HistoricalDataset, ModelFit, PredictionIntervalSet, PredictionPoint, RngStream};
use proptest::prelude::*;

fn dataset() -> impl Strategy<Value = HistoricalDataset> {
    (2usize..8, 2usize..6).prop_flat_map(|(k, c)| {
        prop::collection::vec(prop::collection::vec(1u64..30, c), k)
            .prop_map(|counts| HistoricalDataset::new(counts).unwrap())
    })
}

fn well_formed(set: &PredictionIntervalSet<f64>, y_hat: &[f64]) {
    let m = set.m as f64;
    for (c, yh) in y_hat.iter().enumerate() {
        let (l, u) = (set.lower[c], set.upper[c]);
        assert!(l.is_finite() && u.is_finite(), "{}: non-finite bound", set.method);
        assert!(0.0 <= l && l <= u && u <= m, "{}: [{l}, {u}] outside [0, {m}]", set.method);
        let inside = yh.clamp(0.0, m);
        assert!(l <= inside + 1e-9 && inside <= u + 1e-9, "{}: y_hat {inside} not in [{l}, {u}]", set.method);
    }
}

fn ensemble_for(data: &HistoricalDataset, spec: &FutureSpec, b: usize, seed: u64) -> (ModelFit<f64>, BootstrapEnsemble<f64>) {
    let fit = fit_model::<f64>(data).unwrap();
    let e = build_ensemble(&fit, data, spec, b, &RngStream::new(seed)).unwrap();
    (fit, e)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pooled_residuals_vanish(data in dataset()) {
        let fit = fit_model::<f64>(&data).unwrap();
        for c in 0..data.categories() {
            let r: f64 = (0..data.clusters())
                .map(|k| data.row(k)[c] as f64 - data.cluster_sizes()[k] as f64 * fit.pi_hat[c])
                .sum();
            prop_assert!(r.abs() < 1e-9, "category {c}: {r}");
        }
    }

    #[test]
    fn prediction_point_sums_to_m(data in dataset(), m in 1u64..500) {
        let fit = fit_model::<f64>(&data).unwrap();
        let p = PredictionPoint::new(&fit, m);
        prop_assert!((p.y_hat.iter().sum::<f64>() - m as f64).abs() < 1e-9);
        prop_assert!(p.sep.iter().all(|&s| s > 0.0));
    }

    #[test]
    fn prediction_se_monotone(pi in 0.001f64..0.999, phi in 1.0f64..20.0, dphi in 0.01f64..5.0,
                              m in 1u64..300, dm in 1u64..50, n_hist in 10u64..5000) {
        let base = prediction_se(pi, phi, m, n_hist);
        prop_assert!(prediction_se(pi, phi + dphi, m, n_hist) > base);
        prop_assert!(prediction_se(pi, phi, m + dm, n_hist) > base);
    }

    #[test]
    fn covariance_rows_sum_to_zero(data in dataset(), m in 1u64..200) {
        let fit = fit_model::<f64>(&data).unwrap();
        let cov = PredCovariance::new(&fit, m);
        let c = cov.sigma.nrows();
        let scale = cov.sigma.diagonal().max();
        for i in 0..c {
            prop_assert!(cov.sigma.row(i).sum().abs() < 1e-9 * scale.max(1.0));
            for j in 0..c {
                prop_assert!((cov.sigma[(i, j)] - cov.sigma[(j, i)]).abs() < 1e-12 * scale.max(1.0));
                if i != j {
                    prop_assert!((-1.0 - 1e-12..0.0).contains(&cov.corr[(i, j)]), "r = {}", cov.corr[(i, j)]);
                }
            }
        }
    }

    #[test]
    fn dm_precision_round_trip(n in 2u64..1000, frac in 0.001f64..0.999) {
        let phi = 1.0 + frac * (n as f64 - 1.0);
        let eta0 = derive_eta0(n, phi).unwrap();
        prop_assert!(eta0 > 0.0);
        assert_relative_eq!(dm_dispersion(n, eta0), phi, max_relative = 1e-9);
    }

    #[test]
    fn dm_draws_sum_to_size(n in 0u64..200, phi_frac in 0.01f64..0.9, seed in any::<u64>()) {
        let pi = [0.2, 0.5, 0.3];
        let phi = 1.0 + phi_frac * (n.max(2) as f64 - 1.0);
        let mut rng = RngStream::new(seed).rng();
        let x = sample_dm_vector(n, &pi, phi, &mut rng).unwrap();
        prop_assert_eq!(x.iter().sum::<u64>(), n);
    }

    #[test]
    fn same_stream_same_dataset(seed in any::<u64>(), index in 0u64..1000) {
        let s = RngStream::with_index(seed, index);
        let a = generate_dataset(&[20; 5], &[0.3, 0.7], Dispersion::Fixed(3.0), &s, true).unwrap();
        let b = generate_dataset(&[20; 5], &[0.3, 0.7], Dispersion::Fixed(3.0), &s.clone(), true).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn repaired_datasets_have_no_empty_category(seed in any::<u64>()) {
        let d = generate_dataset(&[10; 5], &[0.01, 0.01, 0.98], Dispersion::Fixed(8.0), &RngStream::new(seed), true).unwrap();
        prop_assert!(d.column_totals().iter().all(|&t| t > 0));
    }

    #[test]
    fn rank_summary_invariants(columns in (1usize..4, 20usize..120).prop_flat_map(|(c, b)| {
        prop::collection::vec(prop::collection::vec(-5.0f64..5.0, b), c)
    }), alpha in 0.01f64..0.3) {
        let b = columns[0].len();
        let s = rank_summary(&columns, alpha).unwrap();
        for r in &s.ranks {
            let mut sorted = r.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (1..=b).collect::<Vec<_>>());
        }
        prop_assert!(s.scores.iter().all(|&w| w >= (b + 2) / 2 && w <= b));
        let looser = rank_summary(&columns, (alpha * 1.5).min(0.99)).unwrap();
        prop_assert!(looser.tau_star <= s.tau_star);
        let inside = s.scores.iter().filter(|&&w| w <= s.tau_star).count();
        prop_assert!(inside as f64 / b as f64 >= 1.0 - alpha - 1.0 / b as f64);
    }

    #[test]
    fn rank_scores_follow_row_permutation(columns in (1usize..4, 10usize..60).prop_flat_map(|(c, b)| {
        prop::collection::vec(prop::collection::vec(-5.0f64..5.0, b), c)
    }), shift in 1usize..9) {
        let b = columns[0].len();
        let rotated: Vec<Vec<f64>> = columns.iter().map(|c| {
            let mut c = c.clone();
            c.rotate_left(shift % b);
            c
        }).collect();
        let a = rank_summary(&columns, 0.05).unwrap();
        let r = rank_summary(&rotated, 0.05).unwrap();
        prop_assert_eq!(a.tau_star, r.tau_star);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn asymptotic_nesting(data in dataset(), m in 10u64..200, seed in any::<u64>()) {
        let fit = fit_model::<f64>(&data).unwrap();
        let spec = FutureSpec::new(m, 0.05).unwrap();
        let pw = pointwise_interval(&fit, &spec);
        let bf = bonferroni_interval(&fit, &spec);
        let mvn = mvn_interval(&fit, &spec, 100_000, &RngStream::new(seed)).unwrap();
        let q_pw = pw.multiplier_upper[0].unwrap();
        let q_bf = bf.multiplier_upper[0].unwrap();
        let q_mvn = mvn.multiplier_upper[0].unwrap();
        prop_assert!(q_pw - 0.02 <= q_mvn && q_mvn <= q_bf + 0.02, "{q_pw} {q_mvn} {q_bf}");
        let p = PredictionPoint::new(&fit, m);
        for c in 0..data.categories() {
            prop_assert!(bf.lower[c] <= pw.lower[c] && pw.upper[c] <= bf.upper[c]);
        }
        for set in [&pw, &bf, &mvn] {
            well_formed(set, &p.y_hat);
        }
    }

    #[test]
    fn bootstrap_sets_calibrate_on_their_ensemble(data in dataset(), m in 10u64..100, seed in any::<u64>()) {
        let spec = FutureSpec::new(m, 0.05).unwrap();
        let (fit, e) = ensemble_for(&data, &spec, 400, seed);
        let settings = CalibrationSettings { tolerance: 0.005, ..Default::default() };
        let b = e.replicates() as f64;
        let c = e.categories();
        let p = PredictionPoint::new(&fit, m);

        let sym = symmetric_calibration(&e, &fit, &spec, &settings).unwrap();
        let q = sym.multiplier_upper[0].unwrap();
        let hits = (0..e.replicates()).filter(|&r| e.z_row(r).iter().all(|z| z.abs() <= q)).count();
        prop_assert!(hits as f64 / b >= 0.95 - settings.tolerance, "sym {hits}");

        let masr = masr_interval(&e, &fit, &spec).unwrap();
        let q = masr.multiplier_upper[0].unwrap();
        let hits = (0..e.replicates()).filter(|&r| e.z_row(r).iter().all(|z| z.abs() <= q)).count();
        prop_assert!(hits as f64 / b >= 0.95);

        let marg = marginal_calibration(&e, &fit, &spec, &settings).unwrap();
        let target = 1.0 - 0.05 / (2.0 * c as f64);
        for k in 0..c {
            let (ql, qu) = (marg.multiplier_lower[k].unwrap(), marg.multiplier_upper[k].unwrap());
            let z = e.z_column(k);
            prop_assert!(z.iter().filter(|&&v| v >= -ql).count() as f64 / b >= target - settings.tolerance);
            prop_assert!(z.iter().filter(|&&v| v <= qu).count() as f64 / b >= target - settings.tolerance);
        }

        let asym = asymmetric_calibration(&e, &fit, &spec, &settings).unwrap();
        let rank = rank_scs_interval(&e, &fit, &spec).unwrap();
        for set in [&sym, &masr, &marg, &asym, &rank] {
            well_formed(set, &p.y_hat);
        }
    }

    #[test]
    fn simultaneous_never_exceeds_marginal_coverage(data in dataset(), seed in any::<u64>()) {
        let spec = FutureSpec::new(40, 0.05).unwrap();
        let (fit, e) = ensemble_for(&data, &spec, 300, seed);
        let set = rank_scs_interval(&e, &fit, &spec).unwrap();
        let joint = (0..e.replicates()).filter(|&r| {
            (0..e.categories()).all(|c| set.contains_category(c, e.y(r, c)))
        }).count();
        for c in 0..e.categories() {
            let marginal = (0..e.replicates()).filter(|&r| set.contains_category(c, e.y(r, c))).count();
            prop_assert!(joint <= marginal);
        }
    }
}
