use std::sync::atomic::{AtomicUsize, Ordering};

use ridgequad::density::convolve_density;
use ridgequad::diagnostics::{l2_error, monte_carlo_mean, ridge_floor};
use ridgequad::models::{
    exact_ridge_example, exact_ridge_integral, Model, ModelKind,
};
use ridgequad::nearridge::{
    conditional_mean_profile, fit_near_ridge, hit_and_run_step, stream_rng, BudgetAllocation,
};
use ridgequad::orthopoly::{lanczos_recurrence, DiscreteMeasure};
use ridgequad::{near_ridge_pseudospectral, ridge_pseudospectral, Error, RidgeDirection, RidgeRule};

#[test]
fn exact_ridge_through_near_ridge_path() {
    let model = Model::with_default_direction(ModelKind::ExactRidge, 0).unwrap();
    let a = model.direction().clone();
    let exact = ridge_pseudospectral(model.evaluator(), &a, 10_001, 20).unwrap();
    let near = near_ridge_pseudospectral(model.evaluator(), &a, 10_001, 20, 1, 3).unwrap();
    assert_eq!(near.expansion.truncation_degree(), 20);
    for (x, y) in exact.full_coefficients().iter().zip(near.expansion.full_coefficients()) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn exact_ridge_profile_sets_are_noise_free() {
    let model = Model::with_default_direction(ModelKind::ExactRidge, 0).unwrap();
    let a = model.direction().clone();
    let rule = RidgeRule::build(&a, 4001, 6).unwrap();
    let profile = conditional_mean_profile(model.evaluator(), &a, rule.rule(), 8, 5).unwrap();
    for set in profile {
        assert_eq!(set.len(), 8);
        for v in &set.values {
            assert!((v - model.profile(set.lambda).unwrap()).abs() < 1e-12);
        }
        assert!(set.std_error < 1e-12);
    }
}

#[test]
fn integral_uses_one_evaluation_per_node() {
    let a = RidgeDirection::new(vec![0.3, -0.1, 0.8, 0.5]).unwrap();
    let calls = AtomicUsize::new(0);
    let fit = ridge_pseudospectral(
        |x| {
            calls.fetch_add(1, Ordering::Relaxed);
            exact_ridge_example(x, &a).unwrap()
        },
        &a,
        20_001,
        30,
    )
    .unwrap();
    assert_eq!(calls.load(Ordering::Relaxed), 31);
    assert!((fit.integral() - exact_ridge_integral(&a)).abs() < 1e-6);
}

#[test]
fn breakdown_reports_achievable_degree() {
    let a = RidgeDirection::new(vec![1.0]).unwrap();
    let measure = DiscreteMeasure::from_density(&convolve_density(&a, 5).unwrap()).unwrap();
    assert_eq!(
        lanczos_recurrence(&measure, 7).unwrap_err(),
        Error::Breakdown { requested: 7, achievable: 4 }
    );
    assert!(RidgeRule::build(&a, 5, 7).is_err());
}

#[test]
fn central_slice_mean_is_symmetric() {
    // f = aᵀx + εᵀx with ε ⊥ a: the λ = 0 slice is symmetric under x → -x.
    let a = RidgeDirection::ones(6).unwrap();
    let eps = [0.5, -0.5, 0.25, -0.25, 0.0, 0.0];
    let f = |x: &[f64]| a.project(x) + eps.iter().zip(x).map(|(e, v)| e * v).sum::<f64>();
    let rule = RidgeRule::build(&a, 2001, 2).unwrap();
    let profile = conditional_mean_profile(f, &a, rule.rule(), 20_000, 1).unwrap();
    let centre = &profile[1];
    assert!(centre.lambda.abs() < 1e-12);
    // Loose: consecutive hit-and-run samples are strongly correlated.
    assert!(centre.mean.abs() < 0.06, "{}", centre.mean);
}

#[test]
fn hit_and_run_segment_mean() {
    let a = RidgeDirection::new(vec![1.0, 0.0]).unwrap();
    let mut rng = stream_rng(11, 0);
    let mut x = vec![0.3, 0.0];
    let n = 20_000;
    let mut sum = 0.0;
    for _ in 0..n {
        x = hit_and_run_step(&a, &x, &mut rng).unwrap();
        assert_eq!(x[0], 0.3);
        sum += x[1];
    }
    let se = (1.0f64 / 3.0 / n as f64).sqrt();
    assert!((sum / n as f64).abs() < 4.0 * se);
}

/// Standard error of a chain mean from non-overlapping batch means, which,
/// unlike `σ̂/√M`, accounts for autocorrelation.
fn batch_means_se(values: &[f64], batch: usize) -> f64 {
    let means: Vec<f64> = values.chunks_exact(batch).map(|c| c.iter().sum::<f64>() / batch as f64).collect();
    let k = means.len() as f64;
    let m = means.iter().sum::<f64>() / k;
    (means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (k - 1.0) / k).sqrt()
}

#[test]
fn near_ridge_integral_matches_monte_carlo() {
    let model = Model::with_default_direction(ModelKind::NearRidge, 0).unwrap();
    let a = model.direction().clone();
    let rule = RidgeRule::build(&a, 10_001, 8).unwrap();
    let fit = fit_near_ridge(&rule, model.evaluator(), BudgetAllocation::Uniform(4000), 4).unwrap();
    let (mean, se) = monte_carlo_mean(model.evaluator(), 25, 1_000_000, 9);
    let weights = rule.rule().weights();
    let combine = |node_se: &dyn Fn(usize) -> f64| {
        (0..weights.len()).map(|j| (weights[j] * node_se(j)).powi(2)).sum::<f64>().sqrt()
    };
    let naive = combine(&|j| fit.profile[j].std_error);
    let batched = combine(&|j| batch_means_se(&fit.profile[j].values, 200));
    let gap = (fit.expansion.integral() - mean).abs();
    assert!(gap <= 3.0 * (se * se + batched * batched).sqrt(), "gap {gap:e}, se {se:e}, {batched:e}");
    // The chains are far from independent in 25 dimensions.
    assert!(batched > 2.0 * naive, "{batched:e} vs {naive:e}");
}

#[test]
fn hartmann_integral_matches_monte_carlo() {
    let model = Model::with_default_direction(ModelKind::Hartmann, 0).unwrap();
    let a = model.direction().clone();
    let fit = near_ridge_pseudospectral(model.evaluator(), &a, 10_001, 6, 500, 2).unwrap();
    let (mean, se) = monte_carlo_mean(model.evaluator(), 5, 1_000_000, 9);
    let rule = RidgeRule::build(&a, 10_001, 6).unwrap();
    let se_quad = fit
        .profile
        .iter()
        .zip(rule.rule().weights())
        .map(|(s, w)| (w * s.std_error).powi(2))
        .sum::<f64>()
        .sqrt();
    let gap = (fit.expansion.integral() - mean).abs();
    assert!(gap <= 3.0 * (se * se + se_quad * se_quad).sqrt(), "gap {gap:e}, se {se:e}, {se_quad:e}");
}

#[test]
fn near_ridge_error_sits_above_the_floor() {
    let model = Model::with_default_direction(ModelKind::NearRidge, 0).unwrap();
    let a = model.direction().clone();
    let f = model.evaluator();
    // f − g is exactly the complement term, so its RMS is the floor.
    let oracle = l2_error(&f, |x| model.profile(a.project(x)).unwrap(), 25, 100_000, 3);
    assert!((oracle.absolute - (24.0f64 / 3.0).sqrt() / 40.0).abs() < 2e-3);
    // 100-step chains from each start do not explore the slice, so the
    // sampled estimate falls short of the oracle.
    let sampled = ridge_floor(&f, &a, 1000, 100, 3).unwrap();
    assert!(sampled.absolute < oracle.absolute);

    let rule = RidgeRule::build(&a, 10_001, 8).unwrap();
    let fit = fit_near_ridge(&rule, &f, BudgetAllocation::Uniform(200), 6).unwrap();
    let e = &fit.expansion;
    let err = l2_error(&f, |x| e.evaluate(a.project(x)), 25, 10_000, 12);
    assert!(err.absolute >= oracle.absolute * 0.98, "{err:?} {oracle:?}");
    assert!(err.absolute <= 2.0 * oracle.absolute, "{err:?} {oracle:?}");
}

#[test]
fn parallel_and_serial_pools_agree() {
    let model = Model::with_default_direction(ModelKind::NearRidge, 0).unwrap();
    let rule = RidgeRule::build(model.direction(), 4001, 6).unwrap();
    let run = || fit_near_ridge(&rule, model.evaluator(), BudgetAllocation::Uniform(9), 42).unwrap();
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
    let many = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap().install(run);
    assert_eq!(one.profile, many.profile);
    assert_eq!(one.expansion, many.expansion);
}
