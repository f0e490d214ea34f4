//! Monte Carlo and algebraic cross-checks of the closed-form Gaussian
//! machinery: every closed-form quantity is verified against an independent
//! route (stacked-block algebra, empirical moments, or sampled expectations).

use cadkit_core::gaussian::{
    augment, empirical_second_moment, fit_least_squares, BlockRole, FeatureBlock, GaussianSpec,
};
use cadkit_core::linalg::cosine;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_spec(rng: &mut ChaCha8Rng) -> GaussianSpec {
    let n_robust = rng.random_range(1..=2usize);
    let n_spurious = rng.random_range(1..=2usize);
    let mut blocks = Vec::new();
    let mut total_dim = 0;
    for i in 0..n_robust + n_spurious {
        let dim = if total_dim >= 4 {
            1
        } else {
            rng.random_range(1..=2usize)
        };
        total_dim += dim;
        let mean: Vec<f64> = (0..dim)
            .map(|_| {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                sign * rng.random_range(0.2..1.2)
            })
            .collect();
        let sigma = rng.random_range(0.6..1.6);
        let (name, role) = if i < n_robust {
            (format!("r{i}"), BlockRole::Robust)
        } else {
            (format!("s{}", i - n_robust), BlockRole::Spurious)
        };
        blocks.push(FeatureBlock::new(&name, role, mean, sigma));
    }
    GaussianSpec::new(blocks).unwrap()
}

/// `q + q^2` with `q = sum ||mu_b||^2 / sigma_b^2` over the given blocks:
/// the spurious-block error formula evaluated without touching the
/// second-moment matrix.
fn stacked_error(spec: &GaussianSpec, roles: BlockRole) -> f64 {
    let q: f64 = spec
        .blocks()
        .iter()
        .filter(|b| b.role == roles)
        .map(|b| b.mean.iter().map(|m| m * m).sum::<f64>() / (b.sigma * b.sigma))
        .sum();
    q + q * q
}

#[test]
fn closed_form_error_identity_holds_on_randomized_specs() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_001);
    for _ in 0..100 {
        let spec = random_spec(&mut rng);
        let via_moment = spec.model_error(&spec.closed_form_weights()).unwrap();
        let via_formula = stacked_error(&spec, BlockRole::Spurious);
        let rel = (via_moment - via_formula).abs() / via_formula.abs().max(1e-300);
        assert!(
            rel <= 1e-10,
            "relative error {rel:e} for {via_moment} vs {via_formula}"
        );
    }
}

#[test]
fn robust_model_error_is_exactly_zero_on_randomized_specs() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_002);
    for _ in 0..100 {
        let spec = random_spec(&mut rng);
        assert_eq!(spec.model_error(&spec.invariant_weights()).unwrap(), 0.0);
    }
}

#[test]
fn closed_form_error_agrees_with_monte_carlo() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_003);
    for trial in 0..5 {
        let spec = random_spec(&mut rng);
        let model = spec.closed_form_weights();
        let closed = spec.model_error(&model).unwrap();
        let samples = spec.sample_dataset(100_000, 900 + trial).unwrap();
        let (mc, se) = spec.mc_model_error(&model, &samples).unwrap();
        assert!(
            (closed - mc).abs() <= 3.0 * se,
            "closed {closed} vs mc {mc} (se {se})"
        );
    }
}

#[test]
fn second_moment_matches_empirical_moments_within_three_se() {
    let spec = GaussianSpec::new(vec![
        FeatureBlock::robust("r", vec![1.0], 1.0),
        FeatureBlock::spurious("s", vec![0.5], 1.0),
    ])
    .unwrap();
    let samples = spec.sample_dataset(1_000_000, 42).unwrap();
    let closed = spec.second_moment().matrix;
    let (empirical, se) = empirical_second_moment(&samples).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let diff = (closed.get(i, j) - empirical.get(i, j)).abs();
            assert!(diff <= 3.0 * se.get(i, j).max(1e-9), "entry ({i},{j}): {diff}");
            assert!(diff <= 0.01);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(20_240_004);
    for trial in 0..3 {
        let spec = random_spec(&mut rng);
        let samples = spec.sample_dataset(200_000, 7_000 + trial).unwrap();
        let closed = spec.second_moment().matrix;
        let (empirical, se) = empirical_second_moment(&samples).unwrap();
        for i in 0..spec.dim() {
            for j in 0..spec.dim() {
                let diff = (closed.get(i, j) - empirical.get(i, j)).abs();
                assert!(diff <= 3.0 * se.get(i, j).max(1e-9));
            }
        }
    }
}

#[test]
fn optimal_edits_recover_the_robust_model() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_005);
    for trial in 0..3 {
        let spec = random_spec(&mut rng);
        let samples = spec.sample_dataset(200_000, 100 + trial).unwrap();
        let combined = augment(&samples, &spec.optimal_edit()).unwrap();
        let fitted = fit_least_squares(&combined).unwrap();

        let w_inv = spec.invariant_weights();
        assert!(cosine(&fitted.weights, &w_inv.weights) >= 0.999);
        for block in spec.blocks().iter().filter(|b| b.role == BlockRole::Spurious) {
            let range = spec.layout().range_of(&block.name).unwrap();
            for &w in &fitted.weights[range] {
                assert!(w.abs() <= 0.01, "spurious weight {w}");
            }
        }
    }
}

#[test]
fn incomplete_edits_leave_unedited_blocks_looking_spurious() {
    let spec = GaussianSpec::new(vec![
        FeatureBlock::robust("r1", vec![1.0], 1.0),
        FeatureBlock::robust("r2", vec![0.8], 1.0),
        FeatureBlock::spurious("s", vec![0.5], 1.0),
    ])
    .unwrap();
    let samples = spec.sample_dataset(200_000, 77).unwrap();
    let edit = spec.incomplete_edit(&["r1"]).unwrap();
    let fitted = fit_least_squares(&augment(&samples, &edit).unwrap()).unwrap();

    // Closed form: only the edited block keeps weight.
    let w_inc = spec.incomplete_weights(&["r1"]).unwrap();
    assert_eq!(w_inc.weights, vec![1.0, 0.0, 0.0]);
    assert!(cosine(&fitted.weights, &w_inc.weights) >= 0.999);

    // The unedited robust block's fitted weight collapses to the same
    // near-zero magnitude as the spurious one.
    assert!(fitted.weights[1].abs() <= 0.01);
    assert!(fitted.weights[2].abs() <= 0.01);
}

#[test]
fn crossover_between_incomplete_and_unaugmented_errors() {
    let build = |r2_norm: f64| {
        GaussianSpec::new(vec![
            FeatureBlock::robust("r1", vec![1.0], 1.0),
            FeatureBlock::robust("r2", vec![r2_norm], 1.0),
            FeatureBlock::spurious("s", vec![0.5], 1.0),
        ])
        .unwrap()
    };
    for r2_norm in [0.3, 0.4] {
        let spec = build(r2_norm);
        let inc = spec.model_error(&spec.incomplete_weights(&["r1"]).unwrap()).unwrap();
        let unaug = spec.model_error(&spec.closed_form_weights()).unwrap();
        assert!(inc < unaug, "expected crossover below 0.5 at {r2_norm}");
    }
    for r2_norm in [0.6, 0.7, 0.9] {
        let spec = build(r2_norm);
        let inc = spec.model_error(&spec.incomplete_weights(&["r1"]).unwrap()).unwrap();
        let unaug = spec.model_error(&spec.closed_form_weights()).unwrap();
        assert!(inc > unaug, "expected crossover above 0.5 at {r2_norm}");
    }
    // Exactly at the threshold the two errors coincide.
    let spec = build(0.5);
    let inc = spec.model_error(&spec.incomplete_weights(&["r1"]).unwrap()).unwrap();
    let unaug = spec.model_error(&spec.closed_form_weights()).unwrap();
    assert_eq!(inc, unaug);
}

#[test]
fn unit_variance_errors_reduce_to_norm_polynomials() {
    let spec = GaussianSpec::new(vec![
        FeatureBlock::robust("r1", vec![1.0], 1.0),
        FeatureBlock::robust("r2", vec![0.8], 1.0),
        FeatureBlock::spurious("s", vec![0.5], 1.0),
    ])
    .unwrap();
    let unaug = spec.model_error(&spec.closed_form_weights()).unwrap();
    let s2 = 0.5_f64 * 0.5;
    assert!((unaug - (s2 + s2 * s2)).abs() < 1e-12);

    let inc = spec.model_error(&spec.incomplete_weights(&["r1"]).unwrap()).unwrap();
    let r2 = 0.8_f64 * 0.8;
    assert!((inc - (r2 + r2 * r2)).abs() < 1e-12);
}

#[test]
fn flip_likelihood_maximizer_recovers_minus_two_mu() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_006);
    for trial in 0..3 {
        let spec = random_spec(&mut rng);
        let samples = spec.sample_dataset(100_000, 40 + trial).unwrap();
        let robust: Vec<&str> = spec
            .blocks()
            .iter()
            .filter(|b| b.role == BlockRole::Robust)
            .map(|b| b.name.as_str())
            .collect();
        let best = spec.maximize_flip_likelihood(&samples, &robust).unwrap();
        for block in spec.blocks() {
            let range = spec.layout().range_of(&block.name).unwrap();
            let z = &best.displacement()[range];
            match block.role {
                BlockRole::Robust => {
                    for (zi, mi) in z.iter().zip(&block.mean) {
                        assert!((zi + 2.0 * mi).abs() <= 0.05, "z {zi} vs -2mu {}", -2.0 * mi);
                    }
                }
                BlockRole::Spurious => assert!(z.iter().all(|&zi| zi == 0.0)),
            }
        }
    }
}

#[test]
fn fit_direction_error_shrinks_with_sample_size() {
    let spec = GaussianSpec::new(vec![
        FeatureBlock::robust("r", vec![1.0], 1.0),
        FeatureBlock::spurious("s", vec![0.5], 1.0),
    ])
    .unwrap();
    let mut last_gap = f64::INFINITY;
    for (n, seed) in [(2_000usize, 1u64), (20_000, 2), (200_000, 3)] {
        let samples = spec.sample_dataset(n, seed).unwrap();
        let fitted = fit_least_squares(&samples).unwrap();
        let gap = 1.0 - cosine(&fitted.weights, &[1.0, 0.5]);
        assert!(gap < last_gap, "cosine gap should shrink: {gap} !< {last_gap}");
        assert!(gap <= 10.0 / (n as f64).sqrt());
        last_gap = gap;
    }
}
