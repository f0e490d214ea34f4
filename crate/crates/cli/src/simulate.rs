//! The simulation verification battery: every closed-form claim of the
//! linear Gaussian analysis is checked against Monte Carlo estimates or an
//! independent algebraic route, producing one pass/fail row per check.

use cadkit_core::gaussian::{
    augment, fit_least_squares, BlockRole, EditVector, GaussianError, GaussianSpec, LabeledSample,
    LinearModel,
};
use cadkit_core::linalg::cosine;
use thiserror::Error;

use crate::config::{ConfigError, SimulateConfig, SweepConfig};
use crate::report::CheckRow;

/// Directional agreement required between fitted and closed-form models.
pub const MIN_COSINE: f64 = 0.999;
/// Ceiling on fitted spurious (or unedited) coordinates after augmentation.
pub const MAX_SPURIOUS_WEIGHT: f64 = 0.01;
/// Coordinate tolerance on the recovered optimal edit vs `-2 mu_r`.
pub const MAX_EDIT_DEVIATION: f64 = 0.05;
/// Coordinate tolerance between the empirical fit and the population
/// rank-one solution.
pub const MAX_FIT_DEVIATION: f64 = 0.02;
/// Relative tolerance for closed-form vs closed-form identities.
pub const REL_IDENTITY_TOL: f64 = 1e-10;
/// Monte Carlo agreement band, in standard errors.
pub const SE_BAND: f64 = 3.0;

#[derive(Debug, Error)]
pub enum SimulateError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Gaussian(#[from] GaussianError),
}

fn row(
    experiment: &str,
    quantity: String,
    closed_form: f64,
    monte_carlo: Option<f64>,
    std_error: Option<f64>,
    pass: bool,
) -> CheckRow {
    CheckRow {
        experiment: experiment.to_string(),
        quantity,
        closed_form,
        monte_carlo,
        std_error,
        pass,
    }
}

fn robust_names(spec: &GaussianSpec) -> Vec<String> {
    spec.blocks()
        .iter()
        .filter(|b| b.role == BlockRole::Robust)
        .map(|b| b.name.clone())
        .collect()
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Largest |weight| of `model` over the named blocks' coordinates.
fn max_abs_over_blocks(spec: &GaussianSpec, model: &LinearModel, zero_blocks: &[String]) -> f64 {
    let mut worst = 0.0_f64;
    for name in zero_blocks {
        let range = spec.layout().range_of(name).expect("block exists");
        worst = worst.max(max_abs(model.weights[range].iter().copied()));
    }
    worst
}

/// `q + q^2` over the spurious blocks: the unaugmented error at unit variance.
fn spurious_norm_polynomial(spec: &GaussianSpec) -> f64 {
    let q: f64 = spec
        .blocks()
        .iter()
        .filter(|b| b.role == BlockRole::Spurious)
        .map(|b| b.mean.iter().map(|m| m * m).sum::<f64>() / (b.sigma * b.sigma))
        .sum();
    q + q * q
}

/// Population least-squares solution `Sigma^{-1} mu / (1 + mu^T Sigma^{-1} mu)`.
fn rank_one_solution(spec: &GaussianSpec) -> Vec<f64> {
    let mut v = Vec::with_capacity(spec.dim());
    let mut q = 0.0;
    for b in spec.blocks() {
        let inv_var = 1.0 / (b.sigma * b.sigma);
        for &m in &b.mean {
            v.push(m * inv_var);
            q += m * m * inv_var;
        }
    }
    v.iter().map(|w| w / (1.0 + q)).collect()
}

fn mc_rows(
    rows: &mut Vec<CheckRow>,
    experiment: &str,
    quantity: String,
    spec: &GaussianSpec,
    model: &LinearModel,
    samples: &[LabeledSample],
) -> Result<f64, SimulateError> {
    let closed = spec.model_error(model)?;
    let (mc, se) = spec.mc_model_error(model, samples)?;
    let pass = (closed - mc).abs() <= SE_BAND * se;
    rows.push(row(experiment, quantity, closed, Some(mc), Some(se), pass));
    Ok(closed)
}

/// Runs the whole battery. Rows compare a closed-form value against either a
/// Monte Carlo estimate (with its standard error) or a second closed-form
/// route (std_error empty).
pub fn run_battery(config: &SimulateConfig) -> Result<Vec<CheckRow>, SimulateError> {
    let spec = config.to_spec()?;
    let samples = spec.sample_dataset(config.samples, config.seed)?;
    let mut rows = Vec::new();

    let w_inv = spec.invariant_weights();
    let w_closed = spec.closed_form_weights();

    // The robust model has exactly zero error.
    let closed = spec.model_error(&w_inv)?;
    let (mc, se) = spec.mc_model_error(&w_inv, &samples)?;
    rows.push(row(
        "robust_model",
        "model_error(w_inv)".into(),
        closed,
        Some(mc),
        Some(se),
        closed == 0.0 && (closed - mc).abs() <= SE_BAND * se.max(f64::MIN_POSITIVE),
    ));

    // Unaugmented closed-form error vs Monte Carlo.
    let closed_form_error = mc_rows(
        &mut rows,
        "unaugmented_model",
        "model_error(closed_form_w)".into(),
        &spec,
        &w_closed,
        &samples,
    )?;

    // At unit variance the error collapses to ||mu_s||^2 + ||mu_s||^4; the
    // polynomial is the independent route, reported in the monte_carlo
    // column.
    if spec.blocks().iter().all(|b| b.sigma == 1.0) {
        let polynomial = spurious_norm_polynomial(&spec);
        let rel = (polynomial - closed_form_error).abs() / polynomial.abs().max(f64::MIN_POSITIVE);
        rows.push(row(
            "unaugmented_model",
            "spurious_norm_polynomial".into(),
            polynomial,
            Some(closed_form_error),
            None,
            rel <= REL_IDENTITY_TOL,
        ));
    }

    // Empirical least squares agrees with the closed form in direction
    // and with the rank-one population solution coordinate-wise.
    let fitted = fit_least_squares(&samples)?;
    let direction = cosine(&fitted.weights, &w_closed.weights);
    rows.push(row(
        "unaugmented_fit",
        "cosine(fit, closed_form_w)".into(),
        1.0,
        Some(direction),
        None,
        direction >= MIN_COSINE,
    ));
    let population = rank_one_solution(&spec);
    let deviation = max_abs(
        fitted
            .weights
            .iter()
            .zip(&population)
            .map(|(a, b)| a - b),
    );
    rows.push(row(
        "unaugmented_fit",
        "max|fit - rank_one_solution|".into(),
        0.0,
        Some(deviation),
        None,
        deviation <= MAX_FIT_DEVIATION,
    ));

    // Optimal edits recover the robust model.
    let all_robust = robust_names(&spec);
    let optimal = spec.optimal_edit();
    let recovered = fit_least_squares(&augment(&samples, &optimal)?)?;
    let spurious_names: Vec<String> = spec
        .blocks()
        .iter()
        .filter(|b| b.role == BlockRole::Spurious)
        .map(|b| b.name.clone())
        .collect();
    let worst_spurious = max_abs_over_blocks(&spec, &recovered, &spurious_names);
    rows.push(row(
        "cad_recovery",
        "max|w_spurious|".into(),
        0.0,
        Some(worst_spurious),
        None,
        worst_spurious <= MAX_SPURIOUS_WEIGHT,
    ));
    let recovery_cosine = cosine(&recovered.weights, &w_inv.weights);
    rows.push(row(
        "cad_recovery",
        "cosine(w_c, w_inv)".into(),
        1.0,
        Some(recovery_cosine),
        None,
        recovery_cosine >= MIN_COSINE,
    ));

    // The maximum-likelihood edit lands on -2 mu_r, block by block.
    let robust_refs: Vec<&str> = all_robust.iter().map(String::as_str).collect();
    let best = spec.maximize_flip_likelihood(&samples, &robust_refs)?;
    let edit_deviation = optimal_edit_deviation(&spec, &best);
    rows.push(row(
        "optimal_edit",
        "max|z_hat + 2 mu_r|".into(),
        0.0,
        Some(edit_deviation),
        None,
        edit_deviation <= MAX_EDIT_DEVIATION,
    ));

    // Incomplete edits: recovery toward the closed-form w_inc when the edit
    // set is a proper subset of the robust blocks.
    let effective_edit = effective_edit_blocks(config, &spec);
    if effective_edit != all_robust {
        let edit_refs: Vec<&str> = effective_edit.iter().map(String::as_str).collect();
        let edit = spec.incomplete_edit(&edit_refs)?;
        let w_inc = spec.incomplete_weights(&edit_refs)?;
        let fitted_inc = fit_least_squares(&augment(&samples, &edit)?)?;
        let inc_cosine = cosine(&fitted_inc.weights, &w_inc.weights);
        rows.push(row(
            "incomplete_recovery",
            "cosine(w_c_inc, closed_form_w_inc)".into(),
            1.0,
            Some(inc_cosine),
            None,
            inc_cosine >= MIN_COSINE,
        ));
        let zero_blocks: Vec<String> = spec
            .blocks()
            .iter()
            .filter(|b| !effective_edit.contains(&b.name))
            .map(|b| b.name.clone())
            .collect();
        let worst_unedited = max_abs_over_blocks(&spec, &fitted_inc, &zero_blocks);
        rows.push(row(
            "incomplete_recovery",
            "max|w_unedited|".into(),
            0.0,
            Some(worst_unedited),
            None,
            worst_unedited <= MAX_SPURIOUS_WEIGHT,
        ));
    }

    if let Some(sweep) = &config.sweep {
        sweep_rows(&mut rows, config, &spec, sweep, &effective_edit)?;
    }

    Ok(rows)
}

fn optimal_edit_deviation(spec: &GaussianSpec, edit: &EditVector) -> f64 {
    let mut worst = 0.0_f64;
    for b in spec.blocks().iter().filter(|b| b.role == BlockRole::Robust) {
        let range = spec.layout().range_of(&b.name).expect("block exists");
        for (z, m) in edit.displacement()[range].iter().zip(&b.mean) {
            worst = worst.max((z + 2.0 * m).abs());
        }
    }
    worst
}

fn effective_edit_blocks(config: &SimulateConfig, spec: &GaussianSpec) -> Vec<String> {
    if let Some(blocks) = &config.edit_blocks {
        return blocks.clone();
    }
    let mut names = robust_names(spec);
    if let Some(sweep) = &config.sweep {
        names.retain(|n| n != &sweep.block);
    }
    names
}

/// One row per swept norm: the closed-form error gap between the
/// incomplete-edit model and the unaugmented model, checked against Monte
/// Carlo. The gap's sign flips exactly where the swept norm crosses the
/// spurious norm.
fn sweep_rows(
    rows: &mut Vec<CheckRow>,
    config: &SimulateConfig,
    base_spec: &GaussianSpec,
    sweep: &SweepConfig,
    effective_edit: &[String],
) -> Result<(), SimulateError> {
    let block_ok = base_spec
        .blocks()
        .iter()
        .any(|b| b.name == sweep.block && b.role == BlockRole::Robust && norm(&b.mean) > 0.0);
    if !block_ok {
        return Err(ConfigError::BadSweepBlock(sweep.block.clone()).into());
    }
    let edit_refs: Vec<&str> = effective_edit.iter().map(String::as_str).collect();
    for (i, &target) in sweep.norms.iter().enumerate() {
        let blocks = base_spec
            .blocks()
            .iter()
            .map(|b| {
                let mut b = b.clone();
                if b.name == sweep.block {
                    // normalize first so a one-dimensional block lands on
                    // the target norm exactly
                    let current = norm(&b.mean);
                    for m in &mut b.mean {
                        *m = (*m / current) * target;
                    }
                }
                b
            })
            .collect();
        let spec = GaussianSpec::new(blocks)?;
        let w_inc = spec.incomplete_weights(&edit_refs)?;
        let w_closed = spec.closed_form_weights();
        let closed_gap = spec.model_error(&w_inc)? - spec.model_error(&w_closed)?;

        let samples = spec.sample_dataset(config.samples, config.seed.wrapping_add(1_000 + i as u64))?;
        let (mc_inc, se_inc) = spec.mc_model_error(&w_inc, &samples)?;
        let (mc_closed, se_closed) = spec.mc_model_error(&w_closed, &samples)?;
        let mc_gap = mc_inc - mc_closed;
        let se_gap = (se_inc * se_inc + se_closed * se_closed).sqrt();
        rows.push(row(
            "incomplete_sweep",
            format!("error_gap(norm={target})"),
            closed_gap,
            Some(mc_gap),
            Some(se_gap),
            (closed_gap - mc_gap).abs() <= SE_BAND * se_gap,
        ));
    }
    Ok(())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::BlockConfig;

    #[test]
    fn default_battery_passes_every_check() {
        let config = SimulateConfig {
            samples: 50_000,
            ..SimulateConfig::bundled_default()
        };
        let rows = run_battery(&config).unwrap();
        assert!(rows.iter().all(|r| r.pass), "failing rows: {:#?}",
            rows.iter().filter(|r| !r.pass).collect::<Vec<_>>());

        let closed = rows
            .iter()
            .find(|r| r.quantity == "model_error(closed_form_w)")
            .unwrap();
        assert!((closed.closed_form - 0.3125).abs() < 1e-12);
        assert!((closed.monte_carlo.unwrap() - 0.3125).abs() < 0.01);
    }

    #[test]
    fn sweep_gap_signs_flip_at_the_spurious_norm() {
        let config = SimulateConfig {
            blocks: vec![
                BlockConfig { name: "r1".into(), role: "robust".into(), mean: vec![1.0], sigma: 1.0 },
                BlockConfig { name: "r2".into(), role: "robust".into(), mean: vec![0.8], sigma: 1.0 },
                BlockConfig { name: "s".into(), role: "spurious".into(), mean: vec![0.5], sigma: 1.0 },
            ],
            samples: 50_000,
            seed: 9,
            edit_blocks: None,
            sweep: Some(SweepConfig {
                block: "r2".into(),
                norms: vec![0.3, 0.5, 0.7],
            }),
        };
        let rows = run_battery(&config).unwrap();
        let gap = |norm: &str| {
            rows.iter()
                .find(|r| r.quantity == format!("error_gap(norm={norm})"))
                .unwrap()
                .closed_form
        };
        assert!(gap("0.3") < 0.0);
        assert_eq!(gap("0.5"), 0.0);
        assert!(gap("0.7") > 0.0);
        assert!(rows.iter().all(|r| r.pass));
    }
}
