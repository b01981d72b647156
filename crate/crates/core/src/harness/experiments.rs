//! Experiment runners: separation, decay, compression, and SNR sweeps plus
//! a fixed-setting single run.
//!
//! Every trial draws its randomness from a seed derived as
//! hash(master, experiment id, axis index, trial index), so a config plus a
//! master seed pins the entire run. Within a trial, the scene, the
//! measurement operator, the noise, and the estimator each get their own
//! derived stream, and all algorithms of a trial share the same scene,
//! operator, and noise so their records compare like for like.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::measurement::{add_awgn, MeasurementOperator};
use crate::recovery::{estimate, Algorithm, EstimationResult, RecoveryConfig};
use crate::seeds;
use crate::signal::{
    compose_signal, correlation_profile, draw_random_scene, Dictionary, MagnitudeMode,
    ParameterGrid, Scene, SceneSpec,
};
use crate::theory::fit_decay;
use crate::transport::{emd, pee, SparseCoefVector};

use super::config::{algorithm_name, DecayAxis, ExperimentConfig, ExperimentKind};
use super::output::SummaryTable;

/// One estimator run on one drawn scene.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub experiment: String,
    /// Value of the swept variable this trial ran at.
    pub axis: f64,
    pub trial: usize,
    /// Derived per-trial seed, recorded so any trial can be replayed alone.
    pub seed: u64,
    /// Optimal-matching parameter error summed over components.
    pub pee_total: f64,
    /// pee_total / K.
    pub pee_avg: f64,
    /// Largest single-component parameter error under the same matching.
    pub max_component_error: f64,
    /// Transport cost between the true and estimated magnitude vectors, in
    /// grid-index distance units.
    pub emd: f64,
    /// Wall-clock estimator time; 0 unless the config enables timing, which
    /// keeps default output byte-reproducible.
    pub runtime_ms: f64,
    pub algorithm: String,
}

/// Records plus the per-axis aggregate table of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub records: Vec<TrialRecord>,
    pub summary: SummaryTable,
}

/// Runs whichever experiment the config names.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    match cfg.experiment {
        ExperimentKind::SeparationSweep => run_separation_sweep(cfg),
        ExperimentKind::DecaySweep => run_decay_sweep(cfg),
        ExperimentKind::CompressionSweep => run_compression_sweep(cfg),
        ExperimentKind::SnrSweep => run_snr_sweep(cfg),
        ExperimentKind::Single => run_single(cfg),
    }
}

/// Clustering resolution versus scene separation on identity-operator
/// proxies. The summary reports, per separation, the worst per-component
/// error across trials (sigma) together with the correlation-mass
/// coordinates Lambda(sigma)/Lambda(0) and Lambda(zeta)/Lambda(inf) in
/// which the resolution curve is approximately linear.
pub fn run_separation_sweep(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    expect_kind(cfg, ExperimentKind::SeparationSweep)?;
    let model = cfg.build_model(None);
    let grid = cfg.build_grid()?;
    let profile = correlation_profile(&model, &grid, None)?;
    let dict = Dictionary::build(model, grid.clone())?;
    let recovery = RecoveryConfig::kmedian_only(cfg.k, cfg.t);
    let mut records = Vec::new();
    let mut summary = SummaryTable::new(&[
        "zeta",
        "sigma",
        "lambda_sigma_over_lambda_zero",
        "lambda_zeta_over_lambda_inf",
    ]);
    for (ai, &zeta) in cfg.axis.iter().enumerate() {
        let spec = scene_spec(cfg, zeta, cfg.r);
        let setup = TrialSetup {
            dict: &dict,
            grid: &grid,
            spec: &spec,
            recovery: &recovery,
            operator: OperatorPlan::Identity,
            snr_db: f64::INFINITY,
            experiment: cfg.experiment.name(),
            axis: zeta,
            timing: cfg.timing,
        };
        let mut sigma = 0.0f64;
        for ti in 0..cfg.trials {
            let trial_seed = seeds::derive(cfg.seed, &[cfg.experiment.id(), ai as u64, ti as u64]);
            let record = run_trial(&setup, ti, trial_seed)?;
            sigma = sigma.max(record.max_component_error);
            records.push(record);
        }
        let lambda_zero = profile.cumulative_at(0.0);
        summary.push_row(vec![
            zeta,
            sigma,
            profile.cumulative_at(sigma) / lambda_zero,
            profile.cumulative_at(zeta) / profile.total(),
        ]);
    }
    Ok(ExperimentOutcome { records, summary })
}

/// Minimal resolvable separation along a decay, dynamic-range, or threshold
/// axis. Each axis point runs an integer search over the separation in grid
/// steps for the smallest one whose worst per-component error stays within
/// one step; the summary reports that separation as a multiple of the step,
/// next to the decay rate fitted from the correlation profile. An axis point
/// whose search never brackets (no feasible separation resolves) reports
/// zeta_min_over_delta = -1 and contributes no trial records.
pub fn run_decay_sweep(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    expect_kind(cfg, ExperimentKind::DecaySweep)?;
    let grid = cfg.build_grid()?;
    let mut records = Vec::new();
    let mut summary = SummaryTable::new(&["axis", "fitted_a", "zeta_min_over_delta"]);
    for (ai, &axis_value) in cfg.axis.iter().enumerate() {
        let f_sweep = match cfg.decay_axis {
            DecayAxis::SweepRate => Some(axis_value),
            _ => None,
        };
        let model = cfg.build_model(f_sweep);
        let profile = correlation_profile(&model, &grid, None)?;
        let fitted_a = fit_decay(&profile)?;
        let dict = Dictionary::build(model, grid.clone())?;
        let (r, t) = match cfg.decay_axis {
            DecayAxis::SweepRate => (cfg.r, cfg.t),
            DecayAxis::DynamicRange => (axis_value, cfg.t),
            DecayAxis::Threshold => (cfg.r, axis_value),
        };
        let recovery = RecoveryConfig::kmedian_only(cfg.k, t);
        match minimal_separation_steps(cfg, &dict, &grid, &recovery, r, ai, axis_value)? {
            Some((steps, trial_records)) => {
                records.extend(trial_records);
                summary.push_row(vec![axis_value, fitted_a, steps as f64]);
            }
            None => summary.push_row(vec![axis_value, fitted_a, -1.0]),
        }
    }
    Ok(ExperimentOutcome { records, summary })
}

/// Estimator accuracy versus compression rate on noiseless measurements,
/// with a fresh Gaussian operator per trial; a rate of exactly 1 uses the
/// identity operator instead. The summary reports, per rate, the mean
/// average parameter error of each configured algorithm.
pub fn run_compression_sweep(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    expect_kind(cfg, ExperimentKind::CompressionSweep)?;
    sweep_with_operators(cfg, |&kappa| (operator_plan(kappa), f64::INFINITY))
}

/// Estimator accuracy versus measurement SNR at a fixed compression rate.
pub fn run_snr_sweep(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    expect_kind(cfg, ExperimentKind::SnrSweep)?;
    sweep_with_operators(cfg, |&snr_db| (operator_plan(cfg.kappa), snr_db))
}

/// All configured algorithms at one fixed setting of rate, SNR, and
/// separation; the axis column carries the compression rate.
pub fn run_single(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    expect_kind(cfg, ExperimentKind::Single)?;
    let mut cfg_one = cfg.clone();
    cfg_one.axis = vec![cfg.kappa];
    sweep_with_operators(&cfg_one, |&kappa| (operator_plan(kappa), cfg.snr_db))
}

/// Shared driver for the compression, SNR, and single experiments: walks the
/// axis, runs every configured algorithm on identical per-trial draws, and
/// aggregates one mean-error column per algorithm.
fn sweep_with_operators(
    cfg: &ExperimentConfig,
    plan_for: impl Fn(&f64) -> (OperatorPlan, f64),
) -> Result<ExperimentOutcome> {
    let grid = cfg.build_grid()?;
    let dict = Dictionary::build(cfg.build_model(None), grid.clone())?;
    let spec = scene_spec(cfg, cfg.zeta, cfg.r);
    let mut headers = vec!["axis".to_string()];
    for &alg in &cfg.algorithms {
        headers.push(format!("mean_pee_avg_{}", algorithm_name(alg)));
    }
    let mut summary = SummaryTable::from_headers(headers);
    let mut records = Vec::new();
    for (ai, axis_value) in cfg.axis.iter().enumerate() {
        let (operator, snr_db) = plan_for(axis_value);
        let mut row = vec![*axis_value];
        let mut sums = vec![0.0; cfg.algorithms.len()];
        for ti in 0..cfg.trials {
            let trial_seed = seeds::derive(cfg.seed, &[cfg.experiment.id(), ai as u64, ti as u64]);
            for (slot, &alg) in cfg.algorithms.iter().enumerate() {
                let recovery = recovery_config_for(cfg, alg);
                let setup = TrialSetup {
                    dict: &dict,
                    grid: &grid,
                    spec: &spec,
                    recovery: &recovery,
                    operator,
                    snr_db,
                    experiment: cfg.experiment.name(),
                    axis: *axis_value,
                    timing: cfg.timing,
                };
                let record = run_trial(&setup, ti, trial_seed)?;
                sums[slot] += record.pee_avg;
                records.push(record);
            }
        }
        row.extend(sums.iter().map(|s| s / cfg.trials as f64));
        summary.push_row(row);
    }
    Ok(ExperimentOutcome { records, summary })
}

#[derive(Clone, Copy)]
enum OperatorPlan {
    Identity,
    Gaussian { kappa: f64 },
}

fn operator_plan(kappa: f64) -> OperatorPlan {
    if kappa == 1.0 {
        OperatorPlan::Identity
    } else {
        OperatorPlan::Gaussian { kappa }
    }
}

struct TrialSetup<'a> {
    dict: &'a Dictionary,
    grid: &'a ParameterGrid,
    spec: &'a SceneSpec,
    recovery: &'a RecoveryConfig,
    operator: OperatorPlan,
    snr_db: f64,
    experiment: &'a str,
    axis: f64,
    timing: bool,
}

/// Draws the scene, measures it, runs the estimator, and scores the result.
/// Streams: derive(trial_seed, 1) scene, 2 operator, 3 noise, 4 estimator.
fn run_trial(setup: &TrialSetup, trial: usize, trial_seed: u64) -> Result<TrialRecord> {
    let scene = draw_random_scene(setup.grid, setup.spec, seeds::derive(trial_seed, &[1]))?;
    let x = compose_signal(setup.dict, &scene.params, &scene.coefs)?;
    let op = match setup.operator {
        OperatorPlan::Identity => MeasurementOperator::identity(setup.dict.dimension())?,
        OperatorPlan::Gaussian { kappa } => MeasurementOperator::gaussian(
            setup.dict.dimension(),
            kappa,
            seeds::derive(trial_seed, &[2]),
        )?,
    };
    let mut y = op.measure(&x)?;
    if setup.snr_db.is_finite() {
        y = add_awgn(&y, setup.snr_db, seeds::derive(trial_seed, &[3]));
    }
    let started = Instant::now();
    let est = estimate(&y, &op, setup.dict, setup.recovery, seeds::derive(trial_seed, &[4]))?;
    let runtime_ms = if setup.timing {
        started.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    let (pee_total, max_component_error) = matching_errors(&scene.params, &est.theta_hat)?;
    Ok(TrialRecord {
        experiment: setup.experiment.to_string(),
        axis: setup.axis,
        trial,
        seed: trial_seed,
        pee_total,
        pee_avg: pee_total / setup.spec.k as f64,
        max_component_error,
        emd: magnitude_emd(setup.grid, &scene, &est)?,
        runtime_ms,
        algorithm: algorithm_name(setup.recovery.algorithm).to_string(),
    })
}

/// Smallest separation in grid steps at which the worst per-component error
/// over a fresh batch of trials stays within one step, found by doubling to
/// bracket and then bisecting. Returns the step count and the records of the
/// winning batch, or None when even the widest feasible separation fails.
fn minimal_separation_steps(
    cfg: &ExperimentConfig,
    dict: &Dictionary,
    grid: &ParameterGrid,
    recovery: &RecoveryConfig,
    r: f64,
    axis_index: usize,
    axis_value: f64,
) -> Result<Option<(usize, Vec<TrialRecord>)>> {
    let eps_steps = ((cfg.epsilon / cfg.delta - 1e-9).ceil()).max(0.0) as usize;
    let top = grid.len() - 1;
    let Some(span_steps) = top.checked_sub(2 * eps_steps) else {
        return Ok(None);
    };
    let cap = span_steps / (cfg.k - 1);
    if cap == 0 {
        return Ok(None);
    }
    let probe = |steps: usize| -> Result<(bool, Vec<TrialRecord>)> {
        let spec = scene_spec(cfg, steps as f64 * cfg.delta, r);
        let setup = TrialSetup {
            dict,
            grid,
            spec: &spec,
            recovery,
            operator: OperatorPlan::Identity,
            snr_db: f64::INFINITY,
            experiment: cfg.experiment.name(),
            axis: axis_value,
            timing: cfg.timing,
        };
        let mut sigma = 0.0f64;
        let mut batch = Vec::with_capacity(cfg.trials);
        for ti in 0..cfg.trials {
            let trial_seed = seeds::derive(
                cfg.seed,
                &[cfg.experiment.id(), axis_index as u64, steps as u64, ti as u64],
            );
            let record = run_trial(&setup, ti, trial_seed)?;
            sigma = sigma.max(record.max_component_error);
            batch.push(record);
        }
        Ok((sigma <= cfg.delta * (1.0 + 1e-9), batch))
    };

    // Bracket: double upward from one step until a separation resolves.
    let mut lo = 0usize;
    let mut steps = 1usize;
    let mut best = loop {
        let (ok, batch) = probe(steps)?;
        if ok {
            break (steps, batch);
        }
        lo = steps;
        if steps == cap {
            return Ok(None);
        }
        steps = (steps * 2).min(cap);
    };
    // Bisect for the smallest resolving separation in (lo, best].
    while best.0 - lo > 1 {
        let mid = lo + (best.0 - lo) / 2;
        let (ok, batch) = probe(mid)?;
        if ok {
            best = (mid, batch);
        } else {
            lo = mid;
        }
    }
    Ok(Some(best))
}

fn expect_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if cfg.experiment != kind {
        return Err(Error::Config(format!(
            "config names experiment '{}', not '{}'",
            cfg.experiment.name(),
            kind.name()
        )));
    }
    cfg.validate()
}

fn scene_spec(cfg: &ExperimentConfig, zeta: f64, r: f64) -> SceneSpec {
    // The resolution sweeps (separation, decay) draw parameters anywhere in
    // the admissible interval, so the measured error is taken against the
    // continuous truth and bottoms out near the sampling step instead of at
    // zero. The recovery sweeps place components on grid points, where exact
    // support identification is well defined.
    let on_grid = matches!(
        cfg.experiment,
        ExperimentKind::CompressionSweep | ExperimentKind::SnrSweep | ExperimentKind::Single
    );
    SceneSpec {
        k: cfg.k,
        zeta,
        epsilon: cfg.epsilon,
        r,
        magnitude_mode: if r > 1.0 {
            MagnitudeMode::LogRange
        } else {
            MagnitudeMode::Unit
        },
        on_grid,
        complex_phases: true,
    }
}

fn recovery_config_for(cfg: &ExperimentConfig, alg: Algorithm) -> RecoveryConfig {
    match alg {
        Algorithm::Csp => RecoveryConfig::csp(cfg.k, cfg.t),
        Algorithm::Bsp => RecoveryConfig::bsp(cfg.k, cfg.nu),
        Algorithm::KMedianOnly => RecoveryConfig::kmedian_only(cfg.k, cfg.t),
        Algorithm::ThresholdOnly => RecoveryConfig::threshold_only(cfg.k, cfg.t),
    }
}

/// Total and max absolute error under the optimal matching, which for sets
/// on a line pairs the sorted sequences.
fn matching_errors(truth: &[f64], estimated: &[f64]) -> Result<(f64, f64)> {
    let total = pee(truth, estimated)?;
    let mut a = truth.to_vec();
    let mut b = estimated.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let max = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok((total, max))
}

fn magnitude_emd(grid: &ParameterGrid, scene: &Scene, est: &EstimationResult) -> Result<f64> {
    let truth: Vec<(usize, f64)> = scene
        .params
        .iter()
        .zip(&scene.coefs)
        .map(|(&p, c)| (grid.nearest_index(p), c.norm()))
        .collect();
    let got: Vec<(usize, f64)> = est
        .support
        .iter()
        .zip(&est.coefs)
        .map(|(&i, c)| (i, c.norm()))
        .collect();
    let c = SparseCoefVector::from_pairs(grid.len(), &truth)?;
    let chat = SparseCoefVector::from_pairs(grid.len(), &got)?;
    Ok(emd(&c, &chat)?.cost)
}
