//! Subspace pursuit with clustered or band-excluded candidate selection,
//! plus the two single-pass baselines.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::clustering::{kmedian, KMedianParams};
use crate::error::{Error, Result};
use crate::measurement::MeasurementOperator;
use crate::seeds;
use crate::signal::dictionary::Dictionary;
use crate::signal::ParameterGrid;

use super::lstsq::ridge_least_squares;
use super::primitives::{band_excluded_select, hard_threshold, proxy, top_k_magnitudes, vec_norm};

/// Tikhonov weight added to the Gram diagonal in every least-squares refit.
const LS_RIDGE: f64 = 1e-10;

/// Relative residual improvement below which the outer loop stops.
const RELATIVE_DECREASE: f64 = 1e-6;

/// K-median restarts used by the recovery-layer configs. Mass-proportional
/// initialization seeds every proxy concentration in a single restart only
/// with probability about K!/K^K, and Lloyd cannot migrate a median across
/// an empty span, so reliable coverage comes from keeping the best of many
/// cheap restarts.
const SELECTION_RESTARTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Iterative pursuit whose candidate batches come from k-median
    /// clustering of the thresholded correlation proxy.
    Csp,
    /// Iterative pursuit whose candidate batches come from greedy peak
    /// picking under a pairwise coherence limit.
    Bsp,
    /// Single pass: threshold the proxy, cluster it, refit once.
    KMedianOnly,
    /// Single pass: threshold the proxy, keep the k largest peaks, refit.
    ThresholdOnly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryConfig {
    /// Number of components to estimate.
    pub k: usize,
    /// Hard threshold applied to proxy magnitudes before clustering.
    /// Ignored by the band-excluded variant.
    pub threshold: f64,
    /// Cap on outer iterations for the iterative algorithms.
    pub max_outer_iter: usize,
    /// Coherence band for the band-excluded variant; ignored elsewhere.
    pub nu: f64,
    pub algorithm: Algorithm,
    /// Settings forwarded to every k-median call.
    pub clustering: KMedianParams,
}

impl RecoveryConfig {
    pub fn csp(k: usize, threshold: f64) -> Self {
        Self {
            k,
            threshold,
            max_outer_iter: 20,
            nu: 1.0,
            algorithm: Algorithm::Csp,
            clustering: KMedianParams {
                restarts: SELECTION_RESTARTS,
                ..KMedianParams::default()
            },
        }
    }

    pub fn bsp(k: usize, nu: f64) -> Self {
        Self {
            k,
            threshold: 0.0,
            max_outer_iter: 20,
            nu,
            algorithm: Algorithm::Bsp,
            clustering: KMedianParams {
                restarts: SELECTION_RESTARTS,
                ..KMedianParams::default()
            },
        }
    }

    pub fn kmedian_only(k: usize, threshold: f64) -> Self {
        Self {
            algorithm: Algorithm::KMedianOnly,
            ..Self::csp(k, threshold)
        }
    }

    pub fn threshold_only(k: usize, threshold: f64) -> Self {
        Self {
            algorithm: Algorithm::ThresholdOnly,
            ..Self::csp(k, threshold)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::ParameterOutOfRange {
                value: self.k as f64,
                min: 1.0,
                max: f64::INFINITY,
            });
        }
        if !self.threshold.is_finite() || self.threshold < 0.0 {
            return Err(Error::ParameterOutOfRange {
                value: self.threshold,
                min: 0.0,
                max: f64::INFINITY,
            });
        }
        if self.max_outer_iter < 1 {
            return Err(Error::ParameterOutOfRange {
                value: self.max_outer_iter as f64,
                min: 1.0,
                max: f64::INFINITY,
            });
        }
        if !(0.0..=1.0).contains(&self.nu) {
            return Err(Error::ParameterOutOfRange {
                value: self.nu,
                min: 0.0,
                max: 1.0,
            });
        }
        Ok(())
    }
}

/// Output of an estimation run. Parameters, support indices, and coefficients
/// are aligned and sorted by grid index.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    pub theta_hat: Vec<f64>,
    pub support: Vec<usize>,
    pub coefs: Vec<Complex64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Runs the algorithm named in the config. The seed drives only the k-median
/// restarts; the band-excluded variant is fully deterministic and ignores it.
pub fn estimate(
    y: &[Complex64],
    op: &MeasurementOperator,
    dict: &Dictionary,
    config: &RecoveryConfig,
    seed: u64,
) -> Result<EstimationResult> {
    config.validate()?;
    if op.n() != dict.dimension() {
        return Err(Error::DimensionMismatch {
            expected: dict.dimension(),
            got: op.n(),
        });
    }
    if y.len() != op.m() {
        return Err(Error::DimensionMismatch {
            expected: op.m(),
            got: y.len(),
        });
    }
    match config.algorithm {
        Algorithm::Csp => pursuit_loop(y, op, dict, config, seed, SelectKind::Cluster),
        Algorithm::Bsp => pursuit_loop(y, op, dict, config, 0, SelectKind::Band),
        Algorithm::KMedianOnly => one_shot(y, op, dict, config, seed, true),
        Algorithm::ThresholdOnly => one_shot(y, op, dict, config, seed, false),
    }
}

/// Clustered subspace pursuit with the config's threshold and clustering
/// settings; equivalent to `estimate` with `Algorithm::Csp`.
pub fn csp(
    y: &[Complex64],
    op: &MeasurementOperator,
    dict: &Dictionary,
    config: &RecoveryConfig,
    seed: u64,
) -> Result<EstimationResult> {
    let mut cfg = config.clone();
    cfg.algorithm = Algorithm::Csp;
    estimate(y, op, dict, &cfg, seed)
}

/// Band-excluded subspace pursuit; deterministic, so no seed parameter.
pub fn bsp(
    y: &[Complex64],
    op: &MeasurementOperator,
    dict: &Dictionary,
    config: &RecoveryConfig,
) -> Result<EstimationResult> {
    let mut cfg = config.clone();
    cfg.algorithm = Algorithm::Bsp;
    estimate(y, op, dict, &cfg, 0)
}

enum SelectKind {
    Cluster,
    Band,
}

fn pursuit_loop(
    y: &[Complex64],
    op: &MeasurementOperator,
    dict: &Dictionary,
    config: &RecoveryConfig,
    seed: u64,
    kind: SelectKind,
) -> Result<EstimationResult> {
    let grid = dict.grid();
    let mut cache: MeasuredCache = HashMap::new();
    let mut support: Vec<usize> = Vec::new();
    let mut coefs: Vec<Complex64> = Vec::new();
    let mut best: Option<EstimationResult> = None;
    let mut prev_residual = vec_norm(y);
    let mut iterations = 0;

    for iter in 1..=config.max_outer_iter {
        iterations = iter;
        let y_r = residual_vector(y, &support, &coefs, &cache);
        let v = proxy(&y_r, op, dict)?;

        // Candidate batch from the residual proxy. A failure here on the
        // first pass is a genuine configuration problem and propagates; on
        // later passes it usually means the residual has emptied out, so the
        // best iterate so far stands.
        let batch = match &kind {
            SelectKind::Cluster => {
                // Cluster on squared magnitudes. Energy weighting keeps the
                // cluster medians on the correlation lobes when a compressive
                // operator spreads a diffuse cross-talk floor across the whole
                // grid: the floor's total magnitude can exceed the lobes', but
                // squaring suppresses the many small entries quadratically
                // while the lobes keep their mass. With an identity operator
                // the lobes are symmetric and narrow, so the weighting leaves
                // the medians where plain magnitudes put them.
                let kept = hard_threshold(&v, config.threshold);
                let mags: Vec<f64> = kept.iter().map(|z| z.norm_sqr()).collect();
                let sub_seed = seeds::derive(seed, &[iter as u64, 1]);
                match kmedian(&mags, grid, config.k, sub_seed, &config.clustering) {
                    Ok(out) => out.support,
                    Err(e) if iter == 1 => return Err(e),
                    Err(_) => break,
                }
            }
            SelectKind::Band => match band_excluded_select(&v, dict, config.k, config.nu) {
                Ok(s) => s,
                Err(e) if iter == 1 => return Err(e),
                Err(_) => break,
            },
        };

        let union = sorted_union(&support, &batch);
        for &s in &union {
            ensure_measured(&mut cache, op, dict, s)?;
        }
        let columns: Vec<&[Complex64]> = union.iter().map(|s| cache[s].as_slice()).collect();
        let c_union = ridge_least_squares(&columns, y, LS_RIDGE)?;

        // Prune the expanded support back to k entries. The clustered
        // variant re-clusters the coefficients over the restricted grid:
        // the union's atoms are re-indexed consecutively and distance is
        // measured between those ranks, not between the original grid
        // positions. Rank distance makes stray low-energy atoms cheap to
        // absorb into a neighboring cluster, so the kept medians are the
        // atoms that carry coefficient energy even when two of them sit
        // close together on the grid. The band-excluded variant keeps the
        // k largest outright.
        let mags: Vec<f64> = c_union.iter().map(|z| z.norm()).collect();
        let pruned = match &kind {
            SelectKind::Cluster => {
                if union.len() <= config.k {
                    union.clone()
                } else {
                    let energies: Vec<f64> = mags.iter().map(|m| m * m).collect();
                    let rank_grid = ParameterGrid::new(0.0, (union.len() - 1) as f64, 1.0)?;
                    let sub_seed = seeds::derive(seed, &[iter as u64, 2]);
                    match kmedian(&energies, &rank_grid, config.k, sub_seed, &config.clustering) {
                        Ok(out) => out.support.iter().map(|&r| union[r]).collect(),
                        Err(e) if iter == 1 => return Err(e),
                        Err(_) => break,
                    }
                }
            }
            SelectKind::Band => {
                let picked = match top_k_magnitudes(&mags, config.k) {
                    Ok(p) => p,
                    Err(e) if iter == 1 => return Err(e),
                    Err(_) => break,
                };
                picked.into_iter().map(|p| union[p]).collect()
            }
        };

        // Coefficients stay restricted to the pruned entries; the next
        // iteration's residual exposes whatever that restriction misses.
        coefs = restrict_coefs(&union, &c_union, &pruned);
        support = pruned;
        let resid = residual_vector(y, &support, &coefs, &cache);
        let residual_norm = vec_norm(&resid);

        if best
            .as_ref()
            .is_none_or(|b| residual_norm < b.residual_norm)
        {
            best = Some(EstimationResult {
                theta_hat: support.iter().map(|&s| grid.value(s)).collect(),
                support: support.clone(),
                coefs: coefs.clone(),
                residual_norm,
                iterations: iter,
            });
        }

        if residual_norm == 0.0 || prev_residual - residual_norm < RELATIVE_DECREASE * prev_residual
        {
            break;
        }
        prev_residual = residual_norm;
    }

    let mut out = best.expect("loop ran at least one iteration");
    out.iterations = iterations;
    Ok(out)
}

/// Threshold, pick one support (clustered or plain top-k), refit once.
fn one_shot(
    y: &[Complex64],
    op: &MeasurementOperator,
    dict: &Dictionary,
    config: &RecoveryConfig,
    seed: u64,
    cluster: bool,
) -> Result<EstimationResult> {
    let grid = dict.grid();
    let v = proxy(y, op, dict)?;
    let kept = hard_threshold(&v, config.threshold);
    let mags: Vec<f64> = kept.iter().map(|z| z.norm()).collect();
    let support = if cluster {
        let sub_seed = seeds::derive(seed, &[1, 1]);
        kmedian(&mags, grid, config.k, sub_seed, &config.clustering)?.support
    } else {
        top_k_magnitudes(&mags, config.k)?
    };
    let mut cache: MeasuredCache = HashMap::new();
    for &s in &support {
        ensure_measured(&mut cache, op, dict, s)?;
    }
    let columns: Vec<&[Complex64]> = support.iter().map(|s| cache[s].as_slice()).collect();
    let coefs = ridge_least_squares(&columns, y, LS_RIDGE)?;
    let resid = residual_vector(y, &support, &coefs, &cache);
    Ok(EstimationResult {
        theta_hat: support.iter().map(|&s| grid.value(s)).collect(),
        support,
        coefs,
        residual_norm: vec_norm(&resid),
        iterations: 1,
    })
}

type MeasuredCache = HashMap<usize, Vec<Complex64>>;

fn ensure_measured(
    cache: &mut MeasuredCache,
    op: &MeasurementOperator,
    dict: &Dictionary,
    index: usize,
) -> Result<()> {
    if !cache.contains_key(&index) {
        let measured = op.measure(dict.column(index))?;
        cache.insert(index, measured);
    }
    Ok(())
}

fn residual_vector(
    y: &[Complex64],
    support: &[usize],
    coefs: &[Complex64],
    cache: &MeasuredCache,
) -> Vec<Complex64> {
    let mut out = y.to_vec();
    for (&s, &c) in support.iter().zip(coefs) {
        let col = &cache[&s];
        for (o, a) in out.iter_mut().zip(col) {
            *o -= c * a;
        }
    }
    out
}

fn sorted_union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn restrict_coefs(union: &[usize], c: &[Complex64], keep: &[usize]) -> Vec<Complex64> {
    keep.iter()
        .map(|s| {
            let pos = union.binary_search(s).expect("pruned index came from the union");
            c[pos]
        })
        .collect()
}
