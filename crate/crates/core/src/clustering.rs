//! Weighted 1-D K-median clustering: the transport-optimal way to place K
//! spikes on a magnitude profile.
//!
//! Lloyd alternation on a line reduces to prefix-sum arithmetic: cluster
//! boundaries are midpoints between consecutive medians and each median
//! update is a weighted-median query inside its cluster, so one sweep costs
//! O(K log L) after an O(L) setup.

use crate::error::{Error, Result};
use crate::seeds;
use crate::signal::ParameterGrid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KMedianParams {
    /// Lloyd sweeps allowed per restart.
    pub max_iter: usize,
    /// Independent random initializations; the lowest-objective run wins,
    /// earliest restart on ties. Set to 1 for the plain single-start method.
    pub restarts: usize,
}

impl Default for KMedianParams {
    fn default() -> Self {
        Self {
            max_iter: 100,
            restarts: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMedianOutcome {
    /// Parameter values of the medians.
    pub theta_hat: Vec<f64>,
    /// Median grid indices, strictly increasing.
    pub support: Vec<usize>,
    /// Final clustering objective in grid-index distance units.
    pub objective: f64,
    /// Objective after initialization and after every sweep of the winning
    /// restart; non-increasing.
    pub objective_trace: Vec<f64>,
    /// Sweeps run by the winning restart.
    pub iterations: usize,
}

/// Smallest position whose inclusive cumulative weight reaches half the
/// total, which is exactly the lowest position satisfying both balance
/// inequalities. All-zero weights fall back to the middle position.
pub fn weighted_median(positions: &[usize], weights: &[f64]) -> Result<usize> {
    if positions.is_empty() {
        return Err(Error::EmptyInput("weighted median positions"));
    }
    if positions.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: positions.len(),
            got: weights.len(),
        });
    }
    for w in positions.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidWeights(
                "positions must be strictly increasing".into(),
            ));
        }
    }
    let mut total = 0.0;
    for &w in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidWeights(format!("weight {w}")));
        }
        total += w;
    }
    if total == 0.0 {
        return Ok(positions[(positions.len() - 1) / 2]);
    }
    let half = total / 2.0;
    let mut cum = 0.0;
    for (&p, &w) in positions.iter().zip(weights) {
        cum += w;
        if cum >= half {
            return Ok(p);
        }
    }
    Ok(*positions.last().expect("nonempty"))
}

/// Clusters a dense nonnegative profile over the full grid into K medians.
pub fn kmedian(
    v: &[f64],
    grid: &ParameterGrid,
    k: usize,
    seed: u64,
    params: &KMedianParams,
) -> Result<KMedianOutcome> {
    if v.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: v.len(),
        });
    }
    let mut positions = Vec::new();
    let mut weights = Vec::new();
    for (i, &w) in v.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidWeights(format!("weight {w} at index {i}")));
        }
        if w > 0.0 {
            positions.push(i);
            weights.push(w);
        }
    }
    cluster_positions(&positions, &weights, grid, k, seed, params)
}

/// Clusters mass sitting on an explicit strictly increasing subset of grid
/// indices; medians are restricted to those positions.
pub fn kmedian_points(
    positions: &[usize],
    weights: &[f64],
    grid: &ParameterGrid,
    k: usize,
    seed: u64,
    params: &KMedianParams,
) -> Result<KMedianOutcome> {
    if positions.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: positions.len(),
            got: weights.len(),
        });
    }
    for w in positions.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidWeights(
                "positions must be strictly increasing".into(),
            ));
        }
    }
    if let Some(&last) = positions.last() {
        if last >= grid.len() {
            return Err(Error::InvalidWeights(format!(
                "position {last} outside the {}-point grid",
                grid.len()
            )));
        }
    }
    let mut kept_pos = Vec::with_capacity(positions.len());
    let mut kept_w = Vec::with_capacity(positions.len());
    for (&p, &w) in positions.iter().zip(weights) {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidWeights(format!("weight {w} at position {p}")));
        }
        if w > 0.0 {
            kept_pos.push(p);
            kept_w.push(w);
        }
    }
    cluster_positions(&kept_pos, &kept_w, grid, k, seed, params)
}

/// Clustering objective of a support on a dense profile: total mass times
/// index distance to the nearest support element (ties to the lower one).
pub fn kmedian_objective(v: &[f64], support: &[usize]) -> Result<f64> {
    if support.is_empty() {
        return Err(Error::EmptyInput("support"));
    }
    for w in support.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidWeights(
                "support must be strictly increasing".into(),
            ));
        }
    }
    if *support.last().expect("nonempty") >= v.len() {
        return Err(Error::InvalidWeights("support outside the profile".into()));
    }
    let mut cost = 0.0;
    let mut t = 0usize;
    for (i, &w) in v.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::InvalidWeights(format!("weight {w} at index {i}")));
        }
        while t + 1 < support.len() && 2 * i > support[t] + support[t + 1] {
            t += 1;
        }
        cost += w * i.abs_diff(support[t]) as f64;
    }
    Ok(cost)
}

/// Shared Lloyd core over compacted (position, positive weight) arrays.
fn cluster_positions(
    positions: &[usize],
    weights: &[f64],
    grid: &ParameterGrid,
    k: usize,
    seed: u64,
    params: &KMedianParams,
) -> Result<KMedianOutcome> {
    if k == 0 || params.max_iter == 0 || params.restarts == 0 {
        return Err(Error::InvalidWeights(
            "k, max_iter and restarts must be positive".into(),
        ));
    }
    if positions.len() < k {
        return Err(Error::SparsityExceedsMass {
            k,
            nnz: positions.len(),
        });
    }

    // Prefix sums of weight and weight*position drive median updates and
    // objective evaluation.
    let n = positions.len();
    let mut pw = vec![0.0; n + 1];
    let mut pwp = vec![0.0; n + 1];
    for i in 0..n {
        pw[i + 1] = pw[i] + weights[i];
        pwp[i + 1] = pwp[i] + weights[i] * positions[i] as f64;
    }

    let mut best: Option<KMedianOutcome> = None;
    for restart in 0..params.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seeds::derive(seed, &[restart as u64]));
        let mut medians = init_mass_proportional(weights, k, &mut rng);
        let mut trace = vec![objective_of(positions, &pw, &pwp, &medians)];
        let mut iterations = 0;
        for _ in 0..params.max_iter {
            iterations += 1;
            let next = sweep(positions, &pw, &medians, k);
            trace.push(objective_of(positions, &pw, &pwp, &next));
            let done = next == medians;
            medians = next;
            if done {
                break;
            }
        }
        let objective = *trace.last().expect("nonempty trace");
        let candidate = KMedianOutcome {
            theta_hat: medians.iter().map(|&m| grid.value(positions[m])).collect(),
            support: medians.iter().map(|&m| positions[m]).collect(),
            objective,
            objective_trace: trace,
            iterations,
        };
        if best.as_ref().is_none_or(|b| candidate.objective < b.objective) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// K distinct compact indices drawn without replacement, each draw
/// proportional to the remaining mass.
fn init_mass_proportional(weights: &[f64], k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut remaining: Vec<f64> = weights.to_vec();
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        let total: f64 = remaining.iter().sum();
        let mut x = rng.random::<f64>() * total;
        let mut pick = remaining.len() - 1;
        for (i, &w) in remaining.iter().enumerate() {
            if w > 0.0 {
                x -= w;
                if x <= 0.0 {
                    pick = i;
                    break;
                }
            }
        }
        // A fully consumed prefix can leave x above zero by rounding; fall
        // back to the last positive entry.
        if remaining[pick] == 0.0 {
            pick = remaining
                .iter()
                .rposition(|&w| w > 0.0)
                .expect("k <= positive count");
        }
        remaining[pick] = 0.0;
        chosen.push(pick);
    }
    chosen.sort_unstable();
    chosen
}

/// One labeling + median-update pass; medians are compact indices.
fn sweep(positions: &[usize], pw: &[f64], medians: &[usize], k: usize) -> Vec<usize> {
    let n = positions.len();
    let mut next = Vec::with_capacity(k);
    let mut lo = 0usize;
    for t in 0..k {
        let hi = if t + 1 < k {
            // First compact index belonging to cluster t+1: position beyond
            // the midpoint (midpoint itself labels to the lower median).
            let cut = positions[medians[t]] + positions[medians[t + 1]];
            partition_point_leq(positions, lo, cut)
        } else {
            n
        };
        next.push(median_in_range(pw, lo, hi));
        lo = hi;
    }
    next
}

/// First index in `positions[from..]` whose doubled value exceeds `cut`.
fn partition_point_leq(positions: &[usize], from: usize, cut: usize) -> usize {
    from + positions[from..].partition_point(|&p| 2 * p <= cut)
}

/// Weighted median of the compact range [lo, hi): smallest index whose
/// inclusive cumulative weight reaches half the range total.
fn median_in_range(pw: &[f64], lo: usize, hi: usize) -> usize {
    debug_assert!(lo < hi);
    let total = pw[hi] - pw[lo];
    if total == 0.0 {
        return lo + (hi - 1 - lo) / 2;
    }
    let target = pw[lo] + total / 2.0;
    let mut a = lo;
    let mut b = hi - 1;
    while a < b {
        let mid = (a + b) / 2;
        if pw[mid + 1] >= target {
            b = mid;
        } else {
            a = mid + 1;
        }
    }
    a
}

/// Objective for a compact median set via the same prefix sums.
fn objective_of(positions: &[usize], pw: &[f64], pwp: &[f64], medians: &[usize]) -> f64 {
    let n = positions.len();
    let k = medians.len();
    let mut cost = 0.0;
    let mut lo = 0usize;
    for t in 0..k {
        let hi = if t + 1 < k {
            let cut = positions[medians[t]] + positions[medians[t + 1]];
            partition_point_leq(positions, lo, cut)
        } else {
            n
        };
        let m = medians[t];
        let pm = positions[m] as f64;
        let left_w = pw[m + 1] - pw[lo];
        let left_p = pwp[m + 1] - pwp[lo];
        let right_w = pw[hi] - pw[m];
        let right_p = pwp[hi] - pwp[m];
        cost += pm * left_w - left_p + right_p - pm * right_w;
        lo = hi;
    }
    cost
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transport::{emd, emd_sparse_approx, SparseCoefVector};

    fn grid(len: usize) -> ParameterGrid {
        ParameterGrid::new(0.0, (len - 1) as f64, 1.0).unwrap()
    }

    #[test]
    fn weighted_median_examples() {
        assert_eq!(weighted_median(&[1, 2, 3], &[1.0, 1.0, 1.0]).unwrap(), 2);
        assert_eq!(
            weighted_median(&[1, 2, 3, 4], &[1.0, 1.0, 1.0, 1.0]).unwrap(),
            2
        );
        assert_eq!(weighted_median(&[1, 2, 3], &[0.1, 0.1, 5.0]).unwrap(), 3);
        assert_eq!(weighted_median(&[4, 9, 17], &[0.0, 0.0, 0.0]).unwrap(), 9);
    }

    #[test]
    fn weighted_median_rejects_bad_input() {
        assert!(weighted_median(&[], &[]).is_err());
        assert!(weighted_median(&[1, 1], &[1.0, 1.0]).is_err());
        assert!(weighted_median(&[1, 2], &[1.0]).is_err());
        assert!(weighted_median(&[1, 2], &[1.0, -1.0]).is_err());
    }

    #[test]
    fn balance_inequalities_hold_at_the_returned_median() {
        let positions: Vec<usize> = (0..25).collect();
        let weights: Vec<f64> = (0..25).map(|i| ((i * 31) % 7) as f64 / 2.0).collect();
        let m = weighted_median(&positions, &weights).unwrap();
        let total: f64 = weights.iter().sum();
        let left: f64 = weights[..m].iter().sum();
        let right: f64 = weights[m + 1..].iter().sum();
        assert!(left <= total / 2.0 + 1e-12);
        assert!(right <= total / 2.0 + 1e-12);
    }

    #[test]
    fn exactly_k_spikes_come_back_unchanged() {
        let mut v = vec![0.0; 50];
        v[7] = 1.0;
        v[20] = 2.0;
        v[41] = 0.5;
        let out = kmedian(&v, &grid(50), 3, 99, &KMedianParams::default()).unwrap();
        assert_eq!(out.support, vec![7, 20, 41]);
        assert_eq!(out.objective, 0.0);
        assert_eq!(out.iterations, 1);
        assert_eq!(out.theta_hat, vec![7.0, 20.0, 41.0]);
    }

    #[test]
    fn symmetric_bump_centers_on_its_peak() {
        // Symmetric triangular mass around index 10.
        let mut v = vec![0.0; 21];
        for i in 0..21usize {
            v[i] = 5.0f64.min(5.0 - (i.abs_diff(10) as f64)).max(0.0);
        }
        let out = kmedian(&v, &grid(21), 1, 5, &KMedianParams::default()).unwrap();
        assert_eq!(out.support, vec![10]);
    }

    #[test]
    fn objective_matches_uniform_example() {
        let v = vec![1.0; 5];
        assert_eq!(kmedian_objective(&v, &[2]).unwrap(), 6.0);
        let spiky = [0.0, 1.0, 0.0, 2.0];
        assert_eq!(kmedian_objective(&spiky, &[1, 3]).unwrap(), 0.0);
    }

    #[test]
    fn objective_equals_transport_to_collapsed_vector() {
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let len = 12 + (next() * 40.0) as usize;
            let v: Vec<f64> = (0..len).map(|_| (next() * 3.0).max(0.0)).collect();
            let mut support: Vec<usize> = (0..3).map(|_| (next() * len as f64) as usize).collect();
            support.sort_unstable();
            support.dedup();
            let obj = kmedian_objective(&v, &support).unwrap();
            let dense = SparseCoefVector::from_dense(&v).unwrap();
            let collapsed = emd_sparse_approx(&v, &support).unwrap();
            let cost = emd(&dense, &collapsed).unwrap().cost;
            assert!(
                (obj - cost).abs() <= 1e-9 * obj.max(1.0),
                "objective {obj} vs transport {cost}"
            );
        }
    }

    #[test]
    fn trace_is_monotone_and_fixed_points_stay_fixed() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for trial in 0..100 {
            let len = 30 + (next() * 100.0) as usize;
            let v: Vec<f64> = (0..len).map(|_| next() * 2.0).collect();
            let g = grid(len);
            let out = kmedian(&v, &g, 4, trial, &KMedianParams::default()).unwrap();
            for w in out.objective_trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-9 * w[0].abs().max(1.0), "{:?}", w);
            }
            // Re-running from the fixed point leaves the support unchanged.
            let again = kmedian_points(
                &(0..len).collect::<Vec<_>>(),
                &v,
                &g,
                4,
                trial,
                &KMedianParams::default(),
            )
            .unwrap();
            assert_eq!(again.support.len(), 4);
            let refit = {
                let pw_positions: Vec<usize> = (0..len).filter(|&i| v[i] > 0.0).collect();
                let pw_weights: Vec<f64> = pw_positions.iter().map(|&i| v[i]).collect();
                let mut pw = vec![0.0; pw_positions.len() + 1];
                let mut pwp = vec![0.0; pw_positions.len() + 1];
                for i in 0..pw_positions.len() {
                    pw[i + 1] = pw[i] + pw_weights[i];
                    pwp[i + 1] = pwp[i] + pw_weights[i] * pw_positions[i] as f64;
                }
                let medians: Vec<usize> = out
                    .support
                    .iter()
                    .map(|s| pw_positions.binary_search(s).unwrap())
                    .collect();
                let next = sweep(&pw_positions, &pw, &medians, 4);
                next.iter().map(|&m| pw_positions[m]).collect::<Vec<_>>()
            };
            assert_eq!(refit, out.support, "trial {trial} not a fixed point");
        }
    }

    #[test]
    fn restricted_clustering_stays_on_given_positions() {
        let positions = [3usize, 9, 10, 30, 31, 44];
        let weights = [0.2, 1.0, 1.1, 0.9, 1.0, 0.1];
        let out = kmedian_points(
            &positions,
            &weights,
            &grid(50),
            2,
            7,
            &KMedianParams::default(),
        )
        .unwrap();
        assert_eq!(out.support.len(), 2);
        for s in &out.support {
            assert!(positions.contains(s));
        }
        // Mass concentrates near 9-10 and 30-31.
        assert!(out.support[0] == 9 || out.support[0] == 10);
        assert!(out.support[1] == 30 || out.support[1] == 31);
    }

    #[test]
    fn seeds_are_deterministic_and_sparsity_is_enforced() {
        let v: Vec<f64> = (0..60).map(|i| ((i * 13) % 5) as f64).collect();
        let g = grid(60);
        let a = kmedian(&v, &g, 3, 42, &KMedianParams::default()).unwrap();
        let b = kmedian(&v, &g, 3, 42, &KMedianParams::default()).unwrap();
        assert_eq!(a, b);

        let sparse = {
            let mut z = vec![0.0; 60];
            z[5] = 1.0;
            z
        };
        assert!(matches!(
            kmedian(&sparse, &g, 2, 0, &KMedianParams::default()),
            Err(Error::SparsityExceedsMass { k: 2, nnz: 1 })
        ));
    }

    #[test]
    fn single_restart_reproduces_the_plain_method() {
        let v: Vec<f64> = (0..40).map(|i| 1.0 + ((i * 7) % 3) as f64).collect();
        let g = grid(40);
        let plain = KMedianParams {
            restarts: 1,
            ..KMedianParams::default()
        };
        let one = kmedian(&v, &g, 3, 11, &plain).unwrap();
        let five = kmedian(&v, &g, 3, 11, &KMedianParams::default()).unwrap();
        assert!(five.objective <= one.objective + 1e-12);
    }
}
