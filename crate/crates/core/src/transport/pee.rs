//! Parameter-estimation error: optimal assignment cost between two equal-size
//! parameter sets, and its transport-cost upper bound.

use crate::error::{Error, Result};
use crate::transport::emd::emd;
use crate::transport::sparse::SparseCoefVector;

/// Minimum total |theta_i - theta_hat_{pi(i)}| over assignments pi. On a line
/// the optimum is the order-preserving matching, so both sets are sorted and
/// paired in order.
pub fn pee(theta: &[f64], theta_hat: &[f64]) -> Result<f64> {
    if theta.len() != theta_hat.len() {
        return Err(Error::CardinalityMismatch(theta.len(), theta_hat.len()));
    }
    if theta.is_empty() {
        return Err(Error::EmptyInput("parameter set"));
    }
    if theta
        .iter()
        .chain(theta_hat)
        .any(|x| !x.is_finite())
    {
        return Err(Error::NonFinite("parameter set"));
    }
    let mut a = theta.to_vec();
    let mut b = theta_hat.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum())
}

/// Outcome of checking the assignment-error bound
/// pee <= (delta / c_min) * transport cost.
#[derive(Debug, Clone)]
pub struct PeeBoundCheck {
    pub pee: f64,
    pub emd_cost: f64,
    /// Smallest nonzero magnitude across both vectors.
    pub c_min: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Evaluates the bound for two equally sparse vectors whose support indices
/// sit on a grid of spacing `delta`.
pub fn pee_bound_check(
    c: &SparseCoefVector,
    chat: &SparseCoefVector,
    delta: f64,
) -> Result<PeeBoundCheck> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::ParameterOutOfRange {
            value: delta,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    if c.nnz() != chat.nnz() {
        return Err(Error::CardinalityMismatch(c.nnz(), chat.nnz()));
    }
    let to_params = |v: &SparseCoefVector| -> Vec<f64> {
        v.support().iter().map(|&i| i as f64 * delta).collect()
    };
    let assignment = pee(&to_params(c), &to_params(chat))?;
    let outcome = emd(c, chat)?;
    let c_min = c
        .weights()
        .iter()
        .chain(chat.weights())
        .copied()
        .fold(f64::INFINITY, f64::min);
    let bound = delta / c_min * outcome.cost;
    Ok(PeeBoundCheck {
        pee: assignment,
        emd_cost: outcome.cost,
        c_min,
        bound,
        holds: assignment <= bound + 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_on_identical_sets() {
        let t = [0.4, 1.7, 9.0];
        assert_eq!(pee(&t, &t).unwrap(), 0.0);
    }

    #[test]
    fn picks_the_cheaper_assignment() {
        // In-order matching costs 1.5, the crossed one 2.5.
        let cost = pee(&[1.0, 3.0], &[2.0, 2.5]).unwrap();
        assert!((cost - 1.5).abs() < 1e-12);
    }

    #[test]
    fn input_order_is_irrelevant() {
        let a = [5.0, 1.0, 3.0];
        let b = [2.0, 6.0, 0.5];
        let x = pee(&a, &b).unwrap();
        let y = pee(&[1.0, 3.0, 5.0], &[0.5, 2.0, 6.0]).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn matches_exhaustive_assignment_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let k = rng.random_range(1..=6);
            let a: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * 10.0).collect();
            let b: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * 10.0).collect();
            let fast = pee(&a, &b).unwrap();
            let brute = brute_force_assignment(&a, &b);
            assert!((fast - brute).abs() < 1e-9, "{fast} vs {brute}");
        }
    }

    #[test]
    fn rejects_mismatched_or_bad_inputs() {
        assert!(pee(&[1.0], &[1.0, 2.0]).is_err());
        assert!(pee(&[], &[]).is_err());
        assert!(pee(&[f64::NAN], &[0.0]).is_err());
    }

    #[test]
    fn bound_is_tight_for_shifted_singletons() {
        let c = SparseCoefVector::from_pairs(20, &[(3, 0.7)]).unwrap();
        let chat = SparseCoefVector::from_pairs(20, &[(11, 0.7)]).unwrap();
        let check = pee_bound_check(&c, &chat, 0.25).unwrap();
        assert!(check.holds);
        assert!((check.pee - 8.0 * 0.25).abs() < 1e-12);
        assert!((check.bound - check.pee).abs() < 1e-9);
    }

    #[test]
    fn bound_holds_on_random_equal_sparsity_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..500 {
            let len = rng.random_range(10..80);
            let k = rng.random_range(1..=4usize);
            let c = random_k_sparse(&mut rng, len, k);
            let chat = random_k_sparse(&mut rng, len, k);
            let check = pee_bound_check(&c, &chat, 0.1).unwrap();
            assert!(
                check.holds,
                "pee {} exceeded bound {}",
                check.pee, check.bound
            );
        }
    }

    #[test]
    fn bound_check_requires_equal_sparsity() {
        let c = SparseCoefVector::from_pairs(10, &[(1, 1.0), (5, 1.0)]).unwrap();
        let chat = SparseCoefVector::from_pairs(10, &[(2, 2.0)]).unwrap();
        assert!(pee_bound_check(&c, &chat, 1.0).is_err());
    }

    fn brute_force_assignment(a: &[f64], b: &[f64]) -> f64 {
        fn recurse(a: &[f64], b: &[f64], used: &mut Vec<bool>, i: usize) -> f64 {
            if i == a.len() {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for j in 0..b.len() {
                if !used[j] {
                    used[j] = true;
                    let cost = (a[i] - b[j]).abs() + recurse(a, b, used, i + 1);
                    best = best.min(cost);
                    used[j] = false;
                }
            }
            best
        }
        recurse(a, b, &mut vec![false; b.len()], 0)
    }

    fn random_k_sparse(rng: &mut ChaCha8Rng, len: usize, k: usize) -> SparseCoefVector {
        loop {
            let mut pairs = Vec::new();
            for _ in 0..k {
                pairs.push((rng.random_range(0..len), 0.2 + rng.random::<f64>()));
            }
            let v = SparseCoefVector::from_pairs(len, &pairs).unwrap();
            if v.nnz() == k {
                return v;
            }
        }
    }
}
