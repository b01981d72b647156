//! Sparse nonnegative magnitude vectors and transport plans on an index line.

use crate::error::{Error, Result};

/// A nonnegative sparse vector over indices `0..len`, stored as a sorted
/// support with strictly positive weights. Duplicate indices passed to the
/// constructors are aggregated and zero weights are dropped, so the stored
/// form is canonical: two vectors compare equal iff they hold the same mass
/// at the same positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseCoefVector {
    len: usize,
    support: Vec<usize>,
    weights: Vec<f64>,
}

impl SparseCoefVector {
    /// Builds from (index, weight) pairs. Weights must be finite and
    /// nonnegative; zeros are dropped, duplicates summed.
    pub fn from_pairs(len: usize, pairs: &[(usize, f64)]) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidCoefVector("zero ambient length".into()));
        }
        let mut entries: Vec<(usize, f64)> = Vec::with_capacity(pairs.len());
        for &(idx, w) in pairs {
            if idx >= len {
                return Err(Error::InvalidCoefVector(format!(
                    "index {idx} outside 0..{len}"
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidCoefVector(format!(
                    "weight {w} at index {idx}"
                )));
            }
            if w > 0.0 {
                entries.push((idx, w));
            }
        }
        entries.sort_by_key(|e| e.0);
        let mut support = Vec::with_capacity(entries.len());
        let mut weights: Vec<f64> = Vec::with_capacity(entries.len());
        for (idx, w) in entries {
            if support.last() == Some(&idx) {
                *weights.last_mut().expect("nonempty") += w;
            } else {
                support.push(idx);
                weights.push(w);
            }
        }
        Ok(Self {
            len,
            support,
            weights,
        })
    }

    /// Builds from a dense vector, keeping the strictly positive entries.
    pub fn from_dense(values: &[f64]) -> Result<Self> {
        let pairs: Vec<(usize, f64)> =
            values.iter().enumerate().map(|(i, &v)| (i, v)).collect();
        Self::from_pairs(values.len(), &pairs)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    /// True when no index carries mass.
    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.support.len()
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        for (&i, &w) in self.support.iter().zip(&self.weights) {
            out[i] = w;
        }
        out
    }
}

/// One transport plan: `(source index, sink index, mass)` triples, all mass
/// strictly positive. For equal-mass inputs the per-index totals reproduce
/// both marginals; when the masses differ only the smaller total is routed.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowPlan {
    pub flows: Vec<(usize, usize, f64)>,
}

impl FlowPlan {
    /// Total transported mass times distance.
    pub fn cost(&self) -> f64 {
        self.flows
            .iter()
            .map(|&(i, j, f)| f * (i.abs_diff(j)) as f64)
            .sum()
    }

    /// Mass leaving each source index, as (index, total) in source order.
    pub fn source_totals(&self) -> Vec<(usize, f64)> {
        accumulate(self.flows.iter().map(|&(i, _, f)| (i, f)))
    }

    /// Mass entering each sink index, as (index, total) in sink order.
    pub fn sink_totals(&self) -> Vec<(usize, f64)> {
        accumulate(self.flows.iter().map(|&(_, j, f)| (j, f)))
    }
}

fn accumulate(it: impl Iterator<Item = (usize, f64)>) -> Vec<(usize, f64)> {
    let mut pairs: Vec<(usize, f64)> = it.collect();
    pairs.sort_by_key(|p| p.0);
    let mut out: Vec<(usize, f64)> = Vec::new();
    for (i, f) in pairs {
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc += f,
            _ => out.push((i, f)),
        }
    }
    out
}

/// Collapses a dense nonnegative vector onto a fixed support: every index is
/// assigned to its nearest support element (ties to the lower one) and the
/// cluster masses are summed there. The result carries exactly the input's
/// total mass and is the cheapest vector on that support in transport cost.
pub fn emd_sparse_approx(v: &[f64], support: &[usize]) -> Result<SparseCoefVector> {
    if support.is_empty() {
        return Err(Error::EmptyInput("approximation support"));
    }
    if v.is_empty() {
        return Err(Error::EmptyInput("dense vector"));
    }
    for w in support.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidCoefVector(format!(
                "support not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
    }
    if *support.last().expect("nonempty") >= v.len() {
        return Err(Error::InvalidCoefVector(format!(
            "support index {} outside 0..{}",
            support.last().expect("nonempty"),
            v.len()
        )));
    }
    for (i, &x) in v.iter().enumerate() {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidCoefVector(format!("value {x} at index {i}")));
        }
    }

    let mut masses = vec![0.0; support.len()];
    let mut cluster = 0usize;
    for (i, &x) in v.iter().enumerate() {
        // Advance while the next support element is strictly nearer; on a
        // midpoint tie 2i = s_j + s_{j+1} the lower index keeps the point.
        while cluster + 1 < support.len() && 2 * i > support[cluster] + support[cluster + 1] {
            cluster += 1;
        }
        masses[cluster] += x;
    }
    let pairs: Vec<(usize, f64)> = support.iter().copied().zip(masses).collect();
    SparseCoefVector::from_pairs(v.len(), &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_are_sorted_aggregated_and_pruned() {
        let v =
            SparseCoefVector::from_pairs(10, &[(7, 1.5), (2, 1.0), (7, 0.5), (4, 0.0)]).unwrap();
        assert_eq!(v.support(), &[2, 7]);
        assert_eq!(v.weights(), &[1.0, 2.0]);
        assert_eq!(v.nnz(), 2);
        assert!((v.total_mass() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn dense_roundtrip() {
        let d = [0.0, 2.0, 0.0, 0.5];
        let v = SparseCoefVector::from_dense(&d).unwrap();
        assert_eq!(v.to_dense(), d.to_vec());
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(SparseCoefVector::from_pairs(0, &[]).is_err());
        assert!(SparseCoefVector::from_pairs(3, &[(3, 1.0)]).is_err());
        assert!(SparseCoefVector::from_pairs(3, &[(1, -0.5)]).is_err());
        assert!(SparseCoefVector::from_pairs(3, &[(1, f64::NAN)]).is_err());
        let empty = SparseCoefVector::from_pairs(3, &[]).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn approx_keeps_vectors_already_on_support() {
        let v = [0.0, 1.0, 0.0, 2.0, 0.0];
        let out = emd_sparse_approx(&v, &[1, 3]).unwrap();
        assert_eq!(out.support(), &[1, 3]);
        assert_eq!(out.weights(), &[1.0, 2.0]);
    }

    #[test]
    fn approx_aggregates_uniform_mass_to_center() {
        let v = [1.0; 5];
        let out = emd_sparse_approx(&v, &[2]).unwrap();
        assert_eq!(out.support(), &[2]);
        assert_eq!(out.weights(), &[5.0]);
    }

    #[test]
    fn approx_midpoint_tie_goes_to_lower_support_index() {
        // Index 2 is equidistant from supports 0 and 4.
        let v = [1.0, 0.0, 1.0, 0.0, 1.0];
        let out = emd_sparse_approx(&v, &[0, 4]).unwrap();
        assert_eq!(out.weights(), &[2.0, 1.0]);
    }

    #[test]
    fn approx_preserves_total_mass() {
        let v: Vec<f64> = (0..40).map(|i| ((i * 7919) % 13) as f64 / 3.0).collect();
        let out = emd_sparse_approx(&v, &[3, 11, 29]).unwrap();
        let total: f64 = v.iter().sum();
        assert!((out.total_mass() - total).abs() < 1e-12 * total);
    }

    #[test]
    fn approx_rejects_bad_supports() {
        assert!(emd_sparse_approx(&[1.0, 1.0], &[]).is_err());
        assert!(emd_sparse_approx(&[1.0, 1.0], &[1, 1]).is_err());
        assert!(emd_sparse_approx(&[1.0, 1.0], &[2]).is_err());
        assert!(emd_sparse_approx(&[1.0, -1.0], &[0]).is_err());
    }

    #[test]
    fn plan_totals_accumulate_by_index() {
        let plan = FlowPlan {
            flows: vec![(1, 4, 0.5), (1, 6, 0.25), (3, 4, 1.0)],
        };
        assert_eq!(plan.source_totals(), vec![(1, 0.75), (3, 1.0)]);
        assert_eq!(plan.sink_totals(), vec![(4, 1.5), (6, 0.25)]);
        assert!((plan.cost() - (0.5 * 3.0 + 0.25 * 5.0 + 1.0 * 1.0)).abs() < 1e-15);
    }
}
