//! Building blocks shared by the pursuit algorithms: the correlation proxy,
//! hard thresholding, and coherence-screened peak selection.

use crate::error::{Error, Result};
use crate::measurement::MeasurementOperator;
use crate::signal::dictionary::Dictionary;
use crate::signal::model::{inner, norm};
use num_complex::Complex64;

/// Slack applied when comparing a normalized coherence against the band
/// limit, so exact-arithmetic zeros that land at 1e-13 in floating point
/// still count as orthogonal.
const COHERENCE_TOL: f64 = 1e-9;

/// Correlates the residual with every dictionary atom as seen through the
/// measurement operator: v = Psi^H (Phi^H y). The operator adjoint is applied
/// once to y, so the compressed dictionary never has to be materialized.
pub fn proxy(
    y: &[Complex64],
    op: &MeasurementOperator,
    dict: &Dictionary,
) -> Result<Vec<Complex64>> {
    if op.n() != dict.dimension() {
        return Err(Error::DimensionMismatch {
            expected: dict.dimension(),
            got: op.n(),
        });
    }
    let back = op.adjoint(y)?;
    let mut v = Vec::with_capacity(dict.len());
    for j in 0..dict.len() {
        v.push(inner(dict.column(j), &back));
    }
    Ok(v)
}

/// Zeroes every entry whose magnitude does not strictly exceed `t`. Entries
/// at exactly the threshold are dropped, and zeros always stay zero.
pub fn hard_threshold(v: &[Complex64], t: f64) -> Vec<Complex64> {
    v.iter()
        .map(|&x| if x.norm() > t { x } else { Complex64::ZERO })
        .collect()
}

/// Greedy peak picking with a coherence band: walks candidates in order of
/// decreasing magnitude and keeps an index only when its normalized coherence
/// with every previously kept atom stays within `nu`. Returns exactly `k`
/// indices in ascending order, or an admissibility error when the candidate
/// pool runs out first.
pub fn band_excluded_select(
    v: &[Complex64],
    dict: &Dictionary,
    k: usize,
    nu: f64,
) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::ParameterOutOfRange {
            value: 0.0,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::ParameterOutOfRange {
            value: nu,
            min: 0.0,
            max: 1.0,
        });
    }
    if v.len() != dict.len() {
        return Err(Error::DimensionMismatch {
            expected: dict.len(),
            got: v.len(),
        });
    }
    let mut order: Vec<usize> = (0..v.len()).filter(|&i| v[i].norm() > 0.0).collect();
    order.sort_by(|&a, &b| {
        v[b].norm()
            .total_cmp(&v[a].norm())
            .then_with(|| a.cmp(&b))
    });
    let mut selected: Vec<usize> = Vec::with_capacity(k);
    for &cand in &order {
        let nc = dict.column_norm(cand);
        if nc == 0.0 {
            continue;
        }
        let admissible = selected.iter().all(|&s| {
            let ns = dict.column_norm(s);
            let coh = inner(dict.column(cand), dict.column(s)).norm() / (nc * ns);
            coh <= nu + COHERENCE_TOL
        });
        if admissible {
            selected.push(cand);
            if selected.len() == k {
                break;
            }
        }
    }
    if selected.len() < k {
        return Err(Error::AdmissibilityExhausted {
            needed: k,
            found: selected.len(),
        });
    }
    selected.sort_unstable();
    Ok(selected)
}

/// Indices of the `k` largest magnitudes (ties broken toward the lower
/// index), restricted to strictly positive entries.
pub fn top_k_magnitudes(mags: &[f64], k: usize) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..mags.len()).filter(|&i| mags[i] > 0.0).collect();
    if order.len() < k {
        return Err(Error::SparsityExceedsMass {
            k,
            nnz: order.len(),
        });
    }
    order.sort_by(|&a, &b| mags[b].total_cmp(&mags[a]).then_with(|| a.cmp(&b)));
    let mut picked: Vec<usize> = order[..k].to_vec();
    picked.sort_unstable();
    Ok(picked)
}

/// Euclidean norm of a complex vector; re-exported for the pursuit loops.
pub(crate) fn vec_norm(v: &[Complex64]) -> f64 {
    norm(v)
}
