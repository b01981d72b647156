//! Linear-programming oracle for the transport cost, kept deliberately
//! independent of the fast paths so the two implementations can check each
//! other.

use crate::error::{Error, Result};
use crate::transport::sparse::SparseCoefVector;

/// Largest support size the oracle accepts per side.
pub const ORACLE_SUPPORT_CAP: usize = 8;

/// Transport cost by solving the flow linear program directly with a dense
/// two-phase simplex. Mass mismatch is handled exactly like `emd`: a free
/// virtual node absorbs the surplus and the mismatch is charged the ambient
/// length.
pub fn emd_lp_oracle(c: &SparseCoefVector, chat: &SparseCoefVector) -> Result<f64> {
    if c.len() != chat.len() {
        return Err(Error::DimensionMismatch {
            expected: c.len(),
            got: chat.len(),
        });
    }
    if c.is_empty() || chat.is_empty() {
        return Err(Error::EmptyInput("coefficient vector"));
    }
    for v in [c, chat] {
        if v.nnz() > ORACLE_SUPPORT_CAP {
            return Err(Error::OracleSupportTooLarge(v.nnz(), ORACLE_SUPPORT_CAP));
        }
    }

    let mc = c.total_mass();
    let mh = chat.total_mass();
    let mismatch = (mc - mh).abs();
    let penalty = if mismatch <= 1e-12 * mc.max(mh).max(1.0) {
        0.0
    } else {
        mismatch * c.len() as f64
    };

    // Source/sink weight lists; `None` positions mark the virtual node that
    // absorbs surplus mass at zero distance.
    let mut sources: Vec<(Option<usize>, f64)> = c
        .support()
        .iter()
        .zip(c.weights())
        .map(|(&i, &w)| (Some(i), w))
        .collect();
    let mut sinks: Vec<(Option<usize>, f64)> = chat
        .support()
        .iter()
        .zip(chat.weights())
        .map(|(&j, &w)| (Some(j), w))
        .collect();
    if penalty > 0.0 {
        if mc < mh {
            sources.push((None, mh - mc));
        } else {
            sinks.push((None, mc - mh));
        }
    }

    let m1 = sources.len();
    let m2 = sinks.len();
    let nvars = m1 * m2;
    let mut a = vec![vec![0.0; nvars]; m1 + m2];
    let mut b = vec![0.0; m1 + m2];
    let mut costs = vec![0.0; nvars];
    for (i, &(pi, wi)) in sources.iter().enumerate() {
        b[i] = wi;
        for (j, &(pj, _)) in sinks.iter().enumerate() {
            let var = i * m2 + j;
            a[i][var] = 1.0;
            costs[var] = match (pi, pj) {
                (Some(p), Some(q)) => p.abs_diff(q) as f64,
                _ => 0.0,
            };
        }
    }
    for (j, &(_, wj)) in sinks.iter().enumerate() {
        b[m1 + j] = wj;
        for i in 0..m1 {
            a[m1 + j][i * m2 + j] = 1.0;
        }
    }

    let flow_cost = solve_lp(&a, &b, &costs)?;
    Ok(flow_cost + penalty)
}

const EPS: f64 = 1e-9;

/// Minimizes costs . x subject to a x = b, x >= 0 (all b >= 0) with the
/// textbook two-phase full-tableau simplex under Bland's rule.
fn solve_lp(a: &[Vec<f64>], b: &[f64], costs: &[f64]) -> Result<f64> {
    let m = a.len();
    let n = costs.len();
    let ncols = n + m;

    // Tableau [A | I | b] with the artificial identity as starting basis.
    let mut tab: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut row = Vec::with_capacity(ncols + 1);
            row.extend_from_slice(&a[i]);
            for k in 0..m {
                row.push(if k == i { 1.0 } else { 0.0 });
            }
            row.push(b[i]);
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..ncols).collect();

    let mut phase1 = vec![0.0; ncols];
    for c in phase1.iter_mut().skip(n) {
        *c = 1.0;
    }
    run_simplex(&mut tab, &mut basis, &phase1, ncols);
    let infeasibility: f64 = basis
        .iter()
        .zip(&tab)
        .map(|(&bi, row)| phase1[bi] * row[ncols])
        .sum();
    if infeasibility > 1e-7 {
        return Err(Error::InvalidCoefVector(format!(
            "transport program infeasible by {infeasibility}"
        )));
    }

    // Drive leftover artificials out of the basis; a row that cannot pivot
    // on any structural column is redundant and gets dropped.
    let mut row = 0;
    while row < tab.len() {
        if basis[row] >= n {
            if let Some(col) = (0..n).find(|&j| tab[row][j].abs() > EPS) {
                pivot(&mut tab, row, col);
                basis[row] = col;
            } else {
                tab.remove(row);
                basis.remove(row);
                continue;
            }
        }
        row += 1;
    }

    let mut phase2 = vec![0.0; ncols];
    phase2[..n].copy_from_slice(costs);
    run_simplex(&mut tab, &mut basis, &phase2, n);
    Ok(basis
        .iter()
        .zip(&tab)
        .map(|(&bi, row)| phase2[bi] * row[ncols])
        .sum())
}

/// Pivots to optimality for the given cost row, letting only columns below
/// `allowed` enter the basis.
fn run_simplex(tab: &mut [Vec<f64>], basis: &mut [usize], costs: &[f64], allowed: usize) {
    let m = tab.len();
    let rhs = tab.first().map_or(0, |r| r.len() - 1);
    loop {
        // Bland: entering column is the lowest-index negative reduced cost.
        let mut entering = None;
        for j in 0..allowed {
            let reduced = costs[j]
                - basis
                    .iter()
                    .zip(tab.iter())
                    .map(|(&bi, row)| costs[bi] * row[j])
                    .sum::<f64>();
            if reduced < -EPS {
                entering = Some(j);
                break;
            }
        }
        let Some(col) = entering else { break };

        let mut leaving: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if tab[i][col] > EPS {
                let ratio = tab[i][rhs] / tab[i][col];
                let better = ratio < best - EPS
                    || (ratio < best + EPS
                        && leaving.is_some_and(|l| basis[i] < basis[l]));
                if leaving.is_none() || better {
                    best = ratio.min(best);
                    leaving = Some(i);
                }
            }
        }
        let Some(row) = leaving else { break };
        pivot(tab, row, col);
        basis[row] = col;
    }
}

fn pivot(tab: &mut [Vec<f64>], row: usize, col: usize) {
    let scale = tab[row][col];
    for v in tab[row].iter_mut() {
        *v /= scale;
    }
    for i in 0..tab.len() {
        if i != row {
            let factor = tab[i][col];
            if factor != 0.0 {
                for j in 0..tab[i].len() {
                    tab[i][j] -= factor * tab[row][j];
                }
            }
        }
    }
}
