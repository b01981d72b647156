//! Ridge-regularized least squares over a small set of complex columns.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Solves min over c of the squared norm of A c - y, with `ridge` added to
/// the Gram diagonal so coincident or nearly parallel columns stay solvable.
/// Columns must share y's length; the system is tiny (one entry per support
/// index), so normal equations plus a Cholesky factorization suffice.
pub fn ridge_least_squares(
    columns: &[&[Complex64]],
    y: &[Complex64],
    ridge: f64,
) -> Result<Vec<Complex64>> {
    if columns.is_empty() {
        return Err(Error::EmptyInput("least-squares columns"));
    }
    let m = y.len();
    for col in columns {
        if col.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: col.len(),
            });
        }
    }
    let n = columns.len();
    let mut gram = vec![Complex64::ZERO; n * n];
    let mut rhs = vec![Complex64::ZERO; n];
    for i in 0..n {
        for j in i..n {
            let mut acc = Complex64::ZERO;
            for t in 0..m {
                acc += columns[i][t].conj() * columns[j][t];
            }
            gram[i * n + j] = acc;
            gram[j * n + i] = acc.conj();
        }
        gram[i * n + i] += ridge;
        let mut acc = Complex64::ZERO;
        for t in 0..m {
            acc += columns[i][t].conj() * y[t];
        }
        rhs[i] = acc;
    }
    cholesky_solve(&mut gram, rhs, n)
}

/// In-place lower-triangular factorization of a Hermitian positive-definite
/// matrix followed by the two triangular solves.
fn cholesky_solve(a: &mut [Complex64], mut b: Vec<Complex64>, n: usize) -> Result<Vec<Complex64>> {
    for j in 0..n {
        let mut diag = a[j * n + j].re;
        for k in 0..j {
            diag -= a[j * n + k].norm_sqr();
        }
        if diag <= 0.0 || !diag.is_finite() {
            return Err(Error::InvalidOperator(format!(
                "least-squares system not positive definite at pivot {j}"
            )));
        }
        let root = diag.sqrt();
        a[j * n + j] = Complex64::new(root, 0.0);
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k].conj();
            }
            a[i * n + j] = v / root;
        }
    }
    // Forward solve L z = b, then backward solve L^H c = z.
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= a[i * n + k] * b[k];
        }
        b[i] = v / a[i * n + i].re;
    }
    for i in (0..n).rev() {
        let mut v = b[i];
        for k in i + 1..n {
            v -= a[k * n + i].conj() * b[k];
        }
        b[i] = v / a[i * n + i].re;
    }
    Ok(b)
}
