//! Measurement operators and additive noise.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Linear operator taking a length-n signal to m measurements.
#[derive(Debug, Clone)]
pub enum MeasurementOperator {
    Identity {
        n: usize,
    },
    /// Dense real Gaussian matrix with i.i.d. N(0, 1/m) entries, stored
    /// row-major. Entries are drawn row by row from a ChaCha8 stream, so a
    /// seed pins the realization.
    GaussianDense {
        entries: Vec<f64>,
        m: usize,
        n: usize,
    },
    /// Keeps `rows` of the identity; `rows` is sorted and duplicate-free.
    RowSubsampledIdentity {
        rows: Vec<usize>,
        n: usize,
    },
}

fn rows_from_rate(n: usize, rate: f64) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidOperator("zero-dimensional signal".into()));
    }
    if !rate.is_finite() || rate <= 0.0 || rate > 1.0 {
        return Err(Error::InvalidOperator(format!(
            "compression rate {rate} outside (0, 1]"
        )));
    }
    let m = (rate * n as f64).round() as usize;
    if m == 0 {
        return Err(Error::InvalidOperator(format!(
            "compression rate {rate} leaves zero measurements"
        )));
    }
    Ok(m.min(n))
}

impl MeasurementOperator {
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidOperator("zero-dimensional signal".into()));
        }
        Ok(MeasurementOperator::Identity { n })
    }

    /// Gaussian operator with m = round(rate * n) rows.
    pub fn gaussian(n: usize, rate: f64, seed: u64) -> Result<Self> {
        let m = rows_from_rate(n, rate)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 1.0 / (m as f64).sqrt();
        let entries = (0..m * n)
            .map(|_| scale * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng))
            .collect();
        Ok(MeasurementOperator::GaussianDense { entries, m, n })
    }

    /// Keeps m = round(rate * n) distinct rows of the identity, chosen
    /// uniformly without replacement and stored sorted.
    pub fn row_subsampled(n: usize, rate: f64, seed: u64) -> Result<Self> {
        let m = rows_from_rate(n, rate)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = rand::seq::index::sample(&mut rng, n, m).into_vec();
        rows.sort_unstable();
        Ok(MeasurementOperator::RowSubsampledIdentity { rows, n })
    }

    pub fn m(&self) -> usize {
        match self {
            MeasurementOperator::Identity { n } => *n,
            MeasurementOperator::GaussianDense { m, .. } => *m,
            MeasurementOperator::RowSubsampledIdentity { rows, .. } => rows.len(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            MeasurementOperator::Identity { n } => *n,
            MeasurementOperator::GaussianDense { n, .. } => *n,
            MeasurementOperator::RowSubsampledIdentity { n, .. } => *n,
        }
    }

    /// Applies the operator to a length-n signal.
    pub fn measure(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), got: x.len() });
        }
        Ok(match self {
            MeasurementOperator::Identity { .. } => x.to_vec(),
            MeasurementOperator::GaussianDense { entries, m, n } => {
                let mut y = vec![Complex64::new(0.0, 0.0); *m];
                for (i, yi) in y.iter_mut().enumerate() {
                    let row = &entries[i * n..(i + 1) * n];
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (a, xj) in row.iter().zip(x) {
                        acc += xj * *a;
                    }
                    *yi = acc;
                }
                y
            }
            MeasurementOperator::RowSubsampledIdentity { rows, .. } => {
                rows.iter().map(|&i| x[i]).collect()
            }
        })
    }

    /// Applies the (real) transpose to a length-m vector.
    pub fn adjoint(&self, y: &[Complex64]) -> Result<Vec<Complex64>> {
        if y.len() != self.m() {
            return Err(Error::DimensionMismatch { expected: self.m(), got: y.len() });
        }
        Ok(match self {
            MeasurementOperator::Identity { .. } => y.to_vec(),
            MeasurementOperator::GaussianDense { entries, n, .. } => {
                let mut out = vec![Complex64::new(0.0, 0.0); *n];
                for (i, yi) in y.iter().enumerate() {
                    let row = &entries[i * n..(i + 1) * n];
                    for (o, a) in out.iter_mut().zip(row) {
                        *o += yi * *a;
                    }
                }
                out
            }
            MeasurementOperator::RowSubsampledIdentity { rows, n } => {
                let mut out = vec![Complex64::new(0.0, 0.0); *n];
                for (&i, yi) in rows.iter().zip(y) {
                    out[i] = *yi;
                }
                out
            }
        })
    }
}

/// Adds circular complex white Gaussian noise at the given SNR in dB, with
/// per-entry variance |y|^2 / (m * 10^(snr/10)). An infinite SNR returns the
/// input unchanged.
pub fn add_awgn(y: &[Complex64], snr_db: f64, seed: u64) -> Vec<Complex64> {
    if snr_db.is_infinite() && snr_db > 0.0 {
        return y.to_vec();
    }
    let energy: f64 = y.iter().map(|z| z.norm_sqr()).sum();
    let var = energy / (y.len() as f64 * 10f64.powf(snr_db / 10.0));
    let sigma = (var / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    y.iter()
        .map(|z| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            z + Complex64::new(sigma * re, sigma * im)
        })
        .collect()
}
