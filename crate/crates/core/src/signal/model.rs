//! Parametric signal models.
//!
//! Each model maps a scalar parameter theta to a complex atom of fixed length.
//! Two families are provided: a delayed windowed chirp pulse (time-delay
//! estimation) and a complex sinusoid (frequency estimation).

use num_complex::Complex64;
use std::f64::consts::TAU;

/// Relative guard band for the chirp window edges. Samples land on a lattice
/// at least one sample period (0.02 of the window) away from either edge, so
/// the band only rejects fp noise of the endpoint itself; without it the
/// raised-cosine period endpoint is double counted at lattice delays.
const WINDOW_EDGE_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum ParametricModel {
    /// Chirp pulse delayed by theta seconds, observed for `samples` samples at
    /// `sample_rate`. The pulse lasts `duration`, sweeps its instantaneous
    /// frequency from `f_start` by `f_sweep` across the pulse, and is weighted
    /// by a raised-cosine window that tapers to zero at the pulse edges. Amplitude is fixed so that any atom whose
    /// support lies inside the observation window has unit norm; atoms are not
    /// renormalized, so delays near the end of the observation window yield
    /// truncated, lower-norm atoms (and past it, zero atoms).
    ChirpTde {
        duration: f64,
        f_start: f64,
        f_sweep: f64,
        sample_rate: f64,
        samples: usize,
    },
    /// Complex sinusoid exp(j 2 pi theta n / N) / sqrt(N), n = 0..N, with
    /// theta a frequency in cycles per record.
    ComplexExpFe { samples: usize },
}

impl ParametricModel {
    /// Chirp with the reference operating point: 1 us pulse, 1 MHz start,
    /// 20 MHz sweep, 50 MHz sampling, 500 samples (a 10 us observation).
    pub fn chirp_tde_default() -> Self {
        ParametricModel::ChirpTde {
            duration: 1e-6,
            f_start: 1e6,
            f_sweep: 20e6,
            sample_rate: 50e6,
            samples: 500,
        }
    }

    /// Reference chirp with a different frequency sweep (Hz over the pulse).
    pub fn chirp_tde_with_sweep(f_sweep: f64) -> Self {
        let mut m = Self::chirp_tde_default();
        if let ParametricModel::ChirpTde { f_sweep: fs, .. } = &mut m {
            *fs = f_sweep;
        }
        m
    }

    /// Sinusoid model with the default 1000-sample record.
    pub fn fe_default() -> Self {
        ParametricModel::ComplexExpFe { samples: 1000 }
    }

    pub fn dimension(&self) -> usize {
        match self {
            ParametricModel::ChirpTde { samples, .. } => *samples,
            ParametricModel::ComplexExpFe { samples } => *samples,
        }
    }

    pub fn atom(&self, theta: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dimension()];
        self.atom_into(theta, &mut out);
        out
    }

    pub fn atom_into(&self, theta: f64, out: &mut [Complex64]) {
        assert_eq!(out.len(), self.dimension());
        match *self {
            ParametricModel::ChirpTde {
                duration,
                f_start,
                f_sweep,
                sample_rate,
                samples,
            } => {
                let ts = 1.0 / sample_rate;
                let amp = (2.0 / (3.0 * duration * sample_rate)).sqrt();
                for (n, slot) in out.iter_mut().enumerate().take(samples) {
                    let u = n as f64 * ts - theta;
                    let w = u / duration;
                    *slot = if w >= -WINDOW_EDGE_GUARD && w < 1.0 - WINDOW_EDGE_GUARD {
                        let phase = TAU * (f_start + w * f_sweep) * u;
                        let window = 1.0 - (TAU * w).cos();
                        Complex64::from_polar(amp * window, phase)
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                }
            }
            ParametricModel::ComplexExpFe { samples } => {
                let scale = 1.0 / (samples as f64).sqrt();
                for (n, slot) in out.iter_mut().enumerate() {
                    let phase = TAU * theta * n as f64 / samples as f64;
                    *slot = Complex64::from_polar(scale, phase);
                }
            }
        }
    }
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fe_atom_at_zero_is_constant() {
        let m = ParametricModel::ComplexExpFe { samples: 4 };
        let a = m.atom(0.0);
        for z in a {
            assert!((z - Complex64::new(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn fe_atoms_have_unit_norm_and_integer_offsets_are_orthogonal() {
        let m = ParametricModel::ComplexExpFe { samples: 500 };
        let a = m.atom(1.0);
        let b = m.atom(2.0);
        assert!((norm(&a) - 1.0).abs() < 1e-12);
        assert!((norm(&b) - 1.0).abs() < 1e-12);
        assert!(inner(&a, &b).norm() < 1e-12);
    }

    #[test]
    fn chirp_interior_atoms_have_unit_norm() {
        let m = ParametricModel::chirp_tde_default();
        // Lattice-aligned, off-lattice, and mid-range delays all see exactly
        // 50 in-window samples, so the discrete norm is exactly 1.
        for theta in [0.0, 3.7e-9, 1.234e-6, 5e-6, 8.9e-6] {
            let a = m.atom(theta);
            assert!(
                (norm(&a) - 1.0).abs() < 1e-9,
                "norm at {theta} was {}",
                norm(&a)
            );
        }
    }

    #[test]
    fn chirp_norm_within_spec_band() {
        let m = ParametricModel::chirp_tde_default();
        let a = m.atom(0.0);
        assert!((norm(&a) - 1.0).abs() <= 0.03);
    }

    #[test]
    fn chirp_sample_value_matches_formula() {
        let m = ParametricModel::chirp_tde_default();
        let a = m.atom(0.0);
        // n = 1: u = 20 ns, frozen from the closed-form expression.
        let expect = Complex64::new(0.0008964614454667351, 0.00015936127171822857);
        assert!((a[1] - expect).norm() < 1e-12);
    }

    #[test]
    fn chirp_support_is_the_delay_window() {
        let m = ParametricModel::chirp_tde_default();
        let a = m.atom(2e-6);
        // Support covers samples 100..150 (2 us to 3 us at 50 MHz).
        for (n, z) in a.iter().enumerate() {
            if n < 100 || n >= 150 {
                assert_eq!(z.norm(), 0.0, "unexpected support at sample {n}");
            }
        }
        // Sample 100 sits exactly on the leading edge where the raised-cosine
        // taper is zero; the envelope peaks mid-window at sample 125.
        assert_eq!(a[100].norm(), 0.0);
        assert!(a[125].norm() > a[110].norm());
        assert!(a[110].norm() > 0.0);
        assert!(a[140].norm() > 0.0);
    }

    #[test]
    fn chirp_truncates_at_observation_edge() {
        let m = ParametricModel::chirp_tde_default();
        // Support [9.5, 10.5) us only half observed.
        let partial = m.atom(9.5e-6);
        assert!(norm(&partial) < 1.0);
        assert!(norm(&partial) > 0.0);
        // Fully past the last sample at 9.98 us: a zero atom.
        let gone = m.atom(10e-6);
        assert_eq!(norm(&gone), 0.0);
    }
}
