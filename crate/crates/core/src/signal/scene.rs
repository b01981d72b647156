//! Random well-separated scenes and signal synthesis.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::signal::dictionary::Dictionary;
use crate::signal::grid::ParameterGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MagnitudeMode {
    /// All coefficient magnitudes are 1.
    Unit,
    /// Magnitudes log-uniform in [1, r]; for two or more components one
    /// magnitude is pinned to 1 and one to r (assigned in random order), so
    /// the realized dynamic range equals r.
    LogRange,
}

/// Constraints for a random scene draw.
#[derive(Debug, Clone)]
pub struct SceneSpec {
    pub k: usize,
    /// Minimum pairwise parameter separation.
    pub zeta: f64,
    /// Minimum distance from either end of the parameter range.
    pub epsilon: f64,
    /// Dynamic range for `MagnitudeMode::LogRange`.
    pub r: f64,
    pub magnitude_mode: MagnitudeMode,
    /// Snap parameters to grid points (separation is then enforced in whole
    /// grid steps of at least ceil(zeta / delta)).
    pub on_grid: bool,
    /// Draw coefficient phases uniformly; otherwise coefficients are real
    /// and positive.
    pub complex_phases: bool,
}

impl SceneSpec {
    pub fn unit(k: usize, zeta: f64, epsilon: f64) -> Self {
        Self {
            k,
            zeta,
            epsilon,
            r: 1.0,
            magnitude_mode: MagnitudeMode::Unit,
            on_grid: false,
            complex_phases: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scene {
    /// Sorted ascending parameters.
    pub params: Vec<f64>,
    pub coefs: Vec<Complex64>,
}

impl Scene {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.coefs.iter().map(|c| c.norm()).collect()
    }
}

/// Draws `spec.k` parameters in the grid range with pairwise separation at
/// least `spec.zeta` and distance at least `spec.epsilon` from the ends, via
/// the spacing transform (sorted uniforms on the slack interval plus
/// separation shifts), so a feasible constraint set never fails to sample.
pub fn draw_random_scene(grid: &ParameterGrid, spec: &SceneSpec, seed: u64) -> Result<Scene> {
    if spec.k == 0 {
        return Err(Error::InfeasibleScene("zero components requested".into()));
    }
    if !spec.zeta.is_finite() || spec.zeta < 0.0 || !spec.epsilon.is_finite() || spec.epsilon < 0.0
    {
        return Err(Error::InfeasibleScene(format!(
            "separation {} and off-bound distance {} must be nonnegative",
            spec.zeta, spec.epsilon
        )));
    }
    if spec.magnitude_mode == MagnitudeMode::LogRange && !(spec.r >= 1.0) {
        return Err(Error::InfeasibleScene(format!("dynamic range {} must be >= 1", spec.r)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = spec.k;
    let params = if spec.on_grid {
        let delta = grid.delta();
        let zeta_idx = ((spec.zeta / delta - 1e-9).ceil().max(1.0)) as i64;
        let eps_idx = ((spec.epsilon / delta - 1e-9).ceil().max(0.0)) as i64;
        let top = grid.len() as i64 - 1;
        let slack = top - 2 * eps_idx - (k as i64 - 1) * zeta_idx;
        if slack < 0 {
            return Err(Error::InfeasibleScene(format!(
                "{k} on-grid components with separation {} and off-bound {} exceed the range",
                spec.zeta, spec.epsilon
            )));
        }
        let mut offsets: Vec<i64> = (0..k).map(|_| rng.random_range(0..=slack)).collect();
        offsets.sort_unstable();
        offsets
            .iter()
            .enumerate()
            .map(|(i, &u)| grid.value((eps_idx + u + i as i64 * zeta_idx) as usize))
            .collect()
    } else {
        let slack = grid.span() - 2.0 * spec.epsilon - (k as f64 - 1.0) * spec.zeta;
        if slack < 0.0 {
            return Err(Error::InfeasibleScene(format!(
                "{k} components with separation {} and off-bound {} exceed the range",
                spec.zeta, spec.epsilon
            )));
        }
        let mut offsets: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * slack).collect();
        offsets.sort_by(|a, b| a.partial_cmp(b).unwrap());
        offsets
            .iter()
            .enumerate()
            .map(|(i, &u)| grid.theta_min() + spec.epsilon + u + i as f64 * spec.zeta)
            .collect()
    };

    let mut magnitudes = vec![1.0; k];
    if spec.magnitude_mode == MagnitudeMode::LogRange && k >= 2 {
        let ln_r = spec.r.ln();
        magnitudes[0] = 1.0;
        magnitudes[1] = spec.r;
        for m in magnitudes.iter_mut().skip(2) {
            *m = (rng.random::<f64>() * ln_r).exp();
        }
        magnitudes.shuffle(&mut rng);
    }
    let coefs = magnitudes
        .iter()
        .map(|&m| {
            if spec.complex_phases {
                Complex64::from_polar(m, rng.random::<f64>() * TAU)
            } else {
                Complex64::new(m, 0.0)
            }
        })
        .collect();
    Ok(Scene { params, coefs })
}

/// Synthesizes the superposition of atoms at the given (possibly off-grid)
/// parameters with the given coefficients.
pub fn compose_signal(
    dict: &Dictionary,
    params: &[f64],
    coefs: &[Complex64],
) -> Result<Vec<Complex64>> {
    if params.len() != coefs.len() {
        return Err(Error::CardinalityMismatch(params.len(), coefs.len()));
    }
    if params.is_empty() {
        return Err(Error::InvalidCoefVector("empty scene".into()));
    }
    let grid = dict.grid();
    for &p in params {
        if !grid.contains(p) {
            return Err(Error::ParameterOutOfRange {
                value: p,
                min: grid.theta_min(),
                max: grid.theta_max(),
            });
        }
    }
    let n = dict.dimension();
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    let mut atom = vec![Complex64::new(0.0, 0.0); n];
    for (&theta, &c) in params.iter().zip(coefs) {
        dict.model().atom_into(theta, &mut atom);
        for (xi, ai) in x.iter_mut().zip(&atom) {
            *xi += c * ai;
        }
    }
    Ok(x)
}
