//! Correlation profiles: atom cross-correlation magnitude as a function of
//! parameter offset, and its cumulative.

use crate::error::{Error, Result};
use crate::measurement::MeasurementOperator;
use crate::signal::grid::ParameterGrid;
use crate::signal::model::{inner, ParametricModel};

/// Magnitude of the atom cross-correlation on symmetric grid offsets
/// k * delta, k = -(H-1)..=H-1, together with its cumulative.
///
/// The profile is computed for nonnegative offsets at a reference parameter
/// (the grid midpoint) and mirrored, treating the correlation as a function of
/// |offset|; that is the idealization the resolution analysis works in, and it
/// makes evenness and the rotational symmetry of the cumulative exact.
///
/// The cumulative uses the midpoint convention
/// `Lambda(k delta) = sum_{j < k} lambda_j + lambda_k / 2`
/// over the mirrored sequence (plain prefix sums, no delta scaling), so
/// `Lambda(0) = total / 2` exactly and
/// `Lambda(theta) + Lambda(-theta) = total` holds entry-wise.
#[derive(Debug, Clone)]
pub struct CorrelationProfile {
    delta: f64,
    /// |lambda| at offsets 0, delta, 2 delta, ...
    half: Vec<f64>,
    /// Midpoint cumulative over the mirrored offsets, length 2 * half.len() - 1.
    cumulative: Vec<f64>,
    total: f64,
}

impl CorrelationProfile {
    /// Builds a profile from nonnegative correlation magnitudes on offsets
    /// 0, delta, ... (negative offsets are the mirror image).
    pub fn from_magnitudes(delta: f64, half: Vec<f64>) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::InvalidProfile(format!("offset spacing {delta} must be positive")));
        }
        if half.is_empty() {
            return Err(Error::InvalidProfile("no correlation samples".into()));
        }
        if let Some(bad) = half.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidProfile(format!("correlation magnitude {bad} invalid")));
        }
        let h = half.len();
        let full_at = |j: usize| half[j.abs_diff(h - 1)];
        let mut cumulative = Vec::with_capacity(2 * h - 1);
        let mut running = 0.0;
        for j in 0..2 * h - 1 {
            let lam = full_at(j);
            cumulative.push(running + lam / 2.0);
            running += lam;
        }
        Ok(Self { delta, half, cumulative, total: running })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Number of nonnegative offsets.
    pub fn half_len(&self) -> usize {
        self.half.len()
    }

    pub fn max_offset(&self) -> f64 {
        (self.half.len() - 1) as f64 * self.delta
    }

    /// |lambda| at offset k * delta, k >= 0.
    pub fn lambda(&self, k: usize) -> f64 {
        self.half[k]
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.half
    }

    /// Sum of |lambda| over all mirrored offsets.
    pub fn total(&self) -> f64 {
        self.total
    }

    /// Cumulative at the largest grid offset <= theta (right-continuous step
    /// evaluation); 0 below the offset range, the top entry above it.
    pub fn cumulative_at(&self, theta: f64) -> f64 {
        let h = self.half.len() as isize;
        let k = (theta / self.delta + 1e-9).floor() as isize;
        let j = k + h - 1;
        if j < 0 {
            0.0
        } else if j >= self.cumulative.len() as isize {
            *self.cumulative.last().unwrap()
        } else {
            self.cumulative[j as usize]
        }
    }

    /// Smallest grid offset whose cumulative reaches `value`; `value` must lie
    /// in [0, total]. Values above every entry (possible for value = total,
    /// since the top entry omits half of the final magnitude) clamp to the
    /// largest offset.
    pub fn inverse_cumulative(&self, value: f64) -> Result<f64> {
        let tol = 1e-12 * self.total.max(1.0);
        if !value.is_finite() || value < -tol || value > self.total + tol {
            return Err(Error::CumulativeValueOutOfRange { value, total: self.total });
        }
        let h = self.half.len() as isize;
        let j = self
            .cumulative
            .partition_point(|&c| c < value - tol);
        let j = (j as isize).min(self.cumulative.len() as isize - 1);
        Ok((j - (h - 1)) as f64 * self.delta)
    }
}

/// Correlation profile of `model` on the offsets of `grid`, computed at the
/// grid-midpoint reference parameter. With an operator present the inner
/// products are taken between measured atoms, i.e. the profile of the
/// compressed dictionary.
pub fn correlation_profile(
    model: &ParametricModel,
    grid: &ParameterGrid,
    op: Option<&MeasurementOperator>,
) -> Result<CorrelationProfile> {
    if let Some(op) = op {
        if op.n() != model.dimension() {
            return Err(Error::DimensionMismatch { expected: model.dimension(), got: op.n() });
        }
    }
    let h = grid.len();
    let theta_ref = grid.value((h - 1) / 2);
    let reference = match op {
        Some(op) => op.measure(&model.atom(theta_ref))?,
        None => model.atom(theta_ref),
    };
    let mut half = Vec::with_capacity(h);
    let mut atom = vec![num_complex::Complex64::new(0.0, 0.0); model.dimension()];
    for k in 0..h {
        model.atom_into(theta_ref + k as f64 * grid.delta(), &mut atom);
        let lam = match op {
            Some(op) => inner(&reference, &op.measure(&atom)?).norm(),
            None => inner(&reference, &atom).norm(),
        };
        half.push(lam);
    }
    CorrelationProfile::from_magnitudes(grid.delta(), half)
}
