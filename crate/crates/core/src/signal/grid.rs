//! Uniform parameter grids.

use crate::error::{Error, Result};

/// Uniformly spaced parameter samples `theta_min + i * delta` for `i` in `0..len`.
///
/// The spacing must divide the range: construction rejects inputs whose last
/// grid point misses `theta_max` by more than a relative fp tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterGrid {
    theta_min: f64,
    theta_max: f64,
    delta: f64,
    len: usize,
}

impl ParameterGrid {
    pub fn new(theta_min: f64, theta_max: f64, delta: f64) -> Result<Self> {
        if !theta_min.is_finite() || !theta_max.is_finite() || theta_max <= theta_min {
            return Err(Error::InvalidGrid(format!(
                "range [{theta_min}, {theta_max}] is empty or not finite"
            )));
        }
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::InvalidGrid(format!("spacing {delta} must be positive")));
        }
        let steps = ((theta_max - theta_min) / delta).round();
        if steps < 1.0 {
            return Err(Error::InvalidGrid(format!(
                "spacing {delta} leaves fewer than two points in [{theta_min}, {theta_max}]"
            )));
        }
        let landing = theta_min + steps * delta;
        if (landing - theta_max).abs() > 1e-6 * delta {
            return Err(Error::InvalidGrid(format!(
                "spacing {delta} does not divide the range [{theta_min}, {theta_max}]"
            )));
        }
        if steps >= (usize::MAX - 1) as f64 {
            return Err(Error::InvalidGrid("grid too large".into()));
        }
        Ok(Self { theta_min, theta_max, delta, len: steps as usize + 1 })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn theta_min(&self) -> f64 {
        self.theta_min
    }

    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }

    pub fn span(&self) -> f64 {
        self.theta_max - self.theta_min
    }

    pub fn value(&self, index: usize) -> f64 {
        debug_assert!(index < self.len);
        self.theta_min + index as f64 * self.delta
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.value(i))
    }

    /// Index of the grid point nearest to `theta`, clamped to the grid ends.
    pub fn nearest_index(&self, theta: f64) -> usize {
        let raw = ((theta - self.theta_min) / self.delta).round();
        if raw <= 0.0 {
            0
        } else {
            (raw as usize).min(self.len - 1)
        }
    }

    pub fn contains(&self, theta: f64) -> bool {
        theta >= self.theta_min - 1e-12 * self.delta && theta <= self.theta_max + 1e-12 * self.delta
    }
}
