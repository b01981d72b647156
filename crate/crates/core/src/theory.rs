//! Closed-form resolution bounds and condition checkers.
//!
//! Two families of bounds are provided. The profile-based bounds evaluate
//! minimum-separation and edge-margin requirements on a measured cumulative
//! correlation profile. The decay-based bounds assume an exponential
//! correlation envelope exp(-a |offset|) and give closed-form separation and
//! threshold-feasibility conditions; `fit_decay` extracts the envelope rate
//! from a measured profile.

use crate::error::{Error, Result};
use crate::signal::correlation::CorrelationProfile;

/// Off-peak samples at or below this fraction of the peak are treated as
/// numerically zero by `fit_decay`: they come from exact window disjointness
/// or lattice nulls and would otherwise dominate the envelope fit with
/// log-of-epsilon artifacts.
const DECAY_ZERO_FLOOR: f64 = 1e-12;

/// Slack for the satisfied comparison in reports.
const REPORT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Minimum component separation from the cumulative profile.
    ProfileSeparation,
    /// Minimum margin between components and the parameter-domain edge,
    /// from the cumulative profile.
    ProfileEdgeMargin,
    /// Minimum component separation from the exponential decay envelope.
    DecaySeparation,
    /// Threshold large enough for pruning to be safe under the decay model.
    ThresholdFeasibility,
}

/// Inputs echoed into a report; fields that do not apply to a bound stay
/// `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundInputs {
    pub k: Option<usize>,
    pub r: Option<f64>,
    pub sigma: Option<f64>,
    pub a: Option<f64>,
    pub t: Option<f64>,
    pub c_min: Option<f64>,
    pub c_max: Option<f64>,
}

/// One evaluated condition: the required level, the observed value, and
/// whether the observed value meets the requirement (small fp slack).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub required: f64,
    pub observed: f64,
    pub satisfied: bool,
    pub inputs: BoundInputs,
}

impl BoundReport {
    pub fn check(kind: BoundKind, required: f64, observed: f64, inputs: BoundInputs) -> Self {
        Self {
            kind,
            required,
            observed,
            satisfied: observed >= required - REPORT_TOL,
            inputs,
        }
    }
}

fn validate_sigma(sigma: f64) -> Result<()> {
    // Positive infinity is allowed: it is the fully-converged limit.
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::ParameterOutOfRange {
            value: sigma,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        });
    }
    Ok(())
}

fn validate_k_r(k: usize, r: f64) -> Result<()> {
    if k < 1 {
        return Err(Error::ParameterOutOfRange {
            value: k as f64,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    if !r.is_finite() || r < 1.0 {
        return Err(Error::ParameterOutOfRange {
            value: r,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    Ok(())
}

/// Shared inner term of the profile bounds: the cumulative excess
/// (Lambda(sigma)/Lambda(0) - 1) shrunk by the denominator `den`, mapped to
/// the Lambda value 2 Lambda(0) (1 - excess/den).
fn profile_target(profile: &CorrelationProfile, sigma: f64, den: f64) -> Result<f64> {
    let l0 = profile.cumulative_at(0.0);
    if l0 <= 0.0 {
        return Err(Error::InvalidProfile(
            "cumulative profile vanishes at zero offset".into(),
        ));
    }
    let excess = profile.cumulative_at(sigma) / l0 - 1.0;
    Ok(2.0 * l0 * (1.0 - excess / den))
}

/// Minimum separation between any two components for the clustering
/// estimate to stay within `sigma` of each, evaluated on the profile:
/// 2 InvLambda(2 Lambda(0) (1 - excess / ((2K-2) r + 1))) + 2 sigma.
pub fn min_separation_from_profile(
    profile: &CorrelationProfile,
    sigma: f64,
    k: usize,
    r: f64,
) -> Result<f64> {
    validate_sigma(sigma)?;
    validate_k_r(k, r)?;
    let den = (2 * k - 2) as f64 * r + 1.0;
    let target = profile_target(profile, sigma, den)?;
    Ok(2.0 * profile.inverse_cumulative(target)? + 2.0 * sigma)
}

/// Minimum margin between every component and the parameter-domain edge,
/// evaluated on the profile: InvLambda(2 Lambda(0) (1 - excess / (2 K r))).
pub fn min_edge_margin_from_profile(
    profile: &CorrelationProfile,
    sigma: f64,
    k: usize,
    r: f64,
) -> Result<f64> {
    validate_sigma(sigma)?;
    validate_k_r(k, r)?;
    let den = 2.0 * k as f64 * r;
    let target = profile_target(profile, sigma, den)?;
    profile.inverse_cumulative(target)
}

/// Minimum separation under the exponential envelope exp(-a |offset|):
/// (1/a) ln(sqrt(8 r^2 / (t^2/(r c_min)^2 - exp(-2 a sigma))) + 1).
/// Infeasible (error) when the threshold term does not exceed the
/// exp(-2 a sigma) floor.
pub fn min_separation_from_decay(
    a: f64,
    t: f64,
    r: f64,
    c_min: f64,
    sigma: f64,
) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::ParameterOutOfRange {
            value: a,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        });
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::ParameterOutOfRange {
            value: t,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    if !c_min.is_finite() || c_min <= 0.0 {
        return Err(Error::ParameterOutOfRange {
            value: c_min,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        });
    }
    validate_k_r(1, r)?;
    validate_sigma(sigma)?;
    let scaled = t / (r * c_min);
    let floor = (-2.0 * a * sigma).exp();
    let denom = scaled * scaled - floor;
    if denom <= 0.0 {
        return Err(Error::InfeasibleBound(format!(
            "threshold term {:.6e} does not exceed the convergence floor {:.6e}",
            scaled * scaled,
            floor
        )));
    }
    Ok((8.0 * r * r / denom).sqrt().ln_1p() / a)
}

/// Whether a threshold `t` is large enough for safe pruning under the decay
/// model: t >= 2 c_max sqrt((r + r^2) / (exp(a zeta) - 1)).
pub fn threshold_feasible(a: f64, zeta: f64, r: f64, c_max: f64, t: f64) -> Result<bool> {
    Ok(t >= threshold_requirement(a, zeta, r, c_max)?)
}

/// The right-hand side of the threshold feasibility condition.
pub fn threshold_requirement(a: f64, zeta: f64, r: f64, c_max: f64) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 {
        return Err(Error::ParameterOutOfRange {
            value: a,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        });
    }
    if !zeta.is_finite() || zeta <= 0.0 {
        return Err(Error::ParameterOutOfRange {
            value: zeta,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        });
    }
    if !c_max.is_finite() || c_max <= 0.0 {
        return Err(Error::ParameterOutOfRange {
            value: c_max,
            min: f64::MIN_POSITIVE,
            max: f64::INFINITY,
        });
    }
    validate_k_r(1, r)?;
    Ok(2.0 * c_max * ((r + r * r) / (a * zeta).exp_m1()).sqrt())
}

/// Fits the decay rate of an exponential envelope to a correlation profile:
/// the smallest `a` such that exp(-a |offset|) stays at or below the
/// normalized profile at every nonzero sample, i.e. the largest ratio
/// -ln(lambda_k / lambda_0) / (k delta). Samples at or below a relative
/// floor are exact-zero artifacts and impose no constraint.
pub fn fit_decay(profile: &CorrelationProfile) -> Result<f64> {
    let peak = profile.lambda(0);
    if peak <= 0.0 {
        return Err(Error::InvalidProfile(
            "decay fit needs a nonzero correlation peak".into(),
        ));
    }
    let mut best: Option<f64> = None;
    for k in 1..profile.half_len() {
        let ratio = profile.lambda(k) / peak;
        if ratio <= DECAY_ZERO_FLOOR {
            continue;
        }
        let rate = -ratio.ln() / (k as f64 * profile.delta());
        if best.is_none_or(|b| rate > b) {
            best = Some(rate);
        }
    }
    best.ok_or_else(|| {
        Error::InvalidProfile("decay fit needs at least one nonzero off-peak sample".into())
    })
}
