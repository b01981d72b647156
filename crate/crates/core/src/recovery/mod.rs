//! Sparse recovery over parametric dictionaries.
//!
//! The estimators share three building blocks: a correlation proxy computed
//! through the measurement operator's adjoint, hard thresholding, and a
//! candidate-selection step that is either k-median clustering or greedy
//! peak picking under a coherence band. The iterative algorithms alternate
//! candidate expansion, least-squares refitting, and pruning, keeping the
//! minimum-residual iterate.

mod lstsq;
mod primitives;
mod pursuit;

pub use lstsq::ridge_least_squares;
pub use primitives::{band_excluded_select, hard_threshold, proxy, top_k_magnitudes};
pub use pursuit::{bsp, csp, estimate, Algorithm, EstimationResult, RecoveryConfig};
