//! Discrete mass-transport metrics on the parameter line: exact earth
//! mover's distance with optimal plans, a brute-force linear-programming
//! oracle, the assignment-based parameter error, and mass aggregation onto a
//! fixed support.

mod emd;
mod lp;
mod pee;
mod sparse;

pub use emd::{emd, EmdOutcome};
pub use lp::{emd_lp_oracle, ORACLE_SUPPORT_CAP};
pub use pee::{pee, pee_bound_check, PeeBoundCheck};
pub use sparse::{emd_sparse_approx, FlowPlan, SparseCoefVector};
