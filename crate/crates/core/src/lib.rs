//! Sparse parameter estimation over parametric dictionaries.
//!
//! The crate covers the full pipeline: synthesizing dictionaries of
//! parameterized atoms and their correlation profiles (`signal`), compressing
//! and denoising measurements (`measurement`), recovering supports with
//! clustering-based and band-exclusion subspace pursuit (`recovery`,
//! `clustering`), scoring estimates with transport-based metrics
//! (`transport`), evaluating analytic resolution bounds (`theory`), and
//! running reproducible experiment sweeps (`harness`).

pub mod clustering;
pub mod error;
pub mod harness;
pub mod measurement;
pub mod recovery;
pub mod seeds;
pub mod signal;
pub mod theory;
pub mod transport;

pub use error::{Error, Result};
