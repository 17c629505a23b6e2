//! Subset random sampling and reconstruction of finite time-vertex graph
//! signals.
//!
//! A time-vertex signal is an `N x T` matrix carrying one time series per
//! graph vertex. This crate implements:
//!
//! * the signal model: incidence matrix, Laplacian, temporal difference
//!   operators, smoothness diagnostics ([`signal`]),
//! * graph Fourier and harmonic bases with the joint spectrum ([`spectral`]),
//! * thin SVD with incoherence and condition-number summaries ([`analysis`]),
//! * subset random sampling, where observations are confined to a random
//!   row/column submatrix ([`sampling`]),
//! * closed-form sufficient-condition evaluators with Monte-Carlo
//!   verification ([`bounds`]),
//! * reconstruction with low-rank, sparse, and smooth priors plus an SVT
//!   baseline ([`lssp`]),
//! * synthetic data generation, NRMSE, and ratio sweeps ([`synth`]),
//! * CSV/JSON interchange ([`io`]).
//!
//! Monte-Carlo trials and sweep cells run data-parallel under the `parallel`
//! feature (enabled by default); disabling it yields a dependency-light
//! sequential build with identical results.

pub mod analysis;
pub mod bounds;
pub mod error;
pub mod io;
pub mod lssp;
mod par;
pub mod sampling;
pub mod signal;
pub mod spectral;
pub mod synth;

pub use error::{Error, Result};
pub use signal::{GraphTopology, TemporalOperators, TimeVertexSignal};
