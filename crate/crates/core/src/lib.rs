//! Exact evolution of the success probability of coined quantum-walk search
//! on the n-dimensional hypercube.
//!
//! The state space has dimension `n 2^n`, but the search dynamics act inside
//! an effective subspace whose dimension grows only linearly with `n`. This
//! crate locates the walk eigenphases inside that subspace by scanning a
//! singular-value criterion on small `M x M` matrices built from exact
//! integer combinatorics, then reconstructs the success curve `p_t` for any
//! number of iterations — in time polynomial in `n` and the number of
//! solutions `M`.
//!
//! Modules:
//! - [`combinatorics`]: exact integer tables and the `Xi_w` Gram matrices.
//! - [`spectral`]: eigenphase search and component extraction (the production
//!   path).
//! - [`curve`]: success curves, the analytic upper bound, optimal measurement
//!   time.
//! - [`simulator`]: matrix-free direct simulation, the brute-force reference.
//! - [`operators`]: dense operator constructions for small `n`, used by the
//!   test suite to validate eigenstructure claims.

pub mod combinatorics;
pub mod curve;
pub mod error;
pub mod operators;
pub mod problem;
pub mod simulator;
pub mod spectral;

pub use combinatorics::{effective_dim, hamming_weight, XiStack};
pub use curve::{optimal_iteration, probability_curve, upper_bound, CurveSource, SuccessCurve};
pub use error::{Error, Result};
pub use problem::ProblemSpec;
pub use simulator::{simulate_curve, simulate_curve_capped, WalkState};
pub use spectral::{decompose, ComponentKind, PhaseComponent, ScanOptions, SpectralDecomposition};
