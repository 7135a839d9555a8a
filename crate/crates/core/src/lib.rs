//! Geometric multigrid built around the kappa-cycle, a recursion family
//! with one call that keeps the cycle counter and a second call, made
//! only while the counter stays positive, that decrements it. Counter 1
//! is the V-cycle, 2 the F-cycle and anything at least the level count
//! the W-cycle.
//!
//! The crate covers the rotated anisotropic diffusion model problem with
//! damped Jacobi and zebra line smoothers, full and semi-coarsening,
//! Galerkin coarse operators, conjugate gradients preconditioned by one
//! cycle, exact call and operation counts, and a two-parameter run-time
//! model (launch overhead plus per-operation cost).

pub mod bench;
mod clock;
pub mod costmodel;
pub mod cycle;
pub mod error;
pub mod krylov;
pub mod mesh;
pub mod operator;
pub mod smoother;
pub mod transfer;

pub use costmodel::Kappa;
pub use cycle::{CycleConfig, CycleShape, CycleStats, Multigrid, SolveOutcome, SolveReport};
pub use error::{MgError, Result};
pub use mesh::{Coarsening, GridFunction};
pub use operator::{ProblemSpec, Stencil9};
pub use smoother::{SmootherKind, SmootherSpec};

/// Crate version, echoed into run records.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
