//! Numerical core for the parabolic-elliptic chemotaxis system
//!
//! ```text
//! u_t = Δu − χ∇·(u v^{−λ} ∇v) + r u − μ u²,    0 = Δv − α v + β u,
//! ```
//!
//! posed on a rectangle with homogeneous Neumann data. The crate is
//! `no_std` (it needs `alloc`) and carries no IO: file formats, the CLI and
//! parameter sweeps live in the `chemolab` companion crate.
//!
//! Module map:
//!
//! - [`grid`]: cell-centered grid, scalar fields, quadrature and Neumann
//!   difference operators.
//! - [`elliptic`]: the signal solve `(αI − Δ)v = βu`.
//! - [`stepper`]: positivity-preserving IMEX step, adaptive time loop and
//!   the blow-up sentinels.
//! - [`constants`]: the explicit parameter thresholds and the heat-kernel
//!   constant δ₀.
//! - [`diagnostics`]: norms, the logarithmic energy, the inequality ledger
//!   and decay-rate fitting.
//! - [`oracles`]: closed-form references that share no code path with the
//!   solvers they check.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod constants;
pub mod diagnostics;
pub mod elliptic;
mod error;
pub mod grid;
mod linsolve;
pub mod oracles;
mod quadrature;
pub mod stepper;

pub use error::{Error, Result};
pub use grid::{Grid, ScalarField};
