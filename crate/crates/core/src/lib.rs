//! Construction and verification toolkit for sign-changing bubble-tower
//! solutions of the asymmetric sinh-Poisson problem
//! `-Δu = ρ(e^u − τ e^{−γu})` on the unit disk with zero boundary data.
//!
//! The crate computes the explicit parameter families of the tower in exact
//! rational arithmetic, assembles the tower ansatz from projected singular
//! Liouville bubbles, measures every residual and decay rate the construction
//! predicts, inverts the linearized operator on the symmetric class, and
//! refines the ansatz to a numerical solution by a contraction mapping.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod linear;
pub mod params;
pub mod quad;
pub mod refine;
pub mod report;
pub mod residual;

pub use error::{Error, Result};

/// CLI entry point; returns the process exit status.
pub fn run_cli() -> i32 {
    cli::run()
}
