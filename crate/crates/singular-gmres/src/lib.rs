//! Dense GMRES-type solvers for square singular and inconsistent linear
//! systems.
// Index loops in the dense kernels intentionally mirror the subscripted
// formulas they implement.
#![allow(clippy::needless_range_loop)]
//!
//! The crate is organised around five modules:
//!
//! * [`densela`] — column-major dense matrices/vectors, SVD, truncated
//!   pseudoinverse, numerical rank, float spacing.
//! * [`krylov`] — the Arnoldi process (with optional reorthogonalization),
//!   the GMRES driver, and the two Hessenberg least-squares back ends
//!   (incremental Givens QR and truncated-pseudoinverse solve).
//! * [`precond`] — AB-GMRES (right preconditioning with `B = Aᵀ` or
//!   `B = CAᵀ`) and BA-GMRES (left preconditioning), plus the diagonal SPD
//!   preconditioner `C = {diag(AᵀA)}⁻¹`.
//! * [`problems`] — deterministic generators for the GP and index-2 test
//!   families and their right-hand sides.
//! * [`analysis`] — SVD-based oracles: minimum-norm least-squares solve,
//!   matrix index, range-symmetry (EP) test, residual metrics, and the
//!   convergence-bound evaluator.
//!
//! The crate is `no_std` + `alloc`; all numerics are `f64`.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod densela;
pub mod krylov;
pub mod precond;
pub mod problems;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
