//! Dense Krylov solvers and eigenvalue-based residual bounds.
//!
//! The crate provides GMRES, BA-GMRES with NR-SOR inner-iteration
//! preconditioning, and computable upper bounds on the GMRES residual built
//! from the eigendecomposition of the initial residual and a Vandermonde
//! least-squares problem. Everything runs in binary64 or in double-double
//! precision.

pub mod bounds;
pub mod error;
pub mod generators;
pub mod gmres;
pub mod linalg;
pub mod nrsor;
pub mod precision;

pub use error::{Error, Result};
pub use precision::{Complex, DoubleDouble, ExtendedComplex, ExtendedScalar, Real, Scalar};
