//! Working precisions: binary64 and double-double, real and complex.
//!
//! Every numerical kernel in the crate is generic over [`Real`], so each
//! experiment can run in either precision.

mod complex;
mod decimal;
mod double_double;
mod scalar;

pub use complex::{Complex, Complex64, ExtendedComplex};
pub use decimal::format_scientific;
pub use double_double::{DoubleDouble, ExtendedScalar};
pub use scalar::{Real, Scalar};
