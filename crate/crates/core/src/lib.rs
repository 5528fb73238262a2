//! Solutions of the cosine-sine functional equation
//! `f(xy) = f(x)g(y) + g(x)f(y) + h(x)h(y)` on finite semigroups.
//!
//! Everything is generic over [`Scalar`]: [`Cyclo`] gives exact arithmetic in
//! cyclotomic fields, `Complex<f64>` (and `Complex<f32>`) floating point.

pub mod corollary;
pub mod error;
pub mod families;
pub mod func;
pub mod homomorphisms;
pub mod linalg;
pub mod oracle;
pub mod scalar;
pub mod semigroup;

pub use error::{Error, Result};
pub use scalar::{Cyclo, Mode, Real, Scalar};
pub use semigroup::Semigroup;

/// Double precision complex scalar.
pub type C64 = num_complex::Complex64;
/// Single precision complex scalar.
pub type C32 = num_complex::Complex32;
