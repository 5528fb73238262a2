//! Scalar fields for function values.
//!
//! Every algorithm in the crate is generic over [`Scalar`]. Two families of
//! implementations exist: [`Cyclo`], exact elements of cyclotomic fields, and
//! `Complex<F>` for any floating type `F` (`f32`, `f64`). Exact scalars decide
//! zero-ness exactly and ignore tolerances; float scalars compare against the
//! tolerance they are handed.

mod complex;
mod cyclo;
pub mod json;
pub mod poly;

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use complex::Real;
pub use cyclo::{field_degree, order_cap, set_order_cap, Cyclo, DEFAULT_ORDER_CAP};

use crate::error::Result;
use crate::linalg::{self, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

pub trait Scalar:
    json::ScalarJson
    + Clone
    + Debug
    + Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const MODE: Mode;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Image of an exact cyclotomic element (identity for exact scalars,
    /// the standard complex embedding otherwise).
    fn from_exact(x: &Cyclo) -> Self;

    fn inv(&self) -> Result<Self>;

    fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self.clone() * rhs.inv()?)
    }

    fn to_c64(&self) -> Complex64;

    fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Exact scalars: `self == 0`. Float scalars: `|self| <= tol`.
    fn is_negligible(&self, tol: f64) -> bool;

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.clone() - other.clone()).is_negligible(tol)
    }

    fn imag_unit() -> Self;

    /// A square root with non-negative real part, if representable.
    fn sqrt(&self) -> Option<Self>;

    fn canonical_cmp(&self, other: &Self) -> Ordering;

    fn is_exact() -> bool {
        Self::MODE == Mode::Exact
    }

    fn rank(m: &Matrix<Self>) -> usize;

    fn null_space(m: &Matrix<Self>) -> Vec<Vec<Self>>;

    /// A solution of `m x = b`: exact scalars return the particular solution
    /// with free variables set to zero, float scalars the minimum-norm least
    /// squares solution. `None` when the system is inconsistent (beyond `tol`).
    fn solve(m: &Matrix<Self>, b: &[Self], tol: f64) -> Option<Vec<Self>>;
}

impl Scalar for Cyclo {
    const MODE: Mode = Mode::Exact;

    fn from_ratio(num: i64, den: i64) -> Self {
        Cyclo::from_ratio(num, den)
    }

    fn from_exact(x: &Cyclo) -> Self {
        x.clone()
    }

    fn inv(&self) -> Result<Self> {
        self.checked_inv()
    }

    fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Cyclo::checked_div(self, rhs)
    }

    fn to_c64(&self) -> Complex64 {
        self.embed()
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn approx_eq(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    fn imag_unit() -> Self {
        Cyclo::i()
    }

    fn sqrt(&self) -> Option<Self> {
        Cyclo::sqrt(self)
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        Cyclo::canonical_cmp(self, other)
    }

    fn rank(m: &Matrix<Self>) -> usize {
        linalg::exact::rank(m)
    }

    fn null_space(m: &Matrix<Self>) -> Vec<Vec<Self>> {
        linalg::exact::null_space(m)
    }

    fn solve(m: &Matrix<Self>, b: &[Self], _tol: f64) -> Option<Vec<Self>> {
        linalg::exact::solve(m, b)
    }
}

/// Zero-ness test scaled by the magnitude of the surrounding data.
pub fn negligible<T: Scalar>(x: &T, tol: f64, scale: f64) -> bool {
    x.is_negligible(tol * scale.max(1.0))
}

/// `x` or `-x`, whichever has positive real part (or zero real part and
/// non-negative imaginary part). Fixes the sign of square roots.
pub fn principal<T: Scalar>(x: T) -> T {
    let z = x.to_c64();
    let scale = z.norm().max(1.0);
    if z.re < -1e-12 * scale || (z.re.abs() <= 1e-12 * scale && z.im < 0.0) {
        -x
    } else {
        x
    }
}

/// Largest modulus of the entries, 0 for an empty slice.
pub fn max_abs<T: Scalar>(v: &[T]) -> f64 {
    v.iter().map(Scalar::abs).fold(0.0, f64::max)
}
