use std::cmp::Ordering;
use std::fmt::{Debug, Display};

use num_complex::{Complex, Complex64};
use num_traits::{Float, FromPrimitive, ToPrimitive};

use super::{Cyclo, Mode, Scalar};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Real floating types usable as the component type of complex scalars.
pub trait Real:
    nalgebra::RealField
    + Float
    + FromPrimitive
    + ToPrimitive
    + Copy
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

fn real<F: Real>(x: f64) -> F {
    <F as FromPrimitive>::from_f64(x).expect("f64 converts to any Real")
}

impl<F: Real> Scalar for Complex<F> {
    const MODE: Mode = Mode::Float;

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(real::<F>(num as f64) / real::<F>(den as f64), real(0.0))
    }

    fn from_exact(x: &Cyclo) -> Self {
        let z = x.embed();
        Complex::new(real(z.re), real(z.im))
    }

    fn inv(&self) -> Result<Self> {
        if self.re == real(0.0) && self.im == real(0.0) {
            return Err(Error::DivisionByZero);
        }
        Ok(Complex::new(real::<F>(1.0), real(0.0)) / *self)
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            ToPrimitive::to_f64(&self.re).unwrap_or(f64::NAN),
            ToPrimitive::to_f64(&self.im).unwrap_or(f64::NAN),
        )
    }

    fn is_negligible(&self, tol: f64) -> bool {
        self.to_c64().norm() <= tol
    }

    fn imag_unit() -> Self {
        Complex::new(real(0.0), real(1.0))
    }

    fn sqrt(&self) -> Option<Self> {
        let z = self.to_c64().sqrt();
        Some(Complex::new(real(z.re), real(z.im)))
    }

    fn canonical_cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.to_c64(), other.to_c64());
        a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
    }

    fn rank(m: &Matrix<Self>) -> usize {
        linalg::float::rank(m)
    }

    fn null_space(m: &Matrix<Self>) -> Vec<Vec<Self>> {
        linalg::float::null_space(m)
    }

    fn solve(m: &Matrix<Self>, b: &[Self], tol: f64) -> Option<Vec<Self>> {
        linalg::float::solve(m, b, tol)
    }
}
