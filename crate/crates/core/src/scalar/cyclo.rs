//! Exact elements of cyclotomic fields ℚ(ζ_L).
//!
//! An element is stored as a rational coefficient vector in the power basis
//! `1, ζ, …, ζ^(φ(L)-1)`, always reduced modulo the cyclotomic polynomial
//! Φ_L. Orders congruent to 2 mod 4 are folded onto L/2 (the fields
//! coincide), so two operands always meet in ℚ(ζ_lcm).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU32, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::poly::{self, cyclotomic, euler_phi, lcm_u32, reduce_monic};
use crate::error::{Error, Result};

pub const DEFAULT_ORDER_CAP: u32 = 360;

static ORDER_CAP: AtomicU32 = AtomicU32::new(DEFAULT_ORDER_CAP);

pub fn order_cap() -> u32 {
    ORDER_CAP.load(AtomicOrdering::Relaxed)
}

/// Changes the process-wide cap on cyclotomic orders.
pub fn set_order_cap(cap: u32) {
    ORDER_CAP.store(cap.max(1), AtomicOrdering::Relaxed);
}

fn canonical_order(order: u32) -> u32 {
    if order % 4 == 2 {
        order / 2
    } else {
        order
    }
}

fn check_order(order: u64) -> Result<u32> {
    let cap = order_cap();
    if order > cap as u64 {
        return Err(Error::OrderOverflow { order, cap });
    }
    Ok(order as u32)
}

#[derive(Clone)]
pub struct Cyclo {
    order: u32,
    coeffs: Vec<BigRational>,
}

impl Cyclo {
    pub fn from_rational(q: BigRational) -> Self {
        Cyclo {
            order: 1,
            coeffs: vec![q],
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    /// Builds an element of ℚ(ζ_order) from arbitrary-length coefficients,
    /// reducing modulo Φ_order.
    pub fn from_coeffs(order: u32, coeffs: Vec<BigRational>) -> Result<Self> {
        if order == 0 {
            return Err(Error::MalformedScalar("order must be positive".into()));
        }
        check_order(order as u64)?;
        let raw = Cyclo {
            order,
            coeffs: reduce_monic(coeffs, &cyclotomic(order)),
        };
        Ok(raw.canonicalized())
    }

    /// ζ_order^k.
    pub fn root_of_unity(order: u32, k: i64) -> Result<Self> {
        if order == 0 {
            return Err(Error::MalformedScalar("order must be positive".into()));
        }
        let k = k.rem_euclid(order as i64) as u32;
        let g = poly::gcd_u32(k, order);
        let (mut order, mut k) = (order / g, k / g);
        let mut negate = false;
        if order % 4 == 2 {
            // ζ_{2m} = -ζ_m^{(m+1)/2} for odd m.
            let m = order / 2;
            negate = k % 2 == 1;
            k = ((k as u64 * (m as u64).div_ceil(2)) % m as u64) as u32;
            order = m;
        }
        check_order(order as u64)?;
        let mut coeffs = vec![BigRational::zero(); k as usize + 1];
        coeffs[k as usize] = if negate {
            -BigRational::one()
        } else {
            BigRational::one()
        };
        Ok(Cyclo {
            order,
            coeffs: reduce_monic(coeffs, &cyclotomic(order)),
        })
    }

    pub fn zeta(order: u32) -> Result<Self> {
        Self::root_of_unity(order, 1)
    }

    /// The imaginary unit ζ₄.
    pub fn i() -> Self {
        Self::root_of_unity(4, 1).expect("order 4 is below any cap")
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(Zero::is_zero)
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    fn canonicalized(self) -> Self {
        let order = canonical_order(self.order);
        if order == self.order {
            return self;
        }
        // Rewrite ζ_{2m}^j = (-1)^j ζ_m^{j(m+1)/2} and reduce in ℚ(ζ_m).
        let m = order as usize;
        let mut coeffs = vec![BigRational::zero(); m];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let e = (j * m.div_ceil(2)) % m;
            if j % 2 == 1 {
                coeffs[e] -= c;
            } else {
                coeffs[e] += c;
            }
        }
        Cyclo {
            order,
            coeffs: reduce_monic(coeffs, &cyclotomic(order)),
        }
    }

    /// Re-expresses `self` in ℚ(ζ_target); `self.order` must divide `target`.
    pub fn lift(&self, target: u32) -> Self {
        debug_assert_eq!(target % self.order, 0);
        if target == self.order {
            return self.clone();
        }
        let step = (target / self.order) as usize;
        let mut coeffs = vec![BigRational::zero(); (self.coeffs.len() - 1) * step + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[j * step] = c.clone();
        }
        Cyclo {
            order: target,
            coeffs: reduce_monic(coeffs, &cyclotomic(target)),
        }
    }

    fn common_order(&self, other: &Self) -> Result<u32> {
        check_order(lcm_u32(self.order, other.order))
    }

    fn aligned(&self, other: &Self) -> Result<(Self, Self)> {
        let l = self.common_order(other)?;
        Ok((self.lift(l), other.lift(l)))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        Ok(Cyclo {
            order: a.order,
            coeffs,
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        Ok(Cyclo {
            order: a.order,
            coeffs,
        })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.order == 1 || other.order == 1 {
            let (s, v) = if self.order == 1 {
                (&self.coeffs[0], other)
            } else {
                (&other.coeffs[0], self)
            };
            return Ok(Cyclo {
                order: v.order,
                coeffs: v.coeffs.iter().map(|c| c * s).collect(),
            });
        }
        let (a, b) = self.aligned(other)?;
        let prod = poly::mul(&a.coeffs, &b.coeffs);
        Ok(Cyclo {
            order: a.order,
            coeffs: reduce_monic(prod, &cyclotomic(a.order)),
        })
    }

    pub fn checked_inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.order == 1 {
            return Ok(Cyclo {
                order: 1,
                coeffs: vec![self.coeffs[0].recip()],
            });
        }
        let inv = poly::inverse_mod(&self.coeffs, &cyclotomic(self.order))
            .ok_or(Error::DivisionByZero)?;
        Ok(Cyclo {
            order: self.order,
            coeffs: inv,
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.checked_inv()?)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Cyclo::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Complex embedding sending ζ_L to e^{2πi/L}.
    pub fn embed(&self) -> Complex64 {
        let l = self.order as f64;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / l;
                Complex64::from_polar(rational_to_f64(c), theta)
            })
            .sum()
    }

    /// If `self = r·ζ_L^k` with `r` rational, returns `(r, k)`.
    fn rational_times_root(&self) -> Option<(BigRational, u32)> {
        if self.is_rational() {
            return Some((self.coeffs[0].clone(), 0));
        }
        let l = self.order;
        (1..l).find_map(|k| {
            let twist = Cyclo::root_of_unity(l, -(k as i64)).ok()?;
            (self * &twist).as_rational().map(|r| (r, k))
        })
    }

    /// An exact square root, when one is reachable inside the order cap.
    ///
    /// Handles elements of the form `r·ζ^k` with `r` rational, using Gauss
    /// sums for square roots of primes. Returns the root whose embedding has
    /// positive real part (or zero real part and positive imaginary part).
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Cyclo::zero());
        }
        let (r, k) = self.rational_times_root()?;
        let mut root = sqrt_rational(&r)?;
        if k != 0 {
            let half = Cyclo::root_of_unity(2 * self.order, k as i64).ok()?;
            root = root.checked_mul(&half).ok()?;
        }
        debug_assert!(root.checked_mul(&root).ok()? == *self);
        Some(principal_sign(root))
    }
}

fn principal_sign(x: Cyclo) -> Cyclo {
    let z = x.embed();
    let scale = z.norm().max(1.0);
    if z.re < -1e-12 * scale || (z.re.abs() <= 1e-12 * scale && z.im < 0.0) {
        -x
    } else {
        x
    }
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Shift both parts down to a representable range.
            let bits = q.numer().bits().max(q.denom().bits()) as i64;
            let shift = (bits - 1000).max(0) as u64;
            let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift).to_f64().unwrap_or(1.0);
            n / d
        }
    }
}

fn sqrt_prime(p: u64) -> Option<Cyclo> {
    match p {
        2 => {
            let z = Cyclo::zeta(8).ok()?;
            Some(&z + &z.pow(7))
        }
        _ => {
            let p32 = u32::try_from(p).ok()?;
            // Quadratic Gauss sum g with g² = (-1)^((p-1)/2) p.
            let mut g = Cyclo::zero();
            for a in 1..p {
                let legendre = mod_pow(a, (p - 1) / 2, p);
                let term = Cyclo::root_of_unity(p32, a as i64).ok()?;
                g = if legendre == 1 {
                    &g + &term
                } else {
                    &g - &term
                };
            }
            if p % 4 == 1 {
                Some(g)
            } else {
                g.checked_mul(&-Cyclo::i()).ok()
            }
        }
    }
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn sqrt_rational(r: &BigRational) -> Option<Cyclo> {
    if r.is_zero() {
        return Some(Cyclo::zero());
    }
    // sqrt(n/d) = sqrt(n d) / d
    let nd = r.numer() * r.denom();
    let (s, m) = poly::square_part(&nd);
    let mut root = Cyclo::from_rational(BigRational::new(s, r.denom().clone()));
    let mut m = m.to_u64()?;
    let mut p = 2;
    while m > 1 {
        if m % p == 0 {
            root = root.checked_mul(&sqrt_prime(p)?).ok()?;
            m /= p;
        } else {
            p += 1;
        }
    }
    if r.is_negative() {
        root = root.checked_mul(&Cyclo::i()).ok()?;
    }
    Some(root)
}

impl Zero for Cyclo {
    fn zero() -> Self {
        Cyclo::from_int(0)
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl One for Cyclo {
    fn one() -> Self {
        Cyclo::from_int(1)
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        if self.order == other.order {
            return self.coeffs == other.coeffs;
        }
        let (a, b) = self.compared(other);
        a.coeffs == b.coeffs
    }
}

impl Eq for Cyclo {}

impl Cyclo {
    /// Total order used for canonical sorting: compares coefficient vectors
    /// in the common field.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        let (a, b) = self.compared(other);
        a.coeffs.cmp(&b.coeffs)
    }

    /// Both sides in their common field. Unlike arithmetic this ignores the
    /// order cap: equal elements of two fields whose compositum is over the
    /// cap must still compare equal.
    fn compared(&self, other: &Self) -> (Self, Self) {
        let l = u32::try_from(lcm_u32(self.order, other.order)).expect("orders are capped");
        (self.lift(l), other.lift(l))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl<'a> $trait<&'a Cyclo> for &'a Cyclo {
            type Output = Cyclo;
            fn $method(self, rhs: &'a Cyclo) -> Cyclo {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $trait for Cyclo {
            type Output = Cyclo;
            fn $method(self, rhs: Cyclo) -> Cyclo {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo {
            order: self.order,
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        -self.clone()
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclo({self})")
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (j, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "ζ{}^{}", self.order, j)?,
                (_, false) => write!(f, "{mag}·ζ{}^{}", self.order, j)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Degree of ℚ(ζ_order).
pub fn field_degree(order: u32) -> u32 {
    euler_phi(canonical_order(order))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(l: u32, k: i64) -> Cyclo {
        Cyclo::root_of_unity(l, k).unwrap()
    }

    #[test]
    fn vanishing_sum_of_cube_roots() {
        let s = &(&Cyclo::one() + &z(3, 1)) + &z(3, 2);
        assert!(s.is_zero());
    }

    #[test]
    fn gaussian_norm() {
        let i = z(4, 1);
        let p = &(&Cyclo::one() + &i) * &(&Cyclo::one() - &i);
        assert_eq!(p, Cyclo::from_int(2));
    }

    #[test]
    fn equality_across_fields_past_the_cap() {
        // lcm(12, 260) = 780 is over the cap
        let r = Cyclo::from_ratio(-13, 5).sqrt().unwrap();
        assert_eq!(r.order(), 260);
        let sq = &r * &r;
        let lifted = Cyclo::from_ratio(-13, 5).lift(12);
        assert_eq!(sq, lifted);
        assert_eq!(lifted.canonical_cmp(&sq), Ordering::Equal);
    }

    #[test]
    fn inverse_of_fifth_root() {
        assert_eq!(z(5, 1).checked_inv().unwrap(), z(5, 4));
    }

    #[test]
    fn zeta_to_the_order_is_one() {
        for l in [1u32, 2, 3, 4, 5, 6, 8, 9, 12, 15, 24, 30, 36, 60] {
            assert_eq!(z(l, 1).pow(l), Cyclo::one(), "L = {l}");
            if l > 1 {
                assert_ne!(z(l, 1).pow(l - 1), Cyclo::one(), "L = {l}");
            }
        }
    }

    #[test]
    fn orders_two_mod_four_fold() {
        assert_eq!(z(2, 1), Cyclo::from_int(-1));
        assert_eq!(z(6, 1).order(), 3);
        let e = z(6, 1).embed();
        assert!((e.re - 0.5).abs() < 1e-12 && (e.im - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert_eq!(z(6, 1).pow(3), Cyclo::from_int(-1));
        assert_eq!(z(10, 3).pow(5), Cyclo::from_int(-1));
    }

    #[test]
    fn embeddings() {
        let e = z(4, 1).embed();
        assert!(e.re.abs() < 1e-15 && (e.im - 1.0).abs() < 1e-15);
        let e = z(3, 1).embed();
        assert!((e.re + 0.5).abs() < 1e-15 && (e.im - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let two = Cyclo::from_coeffs(3, vec![BigRational::from_integer(2.into())]).unwrap();
        assert_eq!(two.embed(), Complex64::new(2.0, 0.0));
    }

    #[test]
    fn mixed_orders_meet_in_lcm() {
        let s = &z(3, 1) + &z(4, 1);
        assert_eq!(s.order(), 12);
        assert!((s.embed() - (z(3, 1).embed() + z(4, 1).embed())).norm() < 1e-14);
    }

    #[test]
    fn order_cap_is_enforced() {
        assert_eq!(z(9, 1).checked_mul(&z(40, 1)).unwrap().order(), 360);
        assert_eq!(z(7, 1).checked_add(&z(11, 1)).unwrap().order(), 77);
        assert_eq!(
            z(77, 1).checked_mul(&z(8, 1)),
            Err(Error::OrderOverflow {
                order: 616,
                cap: DEFAULT_ORDER_CAP
            })
        );
        assert!(Cyclo::root_of_unity(361, 1).is_err());
    }

    #[test]
    fn square_roots() {
        for (num, den) in [(4, 9), (2, 1), (-1, 1), (-3, 4), (5, 1), (7, 2), (12, 1)] {
            let q = Cyclo::from_ratio(num, den);
            let r = q.sqrt().expect("rational roots are cyclotomic");
            assert_eq!(&r * &r, q, "sqrt({num}/{den})");
            let e = r.embed();
            assert!(e.re > 1e-12 || (e.re.abs() <= 1e-12 && e.im > 0.0));
        }
        let w = z(3, 1);
        let r = w.sqrt().unwrap();
        assert_eq!(&r * &r, w);
    }
}
