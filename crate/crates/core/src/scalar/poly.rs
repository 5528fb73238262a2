//! Dense polynomials over the rationals and the cyclotomic polynomials
//! that define the exact scalar fields.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coefficients from the constant term upward.
pub type QPoly = Vec<BigRational>;

pub fn euler_phi(mut n: u32) -> u32 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Exact division of integer polynomials where the divisor is monic.
fn div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        quot[i - dd] = c;
        for (j, d) in den.iter().enumerate() {
            rem[i - dd + j] -= c * d;
        }
    }
    debug_assert!(rem.iter().all(|c| *c == 0));
    quot
}

fn compute_cyclotomic(n: u32) -> Vec<i64> {
    if n == 1 {
        return vec![-1, 1];
    }
    let mut poly = vec![0i64; n as usize + 1];
    poly[0] = -1;
    poly[n as usize] = 1;
    for d in divisors(n) {
        if d < n {
            poly = div_monic(&poly, &cyclotomic(d));
        }
    }
    poly
}

/// The n-th cyclotomic polynomial, memoized.
pub fn cyclotomic(n: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let p = Arc::new(compute_cyclotomic(n));
    cache.lock().unwrap().insert(n, p.clone());
    p
}

pub fn trim(p: &mut QPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

/// Reduce `p` modulo the monic integer polynomial `m`, leaving exactly
/// `deg m` coefficients.
pub fn reduce_monic(mut p: QPoly, m: &[i64]) -> QPoly {
    let deg = m.len() - 1;
    if p.len() > deg {
        for i in (deg..p.len()).rev() {
            if p[i].is_zero() {
                continue;
            }
            let c = p[i].clone();
            for (j, mj) in m.iter().enumerate() {
                if *mj != 0 {
                    p[i - deg + j] -= &c * BigRational::from_integer(BigInt::from(*mj));
                }
            }
        }
    }
    p.resize(deg, BigRational::zero());
    p
}

pub fn mul(a: &[BigRational], b: &[BigRational]) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn sub(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let n = a.len().max(b.len());
    let mut out: QPoly = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
            let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
            x - y
        })
        .collect();
    trim(&mut out);
    out
}

/// Euclidean division; `b` must be nonzero after trimming.
fn divrem(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
    let mut r: QPoly = a.to_vec();
    trim(&mut r);
    let mut b = b.to_vec();
    trim(&mut b);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &c * bj;
        }
        q[shift] = c;
        r.pop();
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

/// Inverse of `a` modulo the irreducible monic `m`, or `None` when `a ≡ 0`.
pub fn inverse_mod(a: &[BigRational], m: &[i64]) -> Option<QPoly> {
    let modulus: QPoly = m
        .iter()
        .map(|c| BigRational::from_integer(BigInt::from(*c)))
        .collect();
    let mut r0 = modulus.clone();
    let mut r1 = a.to_vec();
    trim(&mut r1);
    if r1.is_empty() {
        return None;
    }
    let mut s0: QPoly = Vec::new();
    let mut s1: QPoly = vec![BigRational::one()];
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1);
        let s = sub(&s0, &mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    // r0 is the gcd, a nonzero constant for irreducible moduli.
    if r0.len() != 1 {
        return None;
    }
    let c = r0[0].clone();
    let inv: QPoly = s0.into_iter().map(|x| x / &c).collect();
    Some(reduce_monic(inv, m))
}

/// Factor out the largest square: returns `(s, m)` with `n = s² m`, `m` squarefree.
pub fn square_part(n: &BigInt) -> (BigInt, BigInt) {
    let mut rest = n.abs();
    let mut s = BigInt::one();
    let mut m = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let mut e = 0u32;
        while rest.is_multiple_of(&p) {
            rest /= &p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            m *= &p;
        }
        p += 1;
    }
    m *= rest;
    (s, m)
}

pub fn gcd_u32(a: u32, b: u32) -> u32 {
    a.gcd(&b)
}

pub fn lcm_u32(a: u32, b: u32) -> u64 {
    (a as u64 / a.gcd(&b) as u64) * b as u64
}
