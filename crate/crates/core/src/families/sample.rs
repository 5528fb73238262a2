//! Random members of each family, built from the exact characters and sine
//! solutions of a semigroup.

use num_traits::Zero;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use super::{Family, FamilyDescriptor, Variant};
use crate::func;
use crate::homomorphisms::{solve_cosine_sine_psi, Context};
use crate::scalar::{Cyclo, Scalar};

/// Random `p/q`, sometimes plus a Gaussian-integer imaginary part.
pub fn scalar<R: Rng + ?Sized>(rng: &mut R) -> Cyclo {
    let re = Cyclo::from_ratio(rng.random_range(-9..=9), rng.random_range(1..=5));
    if rng.random_bool(0.5) {
        re + Cyclo::from_int(rng.random_range(-3..=3)) * Cyclo::i()
    } else {
        re
    }
}

pub fn nonzero_scalar<R: Rng + ?Sized>(rng: &mut R) -> Cyclo {
    loop {
        let x = scalar(rng);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Conjugation constant, zero a quarter of the time.
pub fn delta<R: Rng + ?Sized>(rng: &mut R) -> Cyclo {
    if rng.random_bool(0.25) {
        Cyclo::from_int(0)
    } else {
        nonzero_scalar(rng)
    }
}

/// A nonzero random combination of `basis`.
fn combination<R: Rng + ?Sized>(n: usize, basis: &[Vec<Cyclo>], rng: &mut R) -> Option<Vec<Cyclo>> {
    if basis.is_empty() {
        return None;
    }
    loop {
        let coeffs: Vec<Cyclo> = basis.iter().map(|_| scalar(rng)).collect();
        let terms: Vec<(Cyclo, &[Cyclo])> = coeffs
            .into_iter()
            .zip(basis.iter().map(Vec::as_slice))
            .collect();
        let v = func::lincomb(n, &terms);
        if !func::is_zero(&v, 0.0) {
            return Some(v);
        }
    }
}

/// Indices of characters with a nonzero sine solution.
fn with_sine<T>(ctx: &Context<T>) -> Vec<usize> {
    (0..ctx.exact_chars.len())
        .filter(|&i| !ctx.exact_sine_bases[i].is_empty())
        .collect()
}

fn distinct_chars<T, R: Rng + ?Sized>(
    ctx: &Context<T>,
    k: usize,
    rng: &mut R,
) -> Option<Vec<Vec<Cyclo>>> {
    if ctx.exact_chars.len() < k {
        return None;
    }
    let mut idx: Vec<usize> = (0..ctx.exact_chars.len()).collect();
    idx.shuffle(rng);
    Some(
        idx[..k]
            .iter()
            .map(|&i| ctx.exact_chars[i].clone())
            .collect(),
    )
}

/// `(χ, μ, φ)` with `φ` a nonzero χ-sine solution and `μ ≠ χ`.
fn sine_data<T, R: Rng + ?Sized>(
    ctx: &Context<T>,
    rng: &mut R,
) -> Option<(Vec<Cyclo>, Vec<Cyclo>, Vec<Cyclo>)> {
    let n = ctx.semigroup.order();
    let i = *with_sine(ctx).choose(rng)?;
    let others: Vec<usize> = (0..ctx.exact_chars.len()).filter(|&j| j != i).collect();
    let j = *others.choose(rng)?;
    let phi = combination(n, &ctx.exact_sine_bases[i], rng)?;
    Some((ctx.exact_chars[i].clone(), ctx.exact_chars[j].clone(), phi))
}

/// A random descriptor of `variant`, or `None` when the semigroup has no
/// member of that family.
pub fn descriptor<T, R: Rng + ?Sized>(
    ctx: &Context<T>,
    variant: Variant,
    rng: &mut R,
) -> Option<FamilyDescriptor<Cyclo>> {
    let s = &ctx.semigroup;
    let n = s.order();
    let family = match variant {
        Variant::T11 => Family::T11 {
            g: (0..n).map(|_| scalar(rng)).collect(),
        },
        Variant::T12 => {
            let chis = distinct_chars(ctx, 2, rng)?;
            Family::T12 {
                lambda: nonzero_scalar(rng),
                rho: scalar(rng),
                chi1: chis[0].clone(),
                chi2: chis[1].clone(),
            }
        }
        Variant::T13 => {
            let i = *with_sine(ctx).choose(rng)?;
            let phi = combination(n, &ctx.exact_sine_bases[i], rng)?;
            Family::T13 {
                c: scalar(rng),
                chi: ctx.exact_chars[i].clone(),
                phi,
            }
        }
        Variant::T21 => {
            let mut options = Vec::new();
            for i in with_sine(ctx) {
                let chi = &ctx.exact_chars[i];
                for phi in &ctx.exact_sine_bases[i] {
                    if let Ok(Some(sol)) = solve_cosine_sine_psi(s, chi, phi, 0.0) {
                        options.push((chi.clone(), phi.clone(), sol));
                    }
                }
            }
            let (chi, phi, sol) = options.choose(rng)?.clone();
            let c = nonzero_scalar(rng);
            let hom = combination(n, &sol.homogeneous, rng).unwrap_or_else(|| func::zeros(n));
            let hom_coef = if rng.random_bool(0.5) {
                scalar(rng)
            } else {
                Cyclo::from_int(0)
            };
            let psi = func::lincomb(
                n,
                &[(c.clone() * c.clone(), &sol.particular), (hom_coef, &hom)],
            );
            if func::is_zero(&psi, 0.0) {
                return None;
            }
            Family::T21 {
                chi,
                phi: func::scale(&c, &phi),
                psi,
            }
        }
        Variant::T22 => {
            let (chi, mu, phi) = sine_data(ctx, rng)?;
            Family::T22 {
                c: nonzero_scalar(rng),
                mu,
                chi,
                phi,
            }
        }
        Variant::T23 => {
            let (chi, mu, phi) = sine_data(ctx, rng)?;
            let c2 = nonzero_scalar(rng);
            let c1 = -(c2.clone() * c2.clone()).inv().expect("c₂ ≠ 0");
            Family::T23 {
                c1,
                c2,
                mu,
                chi,
                phi,
            }
        }
        Variant::T24 => {
            let chis = distinct_chars(ctx, 3, rng)?;
            let lambda = nonzero_scalar(rng);
            let two = Cyclo::from_int(2);
            let rho = loop {
                let r = nonzero_scalar(rng);
                if r != two {
                    break r;
                }
            };
            let c =
                (two.clone() * lambda.clone() * lambda.clone() * rho.clone() * (two - rho.clone()))
                    .inv()
                    .expect("nonzero by construction");
            Family::T24 {
                lambda,
                rho,
                c,
                chi1: chis[0].clone(),
                chi2: chis[1].clone(),
                chi3: chis[2].clone(),
            }
        }
    };
    let delta = if variant.is_dependent() {
        Cyclo::from_int(0)
    } else {
        delta(rng)
    };
    Some(FamilyDescriptor::new(delta, family))
}
