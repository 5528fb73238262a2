//! Structure constants of an independent-case solution.
//!
//! For a solution with `f`, `h` linearly independent there are constants
//! with
//!
//! ```text
//! g(xy) = g(x)g(y) + γ₁f(x)f(y) + γ₂[f(x)h(y) + h(x)f(y)] + δ₃h(x)h(y)
//! h(xy) = g(x)h(y) + h(x)g(y) + γ₂f(x)f(y) + δ₃[f(x)h(y) + h(x)f(y)] + δ₄h(x)h(y)
//! ```
//!
//! and `γ₁ + γ₂δ₄ − δ₃² = 0`. Both identities are linear in the four
//! constants. Conjugating by `M(−δ)` changes `γ₂` into the cubic
//! `γ₂'(δ) = δ³ + δ₄δ² − 2δ₃δ + γ₂`; a root makes the conjugated triple
//! satisfy `γ₂' = 0`.

use serde::Serialize;

use super::Triple;
use crate::error::{Error, Result};
use crate::func;
use crate::homomorphisms::{is_multiplicative, is_sine_solution, quad_tol, Context};
use crate::linalg::{rank_of, solve_equilibrated, Matrix};
use crate::scalar::{max_abs, Scalar};
use crate::semigroup::Semigroup;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureConstants<T> {
    pub gamma1: T,
    pub gamma2: T,
    pub delta3: T,
    pub delta4: T,
    pub lambda: T,
    /// `η²`, `μη` and `μ²` always lie in the field of the data; `η` and `μ`
    /// themselves may need a square root outside it.
    pub eta_sq: T,
    pub mu_eta: T,
    pub mu_sq: T,
    pub eta: Option<T>,
    pub mu: Option<T>,
}

impl<T: Scalar> StructureConstants<T> {
    /// `γ₁ + γ₂δ₄ − δ₃²`.
    pub fn quadratic_residual(&self) -> T {
        self.gamma1.clone() + self.gamma2.clone() * self.delta4.clone()
            - self.delta3.clone() * self.delta3.clone()
    }

    /// `(λ² + μ² − γ₁, μη − γ₂, λ − η² + δ₃)`.
    pub fn lambda_mu_eta_residuals(&self) -> [T; 3] {
        [
            self.lambda.clone() * self.lambda.clone() + self.mu_sq.clone() - self.gamma1.clone(),
            self.mu_eta.clone() - self.gamma2.clone(),
            self.lambda.clone() - self.eta_sq.clone() + self.delta3.clone(),
        ]
    }
}

/// Whether `f` and `h` are linearly independent.
pub fn independent<T: Scalar>(t: &Triple<T>) -> bool {
    rank_of(&[t.f.clone(), t.h.clone()]) == 2
}

/// Least-squares (exact: unique) solution `(γ₁, γ₂, δ₃, δ₄)` of the two
/// linear identities.
pub fn fit_linear_constants<T: Scalar>(s: &Semigroup, t: &Triple<T>, tol: f64) -> Result<[T; 4]> {
    t.check_len(s.order())?;
    if !independent(t) {
        return Err(Error::Precondition("f and h are linearly dependent".into()));
    }
    let (f, g, h) = (&t.f, &t.g, &t.h);
    let mut m: Matrix<T> = Matrix::zeros(0, 0);
    let mut b = Vec::new();
    for (x, y) in s.pairs() {
        let ff = f[x].clone() * f[y].clone();
        let fh = f[x].clone() * h[y].clone() + h[x].clone() * f[y].clone();
        let hh = h[x].clone() * h[y].clone();
        let xy = s.mul(x, y);
        m.push_row(vec![ff.clone(), fh.clone(), hh.clone(), T::zero()]);
        b.push(g[xy].clone() - g[x].clone() * g[y].clone());
        m.push_row(vec![T::zero(), ff, fh, hh]);
        b.push(h[xy].clone() - g[x].clone() * h[y].clone() - h[x].clone() * g[y].clone());
    }
    let sol = solve_equilibrated(&m, &b, quad_tol(tol, t.scale()))
        .ok_or_else(|| Error::Inconsistent("no structure constants fit the triple".into()))?;
    Ok([
        sol[0].clone(),
        sol[1].clone(),
        sol[2].clone(),
        sol[3].clone(),
    ])
}

/// Coefficients `[c₀, c₁, c₂, c₃]` of `γ₂'(δ) = δ³ + δ₄δ² − 2δ₃δ + γ₂`.
pub fn gamma2_closed_form<T: Scalar>(lin: &[T; 4]) -> [T; 4] {
    let [_, g2, d3, d4] = lin.clone();
    [g2, -(T::from_ratio(2, 1) * d3), d4, T::one()]
}

/// `γ₂'` recovered by fitting the constants of `M(−δ)(f, g, h)` at
/// `δ = 0, 1, 2, 3` and interpolating the cubic through the four values.
pub fn gamma2_polynomial<T: Scalar>(s: &Semigroup, t: &Triple<T>, tol: f64) -> Result<[T; 4]> {
    let mut y = Vec::with_capacity(4);
    for k in 0..4 {
        let d = T::from_ratio(-k, 1);
        y.push(fit_linear_constants(s, &t.conjugate(&d), tol)?[1].clone());
    }
    // Newton forward differences on the nodes 0, 1, 2, 3
    let d1 = y[1].clone() - y[0].clone();
    let d2 = y[2].clone() - T::from_ratio(2, 1) * y[1].clone() + y[0].clone();
    let d3 = y[3].clone() - T::from_ratio(3, 1) * y[2].clone() + T::from_ratio(3, 1) * y[1].clone()
        - y[0].clone();
    let r = |a, b| T::from_ratio(a, b);
    Ok([
        y[0].clone(),
        d1 - d2.clone() * r(1, 2) + d3.clone() * r(1, 3),
        d2 * r(1, 2) - d3.clone() * r(1, 2),
        d3 * r(1, 6),
    ])
}

fn eval_cubic<T: Scalar>(c: &[T; 4], x: &T) -> T {
    c.iter()
        .rev()
        .fold(T::zero(), |acc, a| acc * x.clone() + a.clone())
}

/// All `δ` with `γ₂'(δ) = 0`, found through the characters of the
/// semigroup: at a root, `G − δ₃'F` is a multiplicative function `χ`, so
/// `g − χ = δ·h + (δ²/2 + δ₃')·f` is a linear system for `δ` once `χ` is
/// fixed. Zero comes first when it is a root, then canonical order.
pub fn delta_candidates<T: Scalar>(ctx: &Context<T>, t: &Triple<T>, tol: f64) -> Result<Vec<T>> {
    let s = &ctx.semigroup;
    let lin = fit_linear_constants(s, t, tol)?;
    let cubic = gamma2_closed_form(&lin);
    let scale = t.scale().max(1.0);
    let m = Matrix::from_columns(&[t.h.clone(), t.f.clone()]);
    let mut out: Vec<T> = Vec::new();
    for chi in &ctx.chars {
        let rhs = func::sub(&t.g, &chi.values);
        let Some(sol) = solve_equilibrated(&m, &rhs, tol * scale) else {
            continue;
        };
        let delta = sol[0].clone();
        let size = delta.abs().max(1.0).powi(3) * lin.iter().map(Scalar::abs).fold(1.0, f64::max);
        if !eval_cubic(&cubic, &delta).is_negligible(tol * size) {
            continue;
        }
        let dt = tol * delta.abs().max(1.0);
        if !out.iter().any(|d| d.approx_eq(&delta, dt)) {
            out.push(delta);
        }
    }
    out.sort_by(|a, b| {
        (!a.is_negligible(tol))
            .cmp(&!b.is_negligible(tol))
            .then(a.canonical_cmp(b))
    });
    Ok(out)
}

fn gram_identity_holds<T: Scalar>(
    s: &Semigroup,
    t: &Triple<T>,
    c: &StructureConstants<T>,
    tol: f64,
) -> bool {
    let n = s.order();
    let k = func::lincomb(n, &[(c.lambda.clone(), &t.f), (T::one(), &t.g)]);
    let scale = max_abs(&k).max(t.scale()).max(1.0)
        * [&c.mu_sq, &c.mu_eta, &c.eta_sq]
            .iter()
            .map(|x| x.abs())
            .fold(1.0, f64::max);
    let (f, h) = (&t.f, &t.h);
    s.pairs().all(|(x, y)| {
        let r = k[s.mul(x, y)].clone()
            - k[x].clone() * k[y].clone()
            - c.mu_sq.clone() * f[x].clone() * f[y].clone()
            - c.mu_eta.clone() * (f[x].clone() * h[y].clone() + h[x].clone() * f[y].clone())
            - c.eta_sq.clone() * h[x].clone() * h[y].clone();
        r.is_negligible(quad_tol(tol, scale))
    })
}

/// Fits all structure constants and checks every identity they satisfy.
///
/// When `γ₂ = 0` the choice `μ = η = 0`, `λ = −δ₃` is used. Otherwise
/// `η² = γ₂/δ₀` for a nonzero root `δ₀` of `γ₂'`, which is a root of
/// `s³ − 2δ₃s² + γ₂δ₄s + γ₂² = 0`, and `λ = η² − δ₃`, `μ = γ₂/η`.
pub fn fit_structure_constants<T: Scalar>(
    ctx: &Context<T>,
    t: &Triple<T>,
    tol: f64,
) -> Result<StructureConstants<T>> {
    let s = &ctx.semigroup;
    let lin = fit_linear_constants(s, t, tol)?;
    let [gamma1, gamma2, delta3, delta4] = lin.clone();
    let size = lin.iter().map(Scalar::abs).fold(1.0, f64::max);
    let consts = if gamma2.is_negligible(tol * size) {
        StructureConstants {
            lambda: -delta3.clone(),
            eta_sq: T::zero(),
            mu_eta: T::zero(),
            mu_sq: T::zero(),
            eta: Some(T::zero()),
            mu: Some(T::zero()),
            gamma1,
            gamma2,
            delta3,
            delta4,
        }
    } else {
        let delta0 = delta_candidates(ctx, t, tol)?
            .into_iter()
            .find(|d| !d.is_negligible(tol))
            .ok_or_else(|| Error::NoAdmissibleDelta("γ₂ ≠ 0 but γ₂' has no root".into()))?;
        let eta_sq = gamma2.checked_div(&delta0)?;
        let mu_sq = (gamma2.clone() * gamma2.clone()).checked_div(&eta_sq)?;
        // η and μ are optional: the square root may also push the field
        // order past the cap
        let (eta, mu) = match eta_sq.sqrt().map(|e| gamma2.checked_div(&e).map(|m| (e, m))) {
            Some(Ok((e, m))) => (Some(e), Some(m)),
            _ => (None, None),
        };
        StructureConstants {
            lambda: eta_sq.clone() - delta3.clone(),
            mu_eta: gamma2.clone(),
            eta_sq,
            mu_sq,
            eta,
            mu,
            gamma1,
            gamma2,
            delta3,
            delta4,
        }
    };
    let size = size.powi(3);
    if !consts.quadratic_residual().is_negligible(tol * size) {
        return Err(Error::Inconsistent("γ₁ + γ₂δ₄ − δ₃² ≠ 0".into()));
    }
    if consts
        .lambda_mu_eta_residuals()
        .iter()
        .any(|r| !r.is_negligible(tol * size))
    {
        return Err(Error::Inconsistent("λ, μ, η identities fail".into()));
    }
    if !gram_identity_holds(s, t, &consts, tol) {
        return Err(Error::Inconsistent("(λf + g)(xy) identity fails".into()));
    }
    Ok(consts)
}

/// The three alternatives for an independent-case solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Prop34<T> {
    /// `g = χ`, `h − βf = φ` a χ-sine solution, `χ + βh = μ` multiplicative.
    Multiplicative {
        beta: T,
        chi: Vec<T>,
        phi: Vec<T>,
        mu: Vec<T>,
    },
    /// `g − αf = χ` multiplicative with `α ≠ 0`, and `(h, χ + 2αf + βh/2)`
    /// solves the sine addition law.
    Shifted {
        alpha: T,
        beta: T,
        chi: Vec<T>,
        partner: Vec<T>,
    },
    /// `M(−δ)(f, g, h)` is in one of the first two cases.
    Conjugated { delta: T, base: Box<Prop34<T>> },
}

impl<T> Prop34<T> {
    pub fn case(&self) -> u8 {
        match self {
            Prop34::Multiplicative { .. } => 1,
            Prop34::Shifted { .. } => 2,
            Prop34::Conjugated { .. } => 3,
        }
    }
}

/// Case split when `γ₂ = 0`, with constants `[γ₁, γ₂, δ₃, δ₄]`.
pub(crate) fn base_case<T: Scalar>(
    s: &Semigroup,
    t: &Triple<T>,
    lin: &[T; 4],
    tol: f64,
) -> Result<Prop34<T>> {
    let n = s.order();
    let [_, _, delta3, delta4] = lin.clone();
    let size = lin.iter().map(Scalar::abs).fold(1.0, f64::max);
    let fail =
        |what: &str| Error::Inconsistent(format!("{what} (case split of an independent solution)"));
    if delta3.is_negligible(tol * size) {
        let beta = delta4;
        let chi = t.g.clone();
        let phi = func::lincomb(n, &[(T::one(), &t.h), (-beta.clone(), &t.f)]);
        let mu = func::lincomb(n, &[(T::one(), &chi), (beta.clone(), &t.h)]);
        if !is_multiplicative(s, &chi, tol)? || !is_multiplicative(s, &mu, tol)? {
            return Err(fail("g or g + βh is not multiplicative"));
        }
        if !is_sine_solution(s, &phi, &chi, tol)? {
            return Err(fail("h − βf is not a sine solution"));
        }
        Ok(Prop34::Multiplicative { beta, chi, phi, mu })
    } else {
        let (alpha, beta) = (delta3, delta4);
        let chi = func::lincomb(n, &[(T::one(), &t.g), (-alpha.clone(), &t.f)]);
        let partner = func::lincomb(
            n,
            &[
                (T::one(), &chi),
                (T::from_ratio(2, 1) * alpha.clone(), &t.f),
                (beta.clone() * T::from_ratio(1, 2), &t.h),
            ],
        );
        if !is_multiplicative(s, &chi, tol)? {
            return Err(fail("g − αf is not multiplicative"));
        }
        if !is_sine_solution(s, &t.h, &partner, tol)? {
            return Err(fail("(h, χ + 2αf + βh/2) is not a sine pair"));
        }
        Ok(Prop34::Shifted {
            alpha,
            beta,
            chi,
            partner,
        })
    }
}

/// Decomposes an independent-case solution following the three cases:
/// `γ₂ = 0, δ₃ = 0`; `γ₂ = 0, δ₃ ≠ 0`; `γ₂ ≠ 0` (conjugate by a root of
/// `γ₂'` first).
pub fn decompose_prop34<T: Scalar>(ctx: &Context<T>, t: &Triple<T>, tol: f64) -> Result<Prop34<T>> {
    let s = &ctx.semigroup;
    let lin = fit_linear_constants(s, t, tol)?;
    let size = lin.iter().map(Scalar::abs).fold(1.0, f64::max);
    if lin[1].is_negligible(tol * size) {
        return base_case(s, t, &lin, tol);
    }
    for delta in delta_candidates(ctx, t, tol)? {
        if delta.is_negligible(tol) {
            continue;
        }
        let inner = t.conjugate(&-delta.clone());
        let lin = fit_linear_constants(s, &inner, tol)?;
        let size = lin.iter().map(Scalar::abs).fold(1.0, f64::max);
        if !lin[1].is_negligible(tol * size) {
            continue;
        }
        if let Ok(base) = base_case(s, &inner, &lin, tol) {
            return Ok(Prop34::Conjugated {
                delta,
                base: Box::new(base),
            });
        }
    }
    Err(Error::NoAdmissibleDelta(
        "no root of γ₂' leads to a decomposable triple".into(),
    ))
}
