//! Recognising which family a solution belongs to.
//!
//! Every family is built from characters of the semigroup, sine solutions,
//! ψ-solutions and a handful of constants. The classifier recovers those
//! pieces along the lines of the existence proofs, snaps every recovered
//! multiplicative function onto the enumerated characters, and accepts a
//! descriptor only if it passes [`FamilyDescriptor::validate`] and
//! reconstructs the input (exactly, or within `tol` for floats).

use serde::Serialize;

use super::structure::{
    base_case, delta_candidates, fit_linear_constants, fit_structure_constants, independent,
};
use super::{verify_equation, Family, FamilyDescriptor, StructureConstants, Triple, Variant};
use crate::error::{Error, Result};
use crate::func;
use crate::homomorphisms::{decompose_sine_pair, Context};
use crate::linalg::{solve_equilibrated, Matrix};
use crate::scalar::{max_abs, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct Classification<T> {
    /// First match in the order T1.1 > T1.2 > … > T2.4.
    pub primary: FamilyDescriptor<T>,
    /// Every descriptor found that reconstructs the input.
    pub matches: Vec<FamilyDescriptor<T>>,
    /// `rank{f, h} ≤ 1`.
    pub dependent: bool,
    /// Structure constants, for independent solutions.
    pub constants: Option<StructureConstants<T>>,
}

#[derive(Serialize)]
struct Summary {
    primary: &'static str,
    variants: Vec<&'static str>,
    dependent: bool,
}

impl<T: Scalar> Classification<T> {
    pub fn variants(&self) -> Vec<Variant> {
        let mut v: Vec<Variant> = self.matches.iter().map(FamilyDescriptor::variant).collect();
        v.dedup();
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut out = serde_json::to_value(Summary {
            primary: self.primary.variant().name(),
            variants: self.variants().into_iter().map(Variant::name).collect(),
            dependent: self.dependent,
        })
        .expect("plain data");
        out["descriptor"] = self.primary.to_json();
        out["matches"] = self.matches.iter().map(FamilyDescriptor::to_json).collect();
        if let Some(c) = &self.constants {
            let mut m = serde_json::Map::new();
            for (k, v) in [
                ("gamma1", &c.gamma1),
                ("gamma2", &c.gamma2),
                ("delta3", &c.delta3),
                ("delta4", &c.delta4),
                ("lambda", &c.lambda),
                ("eta_sq", &c.eta_sq),
                ("mu_eta", &c.mu_eta),
                ("mu_sq", &c.mu_sq),
            ] {
                m.insert(k.into(), v.to_json());
            }
            if let (Some(eta), Some(mu)) = (&c.eta, &c.mu) {
                m.insert("eta".into(), eta.to_json());
                m.insert("mu".into(), mu.to_json());
            }
            out["constants"] = serde_json::Value::Object(m);
        }
        out
    }
}

const SNAP_TOL: f64 = 1e-3;

struct Search<'a, T: Scalar> {
    ctx: &'a Context<T>,
    target: &'a Triple<T>,
    tol: f64,
    found: Vec<FamilyDescriptor<T>>,
}

impl<T: Scalar> Search<'_, T> {
    /// Tolerance for recovering characters. Distinct characters are far
    /// apart, while a recovered one can carry the input error times a
    /// large family constant; the final checks use `tol` regardless.
    fn loose(&self) -> f64 {
        if T::is_exact() {
            0.0
        } else {
            self.tol.max(SNAP_TOL)
        }
    }

    fn snap(&self, v: &[T]) -> Option<Vec<T>> {
        self.ctx
            .find_char(v, self.loose())
            .map(|i| self.ctx.chars[i].values.clone())
    }

    fn offer(&mut self, d: FamilyDescriptor<T>) {
        let s = &self.ctx.semigroup;
        if d.validate(s, self.tol).is_ok()
            && d.reconstruct().approx_eq(self.target, self.tol)
            && !self.found.contains(&d)
        {
            self.found.push(d);
        }
    }

    fn scale(&self) -> f64 {
        self.target.scale().max(1.0)
    }

    fn dependent(&mut self) {
        let t = self.target;
        let (n, tol, scale) = (t.len(), self.tol, self.scale());
        let s = &self.ctx.semigroup;
        if func::is_zero(&t.f, tol * scale) && func::is_zero(&t.h, tol * scale) {
            self.offer(FamilyDescriptor::dependent(Family::T11 { g: t.g.clone() }));
        }
        if func::is_zero(&t.f, tol * scale) {
            return;
        }
        let x0 = (0..n)
            .max_by(|&a, &b| t.f[a].abs().total_cmp(&t.f[b].abs()))
            .expect("nonempty");
        let Ok(c) = t.h[x0].checked_div(&t.f[x0]) else {
            return;
        };
        if !func::approx_eq(&t.h, &func::scale(&c, &t.f), tol * scale) {
            return;
        }
        let k = func::lincomb(
            n,
            &[
                (T::one(), &t.g),
                (c.clone() * c.clone() * T::from_ratio(1, 2), &t.f),
            ],
        );
        let chars = self.ctx.char_values();
        let split = decompose_sine_pair(s, &t.f, &k, &chars, self.loose()).ok();
        let lambda_zero = split.as_ref().is_none_or(|d| d.lambda.is_negligible(tol));
        if let Some(d) = split.filter(|d| !d.lambda.is_negligible(tol)) {
            if let (Some(chi1), Some(chi2)) = (self.snap(&d.chi1), self.snap(&d.chi2)) {
                let lambda = (T::from_ratio(2, 1) * d.lambda).inv().expect("λ ≠ 0");
                let rho = lambda.clone() * c.clone();
                self.offer(FamilyDescriptor::dependent(Family::T12 {
                    lambda,
                    rho,
                    chi1,
                    chi2,
                }));
            }
        }
        if lambda_zero || !T::is_exact() {
            if let Some(chi) = self.snap(&k) {
                self.offer(FamilyDescriptor::dependent(Family::T13 {
                    c,
                    chi,
                    phi: t.f.clone(),
                }));
            }
        }
    }

    fn independent(&mut self) {
        let s = &self.ctx.semigroup;
        let Ok(deltas) = delta_candidates(self.ctx, self.target, self.tol) else {
            return;
        };
        for delta in deltas {
            let base = self.target.conjugate(&-delta.clone());
            let Ok(lin) = fit_linear_constants(s, &base, self.tol) else {
                continue;
            };
            self.base_candidates(&base, &lin, &delta);
        }
    }

    /// Candidates for `(F, G, H)` with `γ₂ = 0` and constants `lin`.
    fn base_candidates(&mut self, base: &Triple<T>, lin: &[T; 4], delta: &T) {
        let (n, tol) = (base.len(), self.tol);
        let s = &self.ctx.semigroup;
        let [_, _, alpha, beta] = lin.clone();
        let size = lin.iter().map(Scalar::abs).fold(1.0, f64::max);
        let exact = T::is_exact();
        let alpha_zero = alpha.is_negligible(tol * size);

        if alpha_zero || !exact {
            if let Some(chi) = self.snap(&base.g) {
                if beta.is_negligible(tol * size) {
                    self.offer(FamilyDescriptor::new(
                        delta.clone(),
                        Family::T21 {
                            chi: chi.clone(),
                            phi: base.h.clone(),
                            psi: base.f.clone(),
                        },
                    ));
                }
                if let Ok(c) = beta.inv() {
                    let mu = func::lincomb(n, &[(T::one(), &chi), (beta.clone(), &base.h)]);
                    if let Some(mu) = self.snap(&mu) {
                        let phi =
                            func::lincomb(n, &[(T::one(), &base.h), (-beta.clone(), &base.f)]);
                        self.offer(FamilyDescriptor::new(
                            delta.clone(),
                            Family::T22 { c, mu, chi, phi },
                        ));
                    }
                }
            }
        }
        if alpha_zero && exact {
            return;
        }
        let Ok(inv_alpha) = alpha.inv() else { return };
        let chi_p = func::lincomb(n, &[(T::one(), &base.g), (-alpha.clone(), &base.f)]);
        let Some(chi_p) = self.snap(&chi_p) else {
            return;
        };
        let partner = func::lincomb(
            n,
            &[
                (T::one(), &chi_p),
                (T::from_ratio(2, 1) * alpha.clone(), &base.f),
                (beta.clone() * T::from_ratio(1, 2), &base.h),
            ],
        );
        let chars = self.ctx.char_values();
        let Ok(split) = decompose_sine_pair(s, &base.h, &partner, &chars, self.loose()) else {
            return;
        };
        let lambda_zero = split.lambda.is_negligible(tol);
        if lambda_zero || !exact {
            if let Some(chi) = self.snap(&partner) {
                self.offer(FamilyDescriptor::new(
                    delta.clone(),
                    Family::T23 {
                        c1: inv_alpha.clone() * T::from_ratio(1, 2),
                        c2: beta.clone() * T::from_ratio(1, 2),
                        mu: chi_p.clone(),
                        chi,
                        phi: base.h.clone(),
                    },
                ));
            }
        }
        if !lambda_zero {
            if let (Some(chi1), Some(chi2)) = (self.snap(&split.chi1), self.snap(&split.chi2)) {
                let two_lambda = T::from_ratio(2, 1) * split.lambda.clone();
                let Ok(inv) = two_lambda.inv() else { return };
                self.offer(FamilyDescriptor::new(
                    delta.clone(),
                    Family::T24 {
                        lambda: split.lambda,
                        rho: T::one() - beta * inv,
                        c: inv_alpha * T::from_ratio(1, 4),
                        chi1,
                        chi2,
                        chi3: chi_p,
                    },
                ));
            }
        }
    }
}

impl<T: Scalar> Search<'_, T> {
    /// Coordinates of `v` in the span of `basis`, if it lies there.
    fn coords(&self, basis: &[Vec<T>], v: &[T]) -> Option<Vec<T>> {
        if basis.is_empty() {
            return None;
        }
        solve_equilibrated(&Matrix::from_columns(basis), v, self.loose())
    }

    /// Reads the parameters of T2.1–T2.4 off the coordinates of `f`, `g`
    /// and `h` in a basis of characters and sine solutions. Unlike the
    /// structure-constant route this stays well conditioned when some
    /// family constant is huge and `f`, `h` are nearly parallel.
    fn coordinates(&mut self) {
        let t = self.target;
        let n = t.len();
        let chars = &self.ctx.chars;
        let two = T::from_ratio(2, 1);
        for (j, chi) in chars.iter().enumerate() {
            if self.ctx.sine_bases[j].is_empty() {
                continue;
            }
            let rhs = func::sub(&t.g, &chi.values);
            let m = Matrix::from_columns(&[t.h.clone(), t.f.clone()]);
            if let Some(y) = solve_equilibrated(&m, &rhs, self.loose()) {
                let delta = y[0].clone();
                self.offer(FamilyDescriptor::new(
                    delta.clone(),
                    Family::T21 {
                        chi: chi.values.clone(),
                        phi: func::lincomb(n, &[(T::one(), &t.h), (delta, &t.f)]),
                        psi: t.f.clone(),
                    },
                ));
            }
        }
        for (i, mu) in chars.iter().enumerate() {
            for (j, chi) in chars.iter().enumerate() {
                let sines = &self.ctx.sine_bases[j];
                if i == j || sines.is_empty() {
                    continue;
                }
                let mut basis: Vec<Vec<T>> = [mu, chi]
                    .iter()
                    .filter(|c| c.nonzero)
                    .map(|c| c.values.clone())
                    .collect();
                let m = basis.len();
                basis.extend(sines.iter().cloned());
                let (Some(cf), Some(ch)) = (self.coords(&basis, &t.f), self.coords(&basis, &t.h))
                else {
                    continue;
                };
                // Coefficients along μ − χ.
                let (kf, kh) = if mu.nonzero {
                    (cf[0].clone(), ch[0].clone())
                } else {
                    (-cf[0].clone(), -ch[0].clone())
                };
                let (fs, hs) = (&cf[m..], &ch[m..]);
                let combine = |w: &[T]| {
                    let terms: Vec<(T, &[T])> =
                        w.iter().cloned().zip(sines.iter().map(Vec::as_slice)).collect();
                    func::lincomb(n, &terms)
                };

                // T2.2: the sine parts of f and h are −cφ and δcφ.
                let neg_hs: Vec<T> = hs.iter().map(|x| -x.clone()).collect();
                if let Some(d) = T::solve(&Matrix::from_columns(&[fs.to_vec()]), &neg_hs, self.loose())
                {
                    let delta = d[0].clone();
                    let c = kh.clone() + delta.clone() * kf.clone();
                    if let Ok(inv) = c.inv() {
                        let phi = func::scale(&-inv, &combine(fs));
                        self.offer(FamilyDescriptor::new(
                            delta,
                            Family::T22 {
                                c,
                                mu: mu.values.clone(),
                                chi: chi.values.clone(),
                                phi,
                            },
                        ));
                    }
                }

                // T2.3: the character part of f is −c₁(μ − χ), and h has
                // none apart from −δf.
                if let Ok(inv_kf) = kf.inv() {
                    let delta = -kh.clone() * inv_kf;
                    let c1 = -kf.clone();
                    let ps: Vec<T> = hs
                        .iter()
                        .zip(fs)
                        .map(|(h, f)| h.clone() + delta.clone() * f.clone())
                        .collect();
                    // only c₂φ is determined, so fix the size of φ
                    let peak = ps
                        .iter()
                        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
                        .and_then(|p| p.inv().ok());
                    let ps: Vec<T> = match peak {
                        Some(k) => ps.iter().map(|p| p.clone() * k.clone()).collect(),
                        None => ps,
                    };
                    let col: Vec<T> = ps.iter().map(|p| -c1.clone() * p.clone()).collect();
                    if let Some(c2) = T::solve(&Matrix::from_columns(&[col]), fs, self.loose()) {
                        self.offer(FamilyDescriptor::new(
                            delta,
                            Family::T23 {
                                c1,
                                c2: c2[0].clone(),
                                mu: mu.values.clone(),
                                chi: chi.values.clone(),
                                phi: combine(&ps),
                            },
                        ));
                    }
                }
            }
        }

        // T2.4: f = c(ρχ₁ + (2 − ρ)χ₂ − 2χ₃), h = (χ₁ − χ₂)/(2λ) − δf.
        for (i, c1v) in chars.iter().enumerate() {
            for (j, c2v) in chars.iter().enumerate() {
                for (k, c3v) in chars.iter().enumerate() {
                    if i == j || i == k || j == k {
                        continue;
                    }
                    let mut basis = Vec::new();
                    let mut slot = [None; 3];
                    for (p, c) in [c1v, c2v, c3v].into_iter().enumerate() {
                        if c.nonzero {
                            slot[p] = Some(basis.len());
                            basis.push(c.values.clone());
                        }
                    }
                    let (Some(cf), Some(ch)) = (self.coords(&basis, &t.f), self.coords(&basis, &t.h))
                    else {
                        continue;
                    };
                    let at = |v: &[T], p: usize| slot[p].map(|q| v[q].clone());
                    let params = || -> Option<(T, T, T, T)> {
                        let (c, delta) = match (at(&cf, 2), at(&ch, 2)) {
                            (Some(f3), Some(h3)) => {
                                let inv = f3.inv().ok()?;
                                (-f3 * T::from_ratio(1, 2), -h3 * inv)
                            }
                            _ => {
                                let fs = at(&cf, 0)? + at(&cf, 1)?;
                                let hs = at(&ch, 0)? + at(&ch, 1)?;
                                let inv = fs.inv().ok()?;
                                (fs * T::from_ratio(1, 2), -hs * inv)
                            }
                        };
                        let inv_c = c.inv().ok()?;
                        let (rho, u) = match (at(&cf, 0), at(&ch, 0)) {
                            (Some(f1), Some(h1)) => {
                                (f1.clone() * inv_c, h1 + delta.clone() * f1)
                            }
                            _ => {
                                let (f2, h2) = (at(&cf, 1)?, at(&ch, 1)?);
                                (
                                    T::from_ratio(2, 1) - f2.clone() * inv_c,
                                    -(h2 + delta.clone() * f2),
                                )
                            }
                        };
                        let lambda = (two.clone() * u).inv().ok()?;
                        Some((delta, lambda, rho, c))
                    };
                    if let Some((delta, lambda, rho, c)) = params() {
                        self.offer(FamilyDescriptor::new(
                            delta,
                            Family::T24 {
                                lambda,
                                rho,
                                c,
                                chi1: c1v.values.clone(),
                                chi2: c2v.values.clone(),
                                chi3: c3v.values.clone(),
                            },
                        ));
                    }
                }
            }
        }
    }
}

/// Float fallback for independent solutions: see [`Search::coordinates`].
fn coordinate_search<T: Scalar>(ctx: &Context<T>, t: &Triple<T>, tol: f64) -> Vec<FamilyDescriptor<T>> {
    let mut search = Search {
        ctx,
        target: t,
        tol,
        found: Vec::new(),
    };
    search.coordinates();
    search.found
}

fn search<T: Scalar>(ctx: &Context<T>, t: &Triple<T>, tol: f64, dependent: bool) -> Vec<FamilyDescriptor<T>> {
    let mut search = Search {
        ctx,
        target: t,
        tol,
        found: Vec::new(),
    };
    if dependent || !T::is_exact() {
        search.dependent();
    }
    if !dependent || !T::is_exact() {
        search.independent();
    }
    search.found
}

/// Retries the search on `(s²f, g, sh)` with `s` a power of two making
/// `max(|s²f|, |sh|²)` about 1, then scales the matches back. Every family
/// is closed under this scaling, and without it a solution with, say,
/// `f ~ 1e-8` and `h ~ 1e-4` looks like `f = 0, h ≠ 0` at any fixed
/// tolerance.
fn balanced<T: Scalar>(
    t: &Triple<T>,
    tol: f64,
    run: impl Fn(&Triple<T>) -> Vec<FamilyDescriptor<T>>,
) -> Vec<FamilyDescriptor<T>> {
    let size = max_abs(&t.f).max(max_abs(&t.h).powi(2));
    if size == 0.0 {
        return Vec::new();
    }
    let k = (-size.log2() / 2.0).round().clamp(-60.0, 60.0) as i64;
    if k == 0 {
        return Vec::new();
    }
    let (up, down) = if k > 0 {
        (T::from_ratio(1 << k, 1), T::from_ratio(1, 1 << k))
    } else {
        (T::from_ratio(1, 1 << -k), T::from_ratio(1 << -k, 1))
    };
    run(&t.rescale(&up))
        .into_iter()
        .map(|d| d.rescale(&down))
        .filter(|d| d.reconstruct().approx_eq(t, tol))
        .collect()
}

/// The float fallbacks for an independent pair, in order: the structure
/// constant route rescaled, then the span-coordinate route plain and
/// rescaled.
fn fallbacks<T: Scalar>(ctx: &Context<T>, t: &Triple<T>, tol: f64, dependent: bool) -> Vec<FamilyDescriptor<T>> {
    let mut found = balanced(t, tol, |u| search(ctx, u, tol, dependent));
    if found.is_empty() && !dependent {
        found = coordinate_search(ctx, t, tol);
    }
    if found.is_empty() && !dependent {
        found = balanced(t, tol, |u| coordinate_search(ctx, u, tol));
    }
    found
}

/// Retries the independent case on `M(δ₀)(f, g, h)`, where `δ₀` makes the
/// new `h = h − δ₀f` orthogonal to `f`. When `f` and `h` are nearly
/// parallel, the fitting problems are hopelessly ill-conditioned in the
/// original frame but not in this one. Matches are shifted back by `−δ₀`.
fn orthogonal_search<T: Scalar>(ctx: &Context<T>, t: &Triple<T>, tol: f64) -> Vec<FamilyDescriptor<T>> {
    let m = Matrix::from_columns(std::slice::from_ref(&t.f));
    let Some(sol) = T::solve(&m, &t.h, f64::INFINITY) else {
        return Vec::new();
    };
    let delta0 = sol[0].clone();
    let moved = t.conjugate(&delta0);
    let mut found = search(ctx, &moved, tol, false);
    if found.is_empty() {
        found = fallbacks(ctx, &moved, tol, false);
    }
    found
        .into_iter()
        .filter(|d| !d.variant().is_dependent())
        .map(|d| FamilyDescriptor::new(d.delta - delta0.clone(), d.family))
        .filter(|d| d.reconstruct().approx_eq(t, tol))
        .collect()
}

/// Classifies a solution into the families T1.1–T2.4.
///
/// `tol` is ignored for exact scalars. For floats it bounds every equation
/// residual and the reconstruction error, relative to the size of the data.
pub fn classify<T: Scalar>(ctx: &Context<T>, t: &Triple<T>, tol: f64) -> Result<Classification<T>> {
    let s = &ctx.semigroup;
    let check = verify_equation(s, t, tol)?;
    if !check.solves {
        return Err(Error::NotASolution(check.residual));
    }
    let dependent = !independent(t);
    let mut found = search(ctx, t, tol, dependent);
    if found.is_empty() && !T::is_exact() {
        found = fallbacks(ctx, t, tol, dependent);
    }
    if found.is_empty() && !T::is_exact() && !dependent {
        found = orthogonal_search(ctx, t, tol);
    }
    let mut matches = found;
    matches.sort_by_key(FamilyDescriptor::variant);
    let constants = if dependent {
        None
    } else {
        fit_structure_constants(ctx, t, tol).ok()
    };
    let primary = matches.first().cloned().ok_or_else(|| {
        Error::Unclassifiable(format!(
            "no family reconstructs the triple (scale {:.3e}, f,h {})",
            max_abs(&t.f).max(max_abs(&t.h)),
            if dependent {
                "dependent"
            } else {
                "independent"
            }
        ))
    })?;
    Ok(Classification {
        primary,
        matches,
        dependent,
        constants,
    })
}

/// Case split of an already conjugated triple, exposed for diagnostics.
#[allow(dead_code)]
pub(crate) fn split_base<T: Scalar>(
    ctx: &Context<T>,
    base: &Triple<T>,
    tol: f64,
) -> Result<super::Prop34<T>> {
    let lin = fit_linear_constants(&ctx.semigroup, base, tol)?;
    base_case(&ctx.semigroup, base, &lin, tol)
}
