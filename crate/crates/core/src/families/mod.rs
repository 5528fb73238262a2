//! Solution families of `f(xy) = f(x)g(y) + g(x)f(y) + h(x)h(y)`.
//!
//! When `f` and `h` are linearly dependent every solution is one of
//! T1.1–T1.3. Otherwise `(f, g, h) = M(δ)(F, G, H)` with
//!
//! ```text
//!        ⎛   1    0  0 ⎞
//! M(δ) = ⎜ -δ²/2  1  δ ⎟
//!        ⎝  -δ    0  1 ⎠
//! ```
//!
//! and `(F, G, H)` from one of T2.1–T2.4. `M(a)M(b) = M(a+b)`.

mod classify;
pub mod sample;
mod structure;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::func;
use crate::homomorphisms::{is_multiplicative, is_psi_solution, is_sine_solution, quad_tol};
use crate::scalar::{max_abs, Scalar};
use crate::semigroup::Semigroup;

pub use classify::{classify, Classification};
pub use structure::{independent, 
    decompose_prop34, delta_candidates, fit_linear_constants, fit_structure_constants,
    gamma2_closed_form, gamma2_polynomial, Prop34, StructureConstants,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    T11,
    T12,
    T13,
    T21,
    T22,
    T23,
    T24,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::T11,
        Variant::T12,
        Variant::T13,
        Variant::T21,
        Variant::T22,
        Variant::T23,
        Variant::T24,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::T11 => "T1.1",
            Variant::T12 => "T1.2",
            Variant::T13 => "T1.3",
            Variant::T21 => "T2.1",
            Variant::T22 => "T2.2",
            Variant::T23 => "T2.3",
            Variant::T24 => "T2.4",
        }
    }

    /// T1.x: `f` and `h` linearly dependent.
    pub fn is_dependent(self) -> bool {
        self <= Variant::T13
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| {
                v.name().eq_ignore_ascii_case(s)
                    || v.name().replace('.', "") == s.to_ascii_uppercase()
            })
            .ok_or_else(|| Error::InvalidParameter(format!("unknown variant `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triple<T> {
    pub f: Vec<T>,
    pub g: Vec<T>,
    pub h: Vec<T>,
}

impl<T: Scalar> Triple<T> {
    pub fn new(f: Vec<T>, g: Vec<T>, h: Vec<T>) -> Self {
        Triple { f, g, h }
    }

    pub fn zero(n: usize) -> Self {
        Triple {
            f: func::zeros(n),
            g: func::zeros(n),
            h: func::zeros(n),
        }
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn check_len(&self, n: usize) -> Result<()> {
        func::check_len(&self.f, n)?;
        func::check_len(&self.g, n)?;
        func::check_len(&self.h, n)
    }

    /// `M(δ)` applied to `self` read as `(F, G, H)`.
    pub fn conjugate(&self, delta: &T) -> Self {
        if delta.is_zero() {
            return self.clone();
        }
        let n = self.len();
        let half_sq = -(delta.clone() * delta.clone()) * T::from_ratio(1, 2);
        Triple {
            f: self.f.clone(),
            g: func::lincomb(
                n,
                &[
                    (half_sq, &self.f),
                    (T::one(), &self.g),
                    (delta.clone(), &self.h),
                ],
            ),
            h: func::lincomb(n, &[(-delta.clone(), &self.f), (T::one(), &self.h)]),
        }
    }

    /// `(s²f, g, sh)`, again a solution whenever `self` is one.
    pub fn rescale(&self, s: &T) -> Self {
        Triple {
            f: func::scale(&(s.clone() * s.clone()), &self.f),
            g: self.g.clone(),
            h: func::scale(s, &self.h),
        }
    }

    /// Largest modulus among the values of `f`, `g`, `h`.
    pub fn scale(&self) -> f64 {
        max_abs(&self.f).max(max_abs(&self.g)).max(max_abs(&self.h))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let t = tol * self.scale().max(1.0);
        func::approx_eq(&self.f, &other.f, t)
            && func::approx_eq(&self.g, &other.g, t)
            && func::approx_eq(&self.h, &other.h, t)
    }

    pub fn map<U: Scalar>(&self, m: impl Fn(&T) -> U) -> Triple<U> {
        Triple {
            f: self.f.iter().map(&m).collect(),
            g: self.g.iter().map(&m).collect(),
            h: self.h.iter().map(&m).collect(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({ "f": func::to_json(&self.f), "g": func::to_json(&self.g), "h": func::to_json(&self.h) })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let part = |k: &str| {
            v.get(k)
                .ok_or_else(|| Error::MalformedScalar(format!("triple is missing `{k}`")))
                .and_then(func::from_json)
        };
        Ok(Triple {
            f: part("f")?,
            g: part("g")?,
            h: part("h")?,
        })
    }
}

/// Residuals `f(xy) − f(x)g(y) − g(x)f(y) − h(x)h(y)` in row-major order.
pub fn residuals<T: Scalar>(s: &Semigroup, t: &Triple<T>) -> Vec<T> {
    s.pairs()
        .map(|(x, y)| {
            t.f[s.mul(x, y)].clone()
                - t.f[x].clone() * t.g[y].clone()
                - t.g[x].clone() * t.f[y].clone()
                - t.h[x].clone() * t.h[y].clone()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Verification {
    /// Largest residual modulus.
    pub residual: f64,
    /// Exact zero test for exact scalars, `residual <= tol·scale²` for floats.
    pub solves: bool,
    /// Pair with the largest residual.
    pub worst_pair: (usize, usize),
}

pub fn verify_equation<T: Scalar>(s: &Semigroup, t: &Triple<T>, tol: f64) -> Result<Verification> {
    t.check_len(s.order())?;
    let r = residuals(s, t);
    let (k, residual) = r
        .iter()
        .map(Scalar::abs)
        .enumerate()
        .fold(
            (0, 0.0),
            |(bk, bv), (k, v)| if v > bv { (k, v) } else { (bk, bv) },
        );
    let n = s.order();
    Ok(Verification {
        residual,
        solves: func::is_zero(&r, quad_tol(tol, t.scale())),
        worst_pair: (k / n, k % n),
    })
}

/// The family data of one descriptor, without the conjugation constant.
#[derive(Debug, Clone, PartialEq)]
pub enum Family<T> {
    T11 {
        g: Vec<T>,
    },
    T12 {
        lambda: T,
        rho: T,
        chi1: Vec<T>,
        chi2: Vec<T>,
    },
    T13 {
        c: T,
        chi: Vec<T>,
        phi: Vec<T>,
    },
    T21 {
        chi: Vec<T>,
        phi: Vec<T>,
        psi: Vec<T>,
    },
    T22 {
        c: T,
        mu: Vec<T>,
        chi: Vec<T>,
        phi: Vec<T>,
    },
    T23 {
        c1: T,
        c2: T,
        mu: Vec<T>,
        chi: Vec<T>,
        phi: Vec<T>,
    },
    T24 {
        lambda: T,
        rho: T,
        c: T,
        chi1: Vec<T>,
        chi2: Vec<T>,
        chi3: Vec<T>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilyDescriptor<T> {
    /// Conjugation constant; zero for the dependent variants.
    pub delta: T,
    pub family: Family<T>,
}

fn half<T: Scalar>() -> T {
    T::from_ratio(1, 2)
}

impl<T: Scalar> Family<T> {
    pub fn variant(&self) -> Variant {
        match self {
            Family::T11 { .. } => Variant::T11,
            Family::T12 { .. } => Variant::T12,
            Family::T13 { .. } => Variant::T13,
            Family::T21 { .. } => Variant::T21,
            Family::T22 { .. } => Variant::T22,
            Family::T23 { .. } => Variant::T23,
            Family::T24 { .. } => Variant::T24,
        }
    }

    fn functions(&self) -> Vec<(&'static str, &Vec<T>)> {
        match self {
            Family::T11 { g } => vec![("g", g)],
            Family::T12 { chi1, chi2, .. } => vec![("chi1", chi1), ("chi2", chi2)],
            Family::T13 { chi, phi, .. } => vec![("chi", chi), ("phi", phi)],
            Family::T21 { chi, phi, psi } => vec![("chi", chi), ("phi", phi), ("psi", psi)],
            Family::T22 { mu, chi, phi, .. } | Family::T23 { mu, chi, phi, .. } => {
                vec![("mu", mu), ("chi", chi), ("phi", phi)]
            }
            Family::T24 {
                chi1, chi2, chi3, ..
            } => vec![("chi1", chi1), ("chi2", chi2), ("chi3", chi3)],
        }
    }

    fn params(&self) -> Vec<(&'static str, &T)> {
        match self {
            Family::T11 { .. } | Family::T21 { .. } => vec![],
            Family::T12 { lambda, rho, .. } => vec![("lambda", lambda), ("rho", rho)],
            Family::T13 { c, .. } | Family::T22 { c, .. } => vec![("c", c)],
            Family::T23 { c1, c2, .. } => vec![("c1", c1), ("c2", c2)],
            Family::T24 { lambda, rho, c, .. } => vec![("lambda", lambda), ("rho", rho), ("c", c)],
        }
    }

    fn len(&self) -> usize {
        self.functions()[0].1.len()
    }

    /// The same family with every scalar passed through `m`.
    pub fn map<U: Scalar>(&self, m: impl Fn(&T) -> U) -> Family<U> {
        let v = |x: &Vec<T>| x.iter().map(&m).collect::<Vec<U>>();
        match self {
            Family::T11 { g } => Family::T11 { g: v(g) },
            Family::T12 {
                lambda,
                rho,
                chi1,
                chi2,
            } => Family::T12 {
                lambda: m(lambda),
                rho: m(rho),
                chi1: v(chi1),
                chi2: v(chi2),
            },
            Family::T13 { c, chi, phi } => Family::T13 {
                c: m(c),
                chi: v(chi),
                phi: v(phi),
            },
            Family::T21 { chi, phi, psi } => Family::T21 {
                chi: v(chi),
                phi: v(phi),
                psi: v(psi),
            },
            Family::T22 { c, mu, chi, phi } => Family::T22 {
                c: m(c),
                mu: v(mu),
                chi: v(chi),
                phi: v(phi),
            },
            Family::T23 {
                c1,
                c2,
                mu,
                chi,
                phi,
            } => Family::T23 {
                c1: m(c1),
                c2: m(c2),
                mu: v(mu),
                chi: v(chi),
                phi: v(phi),
            },
            Family::T24 {
                lambda,
                rho,
                c,
                chi1,
                chi2,
                chi3,
            } => Family::T24 {
                lambda: m(lambda),
                rho: m(rho),
                c: m(c),
                chi1: v(chi1),
                chi2: v(chi2),
                chi3: v(chi3),
            },
        }
    }

    /// The member whose base triple is `base().rescale(s)`; `s ≠ 0`.
    pub fn rescale(&self, s: &T) -> Family<T> {
        let sq = s.clone() * s.clone();
        let inv = s.inv().expect("nonzero scale");
        let sc = |v: &Vec<T>| func::scale(s, v);
        match self.clone() {
            Family::T11 { g } => Family::T11 { g },
            Family::T12 { lambda, rho, chi1, chi2 } => Family::T12 {
                lambda: sq * lambda,
                rho: s.clone() * rho,
                chi1,
                chi2,
            },
            Family::T13 { c, chi, phi } => Family::T13 {
                c: c * inv,
                chi,
                phi: func::scale(&sq, &phi),
            },
            Family::T21 { chi, phi, psi } => Family::T21 {
                chi,
                phi: sc(&phi),
                psi: func::scale(&sq, &psi),
            },
            Family::T22 { c, mu, chi, phi } => Family::T22 {
                c: s.clone() * c,
                mu,
                chi,
                phi: sc(&phi),
            },
            Family::T23 { c1, c2, mu, chi, phi } => Family::T23 {
                c1: sq * c1,
                c2: c2 * inv,
                mu,
                chi,
                phi: sc(&phi),
            },
            Family::T24 { lambda, rho, c, chi1, chi2, chi3 } => Family::T24 {
                lambda: lambda * inv,
                rho,
                c: sq * c,
                chi1,
                chi2,
                chi3,
            },
        }
    }

    /// `(f, g, h)` for T1.x, `(F, G, H)` for T2.x.
    pub fn base(&self) -> Triple<T> {
        let n = self.len();
        let one = T::one;
        match self {
            Family::T11 { g } => Triple::new(func::zeros(n), g.clone(), func::zeros(n)),
            Family::T12 {
                lambda,
                rho,
                chi1,
                chi2,
            } => {
                let d = func::sub(chi1, chi2);
                let sum_half = func::scale(&half(), &func::add(chi1, chi2));
                let coef = -(rho.clone() * rho.clone())
                    * (T::from_ratio(2, 1) * lambda.clone()).inv().expect("λ ≠ 0");
                Triple::new(
                    func::scale(lambda, &d),
                    func::lincomb(n, &[(one(), &sum_half), (coef, &d)]),
                    func::scale(rho, &d),
                )
            }
            Family::T13 { c, chi, phi } => {
                let coef = -(c.clone() * c.clone()) * half();
                Triple::new(
                    phi.clone(),
                    func::lincomb(n, &[(one(), chi), (coef, phi)]),
                    func::scale(c, phi),
                )
            }
            Family::T21 { chi, phi, psi } => Triple::new(psi.clone(), chi.clone(), phi.clone()),
            Family::T22 { c, mu, chi, phi } => {
                let c2 = c.clone() * c.clone();
                Triple::new(
                    func::lincomb(n, &[(c2.clone(), mu), (-c2, chi), (-c.clone(), phi)]),
                    chi.clone(),
                    func::lincomb(n, &[(c.clone(), mu), (-c.clone(), chi)]),
                )
            }
            Family::T23 {
                c1,
                c2,
                mu,
                chi,
                phi,
            } => Triple::new(
                func::lincomb(
                    n,
                    &[
                        (-c1.clone(), mu),
                        (c1.clone(), chi),
                        (-(c1.clone() * c2.clone()), phi),
                    ],
                ),
                func::lincomb(
                    n,
                    &[(half(), mu), (half(), chi), (-(c2.clone() * half()), phi)],
                ),
                phi.clone(),
            ),
            Family::T24 {
                lambda,
                rho,
                c,
                chi1,
                chi2,
                chi3,
            } => {
                let two_minus = T::from_ratio(2, 1) - rho.clone();
                let quarter = T::from_ratio(1, 4);
                let inv2l = (T::from_ratio(2, 1) * lambda.clone()).inv().expect("λ ≠ 0");
                Triple::new(
                    func::lincomb(
                        n,
                        &[
                            (c.clone() * rho.clone(), chi1),
                            (c.clone() * two_minus.clone(), chi2),
                            (-(T::from_ratio(2, 1) * c.clone()), chi3),
                        ],
                    ),
                    func::lincomb(
                        n,
                        &[
                            (quarter.clone() * rho.clone(), chi1),
                            (quarter * two_minus, chi2),
                            (half(), chi3),
                        ],
                    ),
                    func::lincomb(n, &[(inv2l.clone(), chi1), (-inv2l, chi2)]),
                )
            }
        }
    }
}

/// Nonzero conditions are strict, so they are tested against what the data
/// can resolve rather than against the residual tolerance.
const RESOLVED: f64 = 1e-10;

fn nonzero<T: Scalar>(x: &T, name: &str, tol: f64) -> Result<()> {
    if x.is_negligible(tol.min(RESOLVED)) {
        Err(Error::Constraint(format!("{name} must be nonzero")))
    } else {
        Ok(())
    }
}

fn nonzero_fn<T: Scalar>(v: &[T], name: &str, tol: f64) -> Result<()> {
    if func::is_zero(v, tol.min(RESOLVED)) {
        Err(Error::Constraint(format!("{name} must be nonzero")))
    } else {
        Ok(())
    }
}

fn multiplicative<T: Scalar>(s: &Semigroup, v: &[T], name: &str, tol: f64) -> Result<()> {
    if is_multiplicative(s, v, tol)? {
        Ok(())
    } else {
        Err(Error::Constraint(format!("{name} is not multiplicative")))
    }
}

fn sine<T: Scalar>(s: &Semigroup, phi: &[T], chi: &[T], tol: f64) -> Result<()> {
    if is_sine_solution(s, phi, chi, tol)? {
        Ok(())
    } else {
        Err(Error::Constraint(
            "φ does not solve the sine addition law for χ".into(),
        ))
    }
}

fn distinct<T: Scalar>(a: &[T], b: &[T], names: &str, tol: f64) -> Result<()> {
    let t = tol * max_abs(a).max(max_abs(b)).max(1.0);
    if func::approx_eq(a, b, t) {
        Err(Error::Constraint(format!("{names} must be distinct")))
    } else {
        Ok(())
    }
}

impl<T: Scalar> FamilyDescriptor<T> {
    pub fn new(delta: T, family: Family<T>) -> Self {
        FamilyDescriptor { delta, family }
    }

    pub fn dependent(family: Family<T>) -> Self {
        FamilyDescriptor {
            delta: T::zero(),
            family,
        }
    }

    pub fn variant(&self) -> Variant {
        self.family.variant()
    }

    /// Checks the side conditions of the family. Float scalars compare
    /// against `tol` (scaled by the size of the data).
    pub fn validate(&self, s: &Semigroup, tol: f64) -> Result<()> {
        let n = s.order();
        for (name, v) in self.family.functions() {
            func::check_len(v, n)
                .map_err(|_| Error::Precondition(format!("{name} has the wrong length")))?;
        }
        if self.variant().is_dependent() && !self.delta.is_zero() {
            return Err(Error::Precondition(
                "dependent families carry no conjugation constant".into(),
            ));
        }
        let scale = self
            .family
            .params()
            .iter()
            .map(|(_, p)| p.abs())
            .chain(self.family.functions().iter().map(|(_, v)| max_abs(v)))
            .fold(1.0, f64::max);
        let ptol = tol * scale.powi(4);
        match &self.family {
            Family::T11 { .. } => Ok(()),
            Family::T12 {
                lambda, chi1, chi2, ..
            } => {
                nonzero(lambda, "λ", tol)?;
                multiplicative(s, chi1, "χ₁", tol)?;
                multiplicative(s, chi2, "χ₂", tol)?;
                distinct(chi1, chi2, "χ₁, χ₂", tol)
            }
            Family::T13 { chi, phi, .. } => {
                multiplicative(s, chi, "χ", tol)?;
                nonzero_fn(phi, "φ", tol)?;
                sine(s, phi, chi, tol)
            }
            Family::T21 { chi, phi, psi } => {
                multiplicative(s, chi, "χ", tol)?;
                nonzero_fn(phi, "φ", tol)?;
                nonzero_fn(psi, "ψ", tol)?;
                sine(s, phi, chi, tol)?;
                if is_psi_solution(s, psi, chi, phi, tol)? {
                    Ok(())
                } else {
                    Err(Error::Constraint("ψ does not solve the ψ-equation".into()))
                }
            }
            Family::T22 { c, mu, chi, phi } => {
                nonzero(c, "c", tol)?;
                multiplicative(s, mu, "μ", tol)?;
                multiplicative(s, chi, "χ", tol)?;
                distinct(chi, mu, "χ, μ", tol)?;
                nonzero_fn(phi, "φ", tol)?;
                sine(s, phi, chi, tol)
            }
            Family::T23 {
                c1,
                c2,
                mu,
                chi,
                phi,
            } => {
                nonzero(c1, "c₁", tol)?;
                nonzero(c2, "c₂", tol)?;
                let r = T::one() + c1.clone() * c2.clone() * c2.clone();
                if !r.is_negligible(ptol) {
                    return Err(Error::Constraint("1 + c₁c₂² ≠ 0".into()));
                }
                multiplicative(s, mu, "μ", tol)?;
                multiplicative(s, chi, "χ", tol)?;
                distinct(chi, mu, "χ, μ", tol)?;
                nonzero_fn(phi, "φ", tol)?;
                sine(s, phi, chi, tol)
            }
            Family::T24 {
                lambda,
                rho,
                c,
                chi1,
                chi2,
                chi3,
            } => {
                nonzero(lambda, "λ", tol)?;
                nonzero(rho, "ρ", tol)?;
                nonzero(c, "c", tol)?;
                let r = T::from_ratio(2, 1)
                    * c.clone()
                    * lambda.clone()
                    * lambda.clone()
                    * rho.clone()
                    * (T::from_ratio(2, 1) - rho.clone())
                    - T::one();
                if !r.is_negligible(ptol) {
                    return Err(Error::Constraint("2cλ²ρ(2−ρ) ≠ 1".into()));
                }
                multiplicative(s, chi1, "χ₁", tol)?;
                multiplicative(s, chi2, "χ₂", tol)?;
                multiplicative(s, chi3, "χ₃", tol)?;
                distinct(chi1, chi2, "χ₁, χ₂", tol)?;
                distinct(chi1, chi3, "χ₁, χ₃", tol)?;
                distinct(chi2, chi3, "χ₂, χ₃", tol)
            }
        }
    }

    pub fn map<U: Scalar>(&self, m: impl Fn(&T) -> U) -> FamilyDescriptor<U> {
        FamilyDescriptor {
            delta: m(&self.delta),
            family: self.family.map(&m),
        }
    }

    /// The member whose triple is `reconstruct().rescale(s)`; `s ≠ 0`.
    pub fn rescale(&self, s: &T) -> Self {
        FamilyDescriptor {
            delta: self.delta.clone() * s.inv().expect("nonzero scale"),
            family: self.family.rescale(s),
        }
    }

    /// The triple described, without checking side conditions.
    pub fn reconstruct(&self) -> Triple<T> {
        self.family.base().conjugate(&self.delta)
    }

    pub fn to_json(&self) -> Value {
        let params: Map<String, Value> = self
            .family
            .params()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v.to_json()))
            .collect();
        let functions: Map<String, Value> = self
            .family
            .functions()
            .into_iter()
            .map(|(k, v)| (k.to_string(), func::to_json(v)))
            .collect();
        let mut out = json!({ "variant": self.variant().name() });
        if !self.variant().is_dependent() {
            out["delta"] = self.delta.to_json();
        }
        out["params"] = Value::Object(params);
        out["functions"] = Value::Object(functions);
        out
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let variant: Variant = v
            .get("variant")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::MalformedScalar("descriptor needs a `variant` string".into()))?
            .parse()?;
        let empty = Value::Object(Map::new());
        let params = v.get("params").unwrap_or(&empty);
        let functions = v.get("functions").unwrap_or(&empty);
        let p = |k: &str| -> Result<T> {
            params
                .get(k)
                .ok_or_else(|| Error::MalformedScalar(format!("missing parameter `{k}`")))
                .and_then(T::from_json)
        };
        let f = |k: &str| -> Result<Vec<T>> {
            functions
                .get(k)
                .ok_or_else(|| Error::MalformedScalar(format!("missing function `{k}`")))
                .and_then(func::from_json)
        };
        let family = match variant {
            Variant::T11 => Family::T11 { g: f("g")? },
            Variant::T12 => Family::T12 {
                lambda: p("lambda")?,
                rho: p("rho")?,
                chi1: f("chi1")?,
                chi2: f("chi2")?,
            },
            Variant::T13 => Family::T13 {
                c: p("c")?,
                chi: f("chi")?,
                phi: f("phi")?,
            },
            Variant::T21 => Family::T21 {
                chi: f("chi")?,
                phi: f("phi")?,
                psi: f("psi")?,
            },
            Variant::T22 => Family::T22 {
                c: p("c")?,
                mu: f("mu")?,
                chi: f("chi")?,
                phi: f("phi")?,
            },
            Variant::T23 => Family::T23 {
                c1: p("c1")?,
                c2: p("c2")?,
                mu: f("mu")?,
                chi: f("chi")?,
                phi: f("phi")?,
            },
            Variant::T24 => Family::T24 {
                lambda: p("lambda")?,
                rho: p("rho")?,
                c: p("c")?,
                chi1: f("chi1")?,
                chi2: f("chi2")?,
                chi3: f("chi3")?,
            },
        };
        let delta = match v.get("delta") {
            Some(d) if !variant.is_dependent() => T::from_json(d)?,
            _ => T::zero(),
        };
        Ok(FamilyDescriptor { delta, family })
    }
}

/// Builds the triple of a dependent-case descriptor after checking its
/// side conditions.
pub fn construct_dependent<T: Scalar>(
    s: &Semigroup,
    d: &FamilyDescriptor<T>,
    tol: f64,
) -> Result<Triple<T>> {
    if !d.variant().is_dependent() {
        return Err(Error::Precondition(format!(
            "{} is not a dependent-case family",
            d.variant()
        )));
    }
    d.validate(s, tol)?;
    Ok(d.reconstruct())
}

/// Builds `M(δ)(F, G, H)` for an independent-case descriptor after checking
/// its side conditions.
pub fn construct_independent<T: Scalar>(
    s: &Semigroup,
    d: &FamilyDescriptor<T>,
    tol: f64,
) -> Result<Triple<T>> {
    if d.variant().is_dependent() {
        return Err(Error::Precondition(format!(
            "{} is not an independent-case family",
            d.variant()
        )));
    }
    d.validate(s, tol)?;
    Ok(d.reconstruct())
}

pub fn construct<T: Scalar>(s: &Semigroup, d: &FamilyDescriptor<T>, tol: f64) -> Result<Triple<T>> {
    d.validate(s, tol)?;
    Ok(d.reconstruct())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Cyclo;
    use crate::semigroup::{cyclic, truncated_add};

    fn q(n: i64) -> Cyclo {
        Cyclo::from_int(n)
    }

    fn v(xs: &[i64]) -> Vec<Cyclo> {
        xs.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn verify_examples() {
        let t3 = truncated_add(3).unwrap();
        let t = Triple::new(v(&[0, 1, 0]), v(&[0, 0, 0]), v(&[1, 0, 0]));
        assert!(verify_equation(&t3, &t, 0.0).unwrap().solves);
        let c2 = cyclic(2).unwrap();
        let bad = Triple::new(v(&[0, 1]), v(&[1, 0]), v(&[0, 1]));
        let r = verify_equation(&c2, &bad, 0.0).unwrap();
        assert!(!r.solves);
        assert_eq!(r.residual, 1.0);
        assert_eq!(r.worst_pair, (1, 1));
    }

    #[test]
    fn conjugation_composes_additively() {
        let t = Triple::new(v(&[1, 2]), v(&[3, -1]), v(&[0, 5]));
        let (a, b) = (Cyclo::from_ratio(2, 3), Cyclo::i());
        assert_eq!(t.conjugate(&a).conjugate(&b), t.conjugate(&(&a + &b)));
        assert_eq!(t.conjugate(&a).conjugate(&-a.clone()), t);
    }

    #[test]
    fn dependent_examples() {
        let c2 = cyclic(2).unwrap();
        let d = FamilyDescriptor::dependent(Family::T12 {
            lambda: q(1),
            rho: q(0),
            chi1: v(&[1, 1]),
            chi2: v(&[1, -1]),
        });
        let t = construct_dependent(&c2, &d, 0.0).unwrap();
        assert_eq!(t, Triple::new(v(&[0, 2]), v(&[1, 0]), v(&[0, 0])));

        let t3 = truncated_add(3).unwrap();
        let d = FamilyDescriptor::dependent(Family::T13 {
            c: q(2),
            chi: v(&[0, 0, 0]),
            phi: v(&[1, 0, 0]),
        });
        let t = construct_dependent(&t3, &d, 0.0).unwrap();
        assert_eq!(t, Triple::new(v(&[1, 0, 0]), v(&[-2, 0, 0]), v(&[2, 0, 0])));
        assert!(verify_equation(&t3, &t, 0.0).unwrap().solves);
    }

    #[test]
    fn independent_examples() {
        let t3 = truncated_add(3).unwrap();
        let d = FamilyDescriptor::new(
            q(0),
            Family::T22 {
                c: q(1),
                mu: v(&[1, 1, 1]),
                chi: v(&[0, 0, 0]),
                phi: v(&[1, 0, 0]),
            },
        );
        let t = construct_independent(&t3, &d, 0.0).unwrap();
        assert_eq!(t, Triple::new(v(&[0, 1, 1]), v(&[0, 0, 0]), v(&[1, 1, 1])));
        assert!(verify_equation(&t3, &t, 0.0).unwrap().solves);

        let bad = FamilyDescriptor::new(
            q(0),
            Family::T23 {
                c1: q(1),
                c2: q(1),
                mu: v(&[1, 1, 1]),
                chi: v(&[0, 0, 0]),
                phi: v(&[1, 0, 0]),
            },
        );
        assert!(matches!(
            construct_independent(&t3, &bad, 0.0),
            Err(Error::Constraint(_))
        ));
    }

    #[test]
    fn descriptor_json_round_trip() {
        let d = FamilyDescriptor::new(
            Cyclo::i(),
            Family::T23 {
                c1: q(-1),
                c2: q(1),
                mu: v(&[1, 1, 1]),
                chi: v(&[0, 0, 0]),
                phi: v(&[1, 0, 0]),
            },
        );
        let back = FamilyDescriptor::<Cyclo>::from_json(&d.to_json()).unwrap();
        assert_eq!(back, d);
        assert_eq!("t2.3".parse::<Variant>().unwrap(), Variant::T23);
        assert_eq!("T24".parse::<Variant>().unwrap(), Variant::T24);
    }
}
