//! Solutions of `f(xy) = f(x)g(y) + g(x)f(y) − g(x)g(y)`.
//!
//! A pair `(f, g)` solves it exactly when `(f, g, ig)` solves the
//! cosine-sine equation, so every pair is checked against the main
//! classifier as well.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::families::{classify, sample, Classification, Family, Triple, Variant};
use crate::func;
use crate::homomorphisms::{is_sine_solution, Context};
use crate::linalg::rank_of;
use crate::scalar::{max_abs, Cyclo, Scalar};
use crate::semigroup::Semigroup;

/// One of the six solution families, with its data.
#[derive(Debug, Clone, PartialEq)]
pub enum CorFamily<T> {
    /// `f` vanishes on products, `g = 0`.
    Null { f: Vec<T> },
    /// `f ≠ 0` vanishes on products, `g = 2f`.
    Doubled { f: Vec<T> },
    /// `f = α²/(2α−1) χ`, `g = αχ`.
    Scaled { alpha: T, chi: Vec<T> },
    /// Two characters mixed by `β`.
    Mixed { beta: T, chi1: Vec<T>, chi2: Vec<T> },
    /// `f = φ/2 + χ`, `g = φ + χ`.
    HalfSine { chi: Vec<T>, phi: Vec<T> },
    /// `f = φ + χ`, `g = χ`.
    Sine { chi: Vec<T>, phi: Vec<T> },
}

impl<T: Scalar> CorFamily<T> {
    /// Family number, 1–6.
    pub fn number(&self) -> u8 {
        match self {
            CorFamily::Null { .. } => 1,
            CorFamily::Doubled { .. } => 2,
            CorFamily::Scaled { .. } => 3,
            CorFamily::Mixed { .. } => 4,
            CorFamily::HalfSine { .. } => 5,
            CorFamily::Sine { .. } => 6,
        }
    }

    /// `(f, g)` without checking side conditions.
    pub fn pair(&self) -> (Vec<T>, Vec<T>) {
        let half = T::from_ratio(1, 2);
        match self {
            CorFamily::Null { f } => (f.clone(), func::zeros(f.len())),
            CorFamily::Doubled { f } => (f.clone(), func::scale(&T::from_ratio(2, 1), f)),
            CorFamily::Scaled { alpha, chi } => {
                let den = T::from_ratio(2, 1) * alpha.clone() - T::one();
                let coef = alpha.clone() * alpha.clone() * den.inv().expect("α ≠ 1/2");
                (func::scale(&coef, chi), func::scale(alpha, chi))
            }
            CorFamily::Mixed { beta, chi1, chi2 } => {
                let n = chi1.len();
                let two_beta = T::from_ratio(2, 1) * beta.clone();
                let k = (beta.clone() * beta.clone() + T::one()) * two_beta.inv().expect("β ≠ 0");
                let mix = |b: T| {
                    let p = half.clone() * (T::one() + b.clone());
                    let m = half.clone() * (T::one() - b);
                    func::lincomb(n, &[(p, chi1), (m, chi2)])
                };
                (mix(k), mix(beta.clone()))
            }
            CorFamily::HalfSine { chi, phi } => {
                let n = chi.len();
                (
                    func::lincomb(n, &[(half, phi), (T::one(), chi)]),
                    func::add(phi, chi),
                )
            }
            CorFamily::Sine { chi, phi } => (func::add(phi, chi), chi.clone()),
        }
    }

    pub fn map<U: Scalar>(&self, m: impl Fn(&T) -> U) -> CorFamily<U> {
        let v = |x: &Vec<T>| x.iter().map(&m).collect::<Vec<U>>();
        match self {
            CorFamily::Null { f } => CorFamily::Null { f: v(f) },
            CorFamily::Doubled { f } => CorFamily::Doubled { f: v(f) },
            CorFamily::Scaled { alpha, chi } => CorFamily::Scaled { alpha: m(alpha), chi: v(chi) },
            CorFamily::Mixed { beta, chi1, chi2 } => {
                CorFamily::Mixed { beta: m(beta), chi1: v(chi1), chi2: v(chi2) }
            }
            CorFamily::HalfSine { chi, phi } => CorFamily::HalfSine { chi: v(chi), phi: v(phi) },
            CorFamily::Sine { chi, phi } => CorFamily::Sine { chi: v(chi), phi: v(phi) },
        }
    }

    /// Checks the side conditions of the family.
    pub fn validate(&self, s: &Semigroup, tol: f64) -> Result<()> {
        let n = s.order();
        let bad = |m: &str| Err(Error::Constraint(m.into()));
        let char_ok = |v: &[T]| -> Result<bool> {
            func::check_len(v, n)?;
            crate::homomorphisms::is_multiplicative(s, v, tol)
        };
        let nonzero = |v: &[T]| !func::is_zero(v, tol * max_abs(v).max(1.0));
        match self {
            CorFamily::Null { f } | CorFamily::Doubled { f } => {
                func::check_len(f, n)?;
                if !vanishes_on_products(s, f, tol) {
                    return bad("f must vanish on every product xy");
                }
                if self.number() == 2 && !nonzero(f) {
                    return bad("f must be nonzero");
                }
                Ok(())
            }
            CorFamily::Scaled { alpha, chi } => {
                if !char_ok(chi)? || !nonzero(chi) {
                    return bad("χ must be a nonzero multiplicative function");
                }
                let twice = T::from_ratio(2, 1) * alpha.clone() - T::one();
                if alpha.is_negligible(tol) || twice.is_negligible(tol) {
                    return bad("α must avoid 0 and 1/2");
                }
                Ok(())
            }
            CorFamily::Mixed { beta, chi1, chi2 } => {
                if !char_ok(chi1)? || !char_ok(chi2)? {
                    return bad("χ₁, χ₂ must be multiplicative");
                }
                let t = tol * max_abs(chi1).max(max_abs(chi2)).max(1.0);
                if func::approx_eq(chi1, chi2, t) {
                    return bad("χ₁, χ₂ must be distinct");
                }
                if beta.is_negligible(tol) {
                    return bad("β must be nonzero");
                }
                Ok(())
            }
            CorFamily::HalfSine { chi, phi } | CorFamily::Sine { chi, phi } => {
                if !char_ok(chi)? || !nonzero(chi) {
                    return bad("χ must be a nonzero multiplicative function");
                }
                func::check_len(phi, n)?;
                if !nonzero(phi) {
                    return bad("φ must be nonzero");
                }
                if !is_sine_solution(s, phi, chi, tol)? {
                    return bad("φ does not solve the sine addition law for χ");
                }
                Ok(())
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let mut out = json!({ "family": self.number() });
        let put = |out: &mut Value, k: &str, v: &[T]| out[k] = func::to_json(v);
        match self {
            CorFamily::Null { f } | CorFamily::Doubled { f } => put(&mut out, "f", f),
            CorFamily::Scaled { alpha, chi } => {
                out["alpha"] = alpha.to_json();
                put(&mut out, "chi", chi);
            }
            CorFamily::Mixed { beta, chi1, chi2 } => {
                out["beta"] = beta.to_json();
                put(&mut out, "chi1", chi1);
                put(&mut out, "chi2", chi2);
            }
            CorFamily::HalfSine { chi, phi } | CorFamily::Sine { chi, phi } => {
                put(&mut out, "chi", chi);
                put(&mut out, "phi", phi);
            }
        }
        out
    }
}

fn vanishes_on_products<T: Scalar>(s: &Semigroup, f: &[T], tol: f64) -> bool {
    let t = tol * max_abs(f).max(1.0);
    (0..s.order()).filter(|&x| s.is_product(x)).all(|x| f[x].is_negligible(t))
}

/// `f(xy) − f(x)g(y) − g(x)f(y) + g(x)g(y)` in row-major order.
pub fn residuals<T: Scalar>(s: &Semigroup, f: &[T], g: &[T]) -> Vec<T> {
    s.pairs()
        .map(|(x, y)| {
            f[s.mul(x, y)].clone() - f[x].clone() * g[y].clone() - g[x].clone() * f[y].clone()
                + g[x].clone() * g[y].clone()
        })
        .collect()
}

pub fn is_solution<T: Scalar>(s: &Semigroup, f: &[T], g: &[T], tol: f64) -> Result<bool> {
    func::check_len(f, s.order())?;
    func::check_len(g, s.order())?;
    let scale = max_abs(f).max(max_abs(g)).max(1.0);
    Ok(func::is_zero(&residuals(s, f, g), tol * scale * scale))
}

/// The triple `(f, g, ig)`.
pub fn lift<T: Scalar>(f: &[T], g: &[T]) -> Triple<T> {
    Triple::new(f.to_vec(), g.to_vec(), func::scale(&T::imag_unit(), g))
}

/// Builds `(f, g)` for a family after checking its side conditions.
pub fn construct<T: Scalar>(s: &Semigroup, fam: &CorFamily<T>, tol: f64) -> Result<(Vec<T>, Vec<T>)> {
    fam.validate(s, tol)?;
    Ok(fam.pair())
}

#[derive(Debug, Clone)]
pub struct CorClassification<T> {
    /// All matching families, in the order 1..6.
    pub matches: Vec<CorFamily<T>>,
    /// Classification of `(f, g, ig)`.
    pub theorem: Classification<T>,
}

impl<T: Scalar> CorClassification<T> {
    pub fn primary(&self) -> &CorFamily<T> {
        &self.matches[0]
    }

    pub fn numbers(&self) -> Vec<u8> {
        let mut v: Vec<u8> = self.matches.iter().map(CorFamily::number).collect();
        v.dedup();
        v
    }

    /// Whether the classification of `(f, g, ig)` lands where the case
    /// analysis of the reduction puts the primary family: families 1–3 in
    /// the dependent case, 4 in the dependent case when `f, g` are dependent
    /// and in T2.4 otherwise, 5 and 6 in the independent case through T2.2
    /// with `μ = 0` or T2.3 with `c₂ = ±i`.
    pub fn agrees_with_reduction(&self, tol: f64) -> bool {
        let th = &self.theorem;
        match self.primary().number() {
            1..=3 => th.dependent,
            4 => th.dependent || th.variants().contains(&Variant::T24),
            _ => {
                let i = T::imag_unit();
                !th.dependent
                    && th.matches.iter().any(|d| match &d.family {
                        Family::T22 { mu, .. } => func::is_zero(mu, tol),
                        Family::T23 { c2, .. } => {
                            c2.approx_eq(&i, tol) || c2.approx_eq(&-i.clone(), tol)
                        }
                        _ => false,
                    })
            }
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "family": self.primary().number(),
            "families": self.numbers(),
            "matches": self.matches.iter().map(CorFamily::to_json).collect::<Vec<_>>(),
            "cross_check": self.theorem.to_json(),
        })
    }
}

/// Every family matching `(f, g)`, together with the classification of
/// `(f, g, ig)`.
pub fn classify_pair<T: Scalar>(ctx: &Context<T>, f: &[T], g: &[T], tol: f64) -> Result<CorClassification<T>> {
    let s = &ctx.semigroup;
    if !is_solution(s, f, g, tol)? {
        let r = max_abs(&residuals(s, f, g));
        return Err(Error::NotASolution(r));
    }
    let n = s.order();
    let scale = max_abs(f).max(max_abs(g)).max(1.0);
    let t = tol * scale;
    let mut matches = Vec::new();
    let mut offer = |fam: CorFamily<T>| {
        if fam.validate(s, tol).is_ok() {
            let (ff, gg) = fam.pair();
            if func::approx_eq(&ff, f, t) && func::approx_eq(&gg, g, t) && !matches.contains(&fam) {
                matches.push(fam);
            }
        }
    };

    offer(CorFamily::Null { f: f.to_vec() });
    offer(CorFamily::Doubled { f: f.to_vec() });

    let nonzero: Vec<&Vec<T>> = ctx.chars.iter().filter(|c| c.nonzero).map(|c| &c.values).collect();
    for chi in &nonzero {
        if let Some(alpha) = ratio(g, chi, t) {
            offer(CorFamily::Scaled { alpha, chi: chi.to_vec() });
        }
    }

    let chars = ctx.char_values();
    for (a, chi1) in chars.iter().enumerate() {
        for chi2 in &chars[a + 1..] {
            for beta in mixing_constants(g, chi1, chi2, t) {
                offer(CorFamily::Mixed { beta, chi1: chi1.clone(), chi2: chi2.clone() });
            }
        }
    }

    for chi in &nonzero {
        offer(CorFamily::HalfSine { chi: chi.to_vec(), phi: func::sub(g, chi) });
        offer(CorFamily::Sine { chi: chi.to_vec(), phi: func::sub(f, chi) });
    }

    matches.sort_by_key(CorFamily::number);
    let theorem = classify(ctx, &lift(f, g), tol)?;
    if matches.is_empty() {
        return Err(Error::Unclassifiable(format!(
            "no corollary family reconstructs the pair on {n} elements"
        )));
    }
    Ok(CorClassification { matches, theorem })
}

/// `a` with `v = a·w`, when `w ≠ 0` and such an `a` exists.
fn ratio<T: Scalar>(v: &[T], w: &[T], tol: f64) -> Option<T> {
    let x0 = (0..w.len()).max_by(|&a, &b| w[a].abs().total_cmp(&w[b].abs()))?;
    let a = v[x0].checked_div(&w[x0]).ok()?;
    func::approx_eq(v, &func::scale(&a, w), tol).then_some(a)
}

/// Values of `β` with `g = (1+β)/2 χ₁ + (1−β)/2 χ₂`.
fn mixing_constants<T: Scalar>(g: &[T], chi1: &[T], chi2: &[T], tol: f64) -> Vec<T> {
    let two = T::from_ratio(2, 1);
    let one = T::one();
    let z1 = func::is_zero(chi1, tol);
    let z2 = func::is_zero(chi2, tol);
    match (z1, z2) {
        (true, true) => vec![],
        // g = (1−β)/2 χ₂
        (true, false) => ratio(g, chi2, tol).map(|a| one - two * a).into_iter().collect(),
        // g = (1+β)/2 χ₁
        (false, true) => ratio(g, chi1, tol).map(|a| two * a - one).into_iter().collect(),
        (false, false) => {
            if rank_of(&[chi1.to_vec(), chi2.to_vec()]) < 2 {
                return vec![];
            }
            let m = crate::linalg::Matrix::from_columns(&[chi1.to_vec(), chi2.to_vec()]);
            match T::solve(&m, g, tol) {
                Some(x) if (x[0].clone() + x[1].clone() - one).is_negligible(tol) => {
                    vec![x[0].clone() - x[1].clone()]
                }
                _ => vec![],
            }
        }
    }
}

/// A random member of a family, or `None` when the semigroup has none.
pub fn sample<T, R: Rng + ?Sized>(ctx: &Context<T>, family: u8, rng: &mut R) -> Option<CorFamily<Cyclo>> {
    let s = &ctx.semigroup;
    let n = s.order();
    let nonzero: Vec<usize> = (0..ctx.exact_chars.len())
        .filter(|&i| !func::is_zero(&ctx.exact_chars[i], 0.0))
        .collect();
    let off_products = |rng: &mut R| -> Vec<Cyclo> {
        (0..n)
            .map(|x| if s.is_product(x) { Cyclo::from_int(0) } else { sample::scalar(rng) })
            .collect()
    };
    match family {
        1 => Some(CorFamily::Null { f: off_products(rng) }),
        2 => {
            if (0..n).all(|x| s.is_product(x)) {
                return None;
            }
            loop {
                let f = off_products(rng);
                if !func::is_zero(&f, 0.0) {
                    return Some(CorFamily::Doubled { f });
                }
            }
        }
        3 => {
            let chi = ctx.exact_chars[*nonzero.choose(rng)?].clone();
            let alpha = loop {
                let a = sample::nonzero_scalar(rng);
                if a != Cyclo::from_ratio(1, 2) {
                    break a;
                }
            };
            Some(CorFamily::Scaled { alpha, chi })
        }
        4 => {
            if ctx.exact_chars.len() < 2 {
                return None;
            }
            let mut idx: Vec<usize> = (0..ctx.exact_chars.len()).collect();
            idx.shuffle(rng);
            Some(CorFamily::Mixed {
                beta: sample::nonzero_scalar(rng),
                chi1: ctx.exact_chars[idx[0]].clone(),
                chi2: ctx.exact_chars[idx[1]].clone(),
            })
        }
        5 | 6 => {
            let with_sine: Vec<usize> =
                nonzero.into_iter().filter(|&i| !ctx.exact_sine_bases[i].is_empty()).collect();
            let i = *with_sine.choose(rng)?;
            let basis = &ctx.exact_sine_bases[i];
            let phi = loop {
                let coeffs: Vec<Cyclo> = basis.iter().map(|_| sample::scalar(rng)).collect();
                let terms: Vec<(Cyclo, &[Cyclo])> =
                    coeffs.into_iter().zip(basis.iter().map(Vec::as_slice)).collect();
                let v = func::lincomb(n, &terms);
                if !func::is_zero(&v, 0.0) {
                    break v;
                }
            };
            let chi = ctx.exact_chars[i].clone();
            Some(if family == 5 { CorFamily::HalfSine { chi, phi } } else { CorFamily::Sine { chi, phi } })
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::{adjoin_identity, cyclic, null, truncated_add};

    fn v(xs: &[i64]) -> Vec<Cyclo> {
        xs.iter().map(|&x| Cyclo::from_int(x)).collect()
    }

    #[test]
    fn construct_examples() {
        let c2 = cyclic(2).unwrap();
        let (f, g) = construct(&c2, &CorFamily::Scaled { alpha: Cyclo::from_int(1), chi: v(&[1, 1]) }, 0.0).unwrap();
        assert_eq!((f.clone(), g.clone()), (v(&[1, 1]), v(&[1, 1])));
        assert!(is_solution(&c2, &f, &g, 0.0).unwrap());

        let fam = CorFamily::Mixed { beta: Cyclo::from_int(1), chi1: v(&[1, 1]), chi2: v(&[1, -1]) };
        assert_eq!(construct(&c2, &fam, 0.0).unwrap(), (v(&[1, 1]), v(&[1, 1])));

        let t3 = truncated_add(3).unwrap();
        let (f, g) = construct(&t3, &CorFamily::Null { f: v(&[5, 0, 0]) }, 0.0).unwrap();
        assert!(is_solution(&t3, &f, &g, 0.0).unwrap());
        assert!(construct(&t3, &CorFamily::Null { f: v(&[0, 1, 0]) }, 0.0).is_err());
    }

    #[test]
    fn classify_examples() {
        let c2 = cyclic(2).unwrap();
        let ctx = Context::<Cyclo>::new(&c2).unwrap();
        let one = v(&[1, 1]);
        let c = classify_pair(&ctx, &one, &one, 0.0).unwrap();
        assert_eq!(c.primary().number(), 3);
        assert!(c.numbers().contains(&4));
        assert!(c.theorem.dependent);

        let t3 = truncated_add(3).unwrap();
        let ctx = Context::<Cyclo>::new(&t3).unwrap();
        let c = classify_pair(&ctx, &v(&[3, 0, 0]), &v(&[0, 0, 0]), 0.0).unwrap();
        assert_eq!(c.primary().number(), 1);
        assert!(c.agrees_with_reduction(0.0));

        let s = adjoin_identity(&null(2).unwrap());
        let ctx = Context::<Cyclo>::new(&s).unwrap();
        let (chi, phi) = (v(&[0, 0, 1]), v(&[0, 1, 0]));
        let (f, g) = CorFamily::Sine { chi: chi.clone(), phi: phi.clone() }.pair();
        let c = classify_pair(&ctx, &f, &g, 0.0).unwrap();
        assert_eq!(c.primary().number(), 6);
        assert!(!c.theorem.dependent);
        assert!(c.agrees_with_reduction(0.0));
        let (f, g) = CorFamily::HalfSine { chi, phi }.pair();
        let c = classify_pair(&ctx, &f, &g, 0.0).unwrap();
        assert_eq!(c.numbers(), vec![5]);
        assert!(c.agrees_with_reduction(0.0));
    }
}
