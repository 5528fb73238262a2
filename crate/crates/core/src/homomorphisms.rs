//! Multiplicative functions and the two linear equations built on them:
//! the sine addition law `φ(xy) = φ(x)χ(y) + χ(x)φ(y)` and the ψ-equation
//! `ψ(xy) = ψ(x)χ(y) + χ(x)ψ(y) + φ(x)φ(y)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::func;
use crate::linalg::{rank_of, Matrix};
use crate::scalar::{max_abs, poly::lcm_u32, principal, Cyclo, Scalar};
use crate::semigroup::Semigroup;

/// Default tolerance for float equation checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Tolerance for a quadratic identity among functions of size `scale`.
pub(crate) fn quad_tol(tol: f64, scale: f64) -> f64 {
    tol * scale.max(1.0).powi(2)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultFunction<T> {
    pub values: Vec<T>,
    pub nonzero: bool,
}

impl<T: Scalar> MultFunction<T> {
    /// Wraps `values` after checking multiplicativity.
    pub fn new(s: &Semigroup, values: Vec<T>, tol: f64) -> Result<Self> {
        if !is_multiplicative(s, &values, tol)? {
            return Err(Error::Precondition("function is not multiplicative".into()));
        }
        let nonzero = !func::is_zero(&values, tol);
        Ok(MultFunction { values, nonzero })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SineSolution<T> {
    pub chi: MultFunction<T>,
    pub phi: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CosineSineWitness<T> {
    pub chi: MultFunction<T>,
    pub phi: Vec<T>,
    pub psi: Vec<T>,
}

/// `χ(xy) − χ(x)χ(y)` over all pairs in row-major order.
pub fn mult_residuals<T: Scalar>(s: &Semigroup, chi: &[T]) -> Vec<T> {
    s.pairs()
        .map(|(x, y)| chi[s.mul(x, y)].clone() - chi[x].clone() * chi[y].clone())
        .collect()
}

/// `φ(xy) − φ(x)g(y) − g(x)φ(y)` over all pairs.
pub fn sine_residuals<T: Scalar>(s: &Semigroup, phi: &[T], g: &[T]) -> Vec<T> {
    s.pairs()
        .map(|(x, y)| {
            phi[s.mul(x, y)].clone() - phi[x].clone() * g[y].clone() - g[x].clone() * phi[y].clone()
        })
        .collect()
}

/// `ψ(xy) − ψ(x)χ(y) − χ(x)ψ(y) − φ(x)φ(y)` over all pairs.
pub fn psi_residuals<T: Scalar>(s: &Semigroup, psi: &[T], chi: &[T], phi: &[T]) -> Vec<T> {
    sine_residuals(s, psi, chi)
        .into_iter()
        .zip(s.pairs())
        .map(|(r, (x, y))| r - phi[x].clone() * phi[y].clone())
        .collect()
}

fn scale_of<T: Scalar>(fs: &[&[T]]) -> f64 {
    fs.iter().map(|f| max_abs(f)).fold(0.0, f64::max)
}

pub fn is_multiplicative<T: Scalar>(s: &Semigroup, chi: &[T], tol: f64) -> Result<bool> {
    func::check_len(chi, s.order())?;
    let t = quad_tol(tol, scale_of(&[chi]));
    Ok(func::is_zero(&mult_residuals(s, chi), t))
}

pub fn is_sine_solution<T: Scalar>(s: &Semigroup, phi: &[T], g: &[T], tol: f64) -> Result<bool> {
    func::check_len(phi, s.order())?;
    func::check_len(g, s.order())?;
    let t = quad_tol(tol, scale_of(&[phi, g]));
    Ok(func::is_zero(&sine_residuals(s, phi, g), t))
}

pub fn is_psi_solution<T: Scalar>(
    s: &Semigroup,
    psi: &[T],
    chi: &[T],
    phi: &[T],
    tol: f64,
) -> Result<bool> {
    for f in [psi, chi, phi] {
        func::check_len(f, s.order())?;
    }
    let t = quad_tol(tol, scale_of(&[psi, chi, phi]));
    Ok(func::is_zero(&psi_residuals(s, psi, chi, phi), t))
}

/// Multiplicative functions in exponent form: `None` is the value 0 and
/// `Some(k)` is `ζ_order^k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentTable {
    pub order: u32,
    pub chars: Vec<Vec<Option<u32>>>,
}

impl ExponentTable {
    pub fn to_cyclo(&self) -> Result<Vec<Vec<Cyclo>>> {
        self.chars
            .iter()
            .map(|c| {
                c.iter()
                    .map(|e| match e {
                        None => Ok(Cyclo::from_int(0)),
                        Some(k) => Cyclo::root_of_unity(self.order, *k as i64),
                    })
                    .collect()
            })
            .collect()
    }
}

/// Backtracking search over `χ(x) ∈ {0} ∪ μ_p(x)`, where `p(x)` is the
/// period of `x`. Candidates are tried in the order `0, ζ^0, ζ^1, …`, so the
/// output is sorted lexicographically in that order.
pub fn enumerate_exponents(s: &Semigroup) -> Result<ExponentTable> {
    let n = s.order();
    let periods: Vec<u32> = (0..n).map(|x| s.index_period(x).p as u32).collect();
    let order = periods.iter().try_fold(1u32, |acc, &p| {
        let l = lcm_u32(acc, p);
        if l > crate::scalar::order_cap() as u64 {
            Err(Error::OrderOverflow {
                order: l,
                cap: crate::scalar::order_cap(),
            })
        } else {
            Ok(l as u32)
        }
    })?;
    let candidates: Vec<Vec<Option<u32>>> = periods
        .iter()
        .map(|&p| {
            std::iter::once(None)
                .chain((0..p).map(|k| Some(k * (order / p))))
                .collect()
        })
        .collect();

    let mul = |a: Option<u32>, b: Option<u32>| match (a, b) {
        (Some(i), Some(j)) => Some((i + j) % order),
        _ => None,
    };
    // after assigning element k, every pair among 0..=k whose product is
    // also assigned must be consistent
    let consistent = |vals: &[Option<u32>], k: usize| {
        (0..=k).all(|x| {
            [(x, k), (k, x)].iter().all(|&(a, b)| {
                let c = s.mul(a, b);
                c > k || vals[c] == mul(vals[a], vals[b])
            })
        }) && (0..k).all(|a| {
            (0..k).all(|b| {
                let c = s.mul(a, b);
                c != k || vals[c] == mul(vals[a], vals[b])
            })
        })
    };

    let mut chars = Vec::new();
    let mut vals = vec![None; n];
    fn rec(
        k: usize,
        vals: &mut Vec<Option<u32>>,
        candidates: &[Vec<Option<u32>>],
        consistent: &dyn Fn(&[Option<u32>], usize) -> bool,
        out: &mut Vec<Vec<Option<u32>>>,
    ) {
        if k == vals.len() {
            out.push(vals.clone());
            return;
        }
        for &c in &candidates[k] {
            vals[k] = c;
            if consistent(vals, k) {
                rec(k + 1, vals, candidates, consistent, out);
            }
        }
    }
    rec(0, &mut vals, &candidates, &consistent, &mut chars);
    Ok(ExponentTable { order, chars })
}

/// Every multiplicative `χ: S → ℂ`, including `χ ≡ 0`, with exact values.
pub fn enumerate_multiplicative(s: &Semigroup) -> Result<Vec<MultFunction<Cyclo>>> {
    let table = enumerate_exponents(s)?;
    Ok(table
        .to_cyclo()?
        .into_iter()
        .map(|values| {
            let nonzero = values.iter().any(|v| !num_traits::Zero::is_zero(v));
            MultFunction { values, nonzero }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub count: usize,
    pub rank: usize,
}

impl RankReport {
    pub fn independent(&self) -> bool {
        self.rank == self.count
    }
}

/// Rank of the value matrix of distinct nonzero characters. Independence is
/// a theorem; a deficient rank is reported, not treated as an error.
pub fn check_char_independence<T: Scalar>(chars: &[Vec<T>], tol: f64) -> Result<RankReport> {
    for (i, c) in chars.iter().enumerate() {
        if func::is_zero(c, tol) {
            return Err(Error::Precondition(format!("character {i} is zero")));
        }
        if let Some(j) = chars[..i].iter().position(|d| func::approx_eq(c, d, tol)) {
            return Err(Error::Precondition(format!(
                "characters {j} and {i} coincide"
            )));
        }
    }
    Ok(RankReport {
        count: chars.len(),
        rank: rank_of(chars),
    })
}

/// Coefficient matrix of `φ ↦ (φ(xy) − φ(x)χ(y) − χ(x)φ(y))` over all pairs.
fn sine_operator<T: Scalar>(s: &Semigroup, chi: &[T]) -> Matrix<T> {
    let n = s.order();
    let mut m: Matrix<T> = Matrix::zeros(n * n, n);
    for (row, (x, y)) in s.pairs().enumerate() {
        let xy = s.mul(x, y);
        m[(row, xy)] = m[(row, xy)].clone() + T::one();
        m[(row, x)] = m[(row, x)].clone() - chi[y].clone();
        m[(row, y)] = m[(row, y)].clone() - chi[x].clone();
    }
    m
}

/// Basis of `{φ : φ(xy) = φ(x)χ(y) + χ(x)φ(y)}`.
pub fn solve_sine_addition<T: Scalar>(s: &Semigroup, chi: &[T]) -> Result<Vec<Vec<T>>> {
    func::check_len(chi, s.order())?;
    Ok(T::null_space(&sine_operator(s, chi)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiSolution<T> {
    pub particular: Vec<T>,
    pub homogeneous: Vec<Vec<T>>,
}

/// Solves the ψ-equation for given `(χ, φ)`; `None` when it has no solution.
pub fn solve_cosine_sine_psi<T: Scalar>(
    s: &Semigroup,
    chi: &[T],
    phi: &[T],
    tol: f64,
) -> Result<Option<PsiSolution<T>>> {
    if !is_sine_solution(s, phi, chi, tol)? {
        return Err(Error::Precondition(
            "φ does not solve the sine addition law for χ".into(),
        ));
    }
    let m = sine_operator(s, chi);
    let b: Vec<T> = s
        .pairs()
        .map(|(x, y)| phi[x].clone() * phi[y].clone())
        .collect();
    let t = quad_tol(tol, scale_of(&[chi, phi]));
    Ok(T::solve(&m, &b, t).map(|particular| PsiSolution {
        particular,
        homogeneous: T::null_space(&m),
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SinePairDecomposition<T> {
    pub lambda: T,
    pub chi1: Vec<T>,
    pub chi2: Vec<T>,
}

/// Writes a solution `(f, g)` of `f(xy) = f(x)g(y) + g(x)f(y)` with `f ≠ 0`
/// as `2λf = χ₁ − χ₂`, `g = (χ₁ + χ₂)/2` with multiplicative `χ₁, χ₂`.
///
/// `λ² = (g(xy) − g(x)g(y)) / (f(x)f(y))` is read off at a pair with
/// `f(x)f(y) ≠ 0` and checked at every pair. `λ` is the root with positive
/// real part; `(−λ, χ₂, χ₁)` is the other valid answer. Exact square roots
/// that [`Scalar::sqrt`] cannot produce are recovered by matching `g + λf`
/// against `known_chars`.
pub fn decompose_sine_pair<T: Scalar>(
    s: &Semigroup,
    f: &[T],
    g: &[T],
    known_chars: &[Vec<T>],
    tol: f64,
) -> Result<SinePairDecomposition<T>> {
    func::check_len(f, s.order())?;
    func::check_len(g, s.order())?;
    let scale = scale_of(&[f, g]);
    let t = quad_tol(tol, scale);
    if func::is_zero(f, tol * scale.max(1.0)) {
        return Err(Error::Precondition("f is zero".into()));
    }
    if !is_sine_solution(s, f, g, tol)? {
        return Err(Error::NotSinePair("f(xy) ≠ f(x)g(y) + g(x)f(y)".into()));
    }
    let x0 = (0..s.order())
        .max_by(|&a, &b| f[a].abs().total_cmp(&f[b].abs()))
        .expect("nonempty");
    let x0x0 = s.mul(x0, x0);
    let c = (g[x0x0].clone() - g[x0].clone() * g[x0].clone())
        .checked_div(&(f[x0].clone() * f[x0].clone()))?;
    for (x, y) in s.pairs() {
        let lhs = g[s.mul(x, y)].clone() - g[x].clone() * g[y].clone();
        let rhs = c.clone() * f[x].clone() * f[y].clone();
        if !(lhs - rhs).is_negligible(t * c.abs().max(1.0)) {
            return Err(Error::NotSinePair(format!(
                "λ² is not constant (pair ({x},{y}))"
            )));
        }
    }

    let lambda = match c.sqrt() {
        Some(l) => principal(l),
        None => {
            let found = known_chars.iter().find_map(|chi| {
                let l = (chi[x0].clone() - g[x0].clone()).checked_div(&f[x0]).ok()?;
                (l.clone() * l.clone()).approx_eq(&c, t).then_some(l)
            });
            principal(found.ok_or_else(|| Error::NotSinePair("no square root of λ² found".into()))?)
        }
    };
    let lf = func::scale(&lambda, f);
    let chi1 = func::add(g, &lf);
    let chi2 = func::sub(g, &lf);
    for chi in [&chi1, &chi2] {
        if !is_multiplicative(s, chi, tol)? {
            return Err(Error::NotSinePair("g ± λf is not multiplicative".into()));
        }
    }
    Ok(SinePairDecomposition { lambda, chi1, chi2 })
}

/// Exact characters and their sine-solution spaces for one semigroup,
/// embedded into the scalar type `T`.
#[derive(Debug, Clone)]
pub struct Context<T> {
    pub semigroup: Semigroup,
    pub chars: Vec<MultFunction<T>>,
    /// `sine_bases[i]` spans the χ-sine solutions for `chars[i]`.
    pub sine_bases: Vec<Vec<Vec<T>>>,
    /// Exact values, kept for re-embedding.
    pub exact_chars: Vec<Vec<Cyclo>>,
    pub exact_sine_bases: Vec<Vec<Vec<Cyclo>>>,
}

impl<T: Scalar> Context<T> {
    pub fn new(s: &Semigroup) -> Result<Self> {
        let exact = enumerate_multiplicative(s)?;
        let exact_sine_bases: Vec<Vec<Vec<Cyclo>>> = exact
            .iter()
            .map(|c| solve_sine_addition(s, &c.values))
            .collect::<Result<_>>()?;
        let chars = exact
            .iter()
            .map(|c| MultFunction {
                values: func::from_exact(&c.values),
                nonzero: c.nonzero,
            })
            .collect();
        let sine_bases = exact_sine_bases
            .iter()
            .map(|b| b.iter().map(|v| func::from_exact(v)).collect())
            .collect();
        Ok(Context {
            semigroup: s.clone(),
            chars,
            sine_bases,
            exact_chars: exact.into_iter().map(|c| c.values).collect(),
            exact_sine_bases,
        })
    }

    pub fn char_values(&self) -> Vec<Vec<T>> {
        self.chars.iter().map(|c| c.values.clone()).collect()
    }

    /// Index of the character equal to `chi` within `tol`.
    pub fn find_char(&self, chi: &[T], tol: f64) -> Option<usize> {
        let t = tol * max_abs(chi).max(1.0);
        self.chars
            .iter()
            .position(|c| func::approx_eq(&c.values, chi, t))
    }

    /// Witnesses `(χ, φ, ψ)` with `φ` running over the sine basis of every
    /// character and `ψ` the particular ψ-solution, when one exists.
    pub fn witnesses(&self, tol: f64) -> Result<Vec<CosineSineWitness<T>>> {
        let mut out = Vec::new();
        for (chi, basis) in self.chars.iter().zip(&self.sine_bases) {
            for phi in basis {
                if let Some(sol) = solve_cosine_sine_psi(&self.semigroup, &chi.values, phi, tol)? {
                    out.push(CosineSineWitness {
                        chi: chi.clone(),
                        phi: phi.clone(),
                        psi: sol.particular,
                    });
                }
            }
        }
        Ok(out)
    }
}

/// A nonzero χ-sine solution that is a combination of two distinct nonzero
/// characters. None is expected to exist.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SineInCharSpan<T> {
    pub chi: usize,
    pub chi1: usize,
    pub chi2: usize,
    pub coefficients: (T, T),
}

pub fn sine_in_char_span<T: Scalar>(
    ctx: &Context<T>,
    chi: usize,
    phi: &[T],
    tol: f64,
) -> Option<SineInCharSpan<T>> {
    let nonzero: Vec<usize> = (0..ctx.chars.len())
        .filter(|&i| ctx.chars[i].nonzero)
        .collect();
    for (a, &i) in nonzero.iter().enumerate() {
        for &j in &nonzero[a + 1..] {
            let m =
                Matrix::from_columns(&[ctx.chars[i].values.clone(), ctx.chars[j].values.clone()]);
            if let Some(x) = T::solve(&m, phi, tol) {
                return Some(SineInCharSpan {
                    chi,
                    chi1: i,
                    chi2: j,
                    coefficients: (x[0].clone(), x[1].clone()),
                });
            }
        }
    }
    None
}

/// Rank of `{ψ, χ, φ}` (or `{ψ, φ}` when `χ = 0`) for a witness with
/// nonzero `φ` and `ψ`; full rank is expected.
pub fn witness_rank<T: Scalar>(w: &CosineSineWitness<T>) -> RankReport {
    let mut rows = vec![w.psi.clone(), w.phi.clone()];
    if w.chi.nonzero {
        rows.push(w.chi.values.clone());
    }
    RankReport {
        count: rows.len(),
        rank: rank_of(&rows),
    }
}
