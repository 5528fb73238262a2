//! Brute-force numerical solutions of the equation, found without using
//! any of the structure theory, and a census that classifies them.
//!
//! The `n²` residuals are holomorphic in the `3n` unknowns, so a complex
//! Levenberg–Marquardt iteration
//! `(JᴴJ + μI) Δ = −Jᴴ r` is used directly. The damping starts at
//! [`MU_START`], is divided by 3 after an accepted step and multiplied by 4
//! after a rejected one.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::max_abs;
use crate::families::{classify, residuals, Triple};
use crate::homomorphisms::Context;
use crate::semigroup::{enumerate_semigroups, Semigroup};

pub const MU_START: f64 = 1e-3;
/// Iteration budget of [`polish`].
pub const POLISH_ITER: usize = 100;
/// Points closer than this (max-norm) are merged.
pub const DEDUP_DIST: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleConfig {
    pub attempts: usize,
    pub tol: f64,
    pub classify_tol: f64,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { attempts: 200, tol: 1e-10, classify_tol: 1e-6, seed: 0, max_iter: 500 }
    }
}

impl OracleConfig {
    pub fn check(&self) -> Result<()> {
        if self.attempts == 0 {
            return Err(Error::InvalidParameter("attempts must be at least 1".into()));
        }
        if !(self.tol > 0.0 && self.classify_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        Ok(())
    }
}

fn pack(t: &Triple<Complex64>) -> DVector<Complex64> {
    DVector::from_iterator(3 * t.len(), t.f.iter().chain(&t.g).chain(&t.h).copied())
}

fn unpack(z: &DVector<Complex64>) -> Triple<Complex64> {
    let n = z.len() / 3;
    let part = |k: usize| z.rows(k * n, n).iter().copied().collect();
    Triple::new(part(0), part(1), part(2))
}

fn residual_vec(s: &Semigroup, z: &DVector<Complex64>) -> DVector<Complex64> {
    DVector::from_vec(residuals(s, &unpack(z)))
}

fn inf_norm(v: &DVector<Complex64>) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Residual sizes are compared as `max |r|`.
pub fn residual_norm(s: &Semigroup, t: &Triple<Complex64>) -> f64 {
    inf_norm(&residual_vec(s, &pack(t)))
}

fn jacobian(s: &Semigroup, z: &DVector<Complex64>) -> DMatrix<Complex64> {
    let n = s.order();
    let (f, g, h) = (z.rows(0, n), z.rows(n, n), z.rows(2 * n, n));
    let mut j = DMatrix::zeros(n * n, 3 * n);
    for (row, (x, y)) in s.pairs().enumerate() {
        j[(row, s.mul(x, y))] += Complex64::new(1.0, 0.0);
        j[(row, x)] -= g[y];
        j[(row, y)] -= g[x];
        j[(row, n + x)] -= f[y];
        j[(row, n + y)] -= f[x];
        j[(row, 2 * n + x)] -= h[y];
        j[(row, 2 * n + y)] -= h[x];
    }
    j
}

fn lm_step(j: &DMatrix<Complex64>, r: &DVector<Complex64>, mu: f64) -> Option<DVector<Complex64>> {
    let jh = j.adjoint();
    let mut a = &jh * j;
    for k in 0..a.nrows() {
        a[(k, k)] += Complex64::new(mu, 0.0);
    }
    let rhs = -(&jh * r);
    a.cholesky().map(|c| c.solve(&rhs))
}

/// Result of one local solve.
#[derive(Debug, Clone)]
pub struct Descent {
    pub point: Triple<Complex64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Damped least squares from `start` until `max |r| ≤ tol` or `max_iter`.
pub fn descend(s: &Semigroup, start: &Triple<Complex64>, tol: f64, max_iter: usize) -> Descent {
    let mut z = pack(start);
    let mut r = residual_vec(s, &z);
    let mut cost = r.norm_squared();
    let mut mu = MU_START;
    let mut it = 0;
    while it < max_iter && inf_norm(&r) > tol {
        it += 1;
        let j = jacobian(s, &z);
        let Some(step) = lm_step(&j, &r, mu) else {
            mu *= 4.0;
            continue;
        };
        let trial = &z + &step;
        let rt = residual_vec(s, &trial);
        let ct = rt.norm_squared();
        if ct < cost {
            z = trial;
            r = rt;
            cost = ct;
            mu = (mu / 3.0).max(1e-15);
        } else {
            mu *= 4.0;
            if mu > 1e12 {
                break;
            }
        }
    }
    Descent { residual: inf_norm(&r), point: unpack(&z), iterations: it }
}

/// `a·b` as an unevaluated sum `p + e`, exact.
fn two_prod(a: f64, b: f64) -> [f64; 2] {
    let p = a * b;
    [p, a.mul_add(b, -p)]
}

/// Neumaier's compensated sum.
fn compensated_sum(terms: &[f64]) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for &x in terms {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + comp
}

/// A point stored as `hi + lo` with `|lo| ≲ ε|hi|` per coordinate.
struct Wide {
    hi: DVector<Complex64>,
    lo: DVector<Complex64>,
}

impl Wide {
    fn sub_assign(&mut self, step: &DVector<Complex64>) {
        let split = |hi: f64, lo: f64, d: f64| {
            let s = hi - d;
            let bb = s - hi;
            let err = (hi - (s - bb)) + (-d - bb);
            let lo = lo + err;
            let h = s + lo;
            (h, lo - (h - s))
        };
        for k in 0..self.hi.len() {
            let (h, l) = (self.hi[k], self.lo[k]);
            let (re, re_lo) = split(h.re, l.re, step[k].re);
            let (im, im_lo) = split(h.im, l.im, step[k].im);
            self.hi[k] = Complex64::new(re, im);
            self.lo[k] = Complex64::new(re_lo, im_lo);
        }
    }

    /// Residuals with roughly twice the working precision, rounded at the end.
    fn residuals(&self, s: &Semigroup) -> DVector<Complex64> {
        let n = s.order();
        let (hi, lo) = (&self.hi, &self.lo);
        let mut re = Vec::with_capacity(20);
        let mut im = Vec::with_capacity(20);
        let mut out = DVector::zeros(n * n);
        for (row, (x, y)) in s.pairs().enumerate() {
            re.clear();
            im.clear();
            let xy = s.mul(x, y);
            re.extend([hi[xy].re, lo[xy].re]);
            im.extend([hi[xy].im, lo[xy].im]);
            for (a, b) in [(x, n + y), (n + x, y), (2 * n + x, 2 * n + y)] {
                let (ah, bh) = (hi[a], hi[b]);
                let cross = ah * lo[b] + lo[a] * bh;
                let [p, e] = two_prod(ah.re, bh.re);
                let [q, f] = two_prod(ah.im, bh.im);
                re.extend([-p, -e, q, f, -cross.re]);
                let [p, e] = two_prod(ah.re, bh.im);
                let [q, f] = two_prod(ah.im, bh.re);
                im.extend([-p, -e, -q, -f, -cross.im]);
            }
            out[row] = Complex64::new(compensated_sum(&re), compensated_sum(&im));
        }
        out
    }
}

/// Gauss–Newton from `t` with the residual evaluated in extended precision.
///
/// The iteration runs on `(s²f, g, sh)`, which solves the equation if and
/// only if `(f, g, h)` does, with `s` a power of two making `f` and `h²`
/// of size about 1. When `f` is small the directions towards a
/// non-reduced component otherwise fall below the singular value cut.
///
/// Some components of the solution set are non-reduced: the residual grows
/// like the square of the distance to them, so in plain double precision a
/// point with residual `1e-16` can still sit `1e-8` away. Steps are solved
/// in double precision, but the point and its residual carry about twice
/// the working precision, which brings such points to within rounding of
/// the component.
pub fn polish(s: &Semigroup, t: &Triple<Complex64>, max_iter: usize) -> Descent {
    let size = max_abs(&t.f).max(max_abs(&t.h).powi(2));
    let k = if size > 0.0 {
        (-size.log2() / 2.0).round().clamp(-60.0, 60.0) as i32
    } else {
        0
    };
    let up = Complex64::new(2f64.powi(k), 0.0);
    let down = Complex64::new(2f64.powi(-k), 0.0);
    let mut d = polish_frame(s, &t.rescale(&up), max_iter);
    d.point = d.point.rescale(&down);
    d.residual = residual_norm(s, &d.point);
    d
}

fn polish_frame(s: &Semigroup, t: &Triple<Complex64>, max_iter: usize) -> Descent {
    let hi = pack(t);
    let mut z = Wide { lo: DVector::zeros(hi.len()), hi };
    let mut r = z.residuals(s);
    let mut best = (inf_norm(&r), z.hi.clone());
    let mut it = 0;
    // Full steps, not monotone: near a singular solution the residual can
    // rise briefly while the distance keeps falling.
    while it < max_iter && best.0 > 0.0 {
        it += 1;
        let svd = jacobian(s, &z.hi).svd(true, true);
        let cut = svd.singular_values.max() * 1e-15;
        let Ok(step) = svd.solve(&r, cut) else { break };
        z.sub_assign(&step);
        r = z.residuals(s);
        let res = inf_norm(&r);
        if !res.is_finite() {
            break;
        }
        if res < best.0 {
            best = (res, &z.hi + &z.lo);
        }
    }
    let point = unpack(&best.1);
    Descent { residual: residual_norm(s, &point), point, iterations: it }
}

/// Size of one undamped Gauss–Newton step at `t` (minimum-norm). Exact
/// solutions are fixed points, so this is tiny for them.
pub fn newton_step_size(s: &Semigroup, t: &Triple<Complex64>) -> f64 {
    let z = pack(t);
    let r = residual_vec(s, &z);
    let j = jacobian(s, &z);
    match j.svd(true, true).solve(&r, 1e-12) {
        Ok(step) => inf_norm(&step),
        Err(_) => f64::INFINITY,
    }
}

fn gaussian_start(n: usize, rng: &mut ChaCha8Rng) -> Triple<Complex64> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut draw = || {
        (0..n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re * scale, im * scale)
            })
            .collect::<Vec<_>>()
    };
    let (f, g, h) = (draw(), draw(), draw());
    Triple::new(f, g, h)
}

/// Seed of start `k`; start 0 is the origin.
fn start_seed(master: u64, k: usize) -> u64 {
    master ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn distance(a: &Triple<Complex64>, b: &Triple<Complex64>) -> f64 {
    a.f.iter()
        .chain(&a.g)
        .chain(&a.h)
        .zip(b.f.iter().chain(&b.g).chain(&b.h))
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct OraclePoint {
    pub start: usize,
    pub triple: Triple<Complex64>,
    pub residual: f64,
}

/// Converged, deduplicated points in start order. Start 0 is the origin,
/// so the zero solution is always among them.
pub fn oracle_solve(s: &Semigroup, cfg: &OracleConfig) -> Result<(Vec<OraclePoint>, usize)> {
    cfg.check()?;
    let n = s.order();
    if n > 4 {
        return Err(Error::InvalidParameter(format!("the oracle handles order ≤ 4, got {n}")));
    }
    let runs: Vec<Option<OraclePoint>> = (0..cfg.attempts)
        .into_par_iter()
        .map(|k| {
            let start = if k == 0 {
                Triple::zero(n)
            } else {
                gaussian_start(n, &mut ChaCha8Rng::seed_from_u64(start_seed(cfg.seed, k)))
            };
            let d = descend(s, &start, cfg.tol, cfg.max_iter);
            (d.residual <= cfg.tol).then_some(OraclePoint { start: k, triple: d.point, residual: d.residual })
        })
        .collect();
    let failed = runs.iter().filter(|r| r.is_none()).count();
    let mut kept: Vec<OraclePoint> = Vec::new();
    for p in runs.into_iter().flatten() {
        if kept.iter().all(|q| distance(&q.triple, &p.triple) >= DEDUP_DIST) {
            kept.push(p);
        }
    }
    Ok((kept, failed))
}

#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub start: usize,
    pub triple: Value,
    pub residual: f64,
    pub family: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SemigroupReport {
    pub table: Vec<Vec<usize>>,
    pub converged: usize,
    pub failed_starts: usize,
    pub counts: BTreeMap<String, usize>,
    pub points: Vec<PointReport>,
    pub critical: Vec<PointReport>,
}

/// Solves and classifies on one semigroup.
pub fn survey(s: &Semigroup, cfg: &OracleConfig) -> Result<SemigroupReport> {
    let ctx = Context::<Complex64>::new(s)?;
    let (points, failed) = oracle_solve(s, cfg)?;
    let classified: Vec<(PointReport, bool)> = points
        .par_iter()
        .map(|p| {
            let mut triple = p.triple.clone();
            let mut residual = p.residual;
            let mut found = classify(&ctx, &triple, cfg.classify_tol).ok();
            if found.is_none() {
                let d = polish(s, &triple, POLISH_ITER);
                triple = d.point;
                residual = d.residual;
                found = classify(&ctx, &triple, cfg.classify_tol).ok();
            }
            let family = found.map(|c| c.primary.variant().name().to_string());
            let ok = family.is_some();
            (PointReport { start: p.start, triple: triple.to_json(), residual, family }, ok)
        })
        .collect();
    let mut counts = BTreeMap::new();
    let mut report = SemigroupReport {
        table: s.table().to_vec(),
        converged: classified.len(),
        failed_starts: failed,
        counts: BTreeMap::new(),
        points: Vec::new(),
        critical: Vec::new(),
    };
    for (p, ok) in classified {
        if ok {
            *counts.entry(p.family.clone().expect("classified")).or_insert(0) += 1;
            report.points.push(p);
        } else {
            report.critical.push(p);
        }
    }
    report.counts = counts;
    Ok(report)
}

pub const COVERAGE: &str = "starts are the origin plus standard complex Gaussians of scale 1; \
family parameters are unbounded, so only the sampled region of each solution set is covered";

#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub order: usize,
    pub coverage: &'static str,
    pub config: OracleConfig,
    pub semigroups: usize,
    pub converged: usize,
    pub critical: usize,
    pub counts: BTreeMap<String, usize>,
    pub reports: Vec<SemigroupReport>,
}

impl CensusReport {
    pub fn to_json(&self) -> Value {
        json!(self)
    }
}

/// Runs [`survey`] on every associative table of order `n ≤ 3`.
pub fn census(n: usize, cfg: &OracleConfig) -> Result<CensusReport> {
    if n > 3 {
        return Err(Error::InvalidParameter(format!("census covers order ≤ 3, got {n}")));
    }
    let tables = enumerate_semigroups(n, false)?;
    let reports: Vec<SemigroupReport> = tables.iter().map(|s| survey(s, cfg)).collect::<Result<_>>()?;
    let mut counts = BTreeMap::new();
    for r in &reports {
        for (k, v) in &r.counts {
            *counts.entry(k.clone()).or_insert(0) += v;
        }
    }
    Ok(CensusReport {
        order: n,
        coverage: COVERAGE,
        config: cfg.clone(),
        semigroups: reports.len(),
        converged: reports.iter().map(|r| r.converged).sum(),
        critical: reports.iter().map(|r| r.critical.len()).sum(),
        counts,
        reports,
    })
}
