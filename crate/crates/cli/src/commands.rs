use cossin::corollary::{self, CorFamily};
use cossin::families::{classify, construct, verify_equation, FamilyDescriptor, Triple};
use cossin::homomorphisms::{
    check_char_independence, decompose_sine_pair, is_multiplicative, sine_in_char_span,
    solve_cosine_sine_psi, solve_sine_addition, witness_rank, CosineSineWitness, MultFunction,
};
use cossin::oracle::{census, survey, OracleConfig};
use cossin::semigroup::{check_associativity, dedup_isomorphic, enumerate_semigroups, parse_expr};
use cossin::{func, Scalar, Semigroup};
use serde_json::{json, Map, Value};

use crate::input::{self, Env};
use crate::{CorArgs, Failure, Outcome};

const FUNCTION_NAMES: [&str; 8] = ["g", "chi", "chi1", "chi2", "chi3", "mu", "phi", "psi"];

pub fn sgp_check(arg: &str) -> Result<Outcome, Failure> {
    let table = input::raw_table(arg)?;
    if let Some((x, y, z)) = check_associativity(&table)? {
        return Ok(Outcome::failed(
            json!({ "associative": false, "witness": [x, y, z] }),
            2,
        ));
    }
    let s = input::semigroup(arg)?;
    let index_period: Vec<Value> = (0..s.order())
        .map(|x| {
            let ip = s.index_period(x);
            json!({ "m": ip.m, "p": ip.p })
        })
        .collect();
    let products: Vec<bool> = (0..s.order()).map(|x| s.is_product(x)).collect();
    Ok(Outcome::ok(json!({
        "associative": true,
        "semigroup": s,
        "commutative": s.is_commutative(),
        "index_period": index_period,
        "is_product": products,
    })))
}

pub fn sgp_make(name: &str, params: &[String]) -> Result<Outcome, Failure> {
    let expr = if params.is_empty() {
        name.to_string()
    } else {
        format!("{name}({})", params.join(","))
    };
    let s = parse_expr(&expr)?;
    Ok(Outcome::ok(json!(s)))
}

pub fn sgp_enum(n: usize, dedup: bool, allow_n4: bool) -> Result<Outcome, Failure> {
    let mut list = enumerate_semigroups(n, allow_n4)?;
    if dedup {
        list = dedup_isomorphic(&list);
    }
    let tables: Vec<&[Vec<usize>]> = list.iter().map(Semigroup::table).collect();
    Ok(Outcome::ok(json!({
        "order": n,
        "dedup": dedup,
        "count": list.len(),
        "tables": tables,
    })))
}

pub fn chars_enum<T: Scalar>(env: &Env<T>, tol: f64) -> Result<Outcome, Failure> {
    let ctx = env.ctx()?;
    let chars: Vec<Value> = ctx
        .chars
        .iter()
        .zip(&ctx.sine_bases)
        .enumerate()
        .map(|(i, (c, b))| {
            json!({
                "index": i,
                "values": func::to_json(&c.values),
                "nonzero": c.nonzero,
                "sine_dim": b.len(),
            })
        })
        .collect();
    let nonzero: Vec<Vec<T>> = ctx
        .chars
        .iter()
        .filter(|c| c.nonzero)
        .map(|c| c.values.clone())
        .collect();
    let rank = check_char_independence(&nonzero, tol)?;
    let report = json!({ "count": chars.len(), "characters": chars, "independence": rank });
    Ok(if rank.independent() {
        Outcome::ok(report)
    } else {
        Outcome::failed(report, 3)
    })
}

fn require_char<T: Scalar>(env: &Env<T>, chi: &[T], tol: f64) -> Result<Option<Outcome>, Failure> {
    Ok((!is_multiplicative(&env.s, chi, tol)?)
        .then(|| Outcome::failed(json!({ "multiplicative": false }), 2)))
}

pub fn sine_solve<T: Scalar>(env: &Env<T>, chi: &str, tol: f64) -> Result<Outcome, Failure> {
    let chi = env.function("chi", chi)?;
    if let Some(out) = require_char(env, &chi, tol)? {
        return Ok(out);
    }
    let basis = solve_sine_addition(&env.s, &chi)?;
    let ctx = env.ctx()?;
    let index = ctx.find_char(&chi, tol.max(1e-9)).unwrap_or(usize::MAX);
    let violation = basis
        .iter()
        .find_map(|phi| sine_in_char_span(ctx, index, phi, tol));
    let report = json!({
        "chi": func::to_json(&chi),
        "dimension": basis.len(),
        "basis": basis.iter().map(|b| func::to_json(b)).collect::<Vec<_>>(),
    });
    Ok(match violation {
        None => Outcome::ok(report),
        Some(v) => {
            let mut report = report;
            report["in_char_span"] = json!({
                "chi1": v.chi1,
                "chi2": v.chi2,
                "coefficients": [v.coefficients.0.to_json(), v.coefficients.1.to_json()],
            });
            Outcome::failed(report, 3)
        }
    })
}

pub fn sine_decompose<T: Scalar>(env: &Env<T>, f: &str, g: &str, tol: f64) -> Result<Outcome, Failure> {
    let (f, g) = (env.function("f", f)?, env.function("g", g)?);
    let chars = env.ctx()?.char_values();
    let d = decompose_sine_pair(&env.s, &f, &g, &chars, tol)?;
    Ok(Outcome::ok(json!({
        "lambda": d.lambda.to_json(),
        "chi1": func::to_json(&d.chi1),
        "chi2": func::to_json(&d.chi2),
    })))
}

pub fn psi_solve<T: Scalar>(env: &Env<T>, chi: &str, phi: &str, tol: f64) -> Result<Outcome, Failure> {
    let chi = env.function("chi", chi)?;
    let phi = env.function("phi", phi)?;
    if let Some(out) = require_char(env, &chi, tol)? {
        return Ok(out);
    }
    let Some(sol) = solve_cosine_sine_psi(&env.s, &chi, &phi, tol)? else {
        return Ok(Outcome::ok(json!({ "solvable": false })));
    };
    let nonzero = |v: &[T]| !func::is_zero(v, tol);
    let mut report = json!({
        "solvable": true,
        "particular": func::to_json(&sol.particular),
        "homogeneous": sol.homogeneous.iter().map(|b| func::to_json(b)).collect::<Vec<_>>(),
    });
    if nonzero(&phi) && nonzero(&sol.particular) {
        let w = CosineSineWitness {
            chi: MultFunction {
                nonzero: nonzero(&chi),
                values: chi,
            },
            phi,
            psi: sol.particular,
        };
        let rank = witness_rank(&w);
        report["rank"] = json!(rank);
        if !rank.independent() {
            return Ok(Outcome::failed(report, 3));
        }
    }
    Ok(Outcome::ok(report))
}

fn descriptor<T: Scalar>(
    env: &Env<T>,
    variant: &str,
    delta: Option<&str>,
    params: Option<&str>,
) -> Result<FamilyDescriptor<T>, Failure> {
    let given = match params {
        Some(p) => input::json("params", p)?,
        None => json!({}),
    };
    let Value::Object(given) = given else {
        return Err(Failure::input("params: expected a JSON object"));
    };
    let (mut scalars, mut functions) = (Map::new(), Map::new());
    for (k, v) in given {
        if FUNCTION_NAMES.contains(&k.as_str()) {
            functions.insert(k.clone(), func::to_json(&env.function_value(&k, &v)?));
        } else {
            scalars.insert(k, v);
        }
    }
    let mut d = json!({ "variant": variant, "params": scalars, "functions": functions });
    if let Some(delta) = delta {
        d["delta"] = input::scalar::<T>("delta", delta)?.to_json();
    }
    Ok(FamilyDescriptor::from_json(&d)?)
}

pub fn cossin_construct<T: Scalar>(
    env: &Env<T>,
    variant: &str,
    delta: Option<&str>,
    params: Option<&str>,
    tol: f64,
) -> Result<Outcome, Failure> {
    let d = descriptor(env, variant, delta, params)?;
    let t = construct(&env.s, &d, tol)?;
    let check = verify_equation(&env.s, &t, tol)?;
    let report = json!({
        "descriptor": d.to_json(),
        "triple": t.to_json(),
        "residual": check.residual,
    });
    // a constructed triple that fails the equation contradicts the theorem
    Ok(if check.solves {
        Outcome::ok(report)
    } else {
        Outcome::failed(report, 3)
    })
}

fn triple<T: Scalar>(env: &Env<T>, f: &str, g: &str, h: &str) -> Result<Triple<T>, Failure> {
    Ok(Triple::new(
        env.function("f", f)?,
        env.function("g", g)?,
        env.function("h", h)?,
    ))
}

pub fn cossin_verify<T: Scalar>(env: &Env<T>, fgh: [&str; 3], tol: f64) -> Result<Outcome, Failure> {
    let t = triple(env, fgh[0], fgh[1], fgh[2])?;
    let check = verify_equation(&env.s, &t, tol)?;
    let report = json!(check);
    Ok(if check.solves {
        Outcome::ok(report)
    } else {
        Outcome::failed(report, 2)
    })
}

pub fn cossin_classify<T: Scalar>(env: &Env<T>, fgh: [&str; 3], tol: f64) -> Result<Outcome, Failure> {
    let t = triple(env, fgh[0], fgh[1], fgh[2])?;
    let c = classify(env.ctx()?, &t, tol)?;
    Ok(Outcome::ok(c.to_json()))
}

pub fn oracle_solve(s: &Semigroup, cfg: &OracleConfig) -> Result<Outcome, Failure> {
    let r = survey(s, cfg)?;
    let critical = !r.critical.is_empty();
    let report = json!(r);
    Ok(if critical {
        Outcome::failed(report, 3)
    } else {
        Outcome::ok(report)
    })
}

pub fn oracle_census(n: usize, cfg: &OracleConfig) -> Result<Outcome, Failure> {
    let r = census(n, cfg)?;
    let critical = r.critical > 0;
    Ok(if critical {
        Outcome::failed(r.to_json(), 3)
    } else {
        Outcome::ok(r.to_json())
    })
}

pub fn cor_construct<T: Scalar>(env: &Env<T>, a: &CorArgs, tol: f64) -> Result<Outcome, Failure> {
    fn need<'a>(family: u8, what: &str, v: &'a Option<String>) -> Result<&'a str, Failure> {
        v.as_deref()
            .ok_or_else(|| Failure::input(format!("family {family} needs --{what}")))
    }
    let fun = |what: &str, v: &Option<String>| env.function(what, need(a.family, what, v)?);
    let fam = match a.family {
        1 => CorFamily::Null { f: fun("f", &a.f)? },
        2 => CorFamily::Doubled { f: fun("f", &a.f)? },
        3 => CorFamily::Scaled {
            alpha: input::scalar("alpha", need(a.family, "alpha", &a.alpha)?)?,
            chi: fun("chi", &a.chi)?,
        },
        4 => CorFamily::Mixed {
            beta: input::scalar("beta", need(a.family, "beta", &a.beta)?)?,
            chi1: fun("chi1", &a.chi1)?,
            chi2: fun("chi2", &a.chi2)?,
        },
        5 => CorFamily::HalfSine {
            chi: fun("chi", &a.chi)?,
            phi: fun("phi", &a.phi)?,
        },
        6 => CorFamily::Sine {
            chi: fun("chi", &a.chi)?,
            phi: fun("phi", &a.phi)?,
        },
        k => return Err(Failure::input(format!("family must be 1-6, got {k}"))),
    };
    let (f, g) = corollary::construct(&env.s, &fam, tol)?;
    let lifted = verify_equation(&env.s, &corollary::lift(&f, &g), tol)?;
    let report = json!({
        "family": fam.to_json(),
        "f": func::to_json(&f),
        "g": func::to_json(&g),
        "lifted": lifted,
    });
    Ok(if lifted.solves {
        Outcome::ok(report)
    } else {
        Outcome::failed(report, 3)
    })
}

pub fn cor_classify<T: Scalar>(env: &Env<T>, f: &str, g: &str, tol: f64) -> Result<Outcome, Failure> {
    let (f, g) = (env.function("f", f)?, env.function("g", g)?);
    let c = corollary::classify_pair(env.ctx()?, &f, &g, tol)?;
    let agrees = c.agrees_with_reduction(tol);
    let mut report = c.to_json();
    report["agrees_with_reduction"] = json!(agrees);
    Ok(if agrees {
        Outcome::ok(report)
    } else {
        Outcome::failed(report, 3)
    })
}
