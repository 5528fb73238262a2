//! Turning command-line arguments into semigroups, functions and scalars.
//!
//! A semigroup argument is a file, inline JSON (`{"table": ...}` or a bare
//! table) or an expression such as `adjoin_identity(null(2))`. A function
//! argument is a file, inline JSON (an array or `{"values": [...]}`), or a
//! reference `char:K` / `sine:K:J` to the K-th enumerated character or the
//! J-th basis vector of its sine solutions.

use std::cell::OnceCell;
use std::path::Path;

use cossin::homomorphisms::Context;
use cossin::semigroup::parse_expr;
use cossin::{func, Scalar, Semigroup};
use serde_json::Value;

use crate::Failure;

fn source(arg: &str) -> Result<String, Failure> {
    let p = Path::new(arg);
    if p.is_file() {
        std::fs::read_to_string(p).map_err(|e| Failure::input(format!("{arg}: {e}")))
    } else {
        Ok(arg.to_string())
    }
}

fn looks_like_json(text: &str) -> bool {
    matches!(text.trim_start().chars().next(), Some('{' | '[' | '"'))
}

pub fn json(what: &str, text: &str) -> Result<Value, Failure> {
    serde_json::from_str(text).map_err(|e| {
        Failure::input(format!(
            "{what}: line {} column {}: {e}",
            e.line(),
            e.column()
        ))
    })
}

fn table_of(what: &str, v: &Value) -> Result<Value, Failure> {
    match v {
        Value::Array(_) => Ok(serde_json::json!({ "table": v })),
        Value::Object(m) if m.contains_key("semigroup") => table_of(what, &m["semigroup"]),
        Value::Object(_) => Ok(v.clone()),
        _ => Err(Failure::input(format!("{what}: expected a table or an object with `table`"))),
    }
}

pub fn semigroup(arg: &str) -> Result<Semigroup, Failure> {
    let text = source(arg)?;
    if looks_like_json(&text) {
        let v = table_of("semigroup", &json("semigroup", &text)?)?;
        serde_json::from_value(v).map_err(|e| Failure::input(format!("semigroup: {e}")))
    } else {
        Ok(parse_expr(text.trim())?)
    }
}

/// The table as given, without requiring associativity.
pub fn raw_table(arg: &str) -> Result<Vec<Vec<usize>>, Failure> {
    let text = source(arg)?;
    if !looks_like_json(&text) {
        return Ok(parse_expr(text.trim())?.table().to_vec());
    }
    let v = table_of("table", &json("table", &text)?)?;
    serde_json::from_value(v["table"].clone())
        .map_err(|e| Failure::input(format!("table: {e}")))
}

pub fn scalar<T: Scalar>(what: &str, arg: &str) -> Result<T, Failure> {
    let v = serde_json::from_str(arg).unwrap_or_else(|_| Value::String(arg.to_string()));
    T::from_json(&v).map_err(|e| Failure::input(format!("{what}: {e}")))
}

/// A semigroup together with its lazily computed characters.
pub struct Env<T: Scalar> {
    pub s: Semigroup,
    ctx: OnceCell<Context<T>>,
}

impl<T: Scalar> Env<T> {
    pub fn new(arg: &str) -> Result<Self, Failure> {
        Ok(Env {
            s: semigroup(arg)?,
            ctx: OnceCell::new(),
        })
    }

    pub fn ctx(&self) -> Result<&Context<T>, Failure> {
        if let Some(c) = self.ctx.get() {
            return Ok(c);
        }
        let c = Context::new(&self.s)?;
        Ok(self.ctx.get_or_init(|| c))
    }

    fn reference(&self, what: &str, r: &str) -> Result<Vec<T>, Failure> {
        let bad = || Failure::input(format!("{what}: bad reference `{r}`"));
        let parts: Vec<&str> = r.split(':').collect();
        let idx = |k: usize| parts.get(k).and_then(|p| p.trim().parse::<usize>().ok());
        let ctx = self.ctx()?;
        let k = idx(1).ok_or_else(bad)?;
        let chi = ctx.chars.get(k).ok_or_else(|| {
            Failure::input(format!("{what}: there are {} characters", ctx.chars.len()))
        })?;
        match (parts[0], parts.len()) {
            ("char", 2) => Ok(chi.values.clone()),
            ("sine", 3) => {
                let j = idx(2).ok_or_else(bad)?;
                ctx.sine_bases[k].get(j).cloned().ok_or_else(|| {
                    Failure::input(format!(
                        "{what}: character {k} has {} sine basis vectors",
                        ctx.sine_bases[k].len()
                    ))
                })
            }
            _ => Err(bad()),
        }
    }

    pub fn function(&self, what: &str, arg: &str) -> Result<Vec<T>, Failure> {
        let text = source(arg)?;
        let t = text.trim();
        let v = if t.starts_with("char:") || t.starts_with("sine:") {
            self.reference(what, t)?
        } else if t == "zero" {
            func::zeros(self.s.order())
        } else {
            func::from_json(&json(what, t)?).map_err(|e| Failure::input(format!("{what}: {e}")))?
        };
        func::check_len(&v, self.s.order()).map_err(|e| Failure::input(format!("{what}: {e}")))?;
        Ok(v)
    }

    /// Resolves the string entries of a JSON object of functions.
    pub fn function_value(&self, what: &str, v: &Value) -> Result<Vec<T>, Failure> {
        match v {
            Value::String(s) => self.function(what, s),
            other => self.function(what, &other.to_string()),
        }
    }
}
