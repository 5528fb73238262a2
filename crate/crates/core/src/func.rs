//! Functions `S → K` stored as value vectors indexed by element.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{json::ScalarJson, max_abs, Scalar};

pub fn zeros<T: Scalar>(n: usize) -> Vec<T> {
    vec![T::zero(); n]
}

pub fn constant<T: Scalar>(n: usize, c: T) -> Vec<T> {
    vec![c; n]
}

pub fn scale<T: Scalar>(c: &T, v: &[T]) -> Vec<T> {
    v.iter().map(|x| c.clone() * x.clone()).collect()
}

pub fn add<T: Scalar>(u: &[T], v: &[T]) -> Vec<T> {
    u.iter()
        .zip(v)
        .map(|(a, b)| a.clone() + b.clone())
        .collect()
}

pub fn sub<T: Scalar>(u: &[T], v: &[T]) -> Vec<T> {
    u.iter()
        .zip(v)
        .map(|(a, b)| a.clone() - b.clone())
        .collect()
}

/// `Σ cᵢ vᵢ` over functions of length `n`.
pub fn lincomb<T: Scalar>(n: usize, terms: &[(T, &[T])]) -> Vec<T> {
    let mut out: Vec<T> = zeros(n);
    for (c, v) in terms {
        debug_assert_eq!(v.len(), n);
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v.iter()) {
            *o = o.clone() + c.clone() * x.clone();
        }
    }
    out
}

/// All entries negligible at `tol` (exactly zero for exact scalars).
pub fn is_zero<T: Scalar>(v: &[T], tol: f64) -> bool {
    v.iter().all(|x| x.is_negligible(tol))
}

pub fn approx_eq<T: Scalar>(u: &[T], v: &[T], tol: f64) -> bool {
    u.len() == v.len() && u.iter().zip(v).all(|(a, b)| a.approx_eq(b, tol))
}

/// Largest entrywise distance.
pub fn distance<T: Scalar>(u: &[T], v: &[T]) -> f64 {
    max_abs(&sub(u, v))
}

pub fn check_len<T>(v: &[T], n: usize) -> Result<()> {
    if v.len() == n {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            expected: n,
            got: v.len(),
        })
    }
}

/// Image of an exact function in another scalar type.
pub fn from_exact<T: Scalar>(v: &[crate::scalar::Cyclo]) -> Vec<T> {
    v.iter().map(T::from_exact).collect()
}

pub fn to_json<T: Scalar>(v: &[T]) -> Value {
    Value::Array(v.iter().map(ScalarJson::to_json).collect())
}

/// Accepts a bare array of scalars or an object with a `values` array.
pub fn from_json<T: Scalar>(v: &Value) -> Result<Vec<T>> {
    let arr = match v {
        Value::Array(a) => a,
        Value::Object(m) => m.get("values").and_then(Value::as_array).ok_or_else(|| {
            Error::MalformedScalar("function object needs a `values` array".into())
        })?,
        other => {
            return Err(Error::MalformedScalar(format!(
                "expected a function, found {other}"
            )))
        }
    };
    arr.iter()
        .enumerate()
        .map(|(i, x)| {
            T::from_json(x).map_err(|e| Error::MalformedScalar(format!("value {i}: {e}")))
        })
        .collect()
}

pub fn with_semigroup<T: Scalar>(v: &[T], semigroup: &crate::Semigroup) -> Value {
    json!({ "semigroup": semigroup, "values": to_json(v) })
}
