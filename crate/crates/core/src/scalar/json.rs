//! JSON encoding of scalars.
//!
//! Exact: `{"order": L, "coeffs": ["p/q", ...]}` with `φ(L)` coefficients.
//! Float: `{"re": x, "im": y}`. On input, a bare number or a `"p/q"` string
//! is accepted as a rational shorthand in either mode.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::{field_degree, Cyclo, Real};
use crate::error::{Error, Result};

pub trait ScalarJson: Sized {
    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::MalformedScalar(format!("cannot parse rational `{s}`"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::MalformedScalar(format!("zero denominator in `{s}`")));
    }
    Ok(BigRational::new(n, d))
}

fn rational_from_json(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigRational::from_integer(BigInt::from(i)))
            } else {
                let f = n.as_f64().unwrap_or(f64::NAN);
                BigRational::from_float(f)
                    .ok_or_else(|| Error::MalformedScalar(format!("non-finite number {n}")))
            }
        }
        other => Err(Error::MalformedScalar(format!(
            "expected a rational, found {other}"
        ))),
    }
}

impl ScalarJson for Cyclo {
    fn to_json(&self) -> Value {
        let coeffs: Vec<String> = self.coeffs().iter().map(format_rational).collect();
        json!({ "order": self.order(), "coeffs": coeffs })
    }

    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Object(map) if map.contains_key("order") => {
                let order = map["order"].as_u64().filter(|&o| o >= 1).ok_or_else(|| {
                    Error::MalformedScalar("`order` must be a positive integer".into())
                })?;
                let coeffs = map
                    .get("coeffs")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::MalformedScalar("`coeffs` must be an array".into()))?;
                let expected = field_degree(order as u32) as usize;
                let natural = super::poly::euler_phi(order as u32) as usize;
                if coeffs.len() != expected && coeffs.len() != natural {
                    return Err(Error::MalformedScalar(format!(
                        "order {order} needs {natural} coefficients, found {}",
                        coeffs.len()
                    )));
                }
                let coeffs = coeffs
                    .iter()
                    .map(rational_from_json)
                    .collect::<Result<Vec<_>>>()?;
                Cyclo::from_coeffs(order as u32, coeffs)
            }
            Value::Object(map) if map.contains_key("re") => {
                let im = map.get("im").and_then(Value::as_f64).unwrap_or(0.0);
                if im != 0.0 {
                    return Err(Error::MalformedScalar(
                        "float scalar with nonzero imaginary part in exact mode".into(),
                    ));
                }
                Ok(Cyclo::from_rational(rational_from_json(&map["re"])?))
            }
            Value::String(_) | Value::Number(_) => Ok(Cyclo::from_rational(rational_from_json(v)?)),
            other => Err(Error::MalformedScalar(format!(
                "unrecognized scalar {other}"
            ))),
        }
    }
}

impl<F: Real> ScalarJson for Complex<F> {
    fn to_json(&self) -> Value {
        json!({
            "re": self.re.to_f64().unwrap_or(f64::NAN),
            "im": self.im.to_f64().unwrap_or(f64::NAN),
        })
    }

    fn from_json(v: &Value) -> Result<Self> {
        let conv = |x: f64| {
            F::from_f64(x).ok_or_else(|| Error::MalformedScalar(format!("{x} out of range")))
        };
        match v {
            Value::Object(map) if map.contains_key("re") => {
                let re = map["re"]
                    .as_f64()
                    .ok_or_else(|| Error::MalformedScalar("`re` must be a number".into()))?;
                let im = map
                    .get("im")
                    .map_or(Some(0.0), Value::as_f64)
                    .ok_or_else(|| Error::MalformedScalar("`im` must be a number".into()))?;
                Ok(Complex::new(conv(re)?, conv(im)?))
            }
            Value::Object(_) => {
                let z = Cyclo::from_json(v)?.embed();
                Ok(Complex::new(conv(z.re)?, conv(z.im)?))
            }
            Value::Number(n) => Ok(Complex::new(
                conv(n.as_f64().unwrap_or(f64::NAN))?,
                conv(0.0)?,
            )),
            Value::String(s) => {
                let q = parse_rational(s)?;
                Ok(Complex::new(
                    conv(super::cyclo::rational_to_f64(&q))?,
                    conv(0.0)?,
                ))
            }
            other => Err(Error::MalformedScalar(format!(
                "unrecognized scalar {other}"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn exact_round_trip() {
        let x = &Cyclo::zeta(12).unwrap() * &Cyclo::from_ratio(-3, 7);
        let v = x.to_json();
        assert_eq!(v["order"], 12);
        assert_eq!(v["coeffs"].as_array().unwrap().len(), 4);
        assert_eq!(Cyclo::from_json(&v).unwrap(), x);
    }

    #[test]
    fn shorthands() {
        assert_eq!(
            Cyclo::from_json(&json!("5/10")).unwrap(),
            Cyclo::from_ratio(1, 2)
        );
        assert_eq!(Cyclo::from_json(&json!(-4)).unwrap(), Cyclo::from_int(-4));
        let z = Complex64::from_json(&json!({"order": 4, "coeffs": ["0", "1"]})).unwrap();
        assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn wrong_coefficient_count_is_rejected() {
        assert!(Cyclo::from_json(&json!({"order": 5, "coeffs": ["1", "2"]})).is_err());
        assert!(Cyclo::from_json(&json!({"order": 0, "coeffs": []})).is_err());
    }

    #[test]
    fn float_round_trip() {
        let z = Complex64::new(0.25, -1.5);
        assert_eq!(Complex64::from_json(&z.to_json()).unwrap(), z);
    }
}
