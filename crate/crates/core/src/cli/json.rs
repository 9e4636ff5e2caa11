//! JSON value helpers. Non-finite numbers never reach the output: they
//! become the string `"indeterminate"`.

use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use crate::poly::Poly;

pub const SCHEMA: &str = "bethe-qsl/1";
pub const INDETERMINATE: &str = "indeterminate";

pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!(INDETERMINATE)
    }
}

pub fn cx(z: C64) -> Value {
    if z.re.is_finite() && z.im.is_finite() {
        json!([z.re, z.im])
    } else {
        json!(INDETERMINATE)
    }
}

pub fn cx_list(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|&z| cx(z)).collect())
}

pub fn opt_cx_list(v: &[Option<C64>]) -> Value {
    Value::Array(v.iter().map(|z| z.map_or(json!(INDETERMINATE), cx)).collect())
}

pub fn poly(p: &Poly) -> Value {
    cx_list(p.coeffs())
}

pub fn read_cx(v: &Value) -> Option<C64> {
    match v {
        Value::Number(n) => Some(C64::new(n.as_f64()?, 0.0)),
        Value::Array(a) if a.len() == 2 => Some(C64::new(a[0].as_f64()?, a[1].as_f64()?)),
        _ => None,
    }
}

/// `None` entries are `"indeterminate"`; any other non-number fails.
pub fn read_opt_cx_list(v: &Value) -> Option<Vec<Option<C64>>> {
    v.as_array()?
        .iter()
        .map(|e| {
            if e.as_str() == Some(INDETERMINATE) {
                Some(None)
            } else {
                read_cx(e).map(Some)
            }
        })
        .collect()
}

pub fn read_cx_list(v: &Value) -> Option<Vec<C64>> {
    v.as_array()?.iter().map(read_cx).collect()
}

pub fn max_norm(v: &[Option<C64>]) -> Option<f64> {
    v.iter().flatten().map(|z| z.norm()).reduce(f64::max)
}
