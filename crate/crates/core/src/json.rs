//! Integer <-> JSON helpers. Values that fit an `i64` are emitted as
//! numbers, larger ones as decimal strings.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::Value;

pub fn int_to_json(c: &BigInt) -> Value {
    match c.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(c.to_string()),
    }
}

pub fn int_from_json(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

pub fn ints_to_json(cs: &[BigInt]) -> Value {
    Value::Array(cs.iter().map(int_to_json).collect())
}
