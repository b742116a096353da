use num_bigint::BigInt;
use selfsim_core::Rational;
use serde_json::{json, Value};

/// `{"num": "p", "den": "q"}` in lowest terms; strings keep big values exact.
pub fn rational_to_json(r: &Rational) -> Value {
    json!({"num": r.numer().to_string(), "den": r.denom().to_string()})
}

/// Inverse of [`rational_to_json`]; also accepts plain JSON integers.
pub fn rational_from_json(v: &Value) -> Option<Rational> {
    let part = |key: &str| -> Option<BigInt> {
        match v.get(key)? {
            Value::String(s) => s.parse().ok(),
            Value::Number(n) => n.as_i64().map(BigInt::from),
            _ => None,
        }
    };
    let den = part("den")?;
    if den == BigInt::from(0) {
        return None;
    }
    Some(Rational::new(part("num")?, den))
}
