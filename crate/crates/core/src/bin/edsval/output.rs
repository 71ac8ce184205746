//! Deterministic number formatting.

use edsval::numbers::ExtValuation;
use serde_json::Value;

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float")
}

pub fn fmt_float(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{}", round12(x))
}

pub fn fmt_val(v: ExtValuation) -> String {
    match v {
        ExtValuation::Finite(k) => k.to_string(),
        ExtValuation::Infinite => "inf".into(),
    }
}

/// Round every float inside a JSON value to 12 significant digits.
pub fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().expect("f64"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, x)| (k, round_floats(x))).collect()),
        other => other,
    }
}
