//! Deterministic decimal rendering.

use serde_json::Value;

/// Renders `x` with `digits` significant digits, rounding half to even on
/// the exact binary value. Plain notation for decimal exponents in
/// `-5..15`, `1.234e-7` style otherwise.
pub fn format_sig(x: f64, digits: usize) -> String {
    let digits = digits.clamp(1, 17);
    if x.is_nan() {
        return "nan".to_owned();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_owned();
    }
    if x == 0.0 {
        return "0".to_owned();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..15).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{mantissa}e{exp}")
    }
}

/// A JSON number carrying exactly the digits of [`format_sig`]; non-finite
/// values become their string spelling.
pub fn json_number(x: f64, digits: usize) -> Value {
    let text = format_sig(x, digits);
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Value::from(v),
        _ => Value::String(text),
    }
}
