//! Number formatting for JSON records and sweep CSV. Every float is rounded
//! to 12 significant digits.

use serde_json::Value;

const SIG_DIGITS: usize = 12;

/// Decimal exponent of `x` after rounding to 12 significant digits.
fn exponent(x: f64) -> i32 {
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    sci.rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .expect("formatted exponent")
}

fn non_finite(x: f64) -> &'static str {
    if x.is_nan() {
        "nan"
    } else if x > 0.0 {
        "inf"
    } else {
        "-inf"
    }
}

/// Plain decimal notation with 12 significant digits.
pub fn fixed(x: f64) -> String {
    if !x.is_finite() {
        return non_finite(x).to_owned();
    }
    if x == 0.0 {
        return "0".to_owned();
    }
    let decimals = (SIG_DIGITS as i32 - 1 - exponent(x)).max(0) as usize;
    format!("{x:.decimals$}")
}

/// JSON number rounded to 12 significant digits; non-finite values become
/// the strings `"inf"`, `"-inf"` or `"nan"`.
pub fn json_number(x: f64) -> Value {
    if !x.is_finite() {
        return Value::from(non_finite(x));
    }
    let rounded: f64 = format!("{:.*e}", SIG_DIGITS - 1, x).parse().expect("round trip");
    Value::from(rounded)
}

pub fn json_numbers(xs: &[f64]) -> Value {
    Value::Array(xs.iter().copied().map(json_number).collect())
}
