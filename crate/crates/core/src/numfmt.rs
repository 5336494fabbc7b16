//! Fixed-precision number rendering shared by the text and structured outputs.

use num_complex::Complex64;
use serde_json::value::RawValue;

/// Twelve significant digits in scientific notation, with `-0` folded to `0`.
pub fn sig12(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

/// Fixed three-decimal rendering, used for basis directions.
pub fn dec3(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".to_owned()
    } else {
        s
    }
}

/// Embeds pre-rendered numeric text verbatim in a JSON document.
pub fn raw(text: String) -> Box<RawValue> {
    RawValue::from_string(text).expect("rendered number is valid JSON")
}

pub fn raw_sig12(x: f64) -> Box<RawValue> {
    raw(sig12(x))
}

/// `[re, im]` pair at twelve significant digits.
pub fn raw_complex(z: Complex64) -> [Box<RawValue>; 2] {
    [raw_sig12(z.re), raw_sig12(z.im)]
}
