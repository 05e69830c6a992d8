//! JSON has no infinities; extended reals are written as numbers when
//! finite and as the strings `"inf"`, `"-inf"` or `"nan"` otherwise.

use serde::Serializer;

pub fn ext_real<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub fn ext_real_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => ext_real(v, s),
        None => s.serialize_none(),
    }
}
