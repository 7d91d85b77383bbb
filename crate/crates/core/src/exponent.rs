//! Helpers for exponents in `[1, ∞]`.
//!
//! Infinity is a legal exponent throughout the crate. JSON has no literal for
//! it, so exponents serialize as a number or as the string `"inf"`.

use crate::error::{Error, Result};

/// Hölder conjugate `p' = p / (p - 1)`, with `1' = ∞` and `∞' = 1`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Checks `p ∈ [1, ∞]`.
pub fn check_closed(p: f64, what: &str) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::invalid(format!("{what} must lie in [1, inf], got {p}")));
    }
    Ok(())
}

/// Checks `p ∈ (1, ∞)`.
pub fn check_open(p: f64, what: &str) -> Result<()> {
    if !p.is_finite() || p <= 1.0 {
        return Err(Error::invalid(format!("{what} must lie in (1, inf), got {p}")));
    }
    Ok(())
}

/// Parses `"inf"`, `"infinity"` or a decimal number.
pub fn parse(s: &str) -> Result<f64> {
    let t = s.trim().to_ascii_lowercase();
    if t == "inf" || t == "infinity" || t == "∞" {
        return Ok(f64::INFINITY);
    }
    t.parse::<f64>()
        .map_err(|_| Error::invalid(format!("cannot parse exponent {s:?}")))
}

/// Formats an exponent the way [`parse`] reads it.
pub fn format(p: f64) -> String {
    if p.is_infinite() {
        "inf".to_string()
    } else {
        format!("{p}")
    }
}

/// Serde adapter: `#[serde(with = "crate::exponent::serde_exp")]`.
pub mod serde_exp {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(p: &f64, s: S) -> Result<S::Ok, S::Error> {
        if p.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*p)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct ExpVisitor;

        impl Visitor<'_> for ExpVisitor {
            type Value = f64;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                super::parse(v).map_err(E::custom)
            }
        }

        d.deserialize_any(ExpVisitor)
    }
}
