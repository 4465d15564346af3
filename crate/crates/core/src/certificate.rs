//! Certificate document assembly and canonical serialization.
//!
//! Certificates are JSON documents with a fixed set of top-level keys
//! (`action`, `extension`, `realization`, `manifold`, `boundary_census`,
//! `corollaries`, `meta`). Serialization is canonical: object keys sorted,
//! exact rationals as `{num, den}` pairs, floats printed with 17 significant
//! digits. Re-running a job with the same seed produces a byte-identical
//! document.

use num::rational::Ratio;
use serde_json::{Map, Value};

use crate::error::Error;
use crate::permgroup::Permutation;
use crate::Result;

/// Schema version string embedded in every certificate.
pub const SCHEMA_VERSION: &str = "geodete-cert/1";

/// The required top-level keys, in canonical order.
pub const TOP_LEVEL_KEYS: [&str; 7] = [
    "action",
    "boundary_census",
    "corollaries",
    "extension",
    "manifold",
    "meta",
    "realization",
];

/// A rational as `{num, den}`.
pub fn rational_value(r: Ratio<i64>) -> Value {
    let mut m = Map::new();
    m.insert("num".into(), Value::from(*r.numer()));
    m.insert("den".into(), Value::from(*r.denom()));
    Value::Object(m)
}

/// A permutation as its image array.
pub fn permutation_value(p: &Permutation) -> Value {
    Value::Array(p.images().iter().map(|&i| Value::from(i as u64)).collect())
}

/// Structural check of an assembled certificate: exactly the published
/// top-level keys, a `meta` object carrying the schema version, and stage
/// bookkeeping for every stage.
pub fn check_shape(value: &Value) -> Result<()> {
    let Some(object) = value.as_object() else {
        return Err(Error::Internal("certificate is not an object".into()));
    };
    let mut keys: Vec<&str> = object.keys().map(String::as_str).collect();
    keys.sort_unstable();
    if keys != TOP_LEVEL_KEYS {
        return Err(Error::Internal(format!(
            "certificate top-level keys {keys:?} differ from the published set"
        )));
    }
    let meta = object
        .get("meta")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Internal("certificate meta is not an object".into()))?;
    if meta.get("schema_version").and_then(Value::as_str) != Some(SCHEMA_VERSION) {
        return Err(Error::Internal("certificate schema version missing".into()));
    }
    let stages = meta
        .get("stages")
        .and_then(Value::as_object)
        .ok_or_else(|| Error::Internal("certificate stage map missing".into()))?;
    let missing: Vec<String> = ["validate", "extend", "realize", "census", "corollaries"]
        .iter()
        .filter(|s| !stages.contains_key(**s))
        .map(|s| s.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::IncompleteCertificate(missing));
    }
    Ok(())
}

/// Serializes a certificate canonically, checking its shape first.
pub fn emit_certificate(value: &Value) -> Result<String> {
    check_shape(value)?;
    let mut out = String::new();
    write_value(value, 0, &mut out)?;
    out.push('\n');
    Ok(out)
}

/// Canonical JSON for arbitrary values: sorted keys (the underlying map is
/// ordered), two-space indentation, floats at 17 significant digits.
pub fn canonical_json(value: &Value) -> Result<String> {
    let mut out = String::new();
    write_value(value, 0, &mut out)?;
    Ok(out)
}

fn write_value(value: &Value, indent: usize, out: &mut String) -> Result<()> {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                let f = n.as_f64().expect("JSON numbers are i64, u64 or f64");
                if !f.is_finite() {
                    return Err(Error::Internal("non-finite float in certificate".into()));
                }
                // 17 significant digits round-trip every f64 exactly.
                let f = if f == 0.0 { 0.0 } else { f };
                out.push_str(&format!("{f:.16e}"));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("strings serialize"));
        }
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
            } else {
                out.push('[');
                for (k, item) in items.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(indent + 1, out);
                    write_value(item, indent + 1, out)?;
                }
                out.push('\n');
                push_indent(indent, out);
                out.push(']');
            }
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
            } else {
                out.push('{');
                // serde_json's default map is a BTreeMap: iteration is sorted.
                for (k, (key, item)) in map.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    push_indent(indent + 1, out);
                    out.push_str(&serde_json::to_string(key).expect("strings serialize"));
                    out.push_str(": ");
                    write_value(item, indent + 1, out)?;
                }
                out.push('\n');
                push_indent(indent, out);
                out.push('}');
            }
        }
    }
    Ok(())
}

fn push_indent(indent: usize, out: &mut String) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_seventeen_significant_digits() {
        let v = json!({"x": -0.9009688679024191_f64, "n": 42, "z": 0.0});
        let s = canonical_json(&v).unwrap();
        assert!(s.contains("-9.0096886790241915e-1"), "{s}");
        assert!(s.contains("\"n\": 42"));
        assert!(s.contains("0.0000000000000000e0"), "{s}");
    }

    #[test]
    fn keys_are_sorted() {
        let v = json!({"zeta": 1, "alpha": 2, "mid": {"b": 1, "a": 2}});
        let s = canonical_json(&v).unwrap();
        let alpha = s.find("alpha").unwrap();
        let mid = s.find("mid").unwrap();
        let zeta = s.find("zeta").unwrap();
        assert!(alpha < mid && mid < zeta);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
    }

    #[test]
    fn float_serialization_round_trips() {
        for &f in &[
            0.1,
            -1.0 / 3.0,
            std::f64::consts::PI,
            -0.0617449009293668,
            1e-300,
            -2.5e300,
        ] {
            let s = format!("{f:.16e}");
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), f.to_bits(), "{f} -> {s}");
        }
    }

    #[test]
    fn rational_encoding() {
        let v = rational_value(Ratio::new(-2, 7));
        assert_eq!(v, json!({"num": -2, "den": 7}));
    }

    #[test]
    fn shape_check_rejects_missing_keys() {
        let v = json!({"action": null});
        assert!(check_shape(&v).is_err());
    }
}
