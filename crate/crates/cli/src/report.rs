//! Report documents. Each serializes to JSON, and the text form is the same
//! document flattened to `dotted.key = value` lines, so both carry the same
//! fields in the same order.

use serde::{Serialize, Serializer};
use serde_json::Value;

/// A float that keeps non-finite values readable (`"inf"`) instead of
/// turning them into JSON `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else if self.0.is_nan() {
            s.serialize_str("nan")
        } else if self.0 > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

/// Key/value rendering of a JSON document. Objects nest with dots; arrays of
/// scalars are space-joined; array elements that are objects with a `name`
/// field are keyed by that name, otherwise by position.
pub fn flatten(value: &Value) -> String {
    let mut out = String::new();
    walk(&mut out, "", value);
    out
}

fn walk(out: &mut String, prefix: &str, value: &Value) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                if k == "name" && !prefix.is_empty() {
                    continue;
                }
                walk(out, &key(k), v);
            }
        }
        Value::Array(items) if items.iter().all(|v| !v.is_object() && !v.is_array()) => {
            let joined: Vec<String> = items.iter().map(scalar).collect();
            line(out, prefix, &joined.join(" "));
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                let seg = v
                    .get("name")
                    .and_then(Value::as_str)
                    .map(str::to_string)
                    .unwrap_or_else(|| i.to_string());
                walk(out, &key(&seg), v);
            }
        }
        v => line(out, prefix, &scalar(v)),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "none".into(),
        other => other.to_string(),
    }
}

fn line(out: &mut String, key: &str, value: &str) {
    out.push_str(key);
    out.push_str(" = ");
    out.push_str(value);
    out.push('\n');
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("reports serialize");
    s.push('\n');
    s
}

pub fn to_text<T: Serialize>(doc: &T) -> String {
    flatten(&serde_json::to_value(doc).expect("reports serialize"))
}
