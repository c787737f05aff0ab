//! Minimal structural validation of JSON values against the schemas in docs/schemas.
//! Supports `type`, `enum`, `required`, `properties`, `items`,
//! `additionalProperties` (as a schema) and local `$ref`s.

use serde_json::Value;
use std::path::PathBuf;

pub fn load_schema(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas").join(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {}", path.display(), e));
    serde_json::from_str(&text).expect("schema is valid JSON")
}

fn type_matches(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "integer" => v.is_i64() || v.is_u64(),
        "number" => v.is_number(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        other => panic!("unsupported schema type {}", other),
    }
}

fn check(root: &Value, schema: &Value, v: &Value, path: &str, errors: &mut Vec<String>) {
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let name = r.strip_prefix("#/$defs/").expect("only local $defs refs");
        check(root, &root["$defs"][name], v, path, errors);
        return;
    }
    if let Some(t) = schema.get("type") {
        let ok = match t {
            Value::String(s) => type_matches(s, v),
            Value::Array(ts) => ts.iter().any(|t| type_matches(t.as_str().unwrap(), v)),
            _ => panic!("bad type keyword"),
        };
        if !ok {
            errors.push(format!("{}: expected {}, got {}", path, t, v));
            return;
        }
    }
    if let Some(Value::Array(allowed)) = schema.get("enum") {
        if !allowed.contains(v) {
            errors.push(format!("{}: {} not in {:?}", path, v, allowed));
        }
    }
    if let Value::Object(obj) = v {
        if let Some(Value::Array(req)) = schema.get("required") {
            for key in req {
                let key = key.as_str().unwrap();
                if !obj.contains_key(key) {
                    errors.push(format!("{}: missing `{}`", path, key));
                }
            }
        }
        let props = schema.get("properties").and_then(Value::as_object);
        for (key, val) in obj {
            let sub = format!("{}/{}", path, key);
            match props.and_then(|p| p.get(key)) {
                Some(s) => check(root, s, val, &sub, errors),
                None => {
                    if let Some(extra) = schema.get("additionalProperties").filter(|s| s.is_object()) {
                        check(root, extra, val, &sub, errors);
                    }
                }
            }
        }
    }
    if let (Value::Array(items), Some(s)) = (v, schema.get("items")) {
        for (i, item) in items.iter().enumerate() {
            check(root, s, item, &format!("{}/{}", path, i), errors);
        }
    }
}

pub fn assert_conforms(schema_name: &str, v: &Value) {
    let schema = load_schema(schema_name);
    let mut errors = Vec::new();
    check(&schema, &schema, v, "", &mut errors);
    assert!(errors.is_empty(), "{} violations:\n{}", schema_name, errors.join("\n"));
}
