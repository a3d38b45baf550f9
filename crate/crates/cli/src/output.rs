use serde_json::{json, Value};

/// JSON has no infinities; they are written as the strings `"inf"` and `"-inf"`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn write_csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV of UTF-8 fields")
}

/// Two-column `key,value` view of a nested payload; nested keys are joined
/// with `.` and array elements indexed.
pub fn flatten_csv(payload: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", payload, &mut rows);
    write_csv(&["key".into(), "value".into()], &rows)
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<Vec<String>>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten(&key(k), v, rows)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| flatten(&key(&i.to_string()), v, rows)),
        Value::String(s) => rows.push(vec![prefix.to_string(), s.clone()]),
        Value::Null => rows.push(vec![prefix.to_string(), String::new()]),
        other => rows.push(vec![prefix.to_string(), other.to_string()]),
    }
}

pub fn fmt(x: f64) -> String {
    if x.is_finite() {
        x.to_string()
    } else {
        num(x).as_str().unwrap_or("nan").to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinities_become_strings() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(num(f64::NEG_INFINITY), json!("-inf"));
        assert_eq!(num(1.5), json!(1.5));
    }

    #[test]
    fn flattening_nested_payload() {
        let csv = flatten_csv(&json!({"a": {"b": [1, 2]}, "c": "x"}));
        assert_eq!(csv, "key,value\na.b.0,1\na.b.1,2\nc,x\n");
    }
}
