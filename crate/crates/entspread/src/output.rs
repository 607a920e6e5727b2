//! Rendering of command results as JSON or CSV with a fixed number of
//! significant digits.

use serde_json::{Map, Value};

/// Rows of a tabular payload.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Self {
        Self { headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    /// Rows as a list of objects keyed by header.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| Value::Object(self.headers.iter().cloned().zip(r.iter().cloned()).collect::<Map<_, _>>()))
                .collect(),
        )
    }
}

/// JSON number, or `null` for non-finite values.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn round_sig(x: f64, digits: usize) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", digits.max(1) - 1, x).parse().unwrap_or(x)
}

/// Rounds every float in `v`; integers are left alone.
pub fn round_value(v: &Value, digits: usize) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(round_sig(n.as_f64().unwrap_or(f64::NAN), digits)),
        Value::Array(a) => Value::Array(a.iter().map(|x| round_value(x, digits)).collect()),
        Value::Object(o) => Value::Object(o.iter().map(|(k, x)| (k.clone(), round_value(x, digits))).collect()),
        other => other.clone(),
    }
}

pub fn render_json(subcommand: &str, parameters: Value, payload: &Value, digits: usize) -> String {
    let mut doc = Map::new();
    doc.insert("subcommand".into(), Value::String(subcommand.into()));
    doc.insert("parameters".into(), parameters);
    doc.insert("payload".into(), round_value(payload, digits));
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn render_csv(table: &Table, digits: usize) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.headers).expect("in-memory write");
    for row in &table.rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match round_value(c, digits) {
                Value::String(s) => s,
                Value::Null => String::new(),
                other => other.to_string(),
            })
            .collect();
        w.write_record(&cells).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn significant_digits() {
        assert_eq!(round_sig(0.584962500721156, 6), 0.584963);
        assert_eq!(round_sig(-1234567.0, 3), -1230000.0);
        assert_eq!(round_sig(1e-300, 2), 1e-300);
        assert_eq!(round_sig(0.0, 6), 0.0);
        assert!(round_sig(f64::NAN, 6).is_nan());
    }

    #[test]
    fn rounding_keeps_integers() {
        let v = round_value(&json!({"a": 3, "b": [0.123456789, 2.0], "c": "x"}), 4);
        assert_eq!(v, json!({"a": 3, "b": [0.1235, 2.0], "c": "x"}));
    }

    #[test]
    fn csv_rows() {
        let mut t = Table::new(&["n", "bound"]);
        t.push(vec![json!(256), num(3.675312345)]);
        t.push(vec![json!(1024), Value::Null]);
        assert_eq!(render_csv(&t, 3), "n,bound\n256,3.68\n1024,\n");
        assert_eq!(t.to_json(), json!([{"n": 256, "bound": 3.675312345}, {"n": 1024, "bound": null}]));
    }
}
