//! JSON records and CSV tables.

use serde_json::{json, Map, Value};

use crate::bracket::Bracket;

pub const SCHEMA_VERSION: u32 = 1;

/// One JSON record: `{quantity, c, params, lo, hi, meta}`.
#[derive(Clone, Debug)]
pub struct Record {
    pub quantity: String,
    pub c: Option<String>,
    pub params: Map<String, Value>,
    pub lo: f64,
    pub hi: f64,
    pub meta: Map<String, Value>,
}

impl Record {
    pub fn new(quantity: &str, c: Option<String>, value: Bracket) -> Self {
        Record {
            quantity: quantity.to_string(),
            c,
            params: Map::new(),
            lo: value.lo(),
            hi: value.hi(),
            meta: Map::new(),
        }
    }

    pub fn exact(quantity: &str, c: Option<String>, x: f64) -> Self {
        Record {
            lo: x,
            hi: x,
            ..Record::new(quantity, c, Bracket::point(0.0))
        }
    }

    pub fn param(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), v.into());
        self
    }

    pub fn meta(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.meta.insert(key.to_string(), v.into());
        self
    }

    fn to_json(&self) -> Value {
        json!({
            "quantity": self.quantity,
            "c": self.c,
            "params": self.params,
            "lo": number(self.lo),
            "hi": number(self.hi),
            "meta": self.meta,
        })
    }
}

/// Finite values as JSON numbers, infinities as the strings `"inf"` and `"-inf"`.
pub fn number(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        Value::Null
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

/// Shortest round-trip form, exponent notation for tiny or huge values.
pub fn cell(x: f64) -> String {
    format!("{x:?}")
}

/// What a subcommand produces, in both layouts.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub records: Vec<Record>,
}

impl Report {
    pub fn new(command: &str, columns: &[&'static str]) -> Self {
        Report {
            command: command.to_string(),
            columns: columns.to_vec(),
            ..Report::default()
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let escaped: Vec<String> = row.iter().map(|c| escape(c)).collect();
            out.push_str(&escaped.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "records": self.records.iter().map(Record::to_json).collect::<Vec<_>>(),
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("records serialize");
        s.push('\n');
        s
    }
}

fn escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinities_become_strings() {
        let r = Record::new("p", Some("1/2".into()), Bracket::new(0.0, f64::INFINITY).unwrap());
        let v = r.to_json();
        assert_eq!(v["hi"], json!("inf"));
        assert_eq!(v["lo"], json!(0.0));
        assert_eq!(v["c"], json!("1/2"));
    }

    #[test]
    fn csv_layout() {
        let mut rep = Report::new("x", &["a", "b"]);
        rep.row(vec![cell(0.5), "p,q".into()]);
        rep.row(vec![cell(1e-20), cell(f64::NEG_INFINITY)]);
        assert_eq!(rep.to_csv(), "a,b\n0.5,\"p,q\"\n1e-20,-inf\n");
    }

    #[test]
    fn json_is_versioned() {
        let mut rep = Report::new("d2", &[]);
        rep.push(Record::exact("d2", None, 1.0).param("n", 3).meta("note", "x"));
        let v: Value = serde_json::from_str(&rep.to_json()).unwrap();
        assert_eq!(v["schema_version"], json!(1));
        let keys: Vec<&String> = v["records"][0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["quantity", "c", "params", "lo", "hi", "meta"]);
    }
}
