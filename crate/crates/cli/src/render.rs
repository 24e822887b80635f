//! Number formatting and the JSON / CSV renderings of a run.

use serde_json::{Map, Number, Value};

use crate::config::Format;
use crate::error::CliError;

/// Largest denominator tried when recognising a rational value.
const MAX_DENOMINATOR: i64 = 10_000;
const RATIONAL_TOL: f64 = 1e-12;

/// `x` rounded to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

/// Round every float in `v` to 15 significant digits. Non-finite values become null.
pub fn normalize(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            *v = Number::from_f64(round15(x)).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(normalize),
        Value::Object(map) => map.values_mut().for_each(normalize),
        _ => {}
    }
}

/// `p/q` with the smallest denominator up to 10^4 matching `x` within
/// 1e-12, found from the continued-fraction convergents.
pub fn rational(x: f64) -> Option<String> {
    if !x.is_finite() || x.abs() > 1e6 {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        let (h, k) = (a as i64 * h1 + h0, a as i64 * k1 + k0);
        if k > MAX_DENOMINATOR {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        if (x - h as f64 / k as f64).abs() <= RATIONAL_TOL {
            return Some(if k == 1 { h.to_string() } else { format!("{h}/{k}") });
        }
        let frac = r - a;
        if frac.abs() < 1e-15 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// A rendered run: the result document and the rows shown as CSV.
#[derive(Debug, Clone)]
pub struct Output {
    pub result: Value,
    /// Key of the array in `result` rendered as CSV rows; the whole result
    /// becomes a single row when `None`.
    pub table: Option<&'static str>,
    pub warnings: Vec<String>,
    /// Error reported after the document is written.
    pub failure: Option<CliError>,
}

impl Output {
    pub fn new(result: Value) -> Self {
        Output { result, table: None, warnings: Vec::new(), failure: None }
    }

    pub fn with_table(mut self, key: &'static str) -> Self {
        self.table = Some(key);
        self
    }
}

fn flatten_into(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => map.iter().for_each(|(k, v)| flatten_into(&key(k), v, out)),
        Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| flatten_into(&key(&i.to_string()), v, out)),
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        Value::Number(n) => out.push((prefix.to_string(), n.to_string())),
        Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
    }
}

fn csv_rows(result: &Value, table: Option<&str>) -> Vec<Vec<(String, String)>> {
    let rows: Vec<&Value> = match table.and_then(|k| result.get(k)).and_then(Value::as_array) {
        Some(items) => items.iter().collect(),
        None => vec![result],
    };
    rows.into_iter()
        .map(|row| {
            let mut cells = Vec::new();
            flatten_into("", row, &mut cells);
            cells
        })
        .collect()
}

/// CSV with one header line; columns are the union of row keys in first-seen order.
pub fn to_csv(result: &Value, table: Option<&str>) -> Result<String, CliError> {
    let rows = csv_rows(result, table);
    let mut header: Vec<String> = Vec::new();
    for row in &rows {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Invalid(format!("csv: {e}"));
    w.write_record(&header).map_err(io)?;
    for row in &rows {
        let record = header.iter().map(|h| row.iter().find(|(k, _)| k == h).map_or("", |(_, v)| v.as_str()));
        w.write_record(record).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Invalid(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// The full document in the requested format.
pub fn render(config: Value, output: &Output, diagnostics: Value, format: Format) -> Result<String, CliError> {
    let mut result = output.result.clone();
    normalize(&mut result);
    match format {
        Format::Csv => to_csv(&result, output.table),
        Format::Json => {
            let mut doc = Map::new();
            let mut config = config;
            normalize(&mut config);
            doc.insert("config".into(), config);
            doc.insert("result".into(), result);
            doc.insert("diagnostics".into(), diagnostics);
            let mut text = serde_json::to_string_pretty(&Value::Object(doc))
                .map_err(|e| CliError::Invalid(format!("json: {e}")))?;
            text.push('\n');
            Ok(text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn fifteen_significant_digits() {
        assert_eq!(round15(1.0 / 3.0).to_string(), "0.333333333333333");
        assert_eq!(round15(29.0 / 60.0).to_string(), "0.483333333333333");
        assert_eq!(round15(0.4000000000000001), 0.4);
        assert_eq!(round15(-2.0 / 3.0).to_string(), "-0.666666666666667");
        assert_eq!(round15(1e-20 / 3.0).to_string(), "0.00000000000000000000333333333333333");
    }

    #[test]
    fn rationals_from_convergents() {
        assert_eq!(rational(4.0 / 9.0).as_deref(), Some("4/9"));
        assert_eq!(rational(0.5555555555555556).as_deref(), Some("5/9"));
        assert_eq!(rational(16.0 / 25.0).as_deref(), Some("16/25"));
        assert_eq!(rational(1.0).as_deref(), Some("1"));
        assert_eq!(rational(0.0).as_deref(), Some("0"));
        assert_eq!(rational(2f64.sqrt() - 1.0), None);
    }

    #[test]
    fn csv_matches_json_text() {
        let mut v = json!({"rows": [{"lo": 0.0, "hi": 4.0 / 9.0, "status": "secured", "pair": [1, 2]},
                                     {"lo": 4.0 / 9.0, "hi": 1.0, "status": "open", "extra": null}]});
        normalize(&mut v);
        let csv = to_csv(&v, Some("rows")).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("lo,hi,status,pair.0,pair.1,extra"));
        assert_eq!(lines.next(), Some("0.0,0.444444444444444,secured,1,2,"));
        assert_eq!(lines.next(), Some("0.444444444444444,1.0,open,,,"));
        let text = serde_json::to_string(&v).unwrap();
        assert!(text.contains("0.444444444444444"));
    }
}
