//! Run reports and their CSV/JSON export.

use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::hilbert::SpectralVector;

/// Fixed 17-significant-digit scientific notation, independent of locale.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionReport {
    /// Every iterate, when trajectory storage was requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterates: Option<Vec<SpectralVector>>,
    #[serde(rename = "final")]
    pub final_vector: SpectralVector,
    /// `‖x - x_n‖` per step (or per cycle), when the truth is known.
    pub error_norms: Vec<f64>,
    pub bound_values: BTreeMap<String, f64>,
    pub metadata: BTreeMap<String, Value>,
}

impl ReconstructionReport {
    pub fn new(final_vector: SpectralVector) -> Self {
        Self {
            iterates: None,
            final_vector,
            error_norms: Vec::new(),
            bound_values: BTreeMap::new(),
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_bound(mut self, name: &str, value: f64) -> Self {
        self.bound_values.insert(name.to_owned(), value);
        self
    }

    pub fn with_meta(mut self, key: &str, value: impl Serialize) -> Self {
        let value = serde_json::to_value(value).unwrap_or(Value::Null);
        self.metadata.insert(key.to_owned(), value);
        self
    }

    pub fn final_error(&self) -> Option<f64> {
        self.error_norms.last().copied()
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    /// Columns `step, error`, then one constant column per named bound.
    pub fn write_error_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["step".to_owned(), "error".to_owned()];
        header.extend(self.bound_values.keys().cloned());
        w.write_record(&header)?;
        for (step, e) in self.error_norms.iter().enumerate() {
            let mut row = vec![step.to_string(), format_float(*e)];
            row.extend(self.bound_values.values().map(|&b| format_float(b)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_has_bound_columns() {
        let mut r = ReconstructionReport::new(SpectralVector::from_real(&[1.0])).with_bound("b", 2.0);
        r.error_norms = vec![1.0, 0.5];
        let mut buf = Vec::new();
        r.write_error_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "step,error,b\n0,1.0000000000000000e0,2.0000000000000000e0\n1,5.0000000000000000e-1,2.0000000000000000e0\n"
        );
    }

    #[test]
    fn json_uses_final_key() {
        let r = ReconstructionReport::new(SpectralVector::from_real(&[1.0]));
        let v: Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert!(v.get("final").is_some());
        assert!(v.get("iterates").is_none());
    }
}
