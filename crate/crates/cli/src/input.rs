//! Reading probability vectors and transition matrices from disk.
//!
//! Vectors: a JSON object `{"probabilities": [...]}`, a bare JSON array, or
//! plain CSV with values separated by commas, semicolons or whitespace.
//! Matrices: a JSON array of rows.

use std::fs;
use std::path::Path;

use serde_json::Value;

use crate::CliError;

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn numbers(values: &[Value], what: &str) -> Result<Vec<f64>, CliError> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64()
                .ok_or_else(|| CliError::Input(format!("{what} entry {i} is not a number: {v}")))
        })
        .collect()
}

pub fn parse_vector(text: &str) -> Result<Vec<f64>, CliError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid JSON: {e}")))?;
        let array = match &doc {
            Value::Array(a) => a,
            Value::Object(o) => o
                .get("probabilities")
                .and_then(Value::as_array)
                .ok_or_else(|| CliError::Input("expected a \"probabilities\" array".into()))?,
            _ => unreachable!("starts with '{{' or '['"),
        };
        return numbers(array, "probability");
    }
    text.split(|c: char| c == ',' || c == ';' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| CliError::Input(format!("not a number: {s:?}")))
        })
        .collect()
}

pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Input(format!("invalid JSON: {e}")))?;
    let rows = doc
        .as_array()
        .ok_or_else(|| CliError::Input("expected a JSON array of rows".into()))?;
    rows.iter()
        .enumerate()
        .map(|(i, row)| {
            let row = row
                .as_array()
                .ok_or_else(|| CliError::Input(format!("row {i} is not an array")))?;
            numbers(row, &format!("row {i}"))
        })
        .collect()
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>, CliError> {
    parse_vector(&read(path)?)
}

pub fn read_matrix(path: &Path) -> Result<Vec<Vec<f64>>, CliError> {
    parse_matrix(&read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_object() {
        assert_eq!(parse_vector(r#"{"probabilities": [0.5, 0.25, 0.25]}"#).unwrap(), vec![0.5, 0.25, 0.25]);
    }

    #[test]
    fn json_array() {
        assert_eq!(parse_vector("[1, 2]").unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn csv_forms() {
        assert_eq!(parse_vector("0.5\n0.5\n").unwrap(), vec![0.5, 0.5]);
        assert_eq!(parse_vector("0.2, 0.3;0.5").unwrap(), vec![0.2, 0.3, 0.5]);
        assert!(parse_vector("").unwrap().is_empty());
    }

    #[test]
    fn rejects_garbage() {
        assert!(matches!(parse_vector("0.5,abc"), Err(CliError::Input(_))));
        assert!(matches!(parse_vector(r#"{"p": [1]}"#), Err(CliError::Input(_))));
        assert!(matches!(parse_vector(r#"["x"]"#), Err(CliError::Input(_))));
        assert!(matches!(parse_matrix("[[1], 2]"), Err(CliError::Input(_))));
        assert!(matches!(parse_matrix("{}"), Err(CliError::Input(_))));
    }

    #[test]
    fn matrix() {
        assert_eq!(parse_matrix("[[0.9, 0.1], [0.5, 0.5]]").unwrap(), vec![vec![0.9, 0.1], vec![0.5, 0.5]]);
    }
}
