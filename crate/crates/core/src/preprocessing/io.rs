//! On-disk formats: JSON schema descriptor, JSON-lines datasets, JSON stats.
//!
//! A dataset line is an object `{"target": true, "values": [...]}` where
//! `target` is optional. Values follow the schema order: strings for
//! categorical labels, numbers for quantitative and circular values, a number
//! or the token `"NA"` for special quantitative values and an array of
//! numbers for event sequences. Lines starting with `#` are comments.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use super::normalize::NormalizationStats;
use crate::error::{Error, Result};
use crate::feature_space::{FeatureKind, FeatureSchema, FeatureValue, Pattern};

/// Token for the "not applicable" special value.
pub const NOT_APPLICABLE: &str = "NA";

/// One dataset row.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub pattern: Pattern,
    /// `Some(true)` for targets, `Some(false)` for non-targets, `None` when unlabeled.
    pub target: Option<bool>,
}

impl Record {
    pub fn target(pattern: Pattern) -> Self {
        Record {
            pattern,
            target: Some(true),
        }
    }

    pub fn non_target(pattern: Pattern) -> Self {
        Record {
            pattern,
            target: Some(false),
        }
    }
}

pub fn encode_value(v: &FeatureValue) -> Value {
    match v {
        FeatureValue::Label(s) => Value::String(s.clone()),
        FeatureValue::Scalar(x) => json!(x),
        FeatureValue::Circular(n) => json!(n),
        FeatureValue::Special(None) => Value::String(NOT_APPLICABLE.into()),
        FeatureValue::Special(Some(x)) => json!(x),
        FeatureValue::Events(xs) => json!(xs),
    }
}

pub fn encode_pattern(p: &Pattern) -> Value {
    Value::Array(p.values.iter().map(encode_value).collect())
}

fn number(v: &Value) -> Option<f64> {
    v.as_f64().filter(|x| x.is_finite())
}

pub fn decode_value(v: &Value, kind: &FeatureKind) -> std::result::Result<FeatureValue, String> {
    match kind {
        FeatureKind::Categorical { .. } => v
            .as_str()
            .map(|s| FeatureValue::Label(s.to_string()))
            .ok_or_else(|| format!("expected a label, got {v}")),
        FeatureKind::Quantitative => number(v)
            .map(FeatureValue::Scalar)
            .ok_or_else(|| format!("expected a number, got {v}")),
        FeatureKind::Circular { .. } => v
            .as_u64()
            .and_then(|n| u32::try_from(n).ok())
            .map(FeatureValue::Circular)
            .ok_or_else(|| format!("expected a non-negative integer, got {v}")),
        FeatureKind::SpecialQuantitative => match v {
            Value::String(s) if s == NOT_APPLICABLE => Ok(FeatureValue::Special(None)),
            _ => number(v)
                .map(|x| FeatureValue::Special(Some(x)))
                .ok_or_else(|| format!("expected a number or \"{NOT_APPLICABLE}\", got {v}")),
        },
        FeatureKind::Timeseries => v
            .as_array()
            .and_then(|xs| xs.iter().map(number).collect::<Option<Vec<f64>>>())
            .map(FeatureValue::Events)
            .ok_or_else(|| format!("expected an array of numbers, got {v}")),
    }
}

pub fn decode_pattern(v: &Value, schema: &FeatureSchema) -> std::result::Result<Pattern, String> {
    let items = v.as_array().ok_or("values must be an array")?;
    if items.len() != schema.len() {
        return Err(format!("{} values for {} features", items.len(), schema.len()));
    }
    let values = items
        .iter()
        .zip(schema.features())
        .map(|(item, f)| decode_value(item, &f.kind).map_err(|e| format!("feature `{}`: {e}", f.name)))
        .collect::<std::result::Result<_, _>>()?;
    let pattern = Pattern::new(values);
    pattern.validate(schema).map_err(|e| e.to_string())?;
    Ok(pattern)
}

fn record_to_line(r: &Record) -> String {
    let mut obj = serde_json::Map::new();
    if let Some(t) = r.target {
        obj.insert("target".into(), Value::Bool(t));
    }
    obj.insert("values".into(), encode_pattern(&r.pattern));
    Value::Object(obj).to_string()
}

/// Parses JSON-lines records, skipping blank lines and `#` comments. Row
/// numbers in errors are 1-based line numbers.
pub fn parse_records(text: &str, schema: &FeatureSchema) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let row = i + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let v: Value = serde_json::from_str(line).map_err(|e| Error::Row {
            row,
            message: e.to_string(),
        })?;
        let (values, target) = match &v {
            Value::Object(obj) => {
                let target = match obj.get("target") {
                    None | Some(Value::Null) => None,
                    Some(Value::Bool(b)) => Some(*b),
                    Some(other) => {
                        return Err(Error::Row {
                            row,
                            message: format!("target must be a boolean, got {other}"),
                        })
                    }
                };
                let values = obj.get("values").ok_or_else(|| Error::Row {
                    row,
                    message: "missing `values`".into(),
                })?;
                (values, target)
            }
            Value::Array(_) => (&v, None),
            _ => {
                return Err(Error::Row {
                    row,
                    message: "expected an object or an array".into(),
                })
            }
        };
        let pattern = decode_pattern(values, schema).map_err(|message| Error::Row { row, message })?;
        out.push(Record { pattern, target });
    }
    Ok(out)
}

pub fn format_records(records: &[Record]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&record_to_line(r));
        s.push('\n');
    }
    s
}

pub fn read_schema(path: &Path) -> Result<FeatureSchema> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    FeatureSchema::from_json(&text)
}

pub fn write_schema(path: &Path, schema: &FeatureSchema) -> Result<()> {
    write_text(path, &schema.to_json())
}

/// Reads raw (unnormalized) records.
pub fn read_records(path: &Path, schema: &FeatureSchema) -> Result<Vec<Record>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_records(&text, schema)
}

pub fn write_records(path: &Path, records: &[Record]) -> Result<()> {
    write_text(path, &format_records(records))
}

pub fn read_stats(path: &Path) -> Result<NormalizationStats> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    NormalizationStats::from_json(&text)
}

pub fn write_stats(path: &Path, stats: &NormalizationStats) -> Result<()> {
    write_text(path, &stats.to_json())
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))?;
    if !text.ends_with('\n') {
        f.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}

/// Loads a dataset and normalizes it. Stats are fitted on this dataset unless
/// `stats` is given (inference mode).
pub fn load_dataset(
    data_path: &Path,
    schema_path: &Path,
    stats: Option<&NormalizationStats>,
) -> Result<(FeatureSchema, Vec<Record>, NormalizationStats)> {
    let schema = read_schema(schema_path)?;
    let raw = read_records(data_path, &schema)?;
    let stats = match stats {
        Some(s) => s.clone(),
        None => {
            let patterns: Vec<Pattern> = raw.iter().map(|r| r.pattern.clone()).collect();
            NormalizationStats::fit(&schema, &patterns)?
        }
    };
    let records = raw
        .into_iter()
        .map(|r| {
            Ok(Record {
                pattern: stats.apply(&r.pattern)?,
                target: r.target,
            })
        })
        .collect::<Result<_>>()?;
    Ok((schema, records, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature_space::FeatureDescriptor;

    fn schema() -> FeatureSchema {
        FeatureSchema::new(vec![
            FeatureDescriptor::categorical("material", ["CU", "AL"]),
            FeatureDescriptor::quantitative("rain"),
            FeatureDescriptor::circular("time_start", 1439),
            FeatureDescriptor::special("cable_section"),
            FeatureDescriptor::timeseries("petersen"),
        ])
        .unwrap()
    }

    #[test]
    fn write_then_read_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let records = vec![
            Record::target(Pattern::new(vec![
                FeatureValue::Label("CU".into()),
                FeatureValue::Scalar(0.1 + 0.2),
                FeatureValue::Circular(1439),
                FeatureValue::Special(None),
                FeatureValue::Events(vec![]),
            ])),
            Record {
                pattern: Pattern::new(vec![
                    FeatureValue::Label("AL".into()),
                    FeatureValue::Scalar(1e-17),
                    FeatureValue::Circular(0),
                    FeatureValue::Special(Some(0.123456789012345678)),
                    FeatureValue::Events(vec![3.5, 7200.25]),
                ]),
                target: None,
            },
        ];
        let path = dir.path().join("d.jsonl");
        write_records(&path, &records).unwrap();
        assert_eq!(read_records(&path, &schema()).unwrap(), records);
    }

    #[test]
    fn na_token_parses_to_not_applicable() {
        let line = r#"{"values":["CU", 0.5, 10, "NA", [1, 2]]}"#;
        let r = parse_records(line, &schema()).unwrap();
        assert_eq!(r[0].pattern.values[3], FeatureValue::Special(None));
    }

    #[test]
    fn wrong_arity_names_the_row() {
        let text = "# header\n{\"values\":[\"CU\", 0.5, 10, \"NA\", []]}\n{\"values\":[\"CU\", 0.5]}\n";
        match parse_records(text, &schema()) {
            Err(Error::Row { row, .. }) => assert_eq!(row, 3),
            other => panic!("expected a row error, got {other:?}"),
        }
    }

    #[test]
    fn wrong_kind_and_unknown_label() {
        assert!(parse_records(r#"{"values":["CU", "x", 10, "NA", []]}"#, &schema()).is_err());
        assert!(parse_records(r#"{"values":["FE", 0.1, 10, "NA", []]}"#, &schema()).is_err());
        assert!(parse_records(r#"{"values":["CU", 0.1, 1500, "NA", []]}"#, &schema()).is_err());
    }

    #[test]
    fn load_fits_then_reuses_stats() {
        let dir = tempfile::tempdir().unwrap();
        let schema_path = dir.path().join("schema.json");
        write_schema(&schema_path, &schema()).unwrap();
        let data = dir.path().join("train.jsonl");
        std::fs::write(
            &data,
            "{\"values\":[\"CU\", 10, 1, 2.0, []]}\n{\"values\":[\"AL\", 20, 2, \"NA\", [5]]}\n{\"values\":[\"AL\", 15, 2, 4.0, [5]]}\n",
        )
        .unwrap();
        let (_, recs, stats) = load_dataset(&data, &schema_path, None).unwrap();
        assert_eq!(recs[2].pattern.values[1], FeatureValue::Scalar(0.5));
        assert_eq!(recs[0].pattern.values[3], FeatureValue::Special(Some(0.0)));
        let test = dir.path().join("test.jsonl");
        std::fs::write(&test, "{\"values\":[\"CU\", 40, 1, 3.0, []]}\n").unwrap();
        let (_, recs, _) = load_dataset(&test, &schema_path, Some(&stats)).unwrap();
        assert_eq!(recs[0].pattern.values[1], FeatureValue::Scalar(1.0));
        assert_eq!(recs[0].pattern.values[3], FeatureValue::Special(Some(0.5)));
    }
}
