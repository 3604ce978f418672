//! File formats and serialization.
//!
//! Formats:
//! - edge list: one `u v` pair per line, whitespace separated, `#` starts
//!   a comment;
//! - features: CSV `id,f0,...`, header row required, one row per node;
//! - sensitive attributes: CSV `id,s` (header optional on input), values
//!   binarized one-vs-rest when a positive class is given;
//! - predictions: CSV `id,y,yhat[,score]` for nodes,
//!   `src,dst,y,yhat[,score]` for edges;
//! - id map: CSV `new_id,original_id`;
//! - pipeline config: flat `key=value` lines;
//! - reports: JSON with floats rounded to 12 significant digits.
//!
//! Writers emit a canonical form (sorted edges, dense row order, shortest
//! round-trip float text), so write-then-read is the identity and equal
//! in-memory state produces byte-identical files.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::augment::PipelineConfig;
use crate::error::{Error, Result};
use crate::graph::{FeatureMatrix, Graph, SensitiveAttrs};
use crate::metrics::BinaryPredictions;

pub const JSON_SIGNIFICANT_DIGITS: i32 = 12;

// ---------------------------------------------------------------- edge list

pub fn parse_edge_list(text: &str, path: &Path) -> Result<Vec<(usize, usize)>> {
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<usize> {
            tok.ok_or_else(|| Error::parse(path, lineno + 1, "expected two node ids"))?
                .parse::<usize>()
                .map_err(|_| Error::parse(path, lineno + 1, "node ids must be unsigned integers"))
        };
        let u = parse(it.next())?;
        let v = parse(it.next())?;
        if it.next().is_some() {
            return Err(Error::parse(path, lineno + 1, "expected exactly two node ids"));
        }
        edges.push((u, v));
    }
    Ok(edges)
}

pub fn read_edge_list(path: &Path) -> Result<Vec<(usize, usize)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, path)
}

pub fn write_edge_list(path: &Path, graph: &Graph) -> Result<()> {
    let mut out = String::new();
    for (u, v) in graph.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------- features

pub fn read_features_csv(path: &Path) -> Result<FeatureMatrix> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::parse(path, 0, e.to_string()))?;
    let cols = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .len();
    if cols < 2 {
        return Err(Error::parse(path, 1, "expected an id column plus features"));
    }
    let f = cols - 1;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::parse(path, 0, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != cols {
            return Err(Error::parse(path, line, "inconsistent column count"));
        }
        let id: usize = record[0]
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, line, "node id must be an unsigned integer"))?;
        let mut values = Vec::with_capacity(f);
        for field in record.iter().skip(1) {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::parse(path, line, "feature values must be real numbers"))?;
            values.push(v);
        }
        rows.push((id, values));
    }
    let n = rows.len();
    let mut data = vec![f64::NAN; n * f];
    let mut seen = vec![false; n];
    for (id, values) in rows {
        if id >= n || seen[id] {
            return Err(Error::parse(
                path,
                0,
                format!("node ids must be a permutation of 0..{n}; saw {id} twice or out of range"),
            ));
        }
        seen[id] = true;
        data[id * f..(id + 1) * f].copy_from_slice(&values);
    }
    FeatureMatrix::from_vec(n, f, data)
}

pub fn write_features_csv(path: &Path, features: &FeatureMatrix) -> Result<()> {
    let mut out = String::from("id");
    for j in 0..features.cols() {
        out.push_str(&format!(",f{j}"));
    }
    out.push('\n');
    for i in 0..features.rows() {
        out.push_str(&i.to_string());
        for v in features.row(i) {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------- sensitive

/// Reads the two-column attribute CSV. Non-binary values require
/// `positive_class`, which binarizes one-vs-rest.
pub fn read_sensitive_csv(path: &Path, positive_class: Option<i64>) -> Result<SensitiveAttrs> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut pairs: Vec<(usize, i64)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let a = fields.next().unwrap_or("").trim().to_string();
        let b = fields.next().unwrap_or("").trim().to_string();
        if fields.next().is_some() {
            return Err(Error::parse(path, lineno + 1, "expected two columns"));
        }
        match (a.parse::<usize>(), b.parse::<i64>()) {
            (Ok(id), Ok(value)) => pairs.push((id, value)),
            _ if lineno == 0 => continue, // header row
            _ => {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    "expected `node id, integer attribute`",
                ))
            }
        }
    }
    let n = pairs.len();
    let mut values = vec![u8::MAX; n];
    for (id, raw) in pairs {
        if id >= n || values[id] != u8::MAX {
            return Err(Error::parse(
                path,
                0,
                format!("node ids must be a permutation of 0..{n}; saw {id} twice or out of range"),
            ));
        }
        values[id] = match positive_class {
            Some(pos) => u8::from(raw == pos),
            None => {
                if raw == 0 || raw == 1 {
                    raw as u8
                } else {
                    return Err(Error::invalid(format!(
                        "sensitive value {raw} at node {id} is not binary; pass --positive-class to binarize"
                    )));
                }
            }
        };
    }
    SensitiveAttrs::new(values)
}

pub fn write_sensitive_csv(path: &Path, s: &SensitiveAttrs) -> Result<()> {
    let mut out = String::from("id,s\n");
    for (i, v) in s.iter().enumerate() {
        out.push_str(&format!("{i},{v}\n"));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn write_id_map_csv(path: &Path, id_map: &[usize]) -> Result<()> {
    let mut out = String::from("new_id,original_id\n");
    for (new, original) in id_map.iter().enumerate() {
        out.push_str(&format!("{new},{original}\n"));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------- predictions

fn parse_label(field: &str, path: &Path, line: usize) -> Result<u8> {
    match field.trim() {
        "0" => Ok(0),
        "1" => Ok(1),
        other => Err(Error::parse(path, line, format!("label `{other}` must be 0 or 1"))),
    }
}

fn open_predictions(
    path: &Path,
    id_cols: &[&str],
) -> Result<(csv::Reader<fs::File>, bool)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::parse(path, 0, e.to_string()))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::parse(path, 1, e.to_string()))?
        .clone();
    let expected: Vec<&str> = id_cols.iter().copied().chain(["y", "yhat"]).collect();
    let names: Vec<String> = headers.iter().map(|h| h.trim().to_string()).collect();
    let has_score = match names.len() {
        l if l == expected.len() => false,
        l if l == expected.len() + 1 && names[l - 1] == "score" => true,
        _ => {
            return Err(Error::parse(
                path,
                1,
                format!("expected header `{}[,score]`", expected.join(",")),
            ))
        }
    };
    for (got, want) in names.iter().zip(&expected) {
        if got != want {
            return Err(Error::parse(
                path,
                1,
                format!("expected header `{}[,score]`", expected.join(",")),
            ));
        }
    }
    Ok((reader, has_score))
}

fn parse_prediction_row(
    record: &csv::StringRecord,
    offset: usize,
    has_score: bool,
    path: &Path,
) -> Result<(u8, u8, Option<f64>)> {
    let line = record.position().map_or(0, |p| p.line() as usize);
    let y = parse_label(&record[offset], path, line)?;
    let yhat = parse_label(&record[offset + 1], path, line)?;
    let score = if has_score {
        Some(
            record[offset + 2]
                .trim()
                .parse::<f64>()
                .map_err(|_| Error::parse(path, line, "score must be a real number"))?,
        )
    } else {
        None
    };
    Ok((y, yhat, score))
}

/// Node predictions: returns the record ids alongside the labels.
pub fn read_node_predictions(path: &Path) -> Result<(Vec<usize>, BinaryPredictions)> {
    let (mut reader, has_score) = open_predictions(path, &["id"])?;
    let mut ids = Vec::new();
    let mut y = Vec::new();
    let mut yhat = Vec::new();
    let mut scores = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::parse(path, 0, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        ids.push(
            record[0]
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::parse(path, line, "id must be an unsigned integer"))?,
        );
        let (a, b, sc) = parse_prediction_row(&record, 1, has_score, path)?;
        y.push(a);
        yhat.push(b);
        if let Some(sc) = sc {
            scores.push(sc);
        }
    }
    let preds = BinaryPredictions::new(y, yhat, has_score.then_some(scores))?;
    Ok((ids, preds))
}

/// Edge predictions: returns the candidate endpoints alongside the labels.
pub fn read_edge_predictions(path: &Path) -> Result<(Vec<(usize, usize)>, BinaryPredictions)> {
    let (mut reader, has_score) = open_predictions(path, &["src", "dst"])?;
    let mut edges = Vec::new();
    let mut y = Vec::new();
    let mut yhat = Vec::new();
    let mut scores = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::parse(path, 0, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let endpoint = |i: usize| -> Result<usize> {
            record[i]
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::parse(path, line, "endpoints must be unsigned integers"))
        };
        edges.push((endpoint(0)?, endpoint(1)?));
        let (a, b, sc) = parse_prediction_row(&record, 2, has_score, path)?;
        y.push(a);
        yhat.push(b);
        if let Some(sc) = sc {
            scores.push(sc);
        }
    }
    let preds = BinaryPredictions::new(y, yhat, has_score.then_some(scores))?;
    Ok((edges, preds))
}

// ---------------------------------------------------------------- config

/// Flat `key=value` pipeline configuration. Missing keys keep their
/// defaults; `removal_cap` defaults to `pi / 2` unless set explicitly.
pub fn parse_pipeline_config(text: &str, path: &Path) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::default();
    let mut cap_set = false;
    let mut pi_set = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(path, lineno + 1, "expected `key=value`"))?;
        let key = key.trim();
        let value = value.trim();
        let bad = |what: &str| Error::parse(path, lineno + 1, format!("{key} must be {what}"));
        let parse_bool = |v: &str| match v {
            "true" | "1" => Ok(true),
            "false" | "0" => Ok(false),
            _ => Err(bad("true/false")),
        };
        match key {
            "enable_ns" => cfg.enable_ns = parse_bool(value)?,
            "enable_ed" => cfg.enable_ed = parse_bool(value)?,
            "enable_ea" => cfg.enable_ea = parse_bool(value)?,
            "enable_fm" => cfg.enable_fm = parse_bool(value)?,
            "alpha" => cfg.masking.alpha = value.parse().map_err(|_| bad("a real number"))?,
            "pi" => {
                cfg.deletion.pi = value.parse().map_err(|_| bad("a real number"))?;
                pi_set = true;
            }
            "removal_cap" => {
                cfg.deletion.removal_cap = value.parse().map_err(|_| bad("a real number"))?;
                cap_set = true;
            }
            "min_fraction_chi" => {
                cfg.sampling.min_fraction_chi = value.parse().map_err(|_| bad("a real number"))?
            }
            "min_fraction_omega" => {
                cfg.sampling.min_fraction_omega = value.parse().map_err(|_| bad("a real number"))?
            }
            "phi" => cfg.sampling.phi = value.parse().map_err(|_| bad("a real number"))?,
            "seed" => cfg.seed = value.parse().map_err(|_| bad("a 64-bit unsigned integer"))?,
            other => {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    format!("unknown configuration key `{other}`"),
                ))
            }
        }
    }
    if pi_set && !cap_set {
        cfg.deletion.removal_cap = cfg.deletion.pi / 2.0;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn read_pipeline_config(path: &Path) -> Result<PipelineConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pipeline_config(&text, path)
}

// ---------------------------------------------------------------- json

/// Rounds to `sig` significant digits; exact for zero and non-finite.
pub fn round_sig(x: f64, sig: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", (sig - 1) as usize, x)
        .parse()
        .expect("scientific notation round-trips")
}

fn round_json_floats(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Number(n) => {
            if n.is_f64() {
                let rounded = round_sig(n.as_f64().expect("checked f64"), JSON_SIGNIFICANT_DIGITS);
                if let Some(num) = serde_json::Number::from_f64(rounded) {
                    *n = num;
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(round_json_floats),
        serde_json::Value::Object(map) => map.values_mut().for_each(round_json_floats),
        _ => {}
    }
}

/// Pretty JSON with floats at 12 significant digits and a trailing
/// newline; keys are sorted alphabetically, so equal values always
/// serialize to equal bytes.
pub fn to_report_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_json_floats(&mut v);
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

pub fn write_report_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    fs::write(path, to_report_json(value)?).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------- manifest

pub fn sha256_hex(path: &Path) -> Result<String> {
    let mut file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 8192];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    let digest = hasher.finalize();
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Reproducibility record written next to augmented outputs: identical
/// manifests (ignoring `duration_ms`) imply bit-identical output files,
/// which the output digests make directly checkable.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub seed: u64,
    pub config: PipelineConfig,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
    pub duration_ms: u64,
}
