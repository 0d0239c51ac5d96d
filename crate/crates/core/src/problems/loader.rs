//! Dataset loaders for logistic regression: CSV (last column = label)
//! and svmlight (`label index:value ...`, 1-based indices).

use std::fs;
use std::path::Path;

use crate::error::CoreError;
use crate::problems::LogisticProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetFormat {
    Csv,
    Svmlight,
}

fn normalize_label(raw: f64, path: &str, line: usize) -> Result<f64, CoreError> {
    match raw {
        v if v == 1.0 => Ok(1.0),
        v if v == -1.0 => Ok(-1.0),
        v if v == 0.0 => Ok(-1.0),
        v => Err(CoreError::Parse {
            path: path.to_string(),
            line,
            message: format!("label {v} outside the -1/+1/0/1 convention"),
        }),
    }
}

/// Loads a dataset and wraps it as a logistic problem with the given
/// regularization weights.
pub fn load_sparse_dataset(
    path: &Path,
    format: DatasetFormat,
    lambda1: f64,
    lambda2: f64,
) -> Result<LogisticProblem, CoreError> {
    let text = fs::read_to_string(path).map_err(|source| CoreError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let pstr = path.display().to_string();
    match format {
        DatasetFormat::Csv => parse_csv(&text, &pstr, lambda1, lambda2),
        DatasetFormat::Svmlight => parse_svmlight(&text, &pstr, lambda1, lambda2),
    }
}

fn parse_csv(
    text: &str,
    path: &str,
    lambda1: f64,
    lambda2: f64,
) -> Result<LogisticProblem, CoreError> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<f64> = Vec::new();
    let mut dim: Option<usize> = None;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if fields.len() < 2 {
            return Err(CoreError::Parse {
                path: path.to_string(),
                line: lineno,
                message: "need at least one feature column and a label".into(),
            });
        }
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        let values = match parsed {
            Ok(v) => v,
            // A non-numeric first row is an optional header.
            Err(_) if rows.is_empty() && labels.is_empty() => continue,
            Err(e) => {
                return Err(CoreError::Parse {
                    path: path.to_string(),
                    line: lineno,
                    message: e.to_string(),
                })
            }
        };
        let d = values.len() - 1;
        if let Some(expected) = dim {
            if d != expected {
                return Err(CoreError::Parse {
                    path: path.to_string(),
                    line: lineno,
                    message: format!("row has {d} features, expected {expected}"),
                });
            }
        } else {
            dim = Some(d);
        }
        labels.push(normalize_label(values[d], path, lineno)?);
        rows.push(values[..d].to_vec());
    }
    let dim = dim.ok_or_else(|| CoreError::Parse {
        path: path.to_string(),
        line: 0,
        message: "empty dataset".into(),
    })?;
    let data: Vec<f64> = rows.into_iter().flatten().collect();
    LogisticProblem::new(data, labels, dim, lambda1, lambda2)
}

fn parse_svmlight(
    text: &str,
    path: &str,
    lambda1: f64,
    lambda2: f64,
) -> Result<LogisticProblem, CoreError> {
    let mut entries: Vec<(f64, Vec<(usize, f64)>)> = Vec::new();
    let mut max_index = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let label_str = parts.next().unwrap();
        let raw: f64 = label_str.parse().map_err(|e: std::num::ParseFloatError| CoreError::Parse {
            path: path.to_string(),
            line: lineno,
            message: format!("bad label `{label_str}`: {e}"),
        })?;
        let label = normalize_label(raw, path, lineno)?;
        let mut feats = Vec::new();
        for tok in parts {
            let (i_str, v_str) = tok.split_once(':').ok_or_else(|| CoreError::Parse {
                path: path.to_string(),
                line: lineno,
                message: format!("expected index:value, got `{tok}`"),
            })?;
            let one_based: usize = i_str.parse().map_err(|e: std::num::ParseIntError| CoreError::Parse {
                path: path.to_string(),
                line: lineno,
                message: format!("bad index `{i_str}`: {e}"),
            })?;
            if one_based == 0 {
                return Err(CoreError::Parse {
                    path: path.to_string(),
                    line: lineno,
                    message: "svmlight indices are 1-based".into(),
                });
            }
            let value: f64 = v_str.parse().map_err(|e: std::num::ParseFloatError| CoreError::Parse {
                path: path.to_string(),
                line: lineno,
                message: format!("bad value `{v_str}`: {e}"),
            })?;
            max_index = max_index.max(one_based);
            feats.push((one_based - 1, value));
        }
        entries.push((label, feats));
    }
    if entries.is_empty() {
        return Err(CoreError::Parse {
            path: path.to_string(),
            line: 0,
            message: "empty dataset".into(),
        });
    }
    let dim = max_index;
    let mut data = vec![0.0; entries.len() * dim];
    let mut labels = Vec::with_capacity(entries.len());
    for (r, (label, feats)) in entries.into_iter().enumerate() {
        labels.push(label);
        for (c, v) in feats {
            data[r * dim + c] = v;
        }
    }
    LogisticProblem::new(data, labels, dim, lambda1, lambda2)
}
