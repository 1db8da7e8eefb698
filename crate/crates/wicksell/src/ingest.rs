//! Reading observations and projected positions from delimited text.
//!
//! Files are UTF-8 with comma or whitespace separated fields. Blank lines and
//! lines starting with `#` are skipped, and a first content line that does not
//! parse as numbers is taken as a header.

use std::fs;
use std::path::Path;

use wicksell_core::model::CenterMode;
use wicksell_core::{Provenance, SampleSet};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: expected at least {expected} columns, found {found}")]
    Format {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("no data rows")]
    Empty,
}

pub fn parse_center(s: &str) -> Option<CenterMode> {
    match s {
        "origin" => Some(CenterMode::Origin),
        "centroid" => Some(CenterMode::Centroid),
        _ => None,
    }
}

fn fields(line: &str) -> Vec<&str> {
    if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

/// Numeric rows with at least `columns` fields, tagged with 1-based line numbers.
fn rows(text: &str, columns: usize) -> Result<Vec<(usize, Vec<f64>)>, IngestError> {
    let mut out = Vec::new();
    let mut seen_content = false;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells = fields(line);
        if cells.len() < columns {
            return Err(IngestError::Format {
                line: line_no,
                expected: columns,
                found: cells.len(),
            });
        }
        let parsed: Result<Vec<f64>, _> = cells[..columns].iter().map(|c| c.parse::<f64>()).collect();
        match parsed {
            Ok(values) => {
                if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
                    return Err(IngestError::Parse {
                        line: line_no,
                        message: format!("non-finite value `{}`", cells[bad]),
                    });
                }
                out.push((line_no, values));
            }
            Err(_) if !seen_content => {}
            Err(_) => {
                let bad = cells[..columns]
                    .iter()
                    .find(|c| c.parse::<f64>().is_err())
                    .copied()
                    .unwrap_or_default();
                return Err(IngestError::Parse {
                    line: line_no,
                    message: format!("`{bad}` is not a number"),
                });
            }
        }
        seen_content = true;
    }
    if out.is_empty() {
        return Err(IngestError::Empty);
    }
    Ok(out)
}

/// Squared distances of projected positions `(x, y)` from the chosen center.
pub fn parse_positions(text: &str, center: CenterMode) -> Result<Vec<f64>, IngestError> {
    let rows = rows(text, 2)?;
    let (cx, cy) = match center {
        CenterMode::Origin => (0.0, 0.0),
        CenterMode::Centroid => {
            let n = rows.len() as f64;
            let sx: f64 = rows.iter().map(|r| r.1[0]).sum();
            let sy: f64 = rows.iter().map(|r| r.1[1]).sum();
            (sx / n, sy / n)
        }
    };
    Ok(rows
        .iter()
        .map(|(_, r)| {
            let dx = r[0] - cx;
            let dy = r[1] - cy;
            dx * dx + dy * dy
        })
        .collect())
}

/// One nonnegative observation per row (first column).
pub fn parse_observations(text: &str) -> Result<Vec<f64>, IngestError> {
    let rows = rows(text, 1)?;
    rows.into_iter()
        .map(|(line, r)| {
            if r[0] < 0.0 {
                Err(IngestError::Parse {
                    line,
                    message: format!("observation {} is negative", r[0]),
                })
            } else {
                Ok(r[0])
            }
        })
        .collect()
}

fn read(path: &Path) -> Result<String, IngestError> {
    fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn ingest_positions(path: &Path, center: CenterMode) -> Result<SampleSet, IngestError> {
    let z_values = parse_positions(&read(path)?, center)?;
    Ok(SampleSet {
        z_values,
        provenance: Provenance::Ingested {
            source: path.display().to_string(),
            center,
        },
    })
}

pub fn read_observations(path: &Path) -> Result<Vec<f64>, IngestError> {
    parse_observations(&read(path)?)
}
