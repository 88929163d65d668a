//! Decoders for user-supplied input: numeric CSV tables and candidate
//! subset lists.

use std::io::Read;

use ndarray::{Array1, Array2};

use crate::data::Dataset;
use crate::error::ParseError;

/// Picks the response column by header name, falling back to a 0-based
/// column index when no header matches.
pub fn resolve_column(headers: &[String], selector: &str) -> Result<usize, ParseError> {
    let selector = selector.trim();
    if let Some(pos) = headers.iter().position(|h| h == selector) {
        return Ok(pos);
    }
    match selector.parse::<usize>() {
        Ok(idx) if idx < headers.len() => Ok(idx),
        _ => Err(ParseError::UnknownResponse(selector.to_string())),
    }
}

/// Reads a headed, all-numeric CSV table. The response column becomes `y`;
/// the remaining columns, in file order, become `x`.
pub fn parse_csv_dataset<R: Read>(reader: R, response: &str) -> Result<Dataset, ParseError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr
        .headers()
        .map_err(|e| ParseError::Csv(e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(ParseError::MissingHeader);
    }
    let width = headers.len();
    let target = resolve_column(&headers, response)?;

    let mut cells: Vec<f64> = Vec::new();
    let mut rows = 0usize;
    for record in rdr.records() {
        let record = record.map_err(|e| ParseError::Csv(e.to_string()))?;
        let line = record.position().map_or(rows + 2, |p| p.line() as usize);
        if record.len() != width {
            return Err(ParseError::Ragged {
                row: line,
                expected: width,
                found: record.len(),
            });
        }
        for (column, field) in record.iter().enumerate() {
            let value: f64 = field.parse().map_err(|_| ParseError::NotNumeric {
                row: line,
                column: column + 1,
                value: field.to_string(),
            })?;
            if !value.is_finite() {
                return Err(ParseError::NonFinite {
                    row: line,
                    column: column + 1,
                });
            }
            cells.push(value);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(ParseError::NoRows);
    }

    let table = Array2::from_shape_vec((rows, width), cells).expect("rectangular by construction");
    let predictors: Vec<usize> = (0..width).filter(|&c| c != target).collect();
    let x = table.select(ndarray::Axis(1), &predictors);
    let y: Array1<f64> = table.column(target).to_owned();
    let names = predictors.iter().map(|&c| headers[c].clone()).collect();
    Ok(Dataset::new(x, y)
        .expect("finite and shape-checked")
        .with_feature_names(names))
}

/// Parses a candidate subset list: one candidate per line, predictors
/// separated by commas and given by name or 0-based predictor index.
/// A line holding only `-` is the intercept-only model. Blank lines and
/// lines starting with `#` are ignored.
pub fn parse_subset_list(
    text: &str,
    feature_names: &[String],
    response_name: Option<&str>,
) -> Result<Vec<Vec<usize>>, ParseError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "-" {
            out.push(Vec::new());
            continue;
        }
        let mut features = Vec::new();
        for token in line.split(',').map(str::trim) {
            if response_name == Some(token) {
                return Err(ParseError::ResponseAsPredictor { line: line_no });
            }
            let idx = match feature_names.iter().position(|n| n == token) {
                Some(i) => i,
                None => match token.parse::<usize>() {
                    Ok(i) if i < feature_names.len() => i,
                    _ => {
                        return Err(ParseError::UnknownColumn {
                            line: line_no,
                            name: token.to_string(),
                        })
                    }
                },
            };
            if features.contains(&idx) {
                return Err(ParseError::DuplicateColumn {
                    line: line_no,
                    name: token.to_string(),
                });
            }
            features.push(idx);
        }
        features.sort_unstable();
        out.push(features);
    }
    Ok(out)
}
