//! File formats: prediction CSVs, dataset CSVs, loss tables and JSON reports.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use batchrisk_core::complexity::LossTable;
use batchrisk_core::combinatorics::subsets_colex;
use batchrisk_core::hypotheses::{Dataset, Task};
use batchrisk_core::{EvalSet, LabeledPrediction, LossKind};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const EVAL_HEADER: [&str; 2] = ["prediction", "label"];

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn parse_error(source_name: &str, line: u64, row: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: source_name.to_string(),
        line,
        row,
        message: message.into(),
    }
}

fn parse_real(field: &str, column: &str) -> std::result::Result<f64, String> {
    let v: f64 = field
        .parse()
        .map_err(|_| format!("{column} '{field}' is not a number"))?;
    if !v.is_finite() {
        return Err(format!("{column} '{field}' is not finite"));
    }
    Ok(v)
}

/// Reads rows `f_1, ..., f_m` of reals below a header, calling `check` with
/// the 1-based data row.
fn read_real_rows<R: Read>(
    input: R,
    source_name: &str,
    expect_header: impl Fn(&[&str]) -> std::result::Result<(), String>,
) -> Result<(Vec<String>, Vec<(u64, u64, Vec<f64>)>)> {
    let mut rdr = reader(input);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| parse_error(source_name, 1, 0, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if header.iter().all(|h| h.is_empty()) {
        return Err(Error::EmptyInput(source_name.to_string()));
    }
    let names: Vec<&str> = header.iter().map(String::as_str).collect();
    expect_header(&names).map_err(|m| parse_error(source_name, 1, 0, m))?;
    let mut rows = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let row = i as u64 + 1;
        let record = record.map_err(|e| {
            let line = e.position().map_or(row + 1, |p| p.line());
            parse_error(source_name, line, row, e.to_string())
        })?;
        let line = record.position().map_or(row + 1, |p| p.line());
        if record.len() != header.len() {
            return Err(parse_error(
                source_name,
                line,
                row,
                format!("expected {} fields, found {}", header.len(), record.len()),
            ));
        }
        let values = record
            .iter()
            .zip(&header)
            .map(|(f, c)| parse_real(f, c))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|m| parse_error(source_name, line, row, m))?;
        rows.push((line, row, values));
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput(source_name.to_string()));
    }
    Ok((header, rows))
}

/// Parses `prediction,label` rows. With a loss kind, every row is checked
/// against its sample domains.
pub fn read_eval_csv<R: Read>(input: R, source_name: &str, kind: Option<LossKind>) -> Result<EvalSet> {
    let (_, rows) = read_real_rows(input, source_name, |h| {
        if h == EVAL_HEADER {
            Ok(())
        } else {
            Err(format!("expected header 'prediction,label', found '{}'", h.join(",")))
        }
    })?;
    let mut items = Vec::with_capacity(rows.len());
    for (line, row, v) in rows {
        let (p, y) = (v[0], v[1]);
        if let Some(kind) = kind {
            kind.check_sample_prediction(p)
                .and_then(|_| kind.check_sample_label(y))
                .map_err(|e| parse_error(source_name, line, row, e.to_string()))?;
        }
        items.push(LabeledPrediction::new(p, y));
    }
    Ok(EvalSet::new(items)?)
}

/// Parses an EvalSet CSV file.
pub fn parse_eval_csv(path: impl AsRef<Path>, kind: Option<LossKind>) -> Result<EvalSet> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_eval_csv(file, &path.display().to_string(), kind)
}

pub fn eval_csv_string(set: &EvalSet) -> String {
    let mut out = String::from("prediction,label\n");
    for z in set.items() {
        out.push_str(&format!("{},{}\n", z.prediction, z.label));
    }
    out
}

pub fn write_eval_csv<W: Write>(mut w: W, set: &EvalSet) -> Result<()> {
    w.write_all(eval_csv_string(set).as_bytes())
        .map_err(|e| Error::io("<writer>", e))
}

/// Dataset CSV with header `f0,...,f{d-1},label`.
pub fn dataset_csv_string(data: &Dataset) -> String {
    let d = data.feature_dim();
    let mut out: Vec<String> = (0..d).map(|j| format!("f{j}")).collect();
    out.push("label".into());
    let mut s = out.join(",");
    s.push('\n');
    for (x, y) in data.features.iter().zip(&data.labels) {
        for v in x {
            s.push_str(&format!("{v},"));
        }
        s.push_str(&format!("{y}\n"));
    }
    s
}

pub fn read_dataset_csv<R: Read>(input: R, source_name: &str, task: Task) -> Result<Dataset> {
    let (header, rows) = read_real_rows(input, source_name, |h| {
        let d = h.len().saturating_sub(1);
        let ok = h.len() >= 2
            && h[d] == "label"
            && h[..d].iter().enumerate().all(|(j, c)| *c == format!("f{j}"));
        if ok {
            Ok(())
        } else {
            Err(format!("expected header 'f0,...,fd,label', found '{}'", h.join(",")))
        }
    })?;
    let d = header.len() - 1;
    let (features, labels) = rows
        .into_iter()
        .map(|(_, _, mut v)| {
            let y = v.pop().unwrap_or_default();
            debug_assert_eq!(v.len(), d);
            (v, y)
        })
        .unzip();
    Ok(Dataset::new(task, features, labels)?)
}

/// JSON sidecar describing a loss table CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossTableSidecar {
    pub n: usize,
    pub k: usize,
    pub kind: Option<LossKind>,
    pub column_order: String,
    pub rows: usize,
    pub cols: usize,
}

fn column_name(subset: &[usize]) -> String {
    let parts: Vec<String> = subset.iter().map(usize::to_string).collect();
    format!("s{}", parts.join("_"))
}

/// Loss table as CSV (one row per hypothesis, raw values, columns named by
/// their subsets in colex order) plus its sidecar.
pub fn loss_table_csv(table: &LossTable, kind: Option<LossKind>) -> (String, LossTableSidecar) {
    let names: Vec<String> = subsets_colex(table.n(), table.k())
        .iter()
        .map(|s| column_name(s))
        .collect();
    let mut out = names.join(",");
    out.push('\n');
    for row in table.raw_rows() {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    let sidecar = LossTableSidecar {
        n: table.n(),
        k: table.k(),
        kind,
        column_order: "colex".into(),
        rows: table.rows(),
        cols: table.cols(),
    };
    (out, sidecar)
}

pub fn read_loss_table<R: Read>(input: R, source_name: &str, sidecar: &LossTableSidecar) -> Result<LossTable> {
    if sidecar.column_order != "colex" {
        return Err(Error::Config(format!(
            "unsupported column order '{}' (only colex)",
            sidecar.column_order
        )));
    }
    let expected: Vec<String> = subsets_colex(sidecar.n, sidecar.k)
        .iter()
        .map(|s| column_name(s))
        .collect();
    let (_, rows) = read_real_rows(input, source_name, |h| {
        if h.len() == expected.len() && h.iter().zip(&expected).all(|(a, b)| a == b) {
            Ok(())
        } else {
            Err(format!(
                "header does not list the {} colex subsets of C({}, {})",
                expected.len(),
                sidecar.n,
                sidecar.k
            ))
        }
    })?;
    let rows: Vec<Vec<f64>> = rows.into_iter().map(|(_, _, v)| v).collect();
    if rows.len() != sidecar.rows {
        return Err(Error::Config(format!(
            "sidecar lists {} rows, table has {}",
            sidecar.rows,
            rows.len()
        )));
    }
    Ok(LossTable::from_raw_rows(&rows, sidecar.n, sidecar.k)?)
}

/// Pretty JSON terminated by a newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: impl AsRef<Path>) -> Result<T> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_file(path: impl AsRef<Path>, contents: &str) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}
