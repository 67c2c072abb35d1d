//! Output files: solution snapshots, modal tables, check reports and the
//! eigen-system cache.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use fracspec_core::sturm_liouville::EigenSystem;
use fracspec_core::CheckReport;
use serde::Serialize;

use crate::format::num;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> IoError + '_ {
    move |source| IoError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<(), IoError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// `snapshot_t<time>.csv` inside `dir`.
pub fn snapshot_path(dir: &Path, t: f64) -> PathBuf {
    dir.join(format!("snapshot_t{}.csv", num(t)))
}

/// One snapshot with header `x,u`.
pub fn write_snapshot(path: &Path, xs: &[f64], us: &[f64]) -> Result<(), IoError> {
    write_csv(
        path,
        &["x", "u"],
        xs.iter().zip(us).map(|(&x, &u)| vec![num(x), num(u)]),
    )
}

/// Modal table with header `i,lambda_i,c_i,T_i(T)`; `i` starts at 1.
pub fn write_modes(
    path: &Path,
    lambdas: &[f64],
    coefficients: &[f64],
    final_factors: &[f64],
) -> Result<(), IoError> {
    let rows = lambdas
        .iter()
        .zip(coefficients)
        .zip(final_factors)
        .enumerate()
        .map(|(i, ((&l, &c), &f))| vec![(i + 1).to_string(), num(l), num(c), num(f)]);
    write_csv(path, &["i", "lambda_i", "c_i", "T_i(T)"], rows)
}

#[derive(Serialize)]
struct ReportRecord<'a> {
    name: &'a str,
    passed: bool,
    applicable: bool,
    measured: Option<f64>,
    bound: Option<f64>,
    details: &'a str,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// One JSON object per line; non-finite numbers are written as `null`.
pub fn report_json(r: &CheckReport) -> String {
    let rec = ReportRecord {
        name: &r.name,
        passed: r.passed,
        applicable: r.applicable,
        measured: finite(r.measured),
        bound: finite(r.bound),
        details: &r.details,
    };
    serde_json::to_string(&rec).expect("report serialisation cannot fail")
}

pub fn write_checks(path: &Path, reports: &[CheckReport]) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for r in reports {
        writeln!(w, "{}", report_json(r)).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_lines(path: &Path, lines: &[String]) -> Result<(), IoError> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for l in lines {
        writeln!(w, "{l}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Eigen system export: header `i,lambda_i,<x_0>,…,<x_M>`, then one row per
/// mode with the eigenfunction samples.
pub fn write_eigen(path: &Path, sys: &EigenSystem) -> Result<(), IoError> {
    let mut header: Vec<String> = vec!["i".into(), "lambda_i".into()];
    header.extend(sys.grid().iter().map(|&x| num(x)));
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(&header).map_err(csv_err(path))?;
    for (i, &l) in sys.lambdas().iter().enumerate() {
        let mut row = vec![(i + 1).to_string(), num(l)];
        row.extend(sys.mode(i).iter().map(|&v| num(v)));
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Reads a file written by [`write_eigen`].
pub fn read_eigen(path: &Path) -> Result<EigenSystem, IoError> {
    let bad = |message: String| IoError::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?.clone();
    if header.len() < 5 || &header[0] != "i" || &header[1] != "lambda_i" {
        return Err(bad("expected header i,lambda_i,<grid points>".into()));
    }
    let length: f64 = header[header.len() - 1].parse().map_err(|_| {
        bad(format!(
            "grid point {:?} is not a number",
            &header[header.len() - 1]
        ))
    })?;
    let mut lambdas = Vec::new();
    let mut modes = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        let values: Vec<f64> = rec
            .iter()
            .skip(1)
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| bad(format!("row {}: {e}", k + 1)))?;
        lambdas.push(values[0]);
        modes.push(values[1..].to_vec());
    }
    EigenSystem::from_parts(length, lambdas, modes).map_err(|e| bad(e.to_string()))
}
