//! CSV and JSON emitters. Reals are written with 17 significant digits so the
//! output round-trips and is byte-identical for identical inputs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};

use super::dataset::{Cell, Dataset};
use super::report::{ComparisonReport, Scalar, Summary};
use crate::error::{CavityError, Result};

pub fn format_real(v: f64) -> Result<String> {
    if !v.is_finite() {
        return Err(CavityError::NonFinite("dataset cell"));
    }
    Ok(format!("{v:.16e}"))
}

fn cell_text(c: &Cell) -> Result<String> {
    Ok(match c {
        Cell::Int(v) => v.to_string(),
        Cell::Real(v) => format_real(*v)?,
        Cell::Bool(b) => b.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Empty => String::new(),
    })
}

pub fn write_csv<W: Write>(data: &Dataset, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    w.write_record(&data.columns)?;
    for row in &data.rows {
        if row.len() != data.columns.len() {
            return Err(CavityError::Dimension(format!(
                "row has {} cells, header has {}",
                row.len(),
                data.columns.len()
            )));
        }
        let cells: Vec<String> = row.iter().map(cell_text).collect::<Result<_>>()?;
        w.write_record(&cells)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(data: &Dataset, path: &Path) -> Result<()> {
    write_csv(data, BufWriter::new(File::create(path)?))
}

/// Reports flattened to one row each, complex values split into parts.
pub fn reports_dataset(reports: &[ComparisonReport]) -> Dataset {
    let mut out = Dataset::new(&[
        "quantity",
        "step",
        "analytic_re",
        "analytic_im",
        "numeric_re",
        "numeric_im",
        "abs_err",
        "rel_err",
        "tolerance",
        "passed",
        "trunc_dim",
        "tail_mass",
    ]);
    let parts = |s: &Scalar| match *s {
        Scalar::Real(v) => (Cell::Real(v), Cell::Empty),
        Scalar::Complex { re, im } => (Cell::Real(re), Cell::Real(im)),
    };
    for r in reports {
        let (ar, ai) = parts(&r.analytic);
        let (nr, ni) = parts(&r.numeric);
        out.rows.push(vec![
            Cell::Text(r.quantity.clone()),
            r.step.into(),
            ar,
            ai,
            nr,
            ni,
            r.abs_err.into(),
            r.rel_err.into(),
            r.tolerance.into(),
            r.passed.into(),
            (r.trunc_dim as u64).into(),
            r.tail_mass.into(),
        ]);
    }
    out
}

/// `{run_config, reports[], summary{passed, failed}}`, plus `aborted` when set.
pub fn report_json(run_config: Value, reports: &[ComparisonReport], aborted: Option<&super::Abort>) -> Result<Value> {
    let mut v = json!({
        "run_config": run_config,
        "reports": serde_json::to_value(reports)?,
        "summary": serde_json::to_value(Summary::of(reports))?,
    });
    if let Some(a) = aborted {
        v["aborted"] = serde_json::to_value(a)?;
    }
    Ok(v)
}

pub fn dataset_json(run_config: Value, data: &Dataset) -> Result<Value> {
    Ok(json!({
        "run_config": run_config,
        "columns": data.columns,
        "rows": serde_json::to_value(&data.rows)?,
    }))
}

pub fn write_json<W: Write>(v: &Value, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, v)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}
