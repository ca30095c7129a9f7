//! Dataset CSV files: header `y,delta,x1,...,xp`, one row per observation,
//! an empty `y` cell for a missing response (with `delta = 0`).

use std::io::{Read, Write};
use std::path::Path;

use expectile_el::model::Dataset;
use expectile_el::numkit::Matrix;
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct LoadedData {
    pub dataset: Dataset<f64>,
    pub columns: Vec<String>,
}

fn parse_float(cell: &str, line: usize, what: &str) -> Result<f64, CliError> {
    let v: f64 = cell
        .trim()
        .parse()
        .map_err(|_| CliError::CsvSchema(format!("line {line}: {what} '{cell}' is not a number")))?;
    if !v.is_finite() {
        return Err(CliError::CsvSchema(format!("line {line}: {what} is not finite")));
    }
    Ok(v)
}

pub fn read_dataset<R: Read>(reader: R) -> Result<LoadedData, CliError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    let names: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();
    if names.len() < 3 || names[0] != "y" || names[1] != "delta" {
        return Err(CliError::CsvSchema(
            "header must be y,delta,x1,...,xp with at least one covariate".into(),
        ));
    }
    let p = names.len() - 2;
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut delta = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        if rec.len() != p + 2 {
            return Err(CliError::CsvSchema(format!(
                "line {line}: expected {} fields, found {}",
                p + 2,
                rec.len()
            )));
        }
        let d = match rec[1].trim() {
            "1" => true,
            "0" => false,
            other => return Err(CliError::CsvSchema(format!("line {line}: delta '{other}' must be 0 or 1"))),
        };
        let ycell = rec[0].trim();
        let yv = match (d, ycell.is_empty()) {
            (true, true) => {
                return Err(CliError::CsvSchema(format!("line {line}: delta=1 but y is empty")));
            }
            (true, false) => Some(parse_float(ycell, line, "y")?),
            (false, _) => None,
        };
        for j in 0..p {
            x.push(parse_float(&rec[j + 2], line, &names[j + 2])?);
        }
        y.push(yv);
        delta.push(d);
    }
    let n = y.len();
    if n == 0 {
        return Err(CliError::CsvSchema("no data rows".into()));
    }
    let xm = Matrix::from_vec(n, p, x)?;
    Ok(LoadedData {
        dataset: Dataset::new(xm, y, delta)?,
        columns: names[2..].to_vec(),
    })
}

pub fn load_dataset(path: &Path) -> Result<LoadedData, CliError> {
    let f = std::fs::File::open(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    read_dataset(f)
}

/// Writes `ds` with `x1..xp` column names. Floats use the shortest
/// representation that parses back to the same value.
pub fn write_dataset<W: Write>(ds: &Dataset<f64>, writer: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["y".to_string(), "delta".to_string()];
    header.extend((1..=ds.p()).map(|j| format!("x{j}")));
    w.write_record(&header)?;
    for i in 0..ds.n() {
        let mut rec = Vec::with_capacity(ds.p() + 2);
        match ds.response(i) {
            Some(v) => {
                rec.push(v.to_string());
                rec.push("1".to_string());
            }
            None => {
                rec.push(String::new());
                rec.push("0".to_string());
            }
        }
        rec.extend(ds.row(i).iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| CliError::io("csv output", e))?;
    Ok(())
}

/// Column centring and scaling applied by `--standardize`.
#[derive(Debug, Clone, Serialize)]
pub struct Standardization {
    pub center: Vec<f64>,
    pub scale: Vec<f64>,
}

/// Centres each column at its mean and divides by its sample standard
/// deviation. Constant columns (such as an intercept) are left untouched.
pub fn standardize(ds: &Dataset<f64>) -> Result<(Dataset<f64>, Standardization), CliError> {
    let (n, p) = (ds.n(), ds.p());
    let mut center = vec![0.0; p];
    let mut scale = vec![1.0; p];
    for j in 0..p {
        let col = ds.x().column(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        if var > 0.0 {
            center[j] = mean;
            scale[j] = var.sqrt();
        }
    }
    let mut data = Vec::with_capacity(n * p);
    for i in 0..n {
        for j in 0..p {
            data.push((ds.row(i)[j] - center[j]) / scale[j]);
        }
    }
    let x = Matrix::from_vec(n, p, data)?;
    let delta = (0..n).map(|i| ds.delta(i)).collect();
    let out = Dataset::new(x, ds.responses().to_vec(), delta)?;
    Ok((out, Standardization { center, scale }))
}
