//! Result files: the per-round CSV and the JSON summary next to it.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{BanditError, Result};

pub const RESULTS_HEADER: [&str; 6] = ["experiment_id", "policy", "rep", "t", "instant_regret", "cum_regret"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment_id: String,
    pub policy: String,
    pub rep: usize,
    pub t: usize,
    pub instant_regret: f64,
    pub cum_regret: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub policy: String,
    #[serde(rename = "T")]
    pub horizon: usize,
    pub n_rep: usize,
    pub final_regret_mean: f64,
    pub final_regret_stderr: f64,
    pub fitted_exponent: Option<f64>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BanditError + '_ {
    move |source| BanditError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> BanditError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(source) => BanditError::Io {
                path: path.to_path_buf(),
                source,
            },
            _ => unreachable!(),
        }
    } else {
        BanditError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }
}

/// Writes the CSV. Floats use the shortest representation that reads back exactly.
pub fn write_results(rows: &[ResultRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(BufWriter::new(file));
    w.write_record(RESULTS_HEADER).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = r.headers().map_err(|e| csv_err(path, e))?;
    if header.iter().ne(RESULTS_HEADER) {
        return Err(BanditError::Parse {
            path: path.to_path_buf(),
            message: format!("header must be {}", RESULTS_HEADER.join(",")),
        });
    }
    r.deserialize().map(|row| row.map_err(|e| csv_err(path, e))).collect()
}

/// The summary lives next to the CSV with a `.json` extension.
pub fn summary_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// A single summary is written as an object, several as an array.
pub fn write_summary(summaries: &[Summary], path: &Path) -> Result<()> {
    let text = match summaries {
        [one] => serde_json::to_string_pretty(one),
        many => serde_json::to_string_pretty(many),
    }
    .map_err(|e| BanditError::InvariantViolation(e.to_string()))?;
    let mut file = File::create(path).map_err(io_err(path))?;
    writeln!(file, "{text}").map_err(io_err(path))
}

pub fn read_summary(path: &Path) -> Result<Vec<Summary>> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let parse_err = |e: serde_json::Error| BanditError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let value: serde_json::Value = serde_json::from_str(&text).map_err(parse_err)?;
    if value.is_array() {
        serde_json::from_value(value).map_err(parse_err)
    } else {
        Ok(vec![serde_json::from_value(value).map_err(parse_err)?])
    }
}
