use std::path::Path;

use super::LogRecord;
use crate::error::{BanditError, Result};

const LOG_HEADER: [&str; 4] = ["context", "action", "reward", "propensity"];

fn parse_err(path: &Path, message: impl Into<String>) -> BanditError {
    BanditError::Parse {
        path: path.to_path_buf(),
        message: message.into(),
    }
}

fn csv_err(path: &Path, e: csv::Error) -> BanditError {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => BanditError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => parse_err(path, format!("{other:?}")),
    }
}

fn open_reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    let file = std::fs::File::open(path).map_err(|source| BanditError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn field<T: std::str::FromStr>(path: &Path, line: usize, name: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| parse_err(path, format!("line {line}: cannot parse {name} from {raw:?}")))
}

/// Reads a log with header `context,action,reward,propensity`.
pub fn read_log(path: &Path) -> Result<Vec<LogRecord>> {
    let mut reader = open_reader(path)?;
    let header = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.iter().collect::<Vec<_>>() != LOG_HEADER {
        return Err(parse_err(
            path,
            format!("expected header {}, found {}", LOG_HEADER.join(","), header.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let line = i + 2;
        let rec = LogRecord::new(
            field(path, line, "context", &row[0])?,
            field(path, line, "action", &row[1])?,
            field(path, line, "reward", &row[2])?,
            field(path, line, "propensity", &row[3])?,
        )
        .map_err(|e| parse_err(path, format!("line {line}: {e}")))?;
        out.push(rec);
    }
    Ok(out)
}

pub fn write_log(path: &Path, log: &[LogRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(LOG_HEADER).map_err(|e| csv_err(path, e))?;
    for r in log {
        w.write_record([
            r.context.to_string(),
            r.action.to_string(),
            r.reward.to_string(),
            r.propensity.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|source| BanditError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads a per-context table with header `context,p0,p1,...`, returning rows
/// indexed by context. Every context `0..C` must appear exactly once.
pub fn read_table(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = open_reader(path)?;
    let header = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.len() < 2 || &header[0] != "context" {
        return Err(parse_err(path, "expected header context,p0,p1,..."));
    }
    let arms = header.len() - 1;
    let mut rows: Vec<Option<Vec<f64>>> = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| csv_err(path, e))?;
        let line = i + 2;
        let c: usize = field(path, line, "context", &row[0])?;
        let values = (1..=arms)
            .map(|j| field(path, line, &header[j], &row[j]))
            .collect::<Result<Vec<f64>>>()?;
        if rows.len() <= c {
            rows.resize(c + 1, None);
        }
        if rows[c].replace(values).is_some() {
            return Err(parse_err(path, format!("line {line}: context {c} listed twice")));
        }
    }
    if rows.is_empty() {
        return Err(parse_err(path, "table has no rows"));
    }
    rows.into_iter()
        .enumerate()
        .map(|(c, r)| r.ok_or_else(|| parse_err(path, format!("context {c} missing"))))
        .collect()
}

pub fn write_table(path: &Path, rows: &[Vec<f64>]) -> Result<()> {
    let arms = rows.first().map(Vec::len).unwrap_or(0);
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut header = vec!["context".to_string()];
    header.extend((0..arms).map(|a| format!("p{a}")));
    w.write_record(&header).map_err(|e| csv_err(path, e))?;
    for (c, row) in rows.iter().enumerate() {
        let mut rec = vec![c.to_string()];
        rec.extend(row.iter().map(f64::to_string));
        w.write_record(&rec).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|source| BanditError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.csv");
        let log = vec![
            LogRecord::new(0, 1, 0.25, 0.5).unwrap(),
            LogRecord::new(2, 0, 1.0, 0.125).unwrap(),
        ];
        write_log(&path, &log).unwrap();
        assert_eq!(read_log(&path).unwrap(), log);
    }

    #[test]
    fn table_round_trip_and_order() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "context,p0,p1\n1,0.2,0.8\n0,1,0\n").unwrap();
        assert_eq!(read_table(&path).unwrap(), vec![vec![1.0, 0.0], vec![0.2, 0.8]]);
        write_table(&path, &[vec![0.5, 0.5]]).unwrap();
        assert_eq!(read_table(&path).unwrap(), vec![vec![0.5, 0.5]]);
    }

    #[test]
    fn malformed_inputs() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "ctx,action,reward,propensity\n0,0,1,0.5\n").unwrap();
        assert!(matches!(read_log(&path), Err(BanditError::Parse { .. })));
        std::fs::write(&path, "context,action,reward,propensity\n0,x,1,0.5\n").unwrap();
        assert!(matches!(read_log(&path), Err(BanditError::Parse { .. })));
        std::fs::write(&path, "context,p0\n0,1\n2,1\n").unwrap();
        assert!(read_table(&path).is_err());
        assert!(matches!(
            read_log(&dir.path().join("missing.csv")),
            Err(BanditError::Io { .. })
        ));
    }
}
