use std::path::Path;

use serde::Serialize;

use super::ExperimentError;

/// One CSV column with its unit for the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileRecord {
    pub file: String,
    pub columns: Vec<Column>,
    pub rows: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

fn format_cell(c: Cell) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Num(v) if v == 0.0 || (1e-4..1e15).contains(&v.abs()) => format!("{v}"),
        Cell::Num(v) => format!("{v:e}"),
        Cell::Empty => String::new(),
    }
}

/// Writes `rows` under a header row. Floats use the shortest representation
/// that round-trips, so reruns are byte-identical.
pub fn write_table(
    dir: &Path,
    file: &str,
    columns: &[Column],
    rows: &[Vec<Cell>],
) -> Result<FileRecord, ExperimentError> {
    let path = dir.join(file);
    let mut w = csv::Writer::from_path(&path).map_err(|e| io_error(&path, e))?;
    w.write_record(columns.iter().map(|c| c.name))
        .map_err(|e| io_error(&path, e))?;
    for r in rows {
        debug_assert_eq!(r.len(), columns.len());
        w.write_record(r.iter().map(|&c| format_cell(c)))
            .map_err(|e| io_error(&path, e))?;
    }
    w.flush().map_err(|e| io_error(&path, e))?;
    Ok(FileRecord {
        file: file.to_string(),
        columns: columns.to_vec(),
        rows: rows.len(),
    })
}

/// Writes string records, used where a column is categorical.
pub fn write_records(
    dir: &Path,
    file: &str,
    columns: &[Column],
    rows: &[Vec<String>],
) -> Result<FileRecord, ExperimentError> {
    let path = dir.join(file);
    let mut w = csv::Writer::from_path(&path).map_err(|e| io_error(&path, e))?;
    w.write_record(columns.iter().map(|c| c.name))
        .map_err(|e| io_error(&path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| io_error(&path, e))?;
    }
    w.flush().map_err(|e| io_error(&path, e))?;
    Ok(FileRecord {
        file: file.to_string(),
        columns: columns.to_vec(),
        rows: rows.len(),
    })
}

pub fn write_json<T: Serialize>(dir: &Path, file: &str, value: &T) -> Result<(), ExperimentError> {
    let path = dir.join(file);
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
    std::fs::write(&path, text + "\n").map_err(|e| io_error(&path, e))
}

fn io_error(path: &Path, e: impl std::fmt::Display) -> ExperimentError {
    ExperimentError::Io(format!("{}: {e}", path.display()))
}

/// File-name friendly rendering of a small positive number, e.g. `1e-4`.
pub fn tag(x: f64) -> String {
    format!("{x:e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cols = [col("x", "1"), col("y", "V")];
        let rows = vec![
            vec![Cell::Num(0.1), Cell::Empty],
            vec![Cell::Num(1e-300), Cell::Int(2)],
            vec![Cell::Num(-2.5e20), Cell::Num(0.0)],
        ];
        let rec = write_table(dir.path(), "t.csv", &cols, &rows).unwrap();
        assert_eq!(rec.rows, 3);
        let text = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
        assert_eq!(text, "x,y\n0.1,\n1e-300,2\n-2.5e20,0\n");
    }

    #[test]
    fn tags() {
        assert_eq!(tag(1e-4), "1e-4");
        assert_eq!(tag(0.5), "5e-1");
    }
}
