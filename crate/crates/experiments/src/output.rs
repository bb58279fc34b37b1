//! Atomic CSV/JSON writers.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::ExperimentError;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `bytes` to `dir/name` through a temporary file in the same directory.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, ExperimentError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let path = dir.join(name);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(&path))?;
    tmp.as_file().sync_all().map_err(io_err(&path))?;
    tmp.persist(&path).map_err(|e| ExperimentError::Io {
        path: path.display().to_string(),
        source: e.error,
    })?;
    Ok(path)
}

/// Decimal with 16 significant digits.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.15e}")
}

/// In-memory CSV table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_numbers(&mut self, row: &[f64]) {
        self.push(row.iter().map(|&v| fmt_num(v)).collect());
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<PathBuf, ExperimentError> {
        write_atomic(dir, name, self.render().as_bytes())
    }
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, ExperimentError> {
    let mut text = serde_json::to_string_pretty(value).expect("summary serializes");
    text.push('\n');
    write_atomic(dir, name, text.as_bytes())
}

/// One entry of the plot manifest: a two-column CSV file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotEntry {
    pub file: String,
    pub x: String,
    pub y: String,
    pub description: String,
}

/// Writes `(x, y)` series as `plot_<name>.csv` files plus `plots.json`.
pub fn emit_plots(dir: &Path, plots: &[(PlotEntry, Vec<(f64, f64)>)]) -> Result<(), ExperimentError> {
    for (entry, data) in plots {
        let mut t = CsvTable::new([entry.x.as_str(), entry.y.as_str()]);
        for &(x, y) in data {
            t.push_numbers(&[x, y]);
        }
        t.write(dir, &entry.file)?;
    }
    let manifest: Vec<&PlotEntry> = plots.iter().map(|(e, _)| e).collect();
    write_json(dir, "plots.json", &manifest)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_sixteen_digits() {
        let s = fmt_num(std::f64::consts::PI);
        assert_eq!(s, "3.141592653589793e0");
        assert_eq!(s.parse::<f64>().unwrap(), std::f64::consts::PI);
        assert_eq!(fmt_num(0.0), "0.000000000000000e0");
    }

    #[test]
    fn csv_render_and_atomic_write() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = CsvTable::new(["time", "value"]);
        t.push_numbers(&[0.0, 1.5]);
        t.push_numbers(&[1.0, -2.0]);
        let path = t.write(dir.path(), "a.csv").unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "time,value\n0.000000000000000e0,1.500000000000000e0\n1.000000000000000e0,-2.000000000000000e0\n");
        t.write(dir.path(), "a.csv").unwrap();
        let names: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1, "no temporary files left behind: {names:?}");
    }

    #[test]
    fn plot_manifest_lists_files() {
        let dir = tempfile::tempdir().unwrap();
        let entry = PlotEntry {
            file: "plot_x.csv".into(),
            x: "t".into(),
            y: "v".into(),
            description: "test".into(),
        };
        emit_plots(dir.path(), &[(entry, vec![(0.0, 1.0)])]).unwrap();
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("plots.json")).unwrap()).unwrap();
        assert_eq!(manifest[0]["file"], "plot_x.csv");
        assert!(dir.path().join("plot_x.csv").exists());
    }
}
