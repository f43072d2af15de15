//! CSV/JSON emission. Files appear only once fully written.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use rearrangement::Trajectory;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Builds a CSV table from a header and rows of already formatted cells.
pub struct Table {
    w: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header.iter().map(|s| s.as_ref())).expect("in-memory write");
        Table { w }
    }

    pub fn row<S: AsRef<[u8]>>(&mut self, cells: impl IntoIterator<Item = S>) {
        self.w.write_record(cells).expect("in-memory write");
    }

    pub fn finish(self) -> String {
        String::from_utf8(self.w.into_inner().expect("in-memory flush")).expect("cells are utf-8")
    }
}

/// `index,sum_0,…,sum_{d-1},last_term_mag`, one row per sample.
pub fn trajectory_csv(t: &Trajectory) -> String {
    let mut header = vec!["index".to_string()];
    header.extend((0..t.dim).map(|c| format!("sum_{c}")));
    header.push("last_term_mag".into());
    let mut tab = Table::new(&header);
    for i in 0..t.len() {
        let mut row = vec![t.indices[i].to_string()];
        row.extend(t.sums[i].iter().map(f64::to_string));
        row.push(t.last_term_mag[i].to_string());
        tab.row(row);
    }
    tab.finish()
}

pub fn pretty_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

/// Writes a trajectory as CSV, or as JSON with the same fields.
pub fn emit_trajectory(traj: &Trajectory, format: Format, path: &Path) -> Result<(), CliError> {
    let text = match format {
        Format::Csv => trajectory_csv(traj),
        Format::Json => pretty_json(traj),
    };
    write_atomic(path, text.as_bytes())
}

/// Write to a temporary file beside `path`, then rename over it, so a
/// failure never leaves a partial file behind.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Runtime(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rearrangement::{partial_sums, Identity, Sampling, TermSource};

    #[test]
    fn three_samples_three_rows() {
        let t = partial_sums(&TermSource::AltHarmonic, &Identity, 3, &Sampling::default()).unwrap();
        let csv = trajectory_csv(&t);
        assert_eq!(csv, "index,sum_0,last_term_mag\n0,1,1\n1,0.5,0.5\n2,0.8333333333333333,0.3333333333333333\n");
    }

    #[test]
    fn vector_header() {
        let src = TermSource::stack(vec![TermSource::AltHarmonic, TermSource::Zero]).unwrap();
        let t = partial_sums(&src, &Identity, 2, &Sampling::default()).unwrap();
        assert!(trajectory_csv(&t).starts_with("index,sum_0,sum_1,last_term_mag\n"));
    }

    #[test]
    fn json_round_trip_and_stable_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let t = partial_sums(&TermSource::alt_power(0.6).unwrap(), &Identity, 5000, &Sampling::default()).unwrap();
        let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
        emit_trajectory(&t, Format::Json, &a).unwrap();
        emit_trajectory(&t, Format::Json, &b).unwrap();
        let text = std::fs::read_to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<Trajectory>(&text).unwrap(), t);
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    #[test]
    fn unwritable_path_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let t = partial_sums(&TermSource::Zero, &Identity, 1, &Sampling::default()).unwrap();
        let e = emit_trajectory(&t, Format::Csv, &blocker.join("out.csv")).unwrap_err();
        assert!(matches!(e, CliError::Runtime(_)));
    }
}
