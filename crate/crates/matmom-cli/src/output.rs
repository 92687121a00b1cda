use std::fs;
use std::io::Write;
use std::path::Path;

use matmom::blockmat::{CMat, C64};
use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    Lib(matmom::Error),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Lib(e) => e.exit_code() as u8,
            CliError::Io(_) => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Lib(e) => e.to_string(),
            CliError::Io(s) => s.clone(),
        }
    }
}

impl From<matmom::Error> for CliError {
    fn from(e: matmom::Error) -> Self {
        CliError::Lib(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn ensure_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Write to `path`, or stdout when `None`.
pub fn emit(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// One row per boundary point: the coordinate followed by the real and
/// imaginary parts of every block entry, row-major.
pub fn write_density_csv(path: &Path, coord: &str, rows: &[(f64, CMat)]) -> CliResult<()> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    let p = rows.first().map(|r| r.1.nrows()).unwrap_or(0);
    let mut header = vec![coord.to_string()];
    for i in 0..p {
        for j in 0..p {
            header.push(format!("d{i}{j}_re"));
            header.push(format!("d{i}{j}_im"));
        }
    }
    w.write_record(&header).map_err(io)?;
    for (x, m) in rows {
        let mut rec = vec![x.to_string()];
        for i in 0..p {
            for j in 0..p {
                let z: C64 = m[(i, j)];
                rec.push(z.re.to_string());
                rec.push(z.im.to_string());
            }
        }
        w.write_record(&rec).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}
