use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::CliError;

/// Opening comment of every CSV file.
pub const UNITS: &str =
    "# units: E = 1, hbar = k_B = 1; couplings are ratios to gammaA (gammaA = 1); TA labels 0+, 0-, inf are limits";

fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::BadInput(format!("{}: {e}", path.display()))
}

/// Writes comment lines, a header and the rows.
pub fn write_csv(
    path: &Path,
    comments: &[String],
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut buf = BufWriter::new(file);
    for c in comments {
        writeln!(buf, "{c}").map_err(|e| io_error(path, e))?;
    }
    let mut w = csv::Writer::from_writer(buf);
    w.write_record(header).map_err(|e| io_error(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// Pretty JSON to `path`, or to stdout without one.
pub fn write_json<T: serde::Serialize>(value: &T, path: Option<&Path>) -> Result<(), CliError> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::BadInput(e.to_string()))?;
    match path {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| io_error(p, e)),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
