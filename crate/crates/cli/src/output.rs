//! Output plumbing: deterministic float formatting and all-or-nothing file writes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::CliResult;

/// Fixed 17-significant-digit scientific notation used in CSV files.
pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_line<I: IntoIterator<Item = String>>(fields: I) -> String {
    let mut line = fields.into_iter().collect::<Vec<_>>().join(",");
    line.push('\n');
    line
}

pub fn csv_floats(xs: &[f64]) -> String {
    csv_line(xs.iter().map(|x| csv_float(*x)))
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> CliResult<Vec<u8>> {
    let mut buf = serde_json::to_vec_pretty(value).map_err(nullfront::Error::from)?;
    buf.push(b'\n');
    Ok(buf)
}

fn io_error(path: &Path, source: std::io::Error) -> nullfront::Error {
    nullfront::Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// renamed into place only once everything is written; stdout when `path`
/// is `None`.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes)
            .and_then(|_| out.flush())
            .map_err(|e| io_error(Path::new("<stdout>"), e))?;
        return Ok(());
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(path, e))?;
    tmp.write_all(bytes)
        .and_then(|_| tmp.flush())
        .map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}
