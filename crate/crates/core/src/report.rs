//! CSV output shared by the report writers: `# ` provenance lines, then a
//! header and rows.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

pub fn write_csv<I>(path: &Path, preamble: &[String], header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut buf = Vec::new();
    for line in preamble {
        writeln!(buf, "# {line}").expect("vec write");
    }
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let to_err = |e: csv::Error| Error::Validation(format!("{}: {e}", path.display()));
        w.write_record(header).map_err(to_err)?;
        for row in rows {
            w.write_record(&row).map_err(to_err)?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn fixed6(x: f64) -> String {
    format!("{x:.6}")
}

/// Six decimals, or an empty cell for an undefined value.
pub fn fixed6_or_blank(x: Option<f64>) -> String {
    x.map(fixed6).unwrap_or_default()
}
