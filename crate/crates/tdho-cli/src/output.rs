//! CSV emission: versioned header comment, comma delimiter, floats with
//! 17 significant digits.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};

pub const SCHEMA_VERSION: &str = "v1";

/// Format a float with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct CsvWriter {
    out: std::io::BufWriter<std::fs::File>,
}

impl CsvWriter {
    /// Open `path` and write the schema comment plus the header row.
    pub fn create(path: &Path, kind: &str, columns: &[&str]) -> Result<Self> {
        let file = std::fs::File::create(path)
            .with_context(|| format!("cannot create {}", path.display()))?;
        let mut out = std::io::BufWriter::new(file);
        writeln!(out, "# tdho csv {SCHEMA_VERSION} {kind}")?;
        writeln!(out, "{}", columns.join(","))?;
        Ok(Self { out })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<()> {
        writeln!(self.out, "{}", fields.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}
