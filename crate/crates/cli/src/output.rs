use std::io::Write;

use serde_json::Value;

use crate::args::OutputFormat;
use crate::error::CliError;

/// Decimal string that parses back to the same `f64`.
pub fn decimal(x: f64) -> String {
    format!("{x:?}")
}

pub fn decimals(xs: &[f64]) -> Vec<String> {
    xs.iter().map(|&x| decimal(x)).collect()
}

/// Writes text lines or one JSON object per line.
pub struct Emitter<'a> {
    out: &'a mut dyn Write,
    format: OutputFormat,
}

impl<'a> Emitter<'a> {
    pub fn new(out: &'a mut dyn Write, format: OutputFormat) -> Self {
        Self { out, format }
    }

    pub fn format(&self) -> OutputFormat {
        self.format
    }

    pub fn is_jsonl(&self) -> bool {
        self.format == OutputFormat::Jsonl
    }

    pub fn record(&mut self, value: &Value) -> Result<(), CliError> {
        writeln!(self.out, "{value}")?;
        Ok(())
    }

    pub fn line(&mut self, text: impl AsRef<str>) -> Result<(), CliError> {
        writeln!(self.out, "{}", text.as_ref())?;
        Ok(())
    }
}
