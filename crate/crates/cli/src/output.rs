//! Deterministic output sinks and row formatting.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

/// Floats render with 17 significant digits so that identical configs give
/// byte-identical, round-trippable output.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct Sink {
    inner: Box<dyn Write>,
}

impl Sink {
    pub fn open(out: &Option<PathBuf>) -> io::Result<Sink> {
        let inner: Box<dyn Write> = match out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Sink { inner })
    }

    pub fn line(&mut self, text: &str) -> io::Result<()> {
        self.inner.write_all(text.as_bytes())?;
        self.inner.write_all(b"\n")
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.inner.flush()
    }
}
