use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

/// What a subcommand hands back for rendering.
pub struct Report {
    pub command: &'static str,
    pub result: Value,
    /// `Some(false)` maps to exit code 1.
    pub verified: Option<bool>,
    pub elapsed_seconds: Option<f64>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub human: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, result: Value) -> Self {
        Report {
            command,
            result,
            verified: None,
            elapsed_seconds: None,
            header: Vec::new(),
            rows: Vec::new(),
            human: Vec::new(),
        }
    }

    pub fn verified(mut self, ok: bool) -> Self {
        self.verified = Some(ok);
        self
    }

    pub fn elapsed(mut self, secs: f64) -> Self {
        self.elapsed_seconds = Some(secs);
        self
    }

    pub fn table<H: Into<String>>(mut self, header: Vec<H>, rows: Vec<Vec<String>>) -> Self {
        self.header = header.into_iter().map(Into::into).collect();
        self.rows = rows;
        self
    }

    pub fn line(mut self, s: impl Into<String>) -> Self {
        self.human.push(s.into());
        self
    }

    pub fn exit_code(&self) -> i32 {
        if self.verified == Some(false) {
            1
        } else {
            0
        }
    }

    fn json(&self) -> Value {
        let mut doc = json!({ "command": self.command, "result": self.result });
        if let Some(v) = self.verified {
            doc["verified"] = json!(v);
        }
        if let Some(t) = self.elapsed_seconds {
            doc["timing"] = json!({ "elapsed_seconds": t });
        }
        doc
    }

    pub fn render(&self, format: Format, out: &mut dyn Write) -> io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.json())?;
                writeln!(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.header)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                w.flush()
            }
            Format::Human => {
                for l in &self.human {
                    writeln!(out, "{l}")?;
                }
                if let Some(v) = self.verified {
                    writeln!(out, "{}", if v { "verified" } else { "NOT verified" })?;
                }
                if let Some(t) = self.elapsed_seconds {
                    writeln!(out, "elapsed: {t:.2} s")?;
                }
                Ok(())
            }
        }
    }
}
