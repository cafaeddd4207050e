use std::fmt::Write as _;
use std::time::Duration;

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// `key: value` lines for reading.
    Text,
    /// `key=value` lines with stable keys, for scripts.
    Kv,
}

/// Ordered key/value output of one command.
#[derive(Debug, Default)]
pub struct Report {
    fields: Vec<(String, String)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Self::default();
        r.push("command", command);
        r
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.fields.push((key.into(), value.to_string()));
    }

    pub fn render(&self, format: Format, elapsed: Option<Duration>) -> String {
        let mut out = String::new();
        let timing = elapsed.map(|d| ("timing.total_ms".to_string(), format!("{:.3}", d.as_secs_f64() * 1e3)));
        for (k, v) in self.fields.iter().chain(timing.as_ref()) {
            let _ = match format {
                Format::Text => writeln!(out, "{k}: {v}"),
                Format::Kv => writeln!(out, "{k}={v}"),
            };
        }
        out
    }
}
