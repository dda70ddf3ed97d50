//! Key/value report printing. Re-running a command with identical inputs and
//! seeds reproduces every numeric field; only the trailing wall time varies.

use std::time::Instant;

pub struct Report {
    lines: Vec<(String, String)>,
    start: Instant,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut report = Report {
            lines: Vec::new(),
            start: Instant::now(),
        };
        report.field("command", command);
        report
    }

    pub fn field(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    pub fn field_opt(&mut self, key: &str, value: Option<impl std::fmt::Display>) {
        if let Some(value) = value {
            self.field(key, value);
        }
    }

    /// Prints all recorded fields plus the wall time.
    pub fn finish(mut self) {
        let elapsed = self.start.elapsed().as_millis();
        self.lines.push(("wall_ms".into(), elapsed.to_string()));
        for (key, value) in &self.lines {
            println!("{key}: {value}");
        }
    }
}

/// Hex SHA-256 of raw file bytes, for the inputs digest field.
pub fn digest(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
