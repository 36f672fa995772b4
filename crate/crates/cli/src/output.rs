//! JSON rendering, error objects and run records.

use std::io::{self, Write};
use std::path::Path;
use std::time::Duration;

use serde::Serialize;
use serde_json::ser::Formatter;
use sha2::{Digest, Sha256};

use hitwalk_core::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CHECK: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

/// Compact JSON with every float printed to 17 significant digits, so
/// outputs diff cleanly and round-trip exactly.
struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

pub fn render<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits);
    value.serialize(&mut ser).expect("output serializes");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub fn print<T: Serialize>(value: &T) {
    println!("{}", render(value));
}

/// A failure that ends the command with a given exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
    pub details: Option<serde_json::Value>,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Failure {
        Failure {
            code: EXIT_INPUT,
            kind: "input",
            message: message.into(),
            details: None,
        }
    }

    pub fn check(message: impl Into<String>, details: serde_json::Value) -> Failure {
        Failure {
            code: EXIT_CHECK,
            kind: "check",
            message: message.into(),
            details: Some(details),
        }
    }

    pub fn report(&self) {
        eprintln!("hitwalk: {}", self.message);
        let mut obj = serde_json::json!({
            "error": { "kind": self.kind, "message": self.message, "exit_code": self.code }
        });
        if let Some(d) = &self.details {
            obj["error"]["details"] = d.clone();
        }
        print(&obj);
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let (code, kind) = if e.is_numerical() {
            (EXIT_NUMERICAL, "numerical")
        } else {
            (EXIT_INPUT, "input")
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
            details: None,
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Failure {
        Failure::input(e.to_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

pub fn digest(path: &Path, bytes: &[u8]) -> InputDigest {
    InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(bytes)),
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Serialize)]
pub struct RunRecord<'a> {
    pub command_line: Vec<String>,
    pub version: &'static str,
    pub inputs: &'a [InputDigest],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub results: &'a serde_json::Value,
    pub timings: Timings,
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub elapsed_seconds: f64,
}

impl Timings {
    pub fn new(elapsed: Duration) -> Timings {
        Timings {
            elapsed_seconds: elapsed.as_secs_f64(),
        }
    }
}
