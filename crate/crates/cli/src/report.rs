use std::io::Write;
use std::path::Path;

use serde::Serialize;

use asep_core::{CheckResult, Mode};

pub const SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Serialize, Debug, Default)]
pub struct Grid {
    #[serde(rename = "L")]
    pub sites: Vec<usize>,
    #[serde(rename = "N")]
    pub particles: Vec<u32>,
}

/// Fields serialize in declaration order.
#[derive(Serialize, Debug)]
pub struct Report<'a> {
    pub version: &'static str,
    pub mode: Mode,
    pub command: String,
    pub grid: Grid,
    pub checks: &'a [CheckResult],
    pub status: &'static str,
}

impl<'a> Report<'a> {
    pub fn new(mode: Mode, command: String, grid: Grid, checks: &'a [CheckResult]) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION"),
            mode,
            command,
            grid,
            checks,
            status: if checks.iter().all(|c| c.passed) {
                "pass"
            } else {
                "fail"
            },
        }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

pub fn print_text(checks: &[CheckResult]) {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for c in checks {
        let _ = writeln!(out, "{}", c.status_line());
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(out, "{} checks, {} failed", checks.len(), failed);
}

/// Writes the report to `path`, or stdout for `-`.
pub fn write_json(report: &Report, path: &Path) -> Result<(), String> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| e.to_string())?;
    text.push('\n');
    if path == Path::new("-") {
        print!("{text}");
        return Ok(());
    }
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}
