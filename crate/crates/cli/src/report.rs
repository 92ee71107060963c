//! CSV reports with a provenance header.
//!
//! Reports are assembled in memory and written in one piece, so a failing
//! command never leaves a half-written file behind. All formatting is fixed:
//! reruns with the same inputs and seed produce byte-identical output
//! regardless of worker pool size.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::Failure;

/// Full-precision decimal form; a reread recovers the exact f64.
pub fn full(v: f64) -> String {
    assert!(v.is_finite(), "refusing to print a non-finite value");
    format!("{v:.16e}")
}

pub struct Report {
    lines: Vec<String>,
}

impl Report {
    /// Starts a report with the provenance header; `seed` is None for
    /// unseeded commands.
    pub fn new(seed: Option<u64>) -> Report {
        let args: Vec<String> = std::env::args().skip(1).collect();
        let mut lines = vec![
            format!("# curvetrace {}", env!("CARGO_PKG_VERSION")),
            format!("# command: curvetrace {}", args.join(" ")),
        ];
        lines.push(match seed {
            Some(s) => format!("# seed: {s}"),
            None => "# seed: none".to_string(),
        });
        Report { lines }
    }

    /// Column names.
    pub fn header(&mut self, cells: &[&str]) {
        self.push_cells(cells.iter().map(|c| c.to_string()).collect());
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.push_cells(cells);
    }

    /// A `#` line carrying context that is not part of the table.
    pub fn comment(&mut self, text: impl AsRef<str>) {
        let text = text.as_ref();
        debug_assert!(!text.contains('\n'));
        self.lines.push(format!("# {text}"));
    }

    fn push_cells(&mut self, cells: Vec<String>) {
        let escaped: Vec<String> = cells
            .into_iter()
            .map(|c| {
                debug_assert!(!c.contains('\n'), "cell {c:?} would break line-oriented diffs");
                if c.contains(',') || c.contains('"') {
                    format!("\"{}\"", c.replace('"', "\"\""))
                } else {
                    c
                }
            })
            .collect();
        self.lines.push(escaped.join(","));
    }

    pub fn write(&self, out: Option<&Path>) -> Result<(), Failure> {
        let mut text = self.lines.join("\n");
        text.push('\n');
        match out {
            Some(p) => fs::write(p, text)
                .map_err(|e| Failure::input(format!("cannot write {}: {e}", p.display()))),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Failure::input(format!("cannot write to stdout: {e}"))),
        }
    }
}
