//! Artifact writers. Numbers are written with 17 significant digits so that
//! every value round-trips exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::RunError;

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// One invariant check in the run-report.
#[derive(Debug, Clone)]
pub struct Check {
    pub id: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub task: String,
    pub values: Vec<(String, String)>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(task: &str) -> Self {
        Report { task: task.into(), ..Default::default() }
    }

    pub fn value(&mut self, key: &str, v: f64) {
        self.values.push((key.into(), num(v)));
    }

    pub fn text(&mut self, key: &str, v: impl Into<String>) {
        self.values.push((key.into(), v.into()));
    }

    pub fn check(&mut self, id: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { id: id.into(), pass, detail: detail.into() });
    }

    pub fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "task = {}", self.task);
        for (k, v) in &self.values {
            let _ = writeln!(s, "{k} = {v}");
        }
        if !self.checks.is_empty() {
            let _ = writeln!(s, "\n[checks] {}", if self.all_pass() { "all PASS" } else { "some FAIL" });
            for c in &self.checks {
                let _ = writeln!(s, "{} {} {}", if c.pass { "PASS" } else { "FAIL" }, c.id, c.detail);
            }
        }
        if !self.notes.is_empty() {
            let _ = writeln!(s, "\n[notes]");
            for n in &self.notes {
                let _ = writeln!(s, "{n}");
            }
        }
        s
    }
}

pub struct OutDir(PathBuf);

impl OutDir {
    pub fn create(path: &Path) -> Result<Self, RunError> {
        fs::create_dir_all(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
        Ok(OutDir(path.to_path_buf()))
    }

    pub fn write(&self, name: &str, body: &str) -> Result<(), RunError> {
        let p = self.0.join(name);
        fs::write(&p, body).map_err(|e| RunError::Io(format!("{}: {e}", p.display())))
    }

    /// Whitespace-separated table with a header line.
    pub fn table(&self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<(), RunError> {
        let mut s = header.join(" ");
        s.push('\n');
        for r in rows {
            let line: Vec<String> = r.into_iter().map(num).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        self.write(name, &s)
    }
}
