//! Report envelopes and output promotion.
//!
//! Every structured report carries a header naming the tool version, the
//! command, the seed, a digest of the stage parameters and digests of the
//! input files. Nothing time- or path-dependent is written, so identical
//! inputs give byte-identical reports.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    /// File name relative to the input root it was found under.
    pub name: String,
    pub sha256: String,
}

impl InputDigest {
    pub fn new(name: impl Into<String>, bytes: &[u8]) -> Self {
        Self {
            name: name.into(),
            sha256: sha256_hex(bytes),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportHeader {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub config_sha256: String,
    pub inputs: Vec<InputDigest>,
}

impl ReportHeader {
    /// `params` is hashed through its canonical JSON form.
    pub fn new<P: Serialize>(command: &str, seed: u64, params: &P, inputs: Vec<InputDigest>) -> Self {
        let canonical = serde_json::to_vec(params).expect("parameters serialize");
        Self {
            tool: TOOL,
            version: VERSION,
            command: command.to_string(),
            seed,
            config_sha256: sha256_hex(&canonical),
            inputs,
        }
    }

    pub fn to_text(&self) -> String {
        format!(
            "# {} {} | command: {} | seed: {} | config sha256: {}\n",
            self.tool, self.version, self.command, self.seed, self.config_sha256
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<'a, P: Serialize, B: Serialize> {
    pub header: &'a ReportHeader,
    pub parameters: &'a P,
    pub result: &'a B,
}

pub fn to_json<P: Serialize, B: Serialize>(header: &ReportHeader, parameters: &P, result: &B) -> String {
    let mut s = serde_json::to_string_pretty(&Report {
        header,
        parameters,
        result,
    })
    .expect("report serializes");
    s.push('\n');
    s
}

/// Files produced by one or more commands, held in memory until promoted.
#[derive(Debug, Default, Clone)]
pub struct OutputSet {
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, contents: impl Into<Vec<u8>>) {
        let name = name.into();
        let contents = contents.into();
        match self.files.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = contents,
            None => self.files.push((name, contents)),
        }
    }

    pub fn extend(&mut self, other: OutputSet) {
        for (n, c) in other.files {
            self.add(n, c);
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(n, _)| n.as_str())
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_slice())
    }

    /// Writes everything into a scratch directory inside `dir`, then renames
    /// each file into place. A failure before the renames leaves `dir`
    /// untouched.
    pub fn promote(&self, dir: &Path) -> io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let staging = tempfile::Builder::new().prefix(".staging-").tempdir_in(dir)?;
        for (name, contents) in &self.files {
            fs::write(staging.path().join(name), contents)?;
        }
        let mut written = Vec::with_capacity(self.files.len());
        for (name, _) in &self.files {
            let dst = dir.join(name);
            fs::rename(staging.path().join(name), &dst)?;
            written.push(dst);
        }
        Ok(written)
    }
}

/// Left-aligned first column, right-aligned remaining columns.
pub fn fixed_width_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let cols = headers.len();
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut out = String::new();
        for (i, cell) in cells.iter().enumerate().take(cols) {
            if i > 0 {
                out.push_str("  ");
            }
            if i == 0 {
                out.push_str(&format!("{:<w$}", cell, w = widths[i]));
            } else {
                out.push_str(&format!("{:>w$}", cell, w = widths[i]));
            }
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
        out
    };
    let mut out = line(headers.to_vec());
    let total: usize = widths.iter().sum::<usize>() + 2 * cols.saturating_sub(1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

pub fn fmt3(v: f64) -> String {
    format!("{v:.3}")
}
