//! Text formats: JSON problem files, whitespace tables and rule files.

mod problem;
mod rules;
mod table;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use problem::{parse_problem, read_problem, write_problem};
pub use rules::{parse_rules, render_chr, write_rules};
pub use table::{parse_table, read_table, write_table, NamedTable};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{at}: {message}")]
    Invalid { at: String, message: String },
}

impl IoError {
    fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        IoError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn invalid(at: impl Into<String>, message: impl ToString) -> Self {
        IoError::Invalid {
            at: at.into(),
            message: message.to_string(),
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

/// The part of a line before any `#` comment.
fn content(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}
