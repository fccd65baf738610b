//! CSV tables and JSON metadata. All numbers are written with 17
//! significant digits and rows in grid-index order, so output bytes depend
//! only on the configuration and the program version.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::CliError;

pub struct Table {
    pub columns: [&'static str; 3],
    pub rows: Vec<[f64; 3]>,
}

impl Table {
    pub fn csv(&self) -> String {
        let mut s = String::with_capacity(self.rows.len() * 72 + 32);
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for [a, b, c] in &self.rows {
            // Writing into a String cannot fail.
            let _ = writeln!(s, "{a:.16e},{b:.16e},{c:.16e}");
        }
        s
    }

    pub fn json(&self) -> Value {
        json!({ "columns": self.columns, "rows": self.rows })
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

/// `path` with its extension replaced; `suffix` is appended to the stem.
pub fn sibling(path: &Path, suffix: &str, extension: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}.{extension}"))
}
