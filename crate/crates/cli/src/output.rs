//! CSV and JSON formatting. Numbers are written with 17 significant digits
//! (`{:.16e}`), `.` as decimal separator and `\n` line endings.

use serde_json::Value;

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV table built row by row.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Pretty JSON with a trailing newline.
pub fn json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values are serializable");
    s.push('\n');
    s
}
