//! Minimal CSV emitter: `#` comment lines, one header row, `\n` line ends and
//! shortest round-trip decimal floats.

use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Float(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Field {
    fn from(v: f64) -> Self {
        Field::Float(v)
    }
}

impl From<Option<f64>> for Field {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Field::Empty, Field::Float)
    }
}

impl From<u32> for Field {
    fn from(v: u32) -> Self {
        Field::Int(u64::from(v))
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Self {
        Field::Int(v as u64)
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Self {
        Field::Bool(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Self {
        Field::Text(v.to_string())
    }
}

fn push_field(out: &mut String, field: &Field) {
    match field {
        // `{:?}` is the shortest representation that parses back to the same f64.
        Field::Float(v) => write!(out, "{v:?}").expect("writing to a String"),
        Field::Int(v) => write!(out, "{v}").expect("writing to a String"),
        Field::Bool(v) => out.push_str(if *v { "true" } else { "false" }),
        Field::Text(s) if s.contains([',', '"', '\n']) => {
            out.push('"');
            out.push_str(&s.replace('"', "\"\""));
            out.push('"');
        }
        Field::Text(s) => out.push_str(s),
        Field::Empty => {}
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    comments: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<Field>>,
    trailer: Vec<String>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            ..Self::default()
        }
    }

    /// Comment line placed before the header.
    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    /// Comment line placed after the last row.
    pub fn trailer(&mut self, line: impl Into<String>) {
        self.trailer.push(line.into());
    }

    pub fn push(&mut self, row: Vec<Field>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<Field>] {
        &self.rows
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            writeln!(out, "# {c}").expect("writing to a String");
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, field) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                push_field(&mut out, field);
            }
            out.push('\n');
        }
        for c in &self.trailer {
            writeln!(out, "# {c}").expect("writing to a String");
        }
        out
    }
}
