//! Comma-separated tables with `#` header comments.
//!
//! Floats are written with 17 significant digits (`{:.16e}`) so every value
//! reads back to the same double and re-emitting a parsed table reproduces
//! it byte for byte.

use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        // Commas and line breaks would split the cell on re-read.
        Cell::Text(s.into().replace([',', '\n', '\r'], ";"))
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Float(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Cell::Int(v) => Some(*v),
            _ => None,
        }
    }

    fn parse(s: &str) -> Self {
        if s.is_empty() {
            return Cell::Empty;
        }
        let digits = s.strip_prefix('-').unwrap_or(s);
        if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
            if let Ok(v) = s.parse() {
                return Cell::Int(v);
            }
        }
        if s.contains('e') {
            if let Ok(v) = s.parse() {
                return Cell::Float(v);
            }
        }
        Cell::Text(s.to_string())
    }
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    /// Header comment lines without the leading `# `.
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self { comments: Vec::new(), columns, rows: Vec::new() }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    /// The value of a `key = value` header comment.
    pub fn header(&self, key: &str) -> Option<&str> {
        self.comments.iter().find_map(|c| {
            let (k, v) = c.split_once(" = ")?;
            (k == key).then_some(v)
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(v) => v.to_string(),
                    Cell::Float(v) => format_float(*v),
                    Cell::Text(s) => s.clone(),
                    Cell::Empty => String::new(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut lines = text.lines().enumerate();
        let mut table = Table::default();
        let header = loop {
            match lines.next() {
                Some((_, l)) if l.starts_with('#') => {
                    let c = l.strip_prefix("# ").unwrap_or(&l[1..]);
                    table.comments.push(c.to_string());
                }
                Some((_, l)) => break l,
                None => return Err("table has no column header".into()),
            }
        };
        table.columns = header.split(',').map(str::to_string).collect();
        for (i, line) in lines {
            let row: Vec<Cell> = line.split(',').map(Cell::parse).collect();
            if row.len() != table.columns.len() {
                return Err(format!("line {}: {} cells, expected {}", i + 1, row.len(), table.columns.len()));
            }
            table.rows.push(row);
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let mut t = Table::new(vec!["n".into(), "value".into(), "reason".into()]);
        t.comment("seed = 7");
        t.rows.push(vec![Cell::Int(3), Cell::Float(0.1), Cell::Empty]);
        t.rows.push(vec![Cell::Int(-4), Cell::text("infeasible"), Cell::text("a, b")]);
        t.rows.push(vec![Cell::Int(5), Cell::Float(1.0 / 3.0), Cell::Empty]);
        let text = t.to_csv();
        let back = Table::parse(&text).unwrap();
        assert_eq!(back.to_csv(), text);
        assert_eq!(back.header("seed"), Some("7"));
        assert_eq!(back.rows[2][1].as_f64(), Some(1.0 / 3.0));
        assert!(text.contains("1.0000000000000001e-1"));
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(Table::parse("a,b\n1\n").is_err());
        assert!(Table::parse("# only comments\n").is_err());
    }
}
