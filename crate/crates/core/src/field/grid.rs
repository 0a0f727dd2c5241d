//! Regular 2D scalar grids and the `SF2` text format.
//!
//! ```text
//! SF2 2 3
//! 0.0 1.5 2.0
//! 0.5 0.25 1.0
//! ```
//!
//! The header gives rows and columns; the values follow row-major, separated by any
//! whitespace. Lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Row-major scalar values on a `rows × cols` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField2D {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl ScalarField2D {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument(format!("grid must not be empty, got {rows}x{cols}")));
        }
        if rows * cols != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{rows}x{cols} grid needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("value at index {i} is not finite")));
        }
        Ok(ScalarField2D { rows, cols, values })
    }

    /// Samples `f(x, y)` at cell centers of the unit square; `x` runs along columns.
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let x = (c as f64 + 0.5) / cols as f64;
                let y = (r as f64 + 0.5) / rows as f64;
                values.push(f(x, y));
            }
        }
        Self::new(rows, cols, values)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }

    pub fn negated(&self) -> Self {
        ScalarField2D {
            values: self.values.iter().map(|v| -v).collect(),
            ..self.clone()
        }
    }
}

pub fn parse_sf2(text: &str, path: &Path) -> Result<ScalarField2D> {
    let mut tokens = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim_start().starts_with('#'))
        .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)));

    let (hline, magic) = tokens
        .next()
        .ok_or_else(|| Error::parse(path, 1, "missing 'SF2 <rows> <cols>' header"))?;
    if magic != "SF2" {
        return Err(Error::parse(path, hline, format!("expected 'SF2 <rows> <cols>', found '{magic}'")));
    }
    let mut dim = |what: &str| -> Result<usize> {
        match tokens.next() {
            Some((l, t)) => match t.parse::<usize>() {
                Ok(v) if v > 0 => Ok(v),
                _ => Err(Error::parse(path, l, format!("bad {what} '{t}'"))),
            },
            None => Err(Error::parse(path, hline, format!("header is missing {what}"))),
        }
    };
    let rows = dim("row count")?;
    let cols = dim("column count")?;
    let mut values = Vec::with_capacity(rows * cols);
    let mut last_line = hline;
    for (line, t) in tokens {
        last_line = line;
        let v: f64 = t
            .parse()
            .map_err(|_| Error::parse(path, line, format!("bad scalar value '{t}'")))?;
        if !v.is_finite() {
            return Err(Error::parse(path, line, format!("value '{t}' is not finite")));
        }
        if values.len() == rows * cols {
            return Err(Error::parse(path, line, format!("more than {} values", rows * cols)));
        }
        values.push(v);
    }
    if values.len() != rows * cols {
        return Err(Error::parse(
            path,
            last_line,
            format!("expected {} values, found {}", rows * cols, values.len()),
        ));
    }
    ScalarField2D::new(rows, cols, values)
}

pub fn read_sf2(path: &Path) -> Result<ScalarField2D> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_sf2(&text, path)
}

/// Values are written with Rust's shortest round-trip formatting.
pub fn format_sf2(field: &ScalarField2D) -> String {
    let mut out = format!("SF2 {} {}\n", field.rows, field.cols);
    for row in field.values.chunks(field.cols) {
        for (i, v) in row.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            write!(out, "{v:?}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn write_sf2(field: &ScalarField2D, path: &Path) -> Result<()> {
    std::fs::write(path, format_sf2(field)).map_err(|e| Error::io(path, e))
}
