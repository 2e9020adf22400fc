//! Grid states, pattern file I/O, and state-level predicates.
//!
//! A [`GridState`] is a rectangular grid of aliveness probabilities together
//! with a generation index. Coordinates are `(x, y)` with `x` the column and
//! `y` the row, both 0-based, origin top-left; values are stored row-major.
//! States are immutable after construction — engines produce new states.
//!
//! # Pattern files
//!
//! Two formats, auto-detected by the first non-comment line. Lines starting
//! with `#` are comments; blank lines are skipped.
//!
//! - ASCII: lines of `.` (value 0) and `O` (value 1), all equal length;
//!   dimensions are inferred.
//! - Numeric: a header `P <width> <height>`, then `height` lines of `width`
//!   whitespace-separated decimals in `[0, 1]`.
//!
//! Emission mirrors ingestion: ASCII when every value is exactly 0 or 1,
//! numeric otherwise with values printed at a configurable precision
//! (round-half-even).

use std::fmt::Write as _;

use thiserror::Error;

/// How neighbours outside the grid are read.
///
/// `Dead` treats out-of-grid cells as aliveness 0; `Toroidal` wraps around
/// both axes. On degenerate toroidal grids (width or height 1) several of the
/// eight neighbour slots resolve to the same cell, and each slot still
/// contributes once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryPolicy {
    #[default]
    Dead,
    Toroidal,
}

/// The eight Moore-neighbourhood offsets in row-major order. Every engine
/// scans neighbours in exactly this order so results are bit-reproducible.
pub(crate) const NEIGHBOR_OFFSETS: [(i64, i64); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// A rectangular grid of aliveness probabilities at one generation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    width: usize,
    height: usize,
    generation: u64,
    values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid dimensions must be positive")]
    ZeroDimension,
    #[error("expected {expected} values for a {width}x{height} grid, got {found}")]
    WrongValueCount {
        width: usize,
        height: usize,
        expected: usize,
        found: usize,
    },
    #[error("cell ({x}, {y}) holds {value}, outside [0, 1]")]
    ValueOutOfRange { x: usize, y: usize, value: f64 },
    #[error("dimension mismatch: {aw}x{ah} vs {bw}x{bh}")]
    DimensionMismatch {
        aw: usize,
        ah: usize,
        bw: usize,
        bh: usize,
    },
    #[error("coordinates ({x}, {y}) are outside the {width}x{height} grid")]
    OutOfBounds {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },
}

impl GridState {
    /// Builds a generation-0 state from row-major values, validating that
    /// the length matches and every value lies in `[0, 1]`.
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self, GridError> {
        if width == 0 || height == 0 {
            return Err(GridError::ZeroDimension);
        }
        if values.len() != width * height {
            return Err(GridError::WrongValueCount {
                width,
                height,
                expected: width * height,
                found: values.len(),
            });
        }
        for (i, &v) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&v) {
                return Err(GridError::ValueOutOfRange {
                    x: i % width,
                    y: i / width,
                    value: v,
                });
            }
        }
        Ok(Self {
            width,
            height,
            generation: 0,
            values,
        })
    }

    /// An all-`value` grid at generation 0.
    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self, GridError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn with_generation(mut self, generation: u64) -> Self {
        self.generation = generation;
        self
    }

    /// Internal constructor for engine outputs whose invariants hold by
    /// construction.
    pub(crate) fn from_raw(width: usize, height: usize, generation: u64, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), width * height);
        debug_assert!(values.iter().all(|v| (0.0..=1.0).contains(v)));
        Self {
            width,
            height,
            generation,
            values,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cells(&self) -> usize {
        self.width * self.height
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, x: usize, y: usize) -> f64 {
        assert!(x < self.width && y < self.height, "cell index out of range");
        self.values[y * self.width + x]
    }

    /// The aliveness read by a cell's neighbour slot `(dx, dy)` under the
    /// given boundary policy.
    #[inline]
    pub(crate) fn neighbor_value(
        &self,
        x: usize,
        y: usize,
        dx: i64,
        dy: i64,
        boundary: BoundaryPolicy,
    ) -> f64 {
        let nx = x as i64 + dx;
        let ny = y as i64 + dy;
        match boundary {
            BoundaryPolicy::Dead => {
                if nx < 0 || ny < 0 || nx >= self.width as i64 || ny >= self.height as i64 {
                    0.0
                } else {
                    self.values[ny as usize * self.width + nx as usize]
                }
            }
            BoundaryPolicy::Toroidal => {
                let nx = nx.rem_euclid(self.width as i64) as usize;
                let ny = ny.rem_euclid(self.height as i64) as usize;
                self.values[ny * self.width + nx]
            }
        }
    }

    /// True iff every value is exactly 0 or exactly 1.
    pub fn is_binary(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0 || v == 1.0)
    }

    /// True iff every value is exactly 0. This is an exact test, not a
    /// tolerance test; use [`GridState::max_abs_diff`] against an all-zero
    /// grid for a tolerant variant.
    pub fn is_extinct(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Coordinates of all cells with value strictly greater than `threshold`,
    /// in row-major order.
    pub fn alive_cells(&self, threshold: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if self.value(x, y) > threshold {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Maximum absolute per-cell difference between two same-sized grids.
    pub fn max_abs_diff(&self, other: &GridState) -> Result<f64, GridError> {
        if self.width != other.width || self.height != other.height {
            return Err(GridError::DimensionMismatch {
                aw: self.width,
                ah: self.height,
                bw: other.width,
                bh: other.height,
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Sum of all cell values (the expected number of living cells).
    pub fn total_mass(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Parses a pattern file in either supported format.
    ///
    /// The parsed state is at generation 0. Errors carry 1-based line numbers
    /// referring to the original text.
    pub fn parse_pattern(text: &str) -> Result<Self, PatternParseError> {
        let mut rows: Vec<(usize, &str)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            let trimmed = line.trim_start();
            if trimmed.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            rows.push((idx + 1, line));
        }
        let Some(&(_, first)) = rows.first() else {
            return Err(PatternParseError::Empty);
        };
        if first.split_whitespace().next() == Some("P") {
            parse_numeric(&rows)
        } else {
            parse_ascii(&rows)
        }
    }

    /// Emits the pattern in the format that mirrors ingestion: ASCII when the
    /// grid is binary, numeric otherwise at the given decimal precision.
    pub fn to_pattern(&self, precision: usize) -> String {
        let mut out = String::new();
        if self.is_binary() {
            for y in 0..self.height {
                for x in 0..self.width {
                    out.push(if self.value(x, y) == 1.0 { 'O' } else { '.' });
                }
                out.push('\n');
            }
        } else {
            let _ = writeln!(out, "P {} {}", self.width, self.height);
            for y in 0..self.height {
                for x in 0..self.width {
                    if x > 0 {
                        out.push(' ');
                    }
                    let _ = write!(out, "{:.*}", precision, self.value(x, y));
                }
                out.push('\n');
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PatternParseError {
    #[error("pattern contains no grid data")]
    Empty,
    #[error("line {line}: row has {found} cells, expected {expected}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {column}: invalid character '{found}' (expected '.' or 'O')")]
    InvalidChar {
        line: usize,
        column: usize,
        found: char,
    },
    #[error("line {line}: malformed header, expected \"P <width> <height>\"")]
    MalformedHeader { line: usize },
    #[error("line {line}: width and height must be positive")]
    ZeroDimension { line: usize },
    #[error("line {line}: row has {found} values, expected {expected}")]
    WrongValueCount {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: malformed value '{token}'")]
    MalformedValue { line: usize, token: String },
    #[error("line {line}: value {value} is outside [0, 1]")]
    ValueOutOfRange { line: usize, value: f64 },
    #[error("expected {expected} data rows, found only {found}")]
    MissingRows { expected: usize, found: usize },
    #[error("line {line}: unexpected trailing content")]
    TrailingContent { line: usize },
}

fn parse_ascii(rows: &[(usize, &str)]) -> Result<GridState, PatternParseError> {
    let width = rows[0].1.chars().count();
    let mut values = Vec::with_capacity(width * rows.len());
    for &(line, row) in rows {
        let mut count = 0;
        for (column, ch) in row.chars().enumerate() {
            count += 1;
            match ch {
                '.' => values.push(0.0),
                'O' => values.push(1.0),
                found => {
                    return Err(PatternParseError::InvalidChar {
                        line,
                        column: column + 1,
                        found,
                    })
                }
            }
        }
        if count != width {
            return Err(PatternParseError::RaggedRow {
                line,
                expected: width,
                found: count,
            });
        }
    }
    GridState::new(width, rows.len(), values).map_err(|_| PatternParseError::Empty)
}

fn parse_numeric(rows: &[(usize, &str)]) -> Result<GridState, PatternParseError> {
    let (header_line, header) = rows[0];
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 3 {
        return Err(PatternParseError::MalformedHeader { line: header_line });
    }
    let width: usize = tokens[1]
        .parse()
        .map_err(|_| PatternParseError::MalformedHeader { line: header_line })?;
    let height: usize = tokens[2]
        .parse()
        .map_err(|_| PatternParseError::MalformedHeader { line: header_line })?;
    if width == 0 || height == 0 {
        return Err(PatternParseError::ZeroDimension { line: header_line });
    }

    let data = &rows[1..];
    if data.len() < height {
        return Err(PatternParseError::MissingRows {
            expected: height,
            found: data.len(),
        });
    }
    if data.len() > height {
        return Err(PatternParseError::TrailingContent {
            line: data[height].0,
        });
    }

    let mut values = Vec::with_capacity(width * height);
    for &(line, row) in data {
        let tokens: Vec<&str> = row.split_whitespace().collect();
        if tokens.len() != width {
            return Err(PatternParseError::WrongValueCount {
                line,
                expected: width,
                found: tokens.len(),
            });
        }
        for token in tokens {
            let value: f64 = token.parse().map_err(|_| PatternParseError::MalformedValue {
                line,
                token: token.to_string(),
            })?;
            if !(0.0..=1.0).contains(&value) {
                return Err(PatternParseError::ValueOutOfRange { line, value });
            }
            values.push(value);
        }
    }
    Ok(GridState::from_raw(width, height, 0, values))
}
