//! Gradient-colored raster output: grids to binary PPM (P6) images.
//!
//! The colormap is two linear RGB segments: blue `(0,0,255)` at 0 through
//! green `(0,255,0)` at 0.5 to red `(255,0,0)` at 1, with channels rounded
//! half-up. Cells with value exactly 0 render as the background color (white
//! by default), matching blank dead cells; this is a deliberate
//! discontinuity, since a value just above 0 is deep blue.
//!
//! PPM (P6) is the only raster format: an ASCII header followed by raw RGB
//! triples, byte-exact across platforms.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use thiserror::Error;

use crate::grid::GridState;

/// An 8-bit RGB color.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Color {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Color {
    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b }
    }

    pub const WHITE: Color = Color::new(255, 255, 255);
    pub const RED: Color = Color::new(255, 0, 0);
    pub const GREEN: Color = Color::new(0, 255, 0);
    pub const BLUE: Color = Color::new(0, 0, 255);
}

/// How a grid is rasterized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderSpec {
    /// Square pixels per cell; must be at least 1.
    pub cell_size: u32,
    /// Draw 1-pixel separator lines between cells.
    pub gridlines: bool,
    pub gridline_color: Color,
    /// Fill for cells with value exactly 0.
    pub background: Color,
}

impl Default for RenderSpec {
    fn default() -> Self {
        Self {
            cell_size: 10,
            gridlines: false,
            gridline_color: Color::new(64, 64, 64),
            background: Color::WHITE,
        }
    }
}

/// A rasterized frame, pixels row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<Color>,
}

impl Image {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[Color] {
        &self.pixels
    }

    pub fn pixel(&self, x: usize, y: usize) -> Color {
        self.pixels[y * self.width + x]
    }
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("value {value} is outside [0, 1]")]
    ValueOutOfRange { value: f64 },
    #[error("cannot render an empty state sequence")]
    EmptySequence,
    #[error("file template '{template}' has no '{{:0N}}' generation placeholder")]
    InvalidTemplate { template: String },
    #[error("writing '{path}' failed: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[inline]
fn channel(x: f64) -> u8 {
    // Half-up rounding of a value in [0, 255].
    (x + 0.5).floor() as u8
}

/// Maps an aliveness value to its gradient color.
///
/// `(0, 0.5]` interpolates blue to green, `(0.5, 1]` green to red. The value
/// 0 returns pure blue, the segment limit; [`render_grid`] substitutes the
/// background color for exact zeros before calling this.
pub fn value_to_color(value: f64) -> Result<Color, RenderError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(RenderError::ValueOutOfRange { value });
    }
    Ok(if value <= 0.5 {
        let t = value / 0.5;
        Color::new(0, channel(255.0 * t), channel(255.0 * (1.0 - t)))
    } else {
        let t = (value - 0.5) / 0.5;
        Color::new(channel(255.0 * t), channel(255.0 * (1.0 - t)), 0)
    })
}

/// Rasterizes a grid: each cell becomes a `cell_size`-square block of its
/// color, with optional 1-pixel gridlines separating adjacent cells. Image
/// dimensions are `w*cell_size + (w-1)` by `h*cell_size + (h-1)` with
/// gridlines, `w*cell_size` by `h*cell_size` without.
pub fn render_grid(state: &GridState, spec: &RenderSpec) -> Image {
    assert!(spec.cell_size >= 1, "cell_size must be at least 1");
    let cs = spec.cell_size as usize;
    let sep = usize::from(spec.gridlines);
    let width = state.width() * cs + (state.width() - 1) * sep;
    let height = state.height() * cs + (state.height() - 1) * sep;
    let mut pixels = vec![spec.gridline_color; width * height];

    for y in 0..state.height() {
        for x in 0..state.width() {
            let v = state.value(x, y);
            let color = if v == 0.0 {
                spec.background
            } else {
                value_to_color(v).expect("grid values are in [0, 1]")
            };
            let x0 = x * (cs + sep);
            let y0 = y * (cs + sep);
            for py in y0..y0 + cs {
                for px in x0..x0 + cs {
                    pixels[py * width + px] = color;
                }
            }
        }
    }
    Image {
        width,
        height,
        pixels,
    }
}

/// Writes the image as binary PPM (P6) and returns the byte count:
/// `"P6\n{width} {height}\n255\n"` followed by row-major RGB triples.
pub fn write_ppm(image: &Image, sink: &mut impl Write) -> io::Result<usize> {
    let header = format!("P6\n{} {}\n255\n", image.width, image.height);
    sink.write_all(header.as_bytes())?;
    let mut payload = Vec::with_capacity(image.pixels.len() * 3);
    for c in &image.pixels {
        payload.extend_from_slice(&[c.r, c.g, c.b]);
    }
    sink.write_all(&payload)?;
    Ok(header.len() + payload.len())
}

/// Renders every state to its own PPM file named by substituting each
/// state's zero-padded generation index into the `{:0N}` placeholder of the
/// template. Returns the emitted paths in order.
pub fn render_sequence(
    states: &[GridState],
    spec: &RenderSpec,
    template: &str,
) -> Result<Vec<PathBuf>, RenderError> {
    if states.is_empty() {
        return Err(RenderError::EmptySequence);
    }
    let (prefix, pad, suffix) =
        parse_template(template).ok_or_else(|| RenderError::InvalidTemplate {
            template: template.to_string(),
        })?;
    let mut paths = Vec::with_capacity(states.len());
    for state in states {
        let path = PathBuf::from(format!(
            "{prefix}{:0pad$}{suffix}",
            state.generation(),
            pad = pad
        ));
        let image = render_grid(state, spec);
        let file = File::create(&path).map_err(|source| RenderError::Io {
            path: path.clone(),
            source,
        })?;
        let mut writer = BufWriter::new(file);
        write_ppm(&image, &mut writer).map_err(|source| RenderError::Io {
            path: path.clone(),
            source,
        })?;
        writer.flush().map_err(|source| RenderError::Io {
            path: path.clone(),
            source,
        })?;
        paths.push(path);
    }
    Ok(paths)
}

/// Splits a template around its `{:0N}` placeholder, returning
/// `(prefix, N, suffix)`.
fn parse_template(template: &str) -> Option<(&str, usize, &str)> {
    let start = template.find("{:0")?;
    let rest = &template[start + 3..];
    let close = rest.find('}')?;
    let pad: usize = rest[..close].parse().ok()?;
    Some((&template[..start], pad, &rest[close + 1..]))
}
