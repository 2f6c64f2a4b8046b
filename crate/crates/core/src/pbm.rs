//! Plain (ASCII, `P1`) PBM reading and writing. `1` is black.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// A decoded bitmap of arbitrary size, row-major, `true` = black.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitmap {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl Bitmap {
    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }
}

/// Parses the text of a `P1` file. `file` is only used for error messages.
pub fn parse(text: &str, file: &Path) -> Result<Bitmap> {
    let malformed = |reason: &str| Error::MalformedPbm {
        file: file.to_path_buf(),
        reason: reason.to_string(),
    };

    // Comments run from '#' to end of line anywhere in the file.
    let mut body = String::with_capacity(text.len());
    for line in text.lines() {
        let line = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        };
        body.push_str(line);
        body.push('\n');
    }

    let mut rest = body.trim_start();
    if !rest.starts_with("P1") {
        return Err(malformed("missing P1 magic number"));
    }
    rest = &rest[2..];

    let mut dims = [0usize; 2];
    for d in dims.iter_mut() {
        rest = rest.trim_start();
        let end = rest
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(rest.len());
        if end == 0 {
            return Err(malformed("missing or invalid dimension"));
        }
        *d = rest[..end]
            .parse()
            .map_err(|_| malformed("dimension does not fit"))?;
        rest = &rest[end..];
    }
    let [width, height] = dims;
    if width == 0 || height == 0 {
        return Err(malformed("zero dimension"));
    }

    // In P1 the raster digits need not be separated by whitespace.
    let mut bits = Vec::with_capacity(width * height);
    for c in rest.chars() {
        match c {
            '0' => bits.push(false),
            '1' => bits.push(true),
            c if c.is_ascii_whitespace() => {}
            _ => return Err(malformed(&format!("unexpected character {c:?} in raster"))),
        }
    }
    if bits.len() != width * height {
        return Err(malformed(&format!(
            "expected {} pixels, found {}",
            width * height,
            bits.len()
        )));
    }
    Ok(Bitmap {
        width,
        height,
        bits,
    })
}

/// Renders a bitmap as `P1` text, one raster row per line.
pub fn render(width: usize, height: usize, bits: &[bool]) -> String {
    debug_assert_eq!(bits.len(), width * height);
    let mut out = String::with_capacity(16 + 2 * bits.len());
    let _ = writeln!(out, "P1\n{width} {height}");
    for row in bits.chunks(width) {
        let line: Vec<&str> = row.iter().map(|&b| if b { "1" } else { "0" }).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn read(path: &Path) -> Result<Bitmap> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse(&text, path)
}

pub fn write(path: &Path, width: usize, height: usize, bits: &[bool]) -> Result<()> {
    fs::write(path, render(width, height, bits)).map_err(|e| Error::io(path, e))
}
