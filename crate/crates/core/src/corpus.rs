//! Bitmap corpora: 16×16 glyphs indexed by (class, variant), class target
//! codes, normalization of raw scans, PBM directory I/O and a seeded
//! synthetic generator that stands in for real font samples.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::pbm::{self, Bitmap};
use crate::rng;

pub const SIDE: usize = 16;
pub const PIXELS: usize = SIDE * SIDE;

pub const MANIFEST: &str = "manifest.txt";

/// A 16×16 binary glyph in row-major order, `true` = black.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitPattern {
    bits: Vec<bool>,
}

impl BitPattern {
    pub fn from_bits(bits: Vec<bool>) -> Result<Self> {
        if bits.len() != PIXELS {
            return Err(Error::DimensionMismatch {
                expected: PIXELS,
                actual: bits.len(),
            });
        }
        Ok(BitPattern { bits })
    }

    pub fn blank() -> Self {
        BitPattern {
            bits: vec![false; PIXELS],
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * SIDE + col]
    }

    pub fn set(&mut self, row: usize, col: usize, black: bool) {
        self.bits[row * SIDE + col] = black;
    }

    pub fn black_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn hamming(&self, other: &BitPattern) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }

    /// Network input vector: 1.0 for black, 0.0 for white.
    pub fn to_input(&self) -> Vec<f64> {
        self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
    }

    pub fn to_pbm(&self) -> String {
        pbm::render(SIDE, SIDE, &self.bits)
    }
}

impl fmt::Debug for BitPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitPattern(")?;
        write!(f, "{self}")?;
        write!(f, ")")
    }
}

/// ASCII art, `#` for black and `.` for white.
impl fmt::Display for BitPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.bits.chunks(SIDE) {
            let line: String = row.iter().map(|&b| if b { '#' } else { '.' }).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// Crops to the bounding box of black pixels and rescales it to 16×16 by
/// nearest-neighbour sampling.
pub fn normalize_pattern(raw: &Bitmap) -> Result<BitPattern> {
    if raw.width == 0 || raw.height == 0 || raw.bits.len() != raw.width * raw.height {
        return Err(Error::InvalidShape(format!(
            "{}x{} grid with {} pixels",
            raw.width,
            raw.height,
            raw.bits.len()
        )));
    }
    let (mut top, mut bottom, mut left, mut right) = (usize::MAX, 0, usize::MAX, 0);
    for r in 0..raw.height {
        for c in 0..raw.width {
            if raw.get(r, c) {
                top = top.min(r);
                bottom = bottom.max(r);
                left = left.min(c);
                right = right.max(c);
            }
        }
    }
    if top == usize::MAX {
        return Err(Error::AllWhiteInput);
    }
    let box_h = bottom - top + 1;
    let box_w = right - left + 1;
    let mut out = BitPattern::blank();
    for r in 0..SIDE {
        for c in 0..SIDE {
            let src_r = top + r * box_h / SIDE;
            let src_c = left + c * box_w / SIDE;
            out.set(r, c, raw.get(src_r, src_c));
        }
    }
    Ok(out)
}

/// Target code of a class: the big-endian binary expansion of its index.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassCode {
    pub class_index: usize,
    pub code: Vec<f64>,
}

pub fn class_code(class_index: usize, n_outputs: usize) -> Result<ClassCode> {
    let limit = 1usize.checked_shl(n_outputs as u32).unwrap_or(usize::MAX);
    if n_outputs == 0 || class_index >= limit {
        return Err(Error::IndexOutOfRange {
            index: class_index,
            limit,
        });
    }
    let code = (0..n_outputs)
        .rev()
        .map(|bit| ((class_index >> bit) & 1) as f64)
        .collect();
    Ok(ClassCode { class_index, code })
}

/// Glyphs indexed by `[class][variant]`; immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    n_classes: usize,
    n_variants: usize,
    patterns: Vec<BitPattern>,
    labels: BTreeMap<usize, String>,
}

impl Corpus {
    /// `patterns` is class-major: all variants of class 0 first.
    pub fn new(n_classes: usize, n_variants: usize, patterns: Vec<BitPattern>) -> Result<Self> {
        if n_classes == 0 || n_variants == 0 {
            return Err(Error::InvalidShape(format!(
                "{n_classes} classes x {n_variants} variants"
            )));
        }
        if patterns.len() != n_classes * n_variants {
            return Err(Error::InvalidShape(format!(
                "{} patterns for {n_classes} x {n_variants} grid",
                patterns.len()
            )));
        }
        Ok(Corpus {
            n_classes,
            n_variants,
            patterns,
            labels: BTreeMap::new(),
        })
    }

    pub fn with_labels(mut self, labels: BTreeMap<usize, String>) -> Result<Self> {
        if let Some((&class, _)) = labels.iter().find(|(&c, _)| c >= self.n_classes) {
            return Err(Error::IndexOutOfRange {
                index: class,
                limit: self.n_classes,
            });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_variants(&self) -> usize {
        self.n_variants
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn pattern(&self, class: usize, variant: usize) -> &BitPattern {
        assert!(class < self.n_classes && variant < self.n_variants);
        &self.patterns[class * self.n_variants + variant]
    }

    pub fn label(&self, class: usize) -> Option<&str> {
        self.labels.get(&class).map(String::as_str)
    }

    pub fn labels(&self) -> &BTreeMap<usize, String> {
        &self.labels
    }

    /// `(class, variant, pattern)` in class-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BitPattern)> + '_ {
        let nv = self.n_variants;
        self.patterns
            .iter()
            .enumerate()
            .map(move |(i, p)| (i / nv, i % nv, p))
    }

    /// Variants of one class.
    pub fn class_patterns(&self, class: usize) -> &[BitPattern] {
        &self.patterns[class * self.n_variants..(class + 1) * self.n_variants]
    }
}

pub fn pattern_file_name(class: usize, variant: usize) -> String {
    format!("c{class:02}_v{variant:02}.pbm")
}

/// Writes `manifest.txt` plus one PBM per pattern into `dir` (created if needed).
pub fn save_corpus(corpus: &Corpus, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut manifest = format!(
        "classes={}\nvariants={}\n",
        corpus.n_classes, corpus.n_variants
    );
    for (class, text) in &corpus.labels {
        manifest.push_str(&format!("label {class:02} {text}\n"));
    }
    let path = dir.join(MANIFEST);
    fs::write(&path, manifest).map_err(|e| Error::io(&path, e))?;
    for (class, variant, p) in corpus.iter() {
        pbm::write(&dir.join(pattern_file_name(class, variant)), SIDE, SIDE, p.bits())?;
    }
    Ok(())
}

fn parse_manifest(text: &str) -> Result<(usize, usize, BTreeMap<usize, String>)> {
    let bad = |msg: String| Error::InconsistentManifest(msg);
    let mut lines = text.lines();
    let mut count = |key: &str| -> Result<usize> {
        let line = lines
            .next()
            .ok_or_else(|| bad(format!("missing `{key}=` line")))?;
        let value = line
            .trim()
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| bad(format!("expected `{key}=<n>`, found {line:?}")))?;
        let n: usize = value
            .trim()
            .parse()
            .map_err(|_| bad(format!("invalid {key} count {value:?}")))?;
        if n == 0 {
            return Err(bad(format!("{key} must be at least 1")));
        }
        Ok(n)
    };
    let n_classes = count("classes")?;
    let n_variants = count("variants")?;

    let mut labels = BTreeMap::new();
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.splitn(3, char::is_whitespace);
        let (Some("label"), Some(index), text) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad(format!("unrecognised line {line:?}")));
        };
        let class: usize = index
            .parse()
            .map_err(|_| bad(format!("invalid label index {index:?}")))?;
        if class >= n_classes {
            return Err(bad(format!("label for class {class} but only {n_classes} classes")));
        }
        labels.insert(class, text.unwrap_or("").trim().to_string());
    }
    Ok((n_classes, n_variants, labels))
}

/// Loads a corpus directory written by [`save_corpus`] or by hand. Images
/// that are not exactly 16×16 are normalized on the way in.
pub fn load_corpus(dir: &Path) -> Result<Corpus> {
    let manifest_path = dir.join(MANIFEST);
    let text = fs::read_to_string(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?;
    let (n_classes, n_variants, labels) = parse_manifest(&text)?;

    let mut patterns = Vec::with_capacity(n_classes * n_variants);
    for class in 0..n_classes {
        for variant in 0..n_variants {
            let path = dir.join(pattern_file_name(class, variant));
            if !path.is_file() {
                return Err(Error::MissingPattern { class, variant });
            }
            let bitmap = pbm::read(&path)?;
            let pattern = if bitmap.width == SIDE && bitmap.height == SIDE {
                BitPattern::from_bits(bitmap.bits)?
            } else {
                normalize_pattern(&bitmap).map_err(|e| Error::MalformedPbm {
                    file: path.clone(),
                    reason: e.to_string(),
                })?
            };
            patterns.push(pattern);
        }
    }
    Corpus::new(n_classes, n_variants, patterns)?.with_labels(labels)
}

// Glyph strokes stay inside this margin so that one-pixel shifts and
// thickening never fall off the canvas.
const MARGIN_LO: usize = 2;
const MARGIN_HI: usize = SIDE - 3;
const MIN_BASE_DISTANCE: usize = 24;

fn draw_line(p: &mut BitPattern, (r0, c0): (usize, usize), (r1, c1): (usize, usize)) {
    let steps = r0.abs_diff(r1).max(c0.abs_diff(c1));
    for s in 0..=steps {
        let t = |a: usize, b: usize| -> usize {
            if steps == 0 {
                a
            } else {
                let a = a as f64;
                let b = b as f64;
                (a + (b - a) * s as f64 / steps as f64).round() as usize
            }
        };
        p.set(t(r0, r1), t(c0, c1), true);
    }
}

fn random_stroke(p: &mut BitPattern, rng: &mut rng::Rng) {
    let coord = |rng: &mut rng::Rng| rng.gen_range(MARGIN_LO..=MARGIN_HI);
    match rng.gen_range(0..5) {
        // horizontal bar
        0 => {
            let r = coord(rng);
            let (a, b) = (coord(rng), coord(rng));
            draw_line(p, (r, a.min(b)), (r, a.max(b).max(a.min(b) + 4).min(MARGIN_HI)));
        }
        // vertical bar
        1 => {
            let c = coord(rng);
            let (a, b) = (coord(rng), coord(rng));
            draw_line(p, (a.min(b), c), (a.max(b).max(a.min(b) + 4).min(MARGIN_HI), c));
        }
        // free diagonal
        2 => {
            let from = (coord(rng), coord(rng));
            let to = (coord(rng), coord(rng));
            draw_line(p, from, to);
        }
        // box outline
        3 => {
            let (r0, r1) = (coord(rng), coord(rng));
            let (c0, c1) = (coord(rng), coord(rng));
            let (t, b) = (r0.min(r1), r0.max(r1).max(r0.min(r1) + 3).min(MARGIN_HI));
            let (l, r) = (c0.min(c1), c0.max(c1).max(c0.min(c1) + 3).min(MARGIN_HI));
            draw_line(p, (t, l), (t, r));
            draw_line(p, (b, l), (b, r));
            draw_line(p, (t, l), (b, l));
            draw_line(p, (t, r), (b, r));
        }
        // dot cluster
        _ => {
            let (r, c) = (coord(rng).min(MARGIN_HI - 1), coord(rng).min(MARGIN_HI - 1));
            for (dr, dc) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                p.set(r + dr, c + dc, true);
            }
        }
    }
}

fn base_glyphs(seed: u64, n_classes: usize) -> Vec<BitPattern> {
    let mut glyphs: Vec<BitPattern> = Vec::with_capacity(n_classes);
    for class in 0..n_classes {
        let mut rng = rng::stream(seed, class as u64);
        let glyph = loop {
            let mut p = BitPattern::blank();
            for _ in 0..rng.gen_range(3..=4) {
                random_stroke(&mut p, &mut rng);
            }
            if glyphs.iter().all(|g| g.hamming(&p) >= MIN_BASE_DISTANCE) {
                break p;
            }
        };
        glyphs.push(glyph);
    }
    glyphs
}

fn shift(p: &BitPattern, dr: isize, dc: isize) -> BitPattern {
    let mut out = BitPattern::blank();
    for r in 0..SIDE {
        for c in 0..SIDE {
            let (sr, sc) = (r as isize - dr, c as isize - dc);
            if (0..SIDE as isize).contains(&sr) && (0..SIDE as isize).contains(&sc) {
                out.set(r, c, p.get(sr as usize, sc as usize));
            }
        }
    }
    out
}

/// Dilates every stroke by one pixel towards the right or downwards.
fn thicken(p: &BitPattern, downwards: bool) -> BitPattern {
    let mut out = p.clone();
    for r in 0..SIDE {
        for c in 0..SIDE {
            if !p.get(r, c) {
                continue;
            }
            if downwards && r + 1 < SIDE {
                out.set(r + 1, c, true);
            } else if !downwards && c + 1 < SIDE {
                out.set(r, c + 1, true);
            }
        }
    }
    out
}

fn distort(base: &BitPattern, rng: &mut rng::Rng) -> BitPattern {
    let dr = rng.gen_range(-1..=1);
    let dc = rng.gen_range(-1..=1);
    let mut p = shift(base, dr, dc);
    if rng.gen_bool(0.5) {
        p = thicken(&p, rng.gen_bool(0.5));
    }
    let flips = rng.gen_range(1..=5);
    for _ in 0..flips {
        let i = rng.gen_range(0..PIXELS);
        p.bits[i] = !p.bits[i];
    }
    p
}

/// Deterministic synthetic corpus. Variant 0 of each class is its base
/// glyph (a few random strokes, far from every other base glyph); later
/// variants are shifted, optionally thickened and speckled with 1 to 5
/// flipped pixels. Any two patterns of a corpus differ in at least two
/// pixels, so a single noise pixel never turns one glyph into another.
pub fn generate_synthetic(seed: u64, n_classes: usize, n_variants: usize) -> Result<Corpus> {
    if !(1..=16).contains(&n_classes) || n_variants == 0 {
        return Err(Error::InvalidShape(format!(
            "synthetic corpus needs 1..=16 classes and at least one variant, got {n_classes} x {n_variants}"
        )));
    }
    let bases = base_glyphs(seed, n_classes);
    let mut patterns: Vec<BitPattern> = Vec::with_capacity(n_classes * n_variants);
    for (class, base) in bases.iter().enumerate() {
        patterns.push(base.clone());
        for variant in 1..n_variants {
            let stream = (1u64 << 32) | ((class as u64) << 16) | variant as u64;
            let mut rng = rng::stream(seed, stream);
            let glyph = loop {
                let p = distort(base, &mut rng);
                if p.black_count() > 0
                    && patterns.iter().chain(&bases[class + 1..]).all(|q| q.hamming(&p) >= 2)
                {
                    break p;
                }
            };
            patterns.push(glyph);
        }
    }
    Corpus::new(n_classes, n_variants, patterns)
}
