//! Chromatic codes and their algebra.
//!
//! The code of a particle is one component per generator: 1 for every other
//! generator it strictly beats (is closer than), 1/2 for every tie, summed.
//! Components are stored **doubled** so all arithmetic stays in integers:
//! a paper-value component `t` is stored as `2t`. A valid particle code of
//! an `n`-generator diagram has doubled components in `0..=2(n-1)` summing
//! to `n(n-1)`.
//!
//! Code strings are compact when every doubled component is below 36: one
//! base-36 digit per component (`"07A247"` is the doubled tuple
//! `(0,7,10,2,4,7)`, i.e. `(0, 7/2, 5, 1, 2, 7/2)`). Larger codes render as
//! `d:`-prefixed comma-separated doubled integers.

use std::fmt;

use crate::arrangement::{Sign, SignVector};

/// A particle's chromatic code, components doubled.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChromaticCode {
    doubled: Vec<u32>,
}

impl ChromaticCode {
    pub fn from_doubled(doubled: Vec<u32>) -> Self {
        ChromaticCode { doubled }
    }

    /// Convenience constructor from paper-value integer components.
    pub fn from_ints(values: &[u32]) -> Self {
        ChromaticCode {
            doubled: values.iter().map(|v| v * 2).collect(),
        }
    }

    pub fn doubled(&self) -> &[u32] {
        &self.doubled
    }

    /// Number of components (= number of generators).
    pub fn n(&self) -> usize {
        self.doubled.len()
    }

    /// Whether the components sum to n(n-1) doubled units, as every particle
    /// code of an n-generator diagram must.
    pub fn has_particle_sum(&self) -> bool {
        let n = self.n() as u64;
        self.doubled.iter().map(|&d| d as u64).sum::<u64>() == n * (n - 1)
    }
}

impl fmt::Display for ChromaticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_code(self))
    }
}

impl fmt::Debug for ChromaticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "code({})", format_code(self))
    }
}

/// What a code denotes, decided purely from its component pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParticleKind {
    Cell,
    Edge,
    Vertex2I,
    Vertex3I,
}

impl ParticleKind {
    pub fn name(self) -> &'static str {
        match self {
            ParticleKind::Cell => "cell",
            ParticleKind::Edge => "edge",
            ParticleKind::Vertex2I => "vertex-2I",
            ParticleKind::Vertex3I => "vertex-3I",
        }
    }
}

/// Classifies a code by its component pattern:
/// all distinct integers -> cell; exactly two equal half-integers and
/// distinct integers -> edge; four half-integers in two equal pairs of
/// distinct values -> 2-I vertex; all integers with exactly one value
/// appearing three times -> 3-I vertex. Anything else is not a particle.
pub fn classify_kind(c: &ChromaticCode) -> Option<ParticleKind> {
    let odds: Vec<u32> = c.doubled.iter().copied().filter(|d| d % 2 == 1).collect();
    let mut evens: Vec<u32> = c.doubled.iter().copied().filter(|d| d % 2 == 0).collect();
    evens.sort_unstable();
    let evens_distinct = evens.windows(2).all(|w| w[0] != w[1]);
    match odds.len() {
        0 => {
            if evens_distinct {
                return Some(ParticleKind::Cell);
            }
            // Exactly one value three times, everything else once.
            let mut runs: Vec<usize> = Vec::new();
            let mut i = 0;
            while i < evens.len() {
                let mut j = i;
                while j < evens.len() && evens[j] == evens[i] {
                    j += 1;
                }
                runs.push(j - i);
                i = j;
            }
            let triples = runs.iter().filter(|&&r| r == 3).count();
            let singles = runs.iter().filter(|&&r| r == 1).count();
            if triples == 1 && triples + singles == runs.len() {
                Some(ParticleKind::Vertex3I)
            } else {
                None
            }
        }
        2 => {
            if odds[0] == odds[1] && evens_distinct {
                Some(ParticleKind::Edge)
            } else {
                None
            }
        }
        4 => {
            let mut o = odds.clone();
            o.sort_unstable();
            if o[0] == o[1] && o[2] == o[3] && o[1] != o[2] && evens_distinct {
                Some(ParticleKind::Vertex2I)
            } else {
                None
            }
        }
        _ => None,
    }
}

/// A code's base: its components as a sorted multiset. Two particles with
/// the same base differ only by which generator holds which score.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Base {
    sorted_doubled: Vec<u32>,
}

impl Base {
    pub fn sorted_doubled(&self) -> &[u32] {
        &self.sorted_doubled
    }
}

pub fn base(c: &ChromaticCode) -> Base {
    let mut sorted_doubled = c.doubled.clone();
    sorted_doubled.sort_unstable();
    Base { sorted_doubled }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeError {
    LengthMismatch { a: usize, b: usize },
    EmptyComplex,
}

impl fmt::Display for CodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeError::LengthMismatch { a, b } => {
                write!(f, "codes have different lengths ({a} vs {b})")
            }
            CodeError::EmptyComplex => write!(f, "a complex needs at least one particle"),
        }
    }
}

impl std::error::Error for CodeError {}

fn check_len(a: &ChromaticCode, b: &ChromaticCode) -> Result<(), CodeError> {
    if a.n() != b.n() {
        return Err(CodeError::LengthMismatch { a: a.n(), b: b.n() });
    }
    Ok(())
}

/// Equi-colored: identical codes (componentwise).
pub fn equi_color(a: &ChromaticCode, b: &ChromaticCode) -> Result<bool, CodeError> {
    check_len(a, b)?;
    Ok(a == b)
}

/// Equi-based: identical component multisets.
pub fn equi_base(a: &ChromaticCode, b: &ChromaticCode) -> Result<bool, CodeError> {
    check_len(a, b)?;
    Ok(base(a) == base(b))
}

/// How many components of `c` equal the given doubled value.
pub fn count_components(c: &ChromaticCode, doubled_value: u32) -> usize {
    c.doubled.iter().filter(|&&d| d == doubled_value).count()
}

/// Componentwise absolute differences, in doubled units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffTuple {
    pub doubled: Vec<u32>,
}

pub fn diff_tuple(a: &ChromaticCode, b: &ChromaticCode) -> Result<DiffTuple, CodeError> {
    check_len(a, b)?;
    Ok(DiffTuple {
        doubled: a
            .doubled
            .iter()
            .zip(&b.doubled)
            .map(|(&x, &y)| x.abs_diff(y))
            .collect(),
    })
}

/// Chromatic distance in doubled units: the Manhattan distance of the two
/// codes. Halve for paper values.
pub fn chrom_dist(a: &ChromaticCode, b: &ChromaticCode) -> Result<u64, CodeError> {
    Ok(diff_tuple(a, b)?.doubled.iter().map(|&d| d as u64).sum())
}

/// Transition number: between adjacent cells this counts boundary crossings;
/// it coincides with [`chrom_dist`].
pub fn transition_number(a: &ChromaticCode, b: &ChromaticCode) -> Result<u64, CodeError> {
    chrom_dist(a, b)
}

/// Code distance: the Hamming distance (number of differing components).
pub fn code_dist(a: &ChromaticCode, b: &ChromaticCode) -> Result<u32, CodeError> {
    Ok(diff_tuple(a, b)?
        .doubled
        .iter()
        .filter(|&&d| d != 0)
        .count() as u32)
}

/// The code of a complex: the componentwise sum over its member particles
/// (doubled units; sums can exceed the single-particle range).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComplexCode {
    pub doubled: Vec<u64>,
}

pub fn complex_code<'a, I>(members: I) -> Result<ComplexCode, CodeError>
where
    I: IntoIterator<Item = &'a ChromaticCode>,
{
    let mut acc: Option<Vec<u64>> = None;
    for m in members {
        match &mut acc {
            None => acc = Some(m.doubled.iter().map(|&d| d as u64).collect()),
            Some(v) => {
                if v.len() != m.n() {
                    return Err(CodeError::LengthMismatch {
                        a: v.len(),
                        b: m.n(),
                    });
                }
                for (slot, &d) in v.iter_mut().zip(&m.doubled) {
                    *slot += d as u64;
                }
            }
        }
    }
    acc.map(|doubled| ComplexCode { doubled }).ok_or(CodeError::EmptyComplex)
}

/// Builds the chromatic code from a particle's sign vector. For bisector
/// `(i, j)`: the negative side is closer to generator `i` (full point to
/// `i`), positive closer to `j`, zero a tie (half point each).
pub fn code_from_signs(sv: &SignVector, pairs: &[(usize, usize)], n: usize) -> ChromaticCode {
    let mut doubled = vec![0u32; n];
    for (s, &(i, j)) in sv.signs().iter().zip(pairs) {
        match s {
            Sign::Neg => doubled[i] += 2,
            Sign::Pos => doubled[j] += 2,
            Sign::Zero => {
                doubled[i] += 1;
                doubled[j] += 1;
            }
        }
    }
    ChromaticCode { doubled }
}

const DIGITS: &[u8; 36] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// Renders a code: compact base-36 digits when every doubled component is
/// below 36, otherwise `d:`-prefixed comma-separated doubled integers.
pub fn format_code(c: &ChromaticCode) -> String {
    if c.doubled.iter().all(|&d| d < 36) {
        c.doubled
            .iter()
            .map(|&d| DIGITS[d as usize] as char)
            .collect()
    } else {
        let body: Vec<String> = c.doubled.iter().map(|d| d.to_string()).collect();
        format!("d:{}", body.join(","))
    }
}

/// Renders a doubled value in paper units: `"7"` for 14, `"7/2"` for 7.
pub fn fmt_half(doubled: u64) -> String {
    if doubled % 2 == 0 {
        (doubled / 2).to_string()
    } else {
        format!("{doubled}/2")
    }
}

/// Renders a code as a paper-unit tuple, e.g. `(0, 7/2, 5, 1, 2, 7/2)`.
pub fn fmt_tuple(c: &ChromaticCode) -> String {
    let parts: Vec<String> = c.doubled.iter().map(|&d| fmt_half(d as u64)).collect();
    format!("({})", parts.join(","))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseCodeError {
    Empty,
    BadDigit(char),
    BadNumber(String),
    LengthMismatch { expected: usize, got: usize },
}

impl fmt::Display for ParseCodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseCodeError::Empty => write!(f, "empty code string"),
            ParseCodeError::BadDigit(c) => write!(f, "bad code digit {c:?}"),
            ParseCodeError::BadNumber(s) => write!(f, "bad doubled component {s:?}"),
            ParseCodeError::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} components, got {got}")
            }
        }
    }
}

impl std::error::Error for ParseCodeError {}

/// Parses either code form: compact base-36 digits, or `d:`-prefixed (or
/// plain) comma-separated doubled integers.
pub fn parse_code(s: &str) -> Result<ChromaticCode, ParseCodeError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseCodeError::Empty);
    }
    let listy = s.strip_prefix("d:").map(str::trim);
    if let Some(body) = listy.or_else(|| s.contains(',').then_some(s)) {
        let mut doubled = Vec::new();
        for part in body.split(',') {
            let part = part.trim();
            doubled.push(
                part.parse::<u32>()
                    .map_err(|_| ParseCodeError::BadNumber(part.to_string()))?,
            );
        }
        return Ok(ChromaticCode { doubled });
    }
    let mut doubled = Vec::new();
    for ch in s.chars() {
        let d = ch
            .to_digit(36)
            .ok_or(ParseCodeError::BadDigit(ch))?;
        doubled.push(d);
    }
    Ok(ChromaticCode { doubled })
}

/// [`parse_code`] plus a component-count check.
pub fn parse_code_with_len(s: &str, n: usize) -> Result<ChromaticCode, ParseCodeError> {
    let c = parse_code(s)?;
    if c.n() != n {
        return Err(ParseCodeError::LengthMismatch {
            expected: n,
            got: c.n(),
        });
    }
    Ok(c)
}

/// A particle: its kind, code, and (when it comes from a built diagram) the
/// handle to its geometry.
#[derive(Clone, Debug)]
pub struct Particle {
    pub kind: ParticleKind,
    pub code: ChromaticCode,
    pub geom: Option<crate::arrangement::GeomRef>,
}
