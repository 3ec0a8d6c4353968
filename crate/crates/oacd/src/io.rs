//! Input parsing and record serialization.
//!
//! Coordinates are read exactly: decimal strings, fractions, and scientific
//! notation all convert to rationals without rounding, so `0.1` really is
//! 1/10. JSON numbers are taken from their literal source text rather than
//! a float detour.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Pow, Zero};
use serde::Serialize;

use crate::arrangement::GeomRef;
use crate::chroma::fmt_tuple;
use crate::diagram::FullOacd;
use crate::exact::{GeneratorError, GeneratorSet, Point2, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InputError {
    /// 1-based line for CSV input, 0 when the position is not line-oriented.
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: {}", self.line, self.message)
        } else {
            write!(f, "{}", self.message)
        }
    }
}

impl std::error::Error for InputError {}

fn bad(line: usize, message: impl Into<String>) -> InputError {
    InputError {
        line,
        message: message.into(),
    }
}

/// Parses a number written as an integer, fraction (`7/2`), decimal
/// (`3.25`), or scientific form (`2.5e-2`) into an exact rational.
pub fn parse_rat(text: &str) -> Result<Rat, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty number".to_string());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim())
            .map_err(|_| format!("bad numerator in {s:?}"))?;
        let d = BigInt::from_str(den.trim())
            .map_err(|_| format!("bad denominator in {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Rat::new(n, d));
    }
    let (mantissa, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i32 = e
                .parse()
                .map_err(|_| format!("bad exponent in {s:?}"))?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("no digits in {s:?}"));
    }
    let (sign, int_digits) = match int_part.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, int_part.strip_prefix('+').unwrap_or(int_part)),
    };
    let digits = format!("{int_digits}{frac_part}");
    if digits.is_empty() {
        return Err(format!("no digits in {s:?}"));
    }
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("not a number: {s:?}"));
    }
    let unsigned = BigInt::from_str(&digits).map_err(|_| format!("not a number: {s:?}"))?;
    let mantissa_num = BigInt::from(sign) * unsigned;
    let shift = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let value = if shift >= 0 {
        Rat::from_integer(mantissa_num * ten.pow(shift as u32))
    } else {
        Rat::new(mantissa_num, ten.pow((-shift) as u32))
    };
    Ok(value)
}

/// Parses `x,y` lines. Blank lines and `#` comments are skipped.
pub fn parse_points_csv(text: &str) -> Result<Vec<Point2>, InputError> {
    let mut points = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',');
        let (Some(xs), Some(ys), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(bad(lineno, format!("expected `x,y`, got {line:?}")));
        };
        let x = parse_rat(xs).map_err(|m| bad(lineno, m))?;
        let y = parse_rat(ys).map_err(|m| bad(lineno, m))?;
        points.push(Point2::new(x, y));
    }
    Ok(points)
}

/// Parses a JSON document holding points: either a top-level array or an
/// object with a `points` member. Each point is `[x, y]` or
/// `{"x": ..., "y": ...}`; coordinates may be numbers or strings.
pub fn parse_points_json(text: &str) -> Result<Vec<Point2>, InputError> {
    let doc: serde_json::Value =
        serde_json::from_str(text).map_err(|e| bad(0, format!("invalid JSON: {e}")))?;
    let list = match &doc {
        serde_json::Value::Array(items) => items,
        serde_json::Value::Object(map) => match map.get("points") {
            Some(serde_json::Value::Array(items)) => items,
            _ => return Err(bad(0, "expected an array or an object with `points`")),
        },
        _ => return Err(bad(0, "expected an array or an object with `points`")),
    };
    let mut points = Vec::with_capacity(list.len());
    for (i, item) in list.iter().enumerate() {
        let (x, y) = match item {
            serde_json::Value::Array(pair) if pair.len() == 2 => (&pair[0], &pair[1]),
            serde_json::Value::Object(map) => match (map.get("x"), map.get("y")) {
                (Some(x), Some(y)) => (x, y),
                _ => return Err(bad(0, format!("point {i} is missing `x` or `y`"))),
            },
            _ => {
                return Err(bad(
                    0,
                    format!("point {i} must be `[x, y]` or an object with `x` and `y`"),
                ))
            }
        };
        let coord = |v: &serde_json::Value, which: &str| -> Result<Rat, InputError> {
            let literal = match v {
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::String(s) => s.clone(),
                _ => return Err(bad(0, format!("point {i}: `{which}` is not a number"))),
            };
            parse_rat(&literal).map_err(|m| bad(0, format!("point {i}, `{which}`: {m}")))
        };
        points.push(Point2::new(coord(x, "x")?, coord(y, "y")?));
    }
    Ok(points)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputFormat {
    Csv,
    Json,
}

impl InputFormat {
    /// Infers the format from a file name, defaulting to CSV.
    pub fn from_path(path: &str) -> InputFormat {
        if path.rsplit('.').next().is_some_and(|ext| ext.eq_ignore_ascii_case("json")) {
            InputFormat::Json
        } else {
            InputFormat::Csv
        }
    }
}

/// Parses points in the given format.
pub fn parse_points(text: &str, format: InputFormat) -> Result<Vec<Point2>, InputError> {
    match format {
        InputFormat::Csv => parse_points_csv(text),
        InputFormat::Json => parse_points_json(text),
    }
}

/// Validates and packages parsed points as a generator set.
pub fn generator_set_from_points(points: Vec<Point2>) -> Result<GeneratorSet, GeneratorError> {
    GeneratorSet::new(points)
}

/// One particle of a diagram in serializable form.
#[derive(Clone, Debug, Serialize)]
pub struct ParticleRecord {
    pub id: usize,
    pub kind: &'static str,
    /// Compact display form of the code.
    pub code: String,
    /// The raw doubled components.
    pub code_doubled: Vec<u32>,
    /// Human-oriented tuple with halves written as fractions.
    pub code_tuple: String,
    /// Exact coordinates for vertices, a representative interior point
    /// otherwise; `None` only for cells with no finite representative.
    pub location: Option<String>,
}

/// All particles of the diagram, cells first, then edges, then vertices,
/// each group in construction order.
pub fn particle_records(d: &FullOacd) -> Vec<ParticleRecord> {
    d.particles()
        .iter()
        .enumerate()
        .map(|(id, p)| {
            let location = p
                .geom
                .map(|g| d.arrangement().representative_point(g).to_string());
            ParticleRecord {
                id,
                kind: p.kind.name(),
                code: p.code.to_string(),
                code_doubled: p.code.doubled().to_vec(),
                code_tuple: fmt_tuple(&p.code),
                location,
            }
        })
        .collect()
}

/// Looks up the exact location string for a geometry reference.
pub fn location_of(d: &FullOacd, g: GeomRef) -> String {
    d.arrangement().representative_point(g).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_parse_exactly() {
        let cases = [
            ("123", Rat::from_integer(123.into())),
            ("-4", Rat::from_integer((-4).into())),
            ("3.25", Rat::new(13.into(), 4.into())),
            ("7/2", Rat::new(7.into(), 2.into())),
            ("1e3", Rat::from_integer(1000.into())),
            ("2.5e-2", Rat::new(1.into(), 40.into())),
            ("0.1", Rat::new(1.into(), 10.into())),
            ("-0.5", Rat::new((-1).into(), 2.into())),
            (".5", Rat::new(1.into(), 2.into())),
            ("+2", Rat::from_integer(2.into())),
        ];
        for (text, want) in cases {
            assert_eq!(parse_rat(text).unwrap(), want, "parsing {text:?}");
        }
        for junk in ["", "abc", "1/0", "1.2.3", "2e", "--3", "0x10", "."] {
            assert!(parse_rat(junk).is_err(), "{junk:?} should not parse");
        }
    }

    #[test]
    fn csv_points_with_comments() {
        let text = "# generators\n0, 0\n4,0\n\n0.5, 7/2\n";
        let pts = parse_points_csv(text).unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[2].x, Rat::new(1.into(), 2.into()));
        assert_eq!(pts[2].y, Rat::new(7.into(), 2.into()));

        let err = parse_points_csv("0,0\n1,2,3\n").unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn json_points_in_both_shapes() {
        let arr = r#"[[0, 0], [4, 0], [0, 4]]"#;
        let obj = r#"{"points": [{"x": 0, "y": 0}, {"x": "7/2", "y": 0.1}]}"#;
        assert_eq!(parse_points_json(arr).unwrap().len(), 3);
        let pts = parse_points_json(obj).unwrap();
        assert_eq!(pts[1].x, Rat::new(7.into(), 2.into()));
        assert_eq!(pts[1].y, Rat::new(1.into(), 10.into()));
        assert!(parse_points_json("{}").is_err());
        assert!(parse_points_json(r#"[[1]]"#).is_err());
    }

    #[test]
    fn json_numbers_avoid_float_rounding() {
        // 0.1 as a float is not 1/10; the literal text must be used.
        let pts = parse_points_json("[[0.1, 0.3]]").unwrap();
        assert_eq!(pts[0].x, Rat::new(1.into(), 10.into()));
        assert_eq!(pts[0].y, Rat::new(3.into(), 10.into()));
    }

    #[test]
    fn records_cover_every_particle() {
        let gs = GeneratorSet::from_ints(&[(0, 0), (4, 0), (0, 4)]).unwrap();
        let d = FullOacd::build(gs).unwrap();
        let recs = particle_records(&d);
        assert_eq!(recs.len(), 13);
        assert_eq!(recs.iter().filter(|r| r.kind == "cell").count(), 6);
        assert_eq!(recs.iter().filter(|r| r.kind == "edge").count(), 6);
        assert!(recs.iter().all(|r| r.location.is_some()));
        let json = serde_json::to_string(&recs).unwrap();
        assert!(json.contains("\"code_doubled\""));
    }

    #[test]
    fn format_inference_from_extension() {
        assert_eq!(InputFormat::from_path("pts.json"), InputFormat::Json);
        assert_eq!(InputFormat::from_path("pts.JSON"), InputFormat::Json);
        assert_eq!(InputFormat::from_path("pts.csv"), InputFormat::Csv);
        assert_eq!(InputFormat::from_path("points"), InputFormat::Csv);
    }
}
