//! Reading and writing residue systems.
//!
//! Two formats, both round-tripping bit-exactly after normalization:
//!
//! * text — one class per line, `<residue> mod <modulus>`, with `#`
//!   comments and blank lines ignored;
//! * structured — a JSON object `{"classes": [[a, m], ...]}` (integers of
//!   any size; residues may be negative and are normalized on ingestion).

use super::{ResidueClass, ResidueSystem};
use num_bigint::{BigInt, BigUint};
use std::fmt::Write as _;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl ParseError {
    fn new(line: usize, msg: impl Into<String>) -> Self {
        ParseError {
            line,
            msg: msg.into(),
        }
    }
}

/// Parse the line-oriented text format.
pub fn parse_text(input: &str) -> Result<ResidueSystem, ParseError> {
    let mut classes = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (a, kw, m) = match (tokens.next(), tokens.next(), tokens.next(), tokens.next()) {
            (Some(a), Some(kw), Some(m), None) => (a, kw, m),
            _ => {
                return Err(ParseError::new(
                    line_no,
                    format!("expected `<residue> mod <modulus>`, got `{line}`"),
                ))
            }
        };
        if kw != "mod" {
            return Err(ParseError::new(
                line_no,
                format!("expected the keyword `mod`, got `{kw}`"),
            ));
        }
        let residue = BigInt::from_str(a)
            .map_err(|_| ParseError::new(line_no, format!("bad residue `{a}`")))?;
        let modulus = BigUint::from_str(m)
            .map_err(|_| ParseError::new(line_no, format!("bad modulus `{m}`")))?;
        let class = ResidueClass::new(residue, modulus)
            .map_err(|e| ParseError::new(line_no, e.to_string()))?;
        classes.push(class);
    }
    Ok(ResidueSystem::new(classes))
}

/// Write the text format: one normalized class per line.
pub fn write_text(system: &ResidueSystem) -> String {
    let mut out = String::new();
    for class in system.classes() {
        writeln!(out, "{} mod {}", class.residue(), class.modulus()).unwrap();
    }
    out
}

/// Parse the structured format `{"classes": [[a, m], ...]}`.
pub fn parse_json(input: &str) -> Result<ResidueSystem, ParseError> {
    let value: serde_json::Value =
        serde_json::from_str(input).map_err(|e| ParseError::new(e.line(), e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| ParseError::new(1, "top level must be an object"))?;
    let pairs = obj
        .get("classes")
        .and_then(|c| c.as_array())
        .ok_or_else(|| ParseError::new(1, "missing `classes` array"))?;
    let mut classes = Vec::with_capacity(pairs.len());
    for (i, pair) in pairs.iter().enumerate() {
        let err = |msg: String| ParseError::new(1, format!("classes[{i}]: {msg}"));
        let arr = pair
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| err("expected a pair [residue, modulus]".into()))?;
        let residue =
            json_integer(&arr[0]).ok_or_else(|| err(format!("bad residue {}", arr[0])))?;
        let modulus_int =
            json_integer(&arr[1]).ok_or_else(|| err(format!("bad modulus {}", arr[1])))?;
        let modulus = modulus_int
            .to_biguint()
            .ok_or_else(|| err("modulus must be nonnegative".into()))?;
        let class = ResidueClass::new(residue, modulus).map_err(|e| err(e.to_string()))?;
        classes.push(class);
    }
    Ok(ResidueSystem::new(classes))
}

fn json_integer(v: &serde_json::Value) -> Option<BigInt> {
    let n = v.as_number()?;
    let s = n.to_string();
    if s.contains(['.', 'e', 'E']) {
        return None;
    }
    BigInt::from_str(&s).ok()
}

/// Write the structured format (compact, arbitrary-precision integers).
pub fn write_json(system: &ResidueSystem) -> String {
    let classes: Vec<serde_json::Value> = system
        .classes()
        .iter()
        .map(|c| {
            let a = serde_json::Number::from_str(&c.residue().to_string()).unwrap();
            let m = serde_json::Number::from_str(&c.modulus().to_string()).unwrap();
            serde_json::Value::Array(vec![a.into(), m.into()])
        })
        .collect();
    let doc = serde_json::json!({ "classes": classes });
    serde_json::to_string(&doc).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    const ERDOS12: &str = "\
# all moduli divide 12
0 mod 2
0 mod 3
1 mod 4
1 mod 6   # trailing comment
11 mod 12
";

    #[test]
    fn text_parse_and_roundtrip() {
        let sys = parse_text(ERDOS12).unwrap();
        assert_eq!(sys.len(), 5);
        let once = write_text(&sys);
        let twice = write_text(&parse_text(&once).unwrap());
        assert_eq!(once, twice, "writer output must be a fixed point");
    }

    #[test]
    fn text_normalizes_negative_residues() {
        let sys = parse_text("-1 mod 4\n").unwrap();
        assert_eq!(write_text(&sys), "3 mod 4\n");
    }

    #[test]
    fn text_errors_carry_line_numbers() {
        let err = parse_text("0 mod 2\n\nfoo bar\n").unwrap_err();
        assert_eq!(err.line, 3);
        let err = parse_text("0 mod 2\n1 rem 3\n").unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.msg.contains("mod"));
        let err = parse_text("1 mod 0\n").unwrap_err();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn json_roundtrip_with_big_moduli() {
        let big = "340282366920938463463374607431768211457"; // 2^128 + 1
        let input = format!(r#"{{"classes": [[11, 12], [-3, {big}]]}}"#);
        let sys = parse_json(&input).unwrap();
        let once = write_json(&sys);
        let twice = write_json(&parse_json(&once).unwrap());
        assert_eq!(once, twice);
        assert!(once.contains(big));
    }

    #[test]
    fn json_rejects_floats_and_shapes() {
        assert!(parse_json(r#"{"classes": [[1.5, 4]]}"#).is_err());
        assert!(parse_json(r#"{"classes": [[1, 2, 3]]}"#).is_err());
        assert!(parse_json(r#"{"classes": [[1, -4]]}"#).is_err());
        assert!(parse_json(r#"[1, 2]"#).is_err());
    }

    #[test]
    fn formats_agree() {
        let sys = parse_text(ERDOS12).unwrap();
        let via_json = parse_json(&write_json(&sys)).unwrap();
        assert_eq!(sys, via_json);
    }
}
