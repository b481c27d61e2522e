//! The law interchange format.
//!
//! A law file is a single JSON object
//!
//! ```json
//! {"atoms":[{"x":"-1","p":"1/2"},{"x":"1","p":"1/2"}]}
//! ```
//!
//! where `x` and `p` accept rational strings `a/b` or decimal strings.
//! Unknown keys are rejected. Positions and masses are parsed exactly; the
//! exact masses stay available for the big-rational convolution oracle.

use crate::law::{Law, LawError};
use crate::rational::{parse_rational, ParseRationalError, Rational};
use num::ToPrimitive;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LawFileError {
    #[error("law file is not valid UTF-8")]
    Encoding,
    #[error("law file does not match the schema: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("atom {index}, field {field:?}: {source}")]
    Number {
        index: usize,
        field: &'static str,
        #[source]
        source: ParseRationalError,
    },
    #[error(transparent)]
    Law(#[from] LawError),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LawFileDoc {
    atoms: Vec<AtomEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AtomEntry {
    x: String,
    p: String,
}

/// A parsed law file: exact positions and exact masses, before any
/// floating-point conversion.
#[derive(Debug, Clone, PartialEq)]
pub struct LawDocument {
    pairs: Vec<(Rational, Rational)>,
}

impl LawDocument {
    /// Exact `(position, mass)` pairs as written in the file.
    pub fn pairs(&self) -> &[(Rational, Rational)] {
        &self.pairs
    }

    /// Builds the working law (masses to nearest double, validated and
    /// renormalized).
    pub fn to_law(&self) -> Result<Law, LawError> {
        Law::new(
            self.pairs
                .iter()
                .map(|(x, p)| (x.clone(), p.to_f64().unwrap_or(f64::NAN)))
                .collect(),
        )
    }
}

/// Parses a law document from text.
pub fn parse_law_document(text: &str) -> Result<LawDocument, LawFileError> {
    let doc: LawFileDoc = serde_json::from_str(text)?;
    let mut pairs = Vec::with_capacity(doc.atoms.len());
    for (index, atom) in doc.atoms.iter().enumerate() {
        let x = parse_rational(&atom.x).map_err(|source| LawFileError::Number {
            index,
            field: "x",
            source,
        })?;
        let p = parse_rational(&atom.p).map_err(|source| LawFileError::Number {
            index,
            field: "p",
            source,
        })?;
        pairs.push((x, p));
    }
    Ok(LawDocument { pairs })
}

/// Parses a law from text: schema, exact numbers, then law validation.
pub fn parse_law_str(text: &str) -> Result<Law, LawFileError> {
    Ok(parse_law_document(text)?.to_law()?)
}

/// Byte-level entry point (fuzzing and file IO hand bytes over directly).
pub fn parse_law_bytes(bytes: &[u8]) -> Result<Law, LawFileError> {
    let text = std::str::from_utf8(bytes).map_err(|_| LawFileError::Encoding)?;
    parse_law_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn parses_the_documented_example() {
        let law = parse_law_str(r#"{"atoms":[{"x":"-1","p":"1/2"},{"x":"1","p":"1/2"}]}"#).unwrap();
        assert_eq!(law.atoms()[0].pos, rat(-1, 1));
        assert_eq!(law.atoms()[0].mass, 0.5);
        assert_eq!(law.len(), 2);
    }

    #[test]
    fn accepts_decimal_strings() {
        let law = parse_law_str(r#"{"atoms":[{"x":"0","p":"0.7"},{"x":"2.5","p":"0.3"}]}"#).unwrap();
        assert_eq!(law.atoms()[1].pos, rat(5, 2));
        assert_eq!(law.atoms()[1].mass, 0.3);
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = parse_law_str(r#"{"atoms":[{"x":"0","p":"1"}],"name":"x"}"#).unwrap_err();
        assert!(matches!(err, LawFileError::Schema(_)));
        let err = parse_law_str(r#"{"atoms":[{"x":"0","p":"1","w":"2"}]}"#).unwrap_err();
        assert!(matches!(err, LawFileError::Schema(_)));
    }

    #[test]
    fn rejects_bad_numbers_with_position() {
        let err = parse_law_str(r#"{"atoms":[{"x":"0","p":"1"},{"x":"1e3","p":"1"}]}"#).unwrap_err();
        match err {
            LawFileError::Number { index, field, .. } => {
                assert_eq!((index, field), (1, "x"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn law_validation_still_applies() {
        let err = parse_law_str(r#"{"atoms":[]}"#).unwrap_err();
        assert!(matches!(err, LawFileError::Law(LawError::EmptyLaw)));
        let err = parse_law_str(r#"{"atoms":[{"x":"0","p":"1/3"}]}"#).unwrap_err();
        assert!(matches!(
            err,
            LawFileError::Law(LawError::MassSumOutOfTolerance { .. })
        ));
    }

    #[test]
    fn exact_pairs_survive_for_the_oracle() {
        let doc = parse_law_document(r#"{"atoms":[{"x":"0","p":"0.3"},{"x":"1","p":"7/10"}]}"#)
            .unwrap();
        assert_eq!(doc.pairs()[0].1, rat(3, 10));
        assert_eq!(doc.pairs()[1].1, rat(7, 10));
    }

    #[test]
    fn invalid_utf8_is_a_clean_error() {
        assert!(matches!(
            parse_law_bytes(&[0xff, 0xfe, b'{']),
            Err(LawFileError::Encoding)
        ));
    }
}
