//! JSON function files: `{"pieces": [{"a", "alpha", "b", "c"}]}` with
//! rationals as strings and `"inf"` for an unbounded right endpoint.

use serde::{Deserialize, Serialize, Serializer};

use super::{Interval, MonotoneProfile, Piece, Ppf, StepFunction};
use crate::error::{Error, Result};
use crate::ext::{format_rational, parse_rational, Rational};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FunctionDoc {
    pieces: Vec<PieceDoc>,
}

// Fields in lexicographic order so serialized keys come out sorted.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceDoc {
    a: String,
    #[serde(default = "zero_string")]
    alpha: String,
    b: String,
    c: String,
}

fn zero_string() -> String {
    "0".to_string()
}

fn parse_endpoint(s: &str) -> Result<Option<Rational>> {
    match s.trim() {
        "inf" | "+inf" | "infinity" => Ok(None),
        other => parse_rational(other).map(Some),
    }
}

impl Ppf {
    /// Parses the function file format. Unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Ppf> {
        let doc: FunctionDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let raw = doc
            .pieces
            .iter()
            .map(|p| {
                let interval = Interval::new(parse_rational(&p.a)?, parse_endpoint(&p.b)?)?;
                Piece::new(interval, parse_rational(&p.c)?, parse_rational(&p.alpha)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ppf::normalize(raw)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let doc = FunctionDoc {
            pieces: self
                .pieces
                .iter()
                .map(|p| PieceDoc {
                    a: format_rational(&p.interval.start),
                    alpha: format_rational(&p.exponent),
                    b: p.interval
                        .end
                        .as_ref()
                        .map_or_else(|| "inf".to_string(), format_rational),
                    c: format_rational(&p.coeff),
                })
                .collect(),
        };
        serde_json::to_value(doc).expect("function document serializes")
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }
}

impl Serialize for Ppf {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json_value().serialize(s)
    }
}

impl Serialize for StepFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_ppf().serialize(s)
    }
}

impl Serialize for MonotoneProfile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.as_ppf().serialize(s)
    }
}
