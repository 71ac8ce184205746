use serde::{Deserialize, Serialize};

use super::{CurvePoint, WeierstrassModel};
use crate::error::{Error, Result};
use crate::numbers::{format_rational, parse_rational, Rational};

/// JSON form of a curve and (optionally) a point:
/// `{"a": ["a1", "a2", "a3", "a4", "a6"], "P": ["x", "y"] | "O"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveInput {
    pub a: Vec<String>,
    #[serde(rename = "P", default, skip_serializing_if = "Option::is_none")]
    pub point: Option<PointInput>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointInput {
    Affine([String; 2]),
    Identity(String),
}

impl PointInput {
    pub fn parse(&self) -> Result<CurvePoint<Rational>> {
        match self {
            PointInput::Identity(s) if s == "O" => Ok(CurvePoint::Identity),
            PointInput::Identity(s) => Err(Error::Input(format!("unknown point {s:?}"))),
            PointInput::Affine([x, y]) => Ok(CurvePoint::Affine {
                x: parse_rational(x)?,
                y: parse_rational(y)?,
            }),
        }
    }
}

/// Serialize a rational point.
pub fn point_to_json(p: &CurvePoint<Rational>) -> PointInput {
    match p {
        CurvePoint::Identity => PointInput::Identity("O".into()),
        CurvePoint::Affine { x, y } => PointInput::Affine([format_rational(x), format_rational(y)]),
    }
}

/// Parse and validate a curve description; the point (if any) must lie on
/// the curve.
pub fn parse_curve_json(text: &str) -> Result<(WeierstrassModel<Rational>, Option<CurvePoint<Rational>>)> {
    let input: CurveInput =
        serde_json::from_str(text).map_err(|e| Error::Input(format!("curve JSON: {e}")))?;
    input.build()
}

impl CurveInput {
    pub fn build(&self) -> Result<(WeierstrassModel<Rational>, Option<CurvePoint<Rational>>)> {
        if self.a.len() != 5 {
            return Err(Error::Input(format!("expected 5 coefficients, got {}", self.a.len())));
        }
        let mut coeffs = Vec::with_capacity(5);
        for s in &self.a {
            coeffs.push(parse_rational(s)?);
        }
        let model = WeierstrassModel::new(coeffs.try_into().expect("five coefficients"))?;
        let point = match &self.point {
            None => None,
            Some(pi) => {
                let p = pi.parse()?;
                if !model.contains(&p) {
                    return Err(Error::NotOnCurve);
                }
                Some(p)
            }
        };
        Ok((model, point))
    }

    pub fn from_model(model: &WeierstrassModel<Rational>, point: Option<&CurvePoint<Rational>>) -> Self {
        CurveInput {
            a: model.coefficients().iter().map(format_rational).collect(),
            point: point.map(point_to_json),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numbers::rat;

    #[test]
    fn round_trip() {
        let text = r#"{"a": ["1", "1", "0", "-1652/1", "25168"], "P": ["24", "-4"]}"#;
        let (e, p) = parse_curve_json(text).unwrap();
        let p = p.unwrap();
        assert_eq!(p, CurvePoint::affine(rat(24), rat(-4)));
        let back = serde_json::to_string(&CurveInput::from_model(&e, Some(&p))).unwrap();
        assert_eq!(
            back,
            r#"{"a":["1/1","1/1","0/1","-1652/1","25168/1"],"P":["24/1","-4/1"]}"#
        );
        let (e2, p2) = parse_curve_json(&back).unwrap();
        assert_eq!((e2, p2.unwrap()), (e, p));
    }

    #[test]
    fn identity_and_errors() {
        let (_, p) = parse_curve_json(r#"{"a": ["0","0","0","-2","0"], "P": "O"}"#).unwrap();
        assert_eq!(p, Some(CurvePoint::Identity));
        assert!(parse_curve_json(r#"{"a": ["0","0","0","0","0"]}"#).is_err());
        assert!(parse_curve_json(r#"{"a": ["0","0","0","-2"]}"#).is_err());
        assert_eq!(
            parse_curve_json(r#"{"a": ["0","0","0","-2","0"], "P": ["1","1"]}"#).unwrap_err(),
            Error::NotOnCurve
        );
        assert!(parse_curve_json(r#"{"a": ["0","0","0","-2","0"], "P": "Q"}"#).is_err());
        assert!(parse_curve_json("not json").is_err());
    }
}
