//! Angles written as plain numbers or as multiples of pi: `"pi"`, `"7pi/4"`,
//! `"-pi/5"`, `"2*pi/3"`, `"0.25"`.

use std::f64::consts::PI;

use serde::{Deserialize, Deserializer};

pub fn parse_angle(text: &str) -> Result<f64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => {
            let d: f64 = d
                .parse()
                .map_err(|_| format!("bad denominator in angle `{text}`"))?;
            if d == 0.0 {
                return Err(format!("zero denominator in angle `{text}`"));
            }
            (n, d)
        }
        None => (s.as_str(), 1.0),
    };
    let (sign, body) = match num.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, num.strip_prefix('+').unwrap_or(num)),
    };
    let value = if let Some(coef) = body.strip_suffix("pi") {
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let c = if coef.is_empty() {
            1.0
        } else {
            coef.parse::<f64>()
                .map_err(|_| format!("bad coefficient in angle `{text}`"))?
        };
        c * PI
    } else {
        body.parse::<f64>()
            .map_err(|_| format!("cannot read angle `{text}`"))?
    };
    Ok(sign * value / den)
}

/// Radians, deserialized from a number or a pi expression.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Angle(pub f64);

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Angle(v)),
            Raw::Int(v) => Ok(Angle(v as f64)),
            Raw::Text(t) => parse_angle(&t).map(Angle).map_err(serde::de::Error::custom),
        }
    }
}
