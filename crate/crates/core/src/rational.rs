//! Exact rational time and cost values.
//!
//! Every time, duration and cost in the crate is a [`Q`]. Boundary checks such
//! as "finishes exactly at the deadline" must not depend on floating point
//! rounding, so nothing here is ever converted to `f64` except for display of
//! ratios.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

/// Exact rational number used for all times, durations and costs.
pub type Q = Ratio<i128>;

/// Builds an integer-valued [`Q`].
pub fn q(n: i128) -> Q {
    Q::from_integer(n)
}

/// Builds the fraction `n / d`.
///
/// # Panics
///
/// Panics if `d` is zero.
pub fn frac(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid number `{text}`: {reason}")]
pub struct ParseQError {
    pub text: String,
    pub reason: &'static str,
}

/// Parses a decimal (`"12"`, `"-0.125"`, `"3e2"` is rejected) or a fraction
/// (`"1/8"`) exactly.
pub fn parse_q(text: &str) -> Result<Q, ParseQError> {
    let err = |reason| ParseQError {
        text: text.to_string(),
        reason,
    };
    let s = text.trim();
    if s.is_empty() {
        return Err(err("empty"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_decimal(num.trim()).ok_or_else(|| err("bad numerator"))?;
        let d = parse_decimal(den.trim()).ok_or_else(|| err("bad denominator"))?;
        if d.is_zero() {
            return Err(err("zero denominator"));
        }
        return Ok(n / d);
    }
    parse_decimal(s).ok_or_else(|| err("not a decimal or fraction"))
}

fn parse_decimal(s: &str) -> Option<Q> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    // 30 fractional digits keeps the denominator well inside i128.
    if frac_part.len() > 30 || int_part.len() > 30 {
        return None;
    }
    let mut digits = String::with_capacity(int_part.len() + frac_part.len());
    digits.push_str(int_part);
    digits.push_str(frac_part);
    let numer: i128 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
    let denom = 10i128.checked_pow(frac_part.len() as u32)?;
    let v = Q::new(numer, denom);
    Some(if neg { -v } else { v })
}

/// Formats a value as a terminating decimal when one exists, otherwise as
/// `p/q`. The output always parses back to the same value.
pub fn format_q(v: &Q) -> String {
    let v = v.reduced();
    let den = *v.denom();
    let mut rest = den;
    let mut twos = 0u32;
    let mut fives = 0u32;
    while rest % 2 == 0 {
        rest /= 2;
        twos += 1;
    }
    while rest % 5 == 0 {
        rest /= 5;
        fives += 1;
    }
    if rest != 1 {
        return format!("{}/{}", v.numer(), den);
    }
    if den == 1 {
        return v.numer().to_string();
    }
    let places = twos.max(fives);
    let scale = 10i128.pow(places);
    let scaled = v.numer() * (scale / den);
    let sign = if scaled < 0 { "-" } else { "" };
    let abs = scaled.abs();
    let (int, frac) = abs.div_rem(&scale);
    let mut frac_s = format!("{:0width$}", frac, width = places as usize);
    while frac_s.ends_with('0') {
        frac_s.pop();
    }
    format!("{sign}{int}.{frac_s}")
}

/// Formats a value with exactly `places` decimals, rounding half away from
/// zero. Deterministic and locale independent.
pub fn format_fixed(v: &Q, places: u32) -> String {
    let scale = 10i128.pow(places);
    let scaled = v * Q::from_integer(scale);
    let rounded = scaled.abs().round();
    let mut n = rounded.to_integer();
    if scaled.is_negative() && n != 0 {
        n = -n;
    }
    let sign = if n < 0 { "-" } else { "" };
    let (int, frac) = n.abs().div_rem(&scale);
    if places == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{:0width$}", frac, width = places as usize)
    }
}

pub fn to_f64(v: &Q) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Largest integer `k` with `k * unit <= v`.
pub fn floor_div(v: &Q, unit: &Q) -> i128 {
    (v / unit).floor().to_integer()
}

/// Serde adapter: a `Q` travels as a string such as `"0.125"` or `"1/3"`.
/// Plain JSON numbers are also accepted on input and parsed from their
/// literal text.
pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let raw = serde_json::Value::deserialize(d)?;
        match raw {
            serde_json::Value::String(s) => parse_q(&s).map_err(de::Error::custom),
            serde_json::Value::Number(n) => parse_q(&n.to_string()).map_err(de::Error::custom),
            other => Err(de::Error::custom(format!(
                "expected a number or numeric string, found {other}"
            ))),
        }
    }
}

/// Wrapper giving [`Q`] a string-based `Serialize`/`Deserialize` and a
/// decimal `Display`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Num(pub Q);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_q(&self.0))
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_q::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        serde_q::deserialize(d).map(Num)
    }
}
