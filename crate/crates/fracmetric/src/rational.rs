//! Exact rational arithmetic: parsing, formatting, and contraction vectors.
//!
//! Every quantity the crate reports or certifies is a `BigRational`; floats
//! appear only as advisory guidance inside the checker and never decide
//! anything.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use thiserror::Error;

pub type Ratio = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatioParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `p/q`, plain integers, or decimal literals.
///
/// Decimals are read exactly over powers of ten, so `0.3` is `3/10` and never
/// a binary float.
pub fn parse_ratio(text: &str) -> Result<Ratio, RatioParseError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(RatioParseError::Empty);
    }
    let (negative, mag) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if mag.is_empty() {
        return Err(RatioParseError::Invalid(s.to_owned()));
    }
    let value = parse_magnitude(mag, s)?;
    Ok(if negative { -value } else { value })
}

fn parse_magnitude(mag: &str, original: &str) -> Result<Ratio, RatioParseError> {
    let invalid = || RatioParseError::Invalid(original.to_owned());
    if let Some((num, den)) = mag.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| invalid())?;
        let d: BigInt = den.trim().parse().map_err(|_| invalid())?;
        if d.is_zero() {
            return Err(RatioParseError::ZeroDenominator(original.to_owned()));
        }
        if n.is_negative() || d.is_negative() {
            return Err(invalid());
        }
        return Ok(Ratio::new(n, d));
    }
    if let Some((int, frac)) = mag.split_once('.') {
        let int = if int.is_empty() { "0" } else { int };
        if frac.is_empty()
            || !frac.bytes().all(|b| b.is_ascii_digit())
            || !int.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(invalid());
        }
        let whole: BigInt = int.parse().map_err(|_| invalid())?;
        let frac_num: BigInt = frac.parse().map_err(|_| invalid())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(Ratio::new(whole * &scale + frac_num, scale));
    }
    let n: BigInt = mag.parse().map_err(|_| invalid())?;
    Ok(Ratio::from_integer(n))
}

/// Formats a rational as `p/q`, or just `p` for integers.
pub fn fmt_ratio(r: &Ratio) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ratio_to_f64(r: &Ratio) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Six significant digits, for human-readable report columns.
pub fn fmt_decimal6(r: &Ratio) -> String {
    let v = ratio_to_f64(r);
    if v == 0.0 {
        return "0.00000".to_owned();
    }
    let exp = v.abs().log10().floor() as i32;
    let decimals = (5 - exp).max(0) as usize;
    format!("{v:.decimals$}")
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyRatioError {
    #[error("contraction ratio `{0}` is outside (0,1)")]
    OutOfRange(String),
    #[error(transparent)]
    Parse(#[from] RatioParseError),
}

/// One contraction ratio per cell map, each strictly between 0 and 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyRatio {
    values: Vec<Ratio>,
}

impl PolyRatio {
    pub fn new(values: Vec<Ratio>) -> Result<Self, PolyRatioError> {
        let one = Ratio::one();
        for v in &values {
            if !v.is_positive() || *v >= one {
                return Err(PolyRatioError::OutOfRange(fmt_ratio(v)));
            }
        }
        Ok(PolyRatio { values })
    }

    /// Parses a comma-separated list such as `1/2,0.3,3/5`.
    pub fn parse(text: &str) -> Result<Self, PolyRatioError> {
        let values = text
            .split(',')
            .map(parse_ratio)
            .collect::<Result<Vec<_>, _>>()?;
        PolyRatio::new(values)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, cell: usize) -> &Ratio {
        &self.values[cell]
    }

    pub fn values(&self) -> &[Ratio] {
        &self.values
    }

    /// Product of the ratios along a word; the empty word weighs 1.
    pub fn word_weight(&self, word: &crate::word::Word) -> Ratio {
        let mut acc = Ratio::one();
        for &letter in word.letters() {
            acc *= &self.values[letter as usize];
        }
        acc
    }

    pub fn min(&self) -> &Ratio {
        self.values.iter().min().expect("nonempty polyratio")
    }

    pub fn max(&self) -> &Ratio {
        self.values.iter().max().expect("nonempty polyratio")
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.values.iter().map(ratio_to_f64).collect()
    }
}

impl fmt::Display for PolyRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(fmt_ratio).collect();
        write!(f, "{}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Ratio {
        parse_ratio(s).unwrap()
    }

    #[test]
    fn parses_fractions_integers_and_decimals() {
        assert_eq!(r("3/10"), Ratio::new(BigInt::from(3), BigInt::from(10)));
        assert_eq!(r("0.3"), r("3/10"));
        assert_eq!(r("1"), Ratio::one());
        assert_eq!(r(".5"), r("1/2"));
        assert_eq!(r("-0.25"), -r("1/4"));
        assert_eq!(r("2/4"), r("1/2"));
    }

    #[test]
    fn rejects_bad_literals() {
        assert!(parse_ratio("").is_err());
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("x").is_err());
        assert!(parse_ratio("1.2.3").is_err());
    }

    #[test]
    fn formats_reduced() {
        assert_eq!(fmt_ratio(&r("9/10")), "9/10");
        assert_eq!(fmt_ratio(&r("4/4")), "1");
        assert_eq!(fmt_decimal6(&r("27/125")), "0.216000");
    }

    #[test]
    fn polyratio_validates_range() {
        assert!(PolyRatio::parse("1/2,1/2").is_ok());
        assert!(PolyRatio::parse("0.3,1").is_err());
        assert!(PolyRatio::parse("0,1/2").is_err());
    }
}
