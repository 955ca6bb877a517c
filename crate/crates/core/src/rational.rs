//! Exact rational numbers for weights and thresholds.
//!
//! Every comparison in the diffusion model happens at exact boundaries
//! (`3/4` gadgets, `1/|N(i)|` weights), so nothing here ever rounds.

use num_rational::Ratio;
use num_traits::{One, Zero};

pub type Rational = Ratio<i64>;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom)
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// True iff `0 < value <= 1`.
pub fn in_unit_open_closed(value: &Rational) -> bool {
    *value > zero() && *value <= one()
}

/// True iff `0 <= value <= 1`.
pub fn in_unit_closed(value: &Rational) -> bool {
    *value >= zero() && *value <= one()
}

/// Formats as `num/den` in lowest terms, always with the slash.
pub fn format(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RationalParseError {
    MissingSlash,
    BadInteger(String),
    ZeroDenominator,
    NegativeDenominator,
}

impl std::fmt::Display for RationalParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RationalParseError::MissingSlash => {
                write!(f, "expected an exact rational of the form num/den")
            }
            RationalParseError::BadInteger(s) => write!(f, "`{s}` is not an integer"),
            RationalParseError::ZeroDenominator => write!(f, "denominator must be nonzero"),
            RationalParseError::NegativeDenominator => {
                write!(f, "denominator must be positive")
            }
        }
    }
}

impl std::error::Error for RationalParseError {}

/// Parses `num/den`. Decimals and bare integers are rejected.
pub fn parse(text: &str) -> Result<Rational, RationalParseError> {
    let (num, den) = text
        .split_once('/')
        .ok_or(RationalParseError::MissingSlash)?;
    let parse_int = |s: &str| {
        // i64::from_str accepts a leading '+', which we do not want.
        if s.is_empty() || s.starts_with('+') {
            return Err(RationalParseError::BadInteger(s.to_string()));
        }
        s.parse::<i64>()
            .map_err(|_| RationalParseError::BadInteger(s.to_string()))
    };
    let num = parse_int(num)?;
    let den = parse_int(den)?;
    match den {
        0 => Err(RationalParseError::ZeroDenominator),
        d if d < 0 => Err(RationalParseError::NegativeDenominator),
        d => Ok(Rational::new(num, d)),
    }
}
