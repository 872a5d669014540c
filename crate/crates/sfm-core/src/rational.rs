//! Exact rational arithmetic. Every quantity the solver manipulates is a
//! reduced fraction of arbitrary-precision integers; there is no floating
//! point anywhere in the library.

use crate::error::SfmError;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// Rational from an integer.
pub fn rat_int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Rational p/q. Panics on q == 0; intended for literals in tests and fixtures.
pub fn rat(p: i64, q: i64) -> Rational {
    assert!(q != 0, "zero denominator");
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses "p/q" or a bare integer "p", with optional surrounding whitespace.
pub fn parse_rational(s: &str) -> Result<Rational, SfmError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(SfmError::InvalidInput("empty rational literal".to_string()));
    }
    let mut parts = s.splitn(2, '/');
    let numer_str = parts.next().unwrap().trim();
    let numer: BigInt = numer_str
        .parse()
        .map_err(|_| SfmError::InvalidInput(format!("bad rational literal {s:?}")))?;
    match parts.next() {
        None => Ok(Rational::from_integer(numer)),
        Some(denom_str) => {
            let denom: BigInt = denom_str
                .trim()
                .parse()
                .map_err(|_| SfmError::InvalidInput(format!("bad rational literal {s:?}")))?;
            if denom.is_zero() {
                return Err(SfmError::InvalidInput(format!(
                    "zero denominator in {s:?}"
                )));
            }
            Ok(Rational::new(numer, denom))
        }
    }
}

/// Renders a rational as "p/q", or as the bare integer "p" when q == 1.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn format_rationals(values: &[Rational]) -> Vec<String> {
    values.iter().map(format_rational).collect()
}

pub fn parse_rationals(values: &[String]) -> Result<Vec<Rational>, SfmError> {
    values.iter().map(|s| parse_rational(s)).collect()
}

/// Sum of the negative components: x⁻(V) = Σ_v min{0, x(v)}.
pub fn negative_part_total(values: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for v in values {
        if v.is_negative() {
            acc += v;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rational("7").unwrap(), rat_int(7));
        assert_eq!(parse_rational("-3").unwrap(), rat_int(-3));
        assert_eq!(parse_rational("1/2").unwrap(), rat(1, 2));
        assert_eq!(parse_rational(" -4/6 ").unwrap(), rat(-2, 3));
        assert_eq!(parse_rational("2/-4").unwrap(), rat(-1, 2));
    }

    #[test]
    fn rejects_malformed_literals() {
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
        assert!(parse_rational("1.5").is_err());
    }

    #[test]
    fn formats_reduced_form() {
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert_eq!(format_rational(&rat(-1, 2)), "-1/2");
        assert_eq!(format_rational(&rat_int(0)), "0");
    }

    #[test]
    fn round_trips() {
        for (p, q) in [(0, 1), (5, 3), (-7, 11), (100, 1)] {
            let r = rat(p, q);
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }

    #[test]
    fn negative_part() {
        let xs = vec![rat_int(3), rat_int(-1), rat(-1, 2), rat_int(0)];
        assert_eq!(negative_part_total(&xs), rat(-3, 2));
    }
}
