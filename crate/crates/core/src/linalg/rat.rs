use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar. `BigRational` maintains lowest terms with a
/// positive denominator, which is exactly the canonical form the document
/// format requires.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Canonical text form: `"num/den"` with the fraction in lowest terms and a
/// positive denominator, e.g. `"-2/3"`, `"0/1"`, `"5/1"`.
pub fn rat_to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses the canonical text form and rejects everything else: a missing
/// denominator, a denominator that is not positive, a fraction not in lowest
/// terms, redundant signs, and leading zeros all fail.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let reject = |msg: &str| -> Error { Error::bad_input(format!("rational {s:?}: {msg}")) };
    let (num_s, den_s) = s
        .split_once('/')
        .ok_or_else(|| reject("expected \"num/den\""))?;
    let num = parse_int(num_s).ok_or_else(|| reject("bad numerator"))?;
    let den = parse_int(den_s).ok_or_else(|| reject("bad denominator"))?;
    if !den.is_positive() {
        return Err(reject("denominator must be positive"));
    }
    let r = Rat::new(num.clone(), den.clone());
    if r.numer() != &num || r.denom() != &den {
        return Err(reject("not in lowest terms"));
    }
    Ok(r)
}

/// Integer literal: optional minus, no plus sign, no leading zeros, and the
/// minus sign never precedes a zero.
fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return None;
    }
    let val: BigInt = s.parse().ok()?;
    if s.starts_with('-') && val.is_zero() {
        return None;
    }
    Some(val)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_round_trip() {
        for (n, d) in [(0, 1), (5, 1), (-2, 3), (7, 12), (-1, 1)] {
            let r = rat(n, d);
            assert_eq!(parse_rat(&rat_to_string(&r)).unwrap(), r);
        }
    }

    #[test]
    fn rejects_non_canonical() {
        for bad in [
            "-3/6", "3", "3/-1", "3/0", "+3/1", "03/1", "3/02", "-0/1", "", "1/", "/2", "a/b",
            "1/1/1", "1.5/2",
        ] {
            assert!(parse_rat(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn accepts_canonical() {
        assert_eq!(parse_rat("0/1").unwrap(), rat_int(0));
        assert_eq!(parse_rat("-2/3").unwrap(), rat(-2, 3));
        assert_eq!(parse_rat("10/1").unwrap(), rat_int(10));
    }
}
