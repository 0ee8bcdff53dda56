//! Parsing of the canonical element syntax, e.g. `2*X1 - 2`, `-X2^3 + 3*X2`
//! or `1/2`. Variables `X0..Xn` may be mixed; lower ones are lifted.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{level, FieldElem};

/// Parse an element of `B_n`.
pub fn parse_elem(s: &str, n: u32) -> Result<FieldElem> {
    let target = level(n);
    let src: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if src.is_empty() {
        return Err(usage(s, "empty expression"));
    }
    let mut acc = FieldElem::zero(&target);
    let mut rest = src.as_str();
    let mut first = true;
    while !rest.is_empty() {
        let neg = match rest.as_bytes()[0] {
            b'+' => {
                rest = &rest[1..];
                false
            }
            b'-' => {
                rest = &rest[1..];
                true
            }
            _ if first => false,
            _ => return Err(usage(s, "expected + or -")),
        };
        first = false;
        let end = rest.find(['+', '-']).unwrap_or(rest.len());
        let term = parse_term(&rest[..end], n).map_err(|e| match e {
            Error::Usage(m) => usage(s, &m),
            e => e,
        })?;
        acc = if neg { &acc - &term } else { &acc + &term };
        rest = &rest[end..];
    }
    Ok(acc)
}

fn usage(s: &str, why: &str) -> Error {
    Error::Usage(format!("cannot parse element '{s}': {why}"))
}

fn parse_term(t: &str, n: u32) -> Result<FieldElem> {
    if t.is_empty() {
        return Err(Error::Usage("empty term".into()));
    }
    let (coef, var) = match t.find('X') {
        None => (t, None),
        Some(0) => ("", Some(&t[1..])),
        Some(i) => {
            let c = t[..i].strip_suffix('*').ok_or_else(|| Error::Usage(format!("missing * in '{t}'")))?;
            (c, Some(&t[i + 1..]))
        }
    };
    let c = if coef.is_empty() { BigRational::one() } else { parse_rational(coef)? };
    let target = level(n);
    let Some(var) = var else {
        return Ok(FieldElem::from_rational(&target, &c));
    };
    let (idx, exp) = match var.split_once('^') {
        Some((i, e)) => (i, e.parse::<u32>().map_err(|_| Error::Usage(format!("bad exponent in '{t}'")))?),
        None => (var, 1),
    };
    let m: u32 = idx.parse().map_err(|_| Error::Usage(format!("bad variable in '{t}'")))?;
    if m > n {
        return Err(Error::Usage(format!("X{m} does not live in B_{n}")));
    }
    let x = level(m).generator().pow(exp as i64)?.lift_to(n);
    let scale = FieldElem::from_rational(&target, &c);
    Ok(&x * &scale)
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Usage(format!("bad number '{s}'"));
    let (num, den) = s.split_once('/').unwrap_or((s, "1"));
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_canonical_strings() {
        let a = parse_elem("2*X1 - 2", 1).unwrap();
        assert_eq!(a.to_string(), "2*X1 - 2");
        let b = parse_elem("-X2^3 + 3*X2", 2).unwrap();
        assert_eq!(b.to_string(), "-X2^3 + 3*X2");
        assert_eq!(parse_elem("1/2", 3).unwrap().to_string(), "1/2");
        // X1 lifted into B_2 is X2^2 - 2
        assert_eq!(parse_elem("X1", 2).unwrap(), parse_elem("X2^2 - 2", 2).unwrap());
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "2X1", "X3", "1/0", "X1^", "3 +", "Y"] {
            assert!(parse_elem(bad, 2).is_err(), "{bad}");
        }
    }

    proptest! {
        #[test]
        fn display_round_trips(coeffs in proptest::collection::vec(-50i64..50, 4), den in 1i64..9) {
            let l = level(2);
            let x = FieldElem::from_int_coeffs(&l, &coeffs)
                .scale(&BigRational::new(1.into(), den.into()));
            prop_assert_eq!(parse_elem(&x.to_string(), 2).unwrap(), x);
        }
    }
}
