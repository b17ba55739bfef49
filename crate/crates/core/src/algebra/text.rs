//! Parser for the canonical text form of [`LaurentPoly`].
//!
//! Accepts terms separated by `+`; each term is a `*`-separated product of
//! integer factors and powers `x<i>^<e>` / `y<i>^<e>` (1-based indices,
//! `^<e>` optional). Factors may repeat and appear in any order, so the
//! parser also accepts hand-written input that is not in canonical form.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::laurent::LaurentPoly;
use crate::error::{Error, Result};

pub(crate) fn parse(s: &str, nvars: usize, coef_rank: usize) -> Result<LaurentPoly> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut terms = Vec::new();
    for raw in s.split('+') {
        let raw = raw.trim();
        if raw.is_empty() {
            return Err(Error::Parse(format!("empty term in {s:?}")));
        }
        terms.push(parse_term(raw, nvars, coef_rank)?);
    }
    Ok(LaurentPoly::from_flat_terms(nvars, coef_rank, terms))
}

fn parse_term(raw: &str, nvars: usize, coef_rank: usize) -> Result<(Vec<i64>, BigInt)> {
    let mut coeff = BigInt::one();
    let mut exps = vec![0i64; nvars + coef_rank];
    for factor in raw.split('*') {
        let mut factor = factor.trim();
        if factor.is_empty() {
            return Err(Error::Parse(format!("empty factor in {raw:?}")));
        }
        if let Ok(c) = factor.parse::<BigInt>() {
            coeff *= c;
            continue;
        }
        if let Some(rest) = factor.strip_prefix('-') {
            coeff = -coeff;
            factor = rest.trim_start();
        }
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => {
                let e = e
                    .trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad exponent in {factor:?}")))?;
                (b.trim(), e)
            }
            None => (factor, 1),
        };
        let (offset, limit, name) = match base.chars().next() {
            Some('x') => (0, nvars, "x"),
            Some('y') => (nvars, coef_rank, "y"),
            _ => return Err(Error::Parse(format!("unknown factor {factor:?}"))),
        };
        let idx: usize = base[1..]
            .parse()
            .map_err(|_| Error::Parse(format!("bad variable {base:?}")))?;
        if idx == 0 || idx > limit {
            return Err(Error::Parse(format!(
                "variable {name}{idx} out of range (have {limit})"
            )));
        }
        exps[offset + idx - 1] += exp;
    }
    if coeff.is_zero() {
        exps.iter_mut().for_each(|e| *e = 0);
    }
    Ok((exps, coeff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    use crate::algebra::CoefRingElement;

    #[test]
    fn parses_canonical_and_loose_forms() {
        let a = parse("1*y1*x1^-1 + 1*x1^-1*x2", 2, 1).unwrap();
        let b = parse("x2 * x1^-1 + x1^-1*y1", 2, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "1*y1*x1^-1 + 1*x1^-1*x2");
        assert_eq!(parse("0", 2, 0).unwrap(), LaurentPoly::zero(2, 0));
        assert_eq!(parse("x1 + -1*x1", 2, 0).unwrap(), LaurentPoly::zero(2, 0));
        assert_eq!(parse("-x1", 1, 0).unwrap().to_string(), "-1*x1");
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "x1 +", "x3", "y1", "z1", "x1^a", "x0", "2**x1"] {
            assert!(parse(bad, 2, 0).is_err(), "{bad:?} should fail");
        }
    }

    fn arb_poly() -> impl Strategy<Value = LaurentPoly> {
        let term = (
            prop::collection::vec(-3i64..4, 3),
            prop::collection::vec(-2i64..3, 2),
            -5i64..6,
        );
        prop::collection::vec(term, 0..8).prop_map(|ts| {
            let mut p = LaurentPoly::zero(3, 2);
            for (ex, ey, c) in ts {
                let coef = CoefRingElement::from_terms(2, [(ey, BigInt::from(c))]);
                p = &p + &LaurentPoly::monomial(ex, coef);
            }
            p
        })
    }

    proptest! {
        #[test]
        fn text_round_trip(p in arb_poly()) {
            let s = p.to_string();
            let back = parse(&s, 3, 2).unwrap();
            prop_assert_eq!(&back, &p);
            prop_assert_eq!(back.to_string(), s);
        }
    }
}
