//! Arbitrary-precision rational scalars.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// 1/n! as an exact rational.
pub fn inv_factorial(n: u64) -> Rat {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= BigInt::from(k);
    }
    Rat::new(BigInt::one(), f)
}

/// Canonical text form: `p` or `p/q` with `q > 0`, e.g. `-3/2`.
pub fn render(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses the canonical text form produced by [`render`].
pub fn parse(s: &str) -> Option<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Rat::from_integer),
        Some((n, d)) => {
            let n = n.trim().parse::<BigInt>().ok()?;
            let d = d.trim().parse::<BigInt>().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rat::new(n, d))
            }
        }
    }
}

/// Renders a coefficient for use inside a sum, as `(sign, magnitude-text)`.
pub fn render_signed(r: &Rat) -> (bool, String) {
    (r.is_negative(), render(&r.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_parse_round_trip() {
        for r in [rat(0), rat(7), frac(-3, 2), frac(22, 7)] {
            assert_eq!(parse(&render(&r)).unwrap(), r);
        }
        assert_eq!(parse("  4/6 ").unwrap(), frac(2, 3));
        assert!(parse("1/0").is_none());
        assert!(parse("x").is_none());
    }

    #[test]
    fn factorials() {
        assert_eq!(inv_factorial(0), rat(1));
        assert_eq!(inv_factorial(4), frac(1, 24));
    }
}
