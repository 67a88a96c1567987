//! Exact rational scalars. Everything in this crate computes over `Rat`;
//! there is no floating-point mode.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rat = num_rational::BigRational;

pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rfrac(num: i64, den: i64) -> Rat {
    assert!(den != 0, "zero denominator");
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn factorial(n: u64) -> Rat {
    let mut acc = BigInt::one();
    for t in 2..=n {
        acc *= BigInt::from(t);
    }
    Rat::from_integer(acc)
}

/// Binomial coefficient C(n, k) for integer n (possibly negative) and k >= 0.
pub fn binomial(n: i64, k: u64) -> Rat {
    let mut acc = Rat::one();
    for t in 0..k {
        acc *= rint(n - t as i64);
    }
    acc / factorial(k)
}

pub fn pow2(e: i64) -> Rat {
    let base = rint(2);
    let mut acc = Rat::one();
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    if e < 0 {
        acc.recip()
    } else {
        acc
    }
}

pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

/// Parity of an integer-valued rational; panics on non-integers.
pub fn int_parity(r: &Rat) -> bool {
    assert!(is_integer(r), "expected an integer, got {r}");
    (r.numer() % BigInt::from(2)).abs() == BigInt::one()
}

pub fn to_i64(r: &Rat) -> Option<i64> {
    use num_traits::ToPrimitive;
    if is_integer(r) {
        r.numer().to_i64()
    } else {
        None
    }
}

/// Renders a rational in the wire format used by reports and geometry files.
pub fn render_rat(r: &Rat) -> String {
    if is_integer(r) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses "a/b" or "a". Whitespace is not accepted.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rat::new(n, d))
}
