//! Exact rational time and position arithmetic.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serializer};

pub type Rational = Ratio<i128>;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n as i128)
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(p as i128, q as i128)
}

/// `"p/q"`, or `"p"` for integers.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: i128 = p.trim().parse().ok()?;
            let q: i128 = q.trim().parse().ok()?;
            (q != 0).then(|| Rational::new(p, q))
        }
        None => text.parse().ok().map(Rational::from_integer),
    }
}

/// Reduces `x` into `[0, period)`.
pub fn modulo(x: &Rational, period: &Rational) -> Rational {
    let r = x - period * (x / period).floor();
    if r.is_negative() {
        r + period
    } else {
        r
    }
}

pub fn lcm(a: &Rational, b: &Rational) -> Rational {
    // lcm(p/q, r/s) = lcm(p*s, r*q) / (q*s)
    let den = a.denom() * b.denom();
    let x = a.numer() * b.denom();
    let y = b.numer() * a.denom();
    if x.is_zero() || y.is_zero() {
        return Rational::zero();
    }
    Rational::new(x.lcm(&y), den)
}

pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(x))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
    let text = String::deserialize(d)?;
    parse_rational(&text).ok_or_else(|| serde::de::Error::custom(format!("invalid rational '{text}'")))
}
