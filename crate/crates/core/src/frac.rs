//! Lossless text form for rationals: `"3/2"`, `"-1/6"`, `"4"`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::Q;

pub fn to_string(x: &Q) -> String {
    if *x.denom() == 1 {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a fraction: {s:?}"));
    match s.split_once('/') {
        None => s.parse::<i128>().map(Q::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: i128 = n.trim().parse().map_err(|_| bad())?;
            let d: i128 = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
    }
}

pub fn to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Writes a non-negative `x` as `coeff² · r` with `r` a square-free integer,
/// so that `√x = coeff·√r`.
pub fn sqrt_normal_form(x: &Q) -> Result<(Q, i128)> {
    if *x < Q::zero() {
        return Err(Error::InvalidParameter(format!("negative radicand {}", to_string(x))));
    }
    if x.is_zero() {
        return Ok((Q::zero(), 1));
    }
    // x = n/d = (n·d)/d²
    let mut rest = x.numer().checked_mul(*x.denom()).ok_or_else(|| Error::Numerical("overflow in sqrt form".into()))?;
    let mut square = 1i128;
    let mut p = 2i128;
    while p * p <= rest {
        while rest % (p * p) == 0 {
            rest /= p * p;
            square *= p;
        }
        p += 1;
    }
    Ok((Q::new(square, *x.denom()), rest))
}

/// `#[serde(with = "frac::single")]`
pub mod single {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use crate::Q;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_string(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(de::Error::custom)
    }
}

/// `#[serde(with = "frac::vec")]`
pub mod vec {
    use serde::{de, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    use crate::Q;

    pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&super::to_string(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| super::parse(s).map_err(de::Error::custom))
            .collect()
    }
}
