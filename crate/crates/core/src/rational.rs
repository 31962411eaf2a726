//! Exact rationals as `p/q` strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn half() -> Q {
    frac(1, 2)
}

/// Parses `p/q`, `p` or a finite decimal such as `0.25`.
pub fn parse_q(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::InvalidFlow(format!("not a rational: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((i, f)) = s.split_once('.') {
        let neg = i.starts_with('-');
        let ip: BigInt = if i.is_empty() || i == "-" { BigInt::zero() } else { i.parse().map_err(|_| bad())? };
        if !f.chars().all(|c| c.is_ascii_digit()) || f.is_empty() {
            return Err(bad());
        }
        let fp: BigInt = f.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), f.len());
        let frac = Q::new(fp, den);
        let ip = Q::from_integer(ip.abs());
        let v = ip + frac;
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Q::from_integer(n))
}

pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}
