use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Matrix entries. Over a prime field the value is the canonical residue in `0..p`.
pub type Scalar = BigRational;

/// The coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Field {
    #[default]
    Rationals,
    Prime(u32),
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F{p}"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        if p >= (1 << 31) || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Field::Prime(p as u32))
    }

    /// Parses `Q` or `F<p>` / `Fp<p>`.
    pub fn parse(s: &str) -> Result<Field> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("q") || t.eq_ignore_ascii_case("rationals") {
            return Ok(Field::Rationals);
        }
        let digits = t
            .trim_start_matches(['F', 'f'])
            .trim_start_matches(['p', 'P'])
            .trim_start_matches([':', '_', '=']);
        let p: u64 = digits
            .parse()
            .map_err(|_| Error::Format(format!("cannot parse field {s:?}")))?;
        Field::prime(p)
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => *p as u64,
        }
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero()
    }

    pub fn one(&self) -> Scalar {
        Scalar::one()
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        match self {
            Field::Rationals => Scalar::from_integer(BigInt::from(v)),
            Field::Prime(p) => {
                let r = v.rem_euclid(*p as i64);
                Scalar::from_integer(BigInt::from(r))
            }
        }
    }

    /// Brings an arbitrary rational into canonical form for this field.
    pub fn reduce(&self, x: &Scalar) -> Result<Scalar> {
        match self {
            Field::Rationals => Ok(x.clone()),
            Field::Prime(p) => {
                let p = *p as u64;
                let pb = BigInt::from(p);
                let num = ((x.numer() % &pb) + &pb) % &pb;
                let den = ((x.denom() % &pb) + &pb) % &pb;
                let den = den.to_u64().unwrap_or(0);
                if den == 0 {
                    return Err(Error::FieldMismatch(format!(
                        "denominator of {x} vanishes mod {p}"
                    )));
                }
                let n = num.to_u64().unwrap_or(0);
                let v = (n as u128 * inv_mod(den, p) as u128 % p as u128) as u64;
                Ok(Scalar::from_integer(BigInt::from(v)))
            }
        }
    }

    pub fn residue(&self, x: &Scalar) -> u64 {
        x.numer().to_u64().unwrap_or(0)
    }

    fn from_residue(v: u64) -> Scalar {
        Scalar::from_integer(BigInt::from(v))
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            Field::Rationals => a + b,
            Field::Prime(p) => Self::from_residue((self.residue(a) + self.residue(b)) % *p as u64),
        }
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            Field::Rationals => a - b,
            Field::Prime(p) => {
                let p = *p as u64;
                Self::from_residue((self.residue(a) + p - self.residue(b)) % p)
            }
        }
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        match self {
            Field::Rationals => -a,
            Field::Prime(p) => {
                let p = *p as u64;
                Self::from_residue((p - self.residue(a)) % p)
            }
        }
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        match self {
            Field::Rationals => a * b,
            Field::Prime(p) => {
                let p = *p as u64;
                Self::from_residue(
                    (self.residue(a) as u128 * self.residue(b) as u128 % p as u128) as u64,
                )
            }
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: &Scalar) -> Option<Scalar> {
        if a.is_zero() {
            return None;
        }
        match self {
            Field::Rationals => Some(a.recip()),
            Field::Prime(p) => Some(Self::from_residue(inv_mod(self.residue(a), *p as u64))),
        }
    }

    pub fn sign(&self, negative: bool) -> Scalar {
        if negative {
            self.neg(&Scalar::one())
        } else {
            Scalar::one()
        }
    }

    /// Formats a scalar as an exact `p/q` string.
    pub fn format(x: &Scalar) -> String {
        if x.is_integer() {
            x.numer().to_string()
        } else {
            format!("{}/{}", x.numer(), x.denom())
        }
    }

    /// Parses `p`, `-p` or `p/q`.
    pub fn parse_scalar(&self, s: &str) -> Result<Scalar> {
        let t = s.trim();
        let v = if let Some((n, d)) = t.split_once('/') {
            let n: BigInt = n
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad rational {s:?}")))?;
            let d: BigInt = d
                .trim()
                .parse()
                .map_err(|_| Error::Format(format!("bad rational {s:?}")))?;
            if d.is_zero() {
                return Err(Error::Format(format!("zero denominator in {s:?}")));
            }
            Scalar::new(n, d)
        } else {
            let n: BigInt = t
                .parse()
                .map_err(|_| Error::Format(format!("bad rational {s:?}")))?;
            Scalar::from_integer(n)
        };
        self.reduce(&v)
    }

    /// True when `x` is a legal canonical value for this field.
    pub fn is_canonical(&self, x: &Scalar) -> bool {
        match self {
            Field::Rationals => true,
            Field::Prime(p) => x.is_integer() && !x.is_negative() && x.numer() < &BigInt::from(*p),
        }
    }
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    // p prime: a^(p-2)
    let mut base = a % p;
    let mut exp = p - 2;
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % p as u128) as u64;
        }
        base = (base as u128 * base as u128 % p as u128) as u64;
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_are_checked() {
        assert!(Field::prime(2).is_ok());
        assert!(Field::prime(2147483647).is_ok());
        assert_eq!(Field::prime(15), Err(Error::NotPrime(15)));
        assert!(Field::prime(1 << 31).is_err());
    }

    #[test]
    fn modular_arithmetic() {
        let f = Field::prime(7).unwrap();
        let three = f.from_i64(3);
        let inv = f.inv(&three).unwrap();
        assert_eq!(f.mul(&three, &inv), f.one());
        assert_eq!(f.from_i64(-1), f.from_i64(6));
        let half = f.parse_scalar("1/2").unwrap();
        assert_eq!(f.mul(&half, &f.from_i64(2)), f.one());
        assert!(f.parse_scalar("1/7").is_err());
    }

    #[test]
    fn parse_field_names() {
        assert_eq!(Field::parse("Q").unwrap(), Field::Rationals);
        assert_eq!(Field::parse("F2").unwrap(), Field::Prime(2));
        assert_eq!(Field::parse("Fp101").unwrap(), Field::Prime(101));
        assert!(Field::parse("F4").is_err());
    }
}
