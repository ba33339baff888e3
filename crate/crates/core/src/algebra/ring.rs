use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest modulus accepted; keeps every product inside a `u64`.
pub const MAX_MODULUS: u64 = 1 << 31;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The coefficient ring `Z/ell^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LambdaSpec", into = "LambdaSpec")]
pub struct Lambda {
    ell: u64,
    k: u32,
    modulus: u64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LambdaSpec {
    pub ell: u64,
    pub k: u32,
}

impl TryFrom<LambdaSpec> for Lambda {
    type Error = Error;
    fn try_from(s: LambdaSpec) -> Result<Self> {
        Lambda::new(s.ell, s.k)
    }
}

impl From<Lambda> for LambdaSpec {
    fn from(l: Lambda) -> Self {
        LambdaSpec { ell: l.ell, k: l.k }
    }
}

impl Lambda {
    pub fn new(ell: u64, k: u32) -> Result<Self> {
        if !is_prime(ell) {
            return Err(Error::InvalidLambda(format!("ell = {ell} is not prime")));
        }
        if k == 0 {
            return Err(Error::InvalidLambda("k must be at least 1".into()));
        }
        let mut modulus: u64 = 1;
        for _ in 0..k {
            modulus = modulus
                .checked_mul(ell)
                .filter(|m| *m <= MAX_MODULUS)
                .ok_or_else(|| Error::InvalidLambda(format!("{ell}^{k} exceeds 2^31")))?;
        }
        Ok(Lambda { ell, k, modulus })
    }

    /// Parses `ell^k` or a bare prime `ell`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidLambda(format!("cannot parse {s:?}, expected ell^k"));
        let (a, b) = match s.split_once('^') {
            Some((a, b)) => (a, b),
            None => (s, "1"),
        };
        let ell = a.trim().parse().map_err(|_| bad())?;
        let k = b.trim().parse().map_err(|_| bad())?;
        Lambda::new(ell, k)
    }

    /// Fails when `ell` is the characteristic `p` of the working field.
    pub fn check_characteristic(&self, p: u64) -> Result<()> {
        if self.ell == p {
            Err(Error::CharacteristicClash { ell: self.ell })
        } else {
            Ok(())
        }
    }

    #[inline]
    pub fn ell(&self) -> u64 {
        self.ell
    }
    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }
    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.modulus
    }

    #[inline]
    pub fn from_i64(&self, x: i64) -> u64 {
        x.rem_euclid(self.modulus as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.modulus
    }

    /// `a + b*c`
    #[inline]
    pub fn mul_add(&self, a: u64, b: u64, c: u64) -> u64 {
        (a + b * c) % self.modulus
    }

    /// ell-adic valuation; `k` for zero.
    pub fn valuation(&self, mut x: u64) -> u32 {
        if x == 0 {
            return self.k;
        }
        let mut v = 0;
        while x.is_multiple_of(self.ell) {
            x /= self.ell;
            v += 1;
        }
        v
    }

    #[inline]
    pub fn is_unit(&self, x: u64) -> bool {
        !x.is_multiple_of(self.ell)
    }

    pub fn inv(&self, x: u64) -> Option<u64> {
        if !self.is_unit(x) {
            return None;
        }
        let (mut r0, mut r1) = (self.modulus as i64, x as i64);
        let (mut t0, mut t1) = (0i64, 1i64);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        Some(self.from_i64(t0))
    }

    pub fn pow_ell(&self, v: u32) -> u64 {
        if v >= self.k {
            0
        } else {
            self.ell.pow(v)
        }
    }

    /// Writes nonzero `x` as `ell^v * u` with `u` a unit.
    pub fn split(&self, x: u64) -> (u32, u64) {
        let v = self.valuation(x);
        if v >= self.k {
            return (self.k, 0);
        }
        (v, x / self.ell.pow(v))
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.modulus
    }

    pub fn units(&self) -> impl Iterator<Item = u64> + '_ {
        (1..self.modulus).filter(move |x| self.is_unit(*x))
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.ell, self.k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_specs() {
        assert!(Lambda::new(4, 1).is_err());
        assert!(Lambda::new(2, 0).is_err());
        assert!(Lambda::new(2, 40).is_err());
        assert!(Lambda::new(3, 2).unwrap().check_characteristic(3).is_err());
    }

    #[test]
    fn inverse_and_valuation() {
        let l = Lambda::new(3, 2).unwrap();
        for x in l.units() {
            assert_eq!(l.mul(x, l.inv(x).unwrap()), 1);
        }
        assert_eq!(l.inv(3), None);
        assert_eq!(l.valuation(0), 2);
        assert_eq!(l.valuation(6), 1);
        assert_eq!(l.split(6), (1, 2));
        assert_eq!(l.units().count(), 6);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(Lambda::parse("2^3").unwrap().modulus(), 8);
        assert_eq!(Lambda::parse("5").unwrap().modulus(), 5);
        assert!(Lambda::parse("x").is_err());
    }
}
