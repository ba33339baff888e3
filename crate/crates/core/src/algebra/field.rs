use std::fmt;

use serde::{Deserialize, Serialize};

use super::ring::is_prime;
use crate::error::{Error, Result};

/// Upper bound on `p^m`; all operations are table lookups.
pub const MAX_FIELD_SIZE: u32 = 1024;

/// Field element code: base-`p` digits of the coefficient vector, low to high.
pub type Fe = u32;

/// `F_{p^m} = F_p[t]/(modulus)` with lookup tables.
#[derive(Clone)]
pub struct Field {
    p: u32,
    m: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    frob: Vec<u16>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub m: u32,
    /// monic modulus, low to high, length `m + 1`
    pub modulus: Vec<u32>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field(p={}, m={}, modulus={:?})", self.p, self.m, self.modulus)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}
impl Eq for Field {}

// polynomial helpers over F_p, coefficient vectors low to high

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = mod_inv(b[db], p);
    while r.len() > db {
        let dr = r.len() - 1;
        let f = r[dr] * lead_inv % p;
        for i in 0..=db {
            let t = f * b[i] % p;
            r[dr - db + i] = (r[dr - db + i] + p - t) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn mod_inv(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let (mut b, mut e) = (a as u64 % p as u64, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn digits(code: u32, p: u32, m: u32) -> Vec<u32> {
    let mut c = code;
    (0..m)
        .map(|_| {
            let d = c % p;
            c /= p;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(p: u32, poly: &[u32]) -> bool {
    let mut f = poly.to_vec();
    poly_trim(&mut f);
    let deg = match f.len() {
        0 => return false,
        n => n - 1,
    };
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        for low in 0..p.pow(d as u32) {
            let mut g = digits(low, p, d as u32);
            g.push(1);
            if poly_rem(&f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Monic irreducible of degree `m` whose low coefficients have the smallest code.
pub fn default_modulus(p: u32, m: u32) -> Vec<u32> {
    if m == 1 {
        return vec![0, 1];
    }
    for low in 0..p.pow(m) {
        let mut g = digits(low, p, m);
        g.push(1);
        if is_irreducible(p, &g) {
            return g;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Parses `p^m` or a bare prime.
pub fn parse_prime_power(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::InvalidField(format!("cannot parse {s:?}, expected p^m"));
    let (a, b) = s.split_once('^').unwrap_or((s, "1"));
    let p: u32 = a.trim().parse().map_err(|_| bad())?;
    let m: u32 = b.trim().parse().map_err(|_| bad())?;
    Ok((p, m))
}

impl Field {
    pub fn new(p: u32, m: u32, modulus: Option<Vec<u32>>) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("p = {p} is not prime")));
        }
        if m == 0 {
            return Err(Error::InvalidField("m must be at least 1".into()));
        }
        let q = (p as u64).checked_pow(m).filter(|&q| q <= MAX_FIELD_SIZE as u64).ok_or_else(|| {
            Error::InvalidField(format!("{p}^{m} exceeds the table limit {MAX_FIELD_SIZE}"))
        })? as u32;
        let modulus = match modulus {
            Some(f) => {
                if f.len() != m as usize + 1 || f[m as usize] != 1 || f.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidField(format!(
                        "modulus {f:?} is not a monic degree-{m} polynomial over F_{p}"
                    )));
                }
                if !is_irreducible(p, &f) {
                    return Err(Error::InvalidField(format!("modulus {f:?} is reducible over F_{p}")));
                }
                f
            }
            None => default_modulus(p, m),
        };
        let qs = q as usize;
        let mut add = vec![0u16; qs * qs];
        let mut mul = vec![0u16; qs * qs];
        let dig: Vec<Vec<u32>> = (0..q).map(|c| digits(c, p, m)).collect();
        for a in 0..qs {
            for b in 0..qs {
                let s: Vec<u32> = dig[a].iter().zip(&dig[b]).map(|(x, y)| (x + y) % p).collect();
                add[a * qs + b] = undigits(&s, p) as u16;
                if b < a {
                    mul[a * qs + b] = mul[b * qs + a];
                    continue;
                }
                let mut prod = vec![0u32; 2 * m as usize];
                for (i, &x) in dig[a].iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (j, &y) in dig[b].iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = poly_rem(&prod, &modulus, p);
                r.resize(m as usize, 0);
                mul[a * qs + b] = undigits(&r, p) as u16;
            }
        }
        let mut neg = vec![0u16; qs];
        let mut inv = vec![0u16; qs];
        for a in 0..qs {
            neg[a] = (0..qs).find(|&b| add[a * qs + b] == 0).expect("additive inverse") as u16;
            if a != 0 {
                inv[a] = (1..qs).find(|&b| mul[a * qs + b] == 1).expect("field") as u16;
            }
        }
        let mut frob = vec![0u16; qs];
        for a in 0..qs {
            let mut x = 1usize;
            for _ in 0..p {
                x = mul[x * qs + a] as usize;
            }
            frob[a] = x as u16;
        }
        Ok(Field { p, m, q, modulus, add, mul, neg, inv, frob })
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        let modulus = if spec.m == 1 && spec.modulus.is_empty() { None } else { Some(spec.modulus.clone()) };
        Self::new(spec.p, spec.m, modulus)
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { p: self.p, m: self.m, modulus: self.modulus.clone() }
    }

    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, None)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }
    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }
    #[inline]
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        self.add[(a * self.q + b) as usize] as Fe
    }
    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        self.neg[a as usize] as Fe
    }
    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        self.mul[(a * self.q + b) as usize] as Fe
    }
    /// Inverse of a nonzero element; zero maps to zero.
    #[inline]
    pub fn inv(&self, a: Fe) -> Fe {
        self.inv[a as usize] as Fe
    }

    pub fn pow(&self, a: Fe, mut e: u64) -> Fe {
        let (mut r, mut b) = (1, a);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        r
    }

    /// `x -> x^(p^power)`.
    pub fn frobenius(&self, x: Fe, power: u32) -> Fe {
        let mut y = x;
        for _ in 0..power % self.m {
            y = self.frob[y as usize] as Fe;
        }
        y
    }

    pub fn elements(&self) -> std::ops::Range<Fe> {
        0..self.q
    }

    pub fn from_digits(&self, d: &[u32]) -> Fe {
        undigits(d, self.p)
    }

    pub fn digits(&self, x: Fe) -> Vec<u32> {
        digits(x, self.p, self.m)
    }

    /// The class of `t`, which generates the field over `F_p`.
    pub fn generator(&self) -> Fe {
        if self.m == 1 {
            1
        } else {
            self.p
        }
    }

    /// Elements of the subfield `F_{p^d}` (requires `d | m`).
    pub fn subfield(&self, d: u32) -> Result<Vec<Fe>> {
        if d == 0 || !self.m.is_multiple_of(d) {
            return Err(Error::InvalidField(format!("{d} does not divide {}", self.m)));
        }
        Ok(self.elements().filter(|&x| self.frobenius(x, d) == x).collect())
    }

    /// Human-readable polynomial form, e.g. `t+2`.
    pub fn format(&self, x: Fe) -> String {
        if x == 0 {
            return "0".into();
        }
        let d = self.digits(x);
        let mut terms = Vec::new();
        for (i, &c) in d.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            terms.push(match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "t".into(),
                (1, c) => format!("{c}t"),
                (i, 1) => format!("t^{i}"),
                (i, c) => format!("{c}t^{i}"),
            });
        }
        terms.join("+")
    }
}
