use serde::{Deserialize, Serialize};

use crate::algebra::fieldlin::rank;
use crate::algebra::{Fe, Field};
use crate::error::{Error, Result};

/// Zero locus of `a0 + a1 x1 + ... + an xn`, scaled so the first nonzero
/// linear coefficient is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Hyperplane {
    coeffs: Vec<Fe>,
}

impl Hyperplane {
    pub fn normalize(f: &Field, raw: &[Fe]) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::DimensionMismatch { expected: 2, found: raw.len() });
        }
        if let Some(&x) = raw.iter().find(|&&x| x >= f.q()) {
            return Err(Error::InvalidField(format!("element code {x} out of range for q = {}", f.q())));
        }
        let lead = raw[1..].iter().copied().find(|&x| x != 0).ok_or(Error::ZeroLinearPart)?;
        let s = f.inv(lead);
        Ok(Hyperplane { coeffs: raw.iter().map(|&x| f.mul(x, s)).collect() })
    }

    /// `x_i - c` (1-based `i`).
    pub fn coordinate(f: &Field, n: usize, i: usize, c: Fe) -> Self {
        let mut raw = vec![0; n + 1];
        raw[0] = f.neg(c);
        raw[i] = 1;
        Hyperplane::normalize(f, &raw).expect("nonzero linear part")
    }

    /// `x_i - x_j - c`.
    pub fn difference(f: &Field, n: usize, i: usize, j: usize, c: Fe) -> Self {
        let mut raw = vec![0; n + 1];
        raw[0] = f.neg(c);
        raw[i] = 1;
        raw[j] = f.neg(1);
        Hyperplane::normalize(f, &raw).expect("nonzero linear part")
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }
    pub fn dim(&self) -> usize {
        self.coeffs.len() - 1
    }
    pub fn constant(&self) -> Fe {
        self.coeffs[0]
    }
    pub fn linear(&self) -> &[Fe] {
        &self.coeffs[1..]
    }

    /// Applies `f -> f^(p^e)` coefficientwise (normalization is preserved).
    pub fn frobenius(&self, f: &Field, e: u32) -> Self {
        Hyperplane { coeffs: self.coeffs.iter().map(|&x| f.frobenius(x, e)).collect() }
    }

    pub fn contains_point(&self, f: &Field, x: &[Fe]) -> bool {
        let mut s = self.coeffs[0];
        for (a, &xi) in self.coeffs[1..].iter().zip(x) {
            s = f.add(s, f.mul(*a, xi));
        }
        s == 0
    }

    pub fn format(&self, f: &Field) -> String {
        let names = ["x", "y", "z", "w"];
        let mut terms: Vec<String> = Vec::new();
        for (i, &a) in self.coeffs[1..].iter().enumerate() {
            if a == 0 {
                continue;
            }
            let var = if self.dim() <= names.len() { names[i].to_string() } else { format!("x{}", i + 1) };
            terms.push(if a == 1 { var } else { format!("({})*{var}", f.format(a)) });
        }
        if self.coeffs[0] != 0 {
            terms.push(f.format(self.coeffs[0]));
        }
        format!("{} = 0", terms.join(" + "))
    }
}

pub fn is_parallel_pair(h1: &Hyperplane, h2: &Hyperplane) -> bool {
    h1 != h2 && h1.linear() == h2.linear()
}

pub fn is_dependent_triple(f: &Field, h1: &Hyperplane, h2: &Hyperplane, h3: &Hyperplane) -> bool {
    if h1 == h2 || h1 == h3 || h2 == h3 {
        return false;
    }
    let full = [h1.coeffs.clone(), h2.coeffs.clone(), h3.coeffs.clone()];
    let lin = [h1.linear().to_vec(), h2.linear().to_vec(), h3.linear().to_vec()];
    rank(f, &full) == 2 && rank(f, &lin) == 2
}
