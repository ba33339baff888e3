use serde::Serialize;

use super::howell::{howell, reduce_against, smith_rank, Pivot};
use super::ring::Lambda;
use crate::error::{Error, Result};

/// A submodule of `Lambda^n`, stored by its Howell basis. Two submodules are
/// equal exactly when their stored bases are identical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LambdaSubmodule {
    lambda: Lambda,
    ambient: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<Pivot>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RankSummary {
    /// minimal number of generators
    pub generators: usize,
    /// number of Howell rows
    pub howell_rows: usize,
    /// Howell rows with unit leading entry
    pub free_rank: usize,
    /// log base ell of the cardinality
    pub log_size: u64,
}

impl LambdaSubmodule {
    pub fn from_generators<I>(lambda: Lambda, ambient: usize, gens: I) -> Self
    where
        I: IntoIterator<Item = Vec<u64>>,
    {
        let (rows, pivots) = howell(&lambda, gens.into_iter().collect(), ambient);
        LambdaSubmodule { lambda, ambient, rows, pivots }
    }

    pub fn try_from_generators(lambda: Lambda, ambient: usize, gens: Vec<Vec<u64>>) -> Result<Self> {
        for g in &gens {
            if g.len() != ambient {
                return Err(Error::DimensionMismatch { expected: ambient, found: g.len() });
            }
        }
        Ok(Self::from_generators(lambda, ambient, gens))
    }

    pub fn zero(lambda: Lambda, ambient: usize) -> Self {
        LambdaSubmodule { lambda, ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(lambda: Lambda, ambient: usize) -> Self {
        Self::from_generators(lambda, ambient, (0..ambient).map(|i| unit_vector(ambient, i)))
    }

    pub fn lambda(&self) -> Lambda {
        self.lambda
    }
    pub fn ambient(&self) -> usize {
        self.ambient
    }
    pub fn basis(&self) -> &[Vec<u64>] {
        &self.rows
    }
    pub fn pivots(&self) -> &[Pivot] {
        &self.pivots
    }
    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient && self.pivots.iter().all(|p| p.val == 0)
    }

    pub fn contains(&self, v: &[u64]) -> Result<bool> {
        if v.len() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: v.len() });
        }
        let mut w: Vec<u64> = v.iter().map(|&x| self.lambda.reduce(x)).collect();
        Ok(reduce_against(&self.lambda, &self.rows, &self.pivots, &mut w))
    }

    /// Remainder of `v` after greedy reduction (zero iff `v` is a member).
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let mut w: Vec<u64> = v.iter().map(|&x| self.lambda.reduce(x)).collect();
        reduce_against(&self.lambda, &self.rows, &self.pivots, &mut w);
        w
    }

    pub fn is_subset_of(&self, other: &LambdaSubmodule) -> Result<bool> {
        for r in &self.rows {
            if !other.contains(r)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn howell_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn free_rank(&self) -> usize {
        self.pivots.iter().filter(|p| p.val == 0).count()
    }

    pub fn num_generators(&self) -> usize {
        smith_rank(&self.lambda, &self.rows, self.ambient)
    }

    pub fn log_size(&self) -> u64 {
        self.pivots.iter().map(|p| (self.lambda.k() - p.val) as u64).sum()
    }

    pub fn ranks(&self) -> RankSummary {
        RankSummary {
            generators: self.num_generators(),
            howell_rows: self.howell_rows(),
            free_rank: self.free_rank(),
            log_size: self.log_size(),
        }
    }

    pub fn sum(&self, other: &LambdaSubmodule) -> LambdaSubmodule {
        assert_eq!(self.ambient, other.ambient, "ambient mismatch");
        Self::from_generators(
            self.lambda,
            self.ambient,
            self.rows.iter().chain(&other.rows).cloned(),
        )
    }

    /// `{x : x . s = 0 for all s}` under the standard dot product.
    pub fn annihilator(&self) -> LambdaSubmodule {
        super::matrix::right_kernel(&self.lambda, &self.rows, self.ambient)
    }

    /// Annihilator under the pairing `<x, s> = x^T G s`.
    pub fn annihilator_with_gram(&self, gram: &super::matrix::LambdaMatrix) -> Result<LambdaSubmodule> {
        if gram.rows() != self.ambient || gram.cols() != self.ambient {
            return Err(Error::DimensionMismatch { expected: self.ambient, found: gram.rows() });
        }
        let rows: Vec<Vec<u64>> = self.rows.iter().map(|s| gram.mul_vec(s)).collect();
        Ok(super::matrix::right_kernel(&self.lambda, &rows, self.ambient))
    }

    pub fn intersect(&self, other: &LambdaSubmodule) -> LambdaSubmodule {
        self.annihilator().sum(&other.annihilator()).annihilator()
    }

    /// Image under `v -> f(v)`, applied to the basis.
    pub fn map<F>(&self, target_ambient: usize, f: F) -> LambdaSubmodule
    where
        F: Fn(&[u64]) -> Vec<u64>,
    {
        Self::from_generators(self.lambda, target_ambient, self.rows.iter().map(|r| f(r)))
    }

    /// Every element, in a fixed order. Only for tiny modules.
    pub fn enumerate(&self) -> Vec<Vec<u64>> {
        let lam = self.lambda;
        let mut out = vec![vec![0u64; self.ambient]];
        for (row, p) in self.rows.iter().zip(&self.pivots) {
            let order = lam.ell().pow(lam.k() - p.val);
            let mut next = Vec::with_capacity(out.len() * order as usize);
            for v in &out {
                for c in 0..order {
                    next.push(
                        v.iter().zip(row).map(|(&a, &b)| lam.mul_add(a, c, b)).collect(),
                    );
                }
            }
            out = next;
        }
        out
    }
}

pub fn unit_vector(n: usize, i: usize) -> Vec<u64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn brute_span(lam: &Lambda, n: usize, gens: &[Vec<u64>]) -> BTreeSet<Vec<u64>> {
        let mut span: BTreeSet<Vec<u64>> = BTreeSet::new();
        span.insert(vec![0; n]);
        loop {
            let mut grew = false;
            let cur: Vec<Vec<u64>> = span.iter().cloned().collect();
            for v in &cur {
                for g in gens {
                    let w: Vec<u64> = v.iter().zip(g).map(|(&a, &b)| lam.add(a, b)).collect();
                    grew |= span.insert(w);
                }
            }
            if !grew {
                return span;
            }
        }
    }

    #[test]
    fn spec_examples() {
        let z4 = Lambda::new(2, 2).unwrap();
        let id = LambdaSubmodule::from_generators(z4, 2, vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(id.basis(), &[vec![1, 0], vec![0, 1]]);
        let two = LambdaSubmodule::from_generators(z4, 1, vec![vec![2]]);
        assert_eq!(two.basis(), &[vec![2]]);
        assert_eq!(two.enumerate().len(), 2);
        assert!(two.contains(&[2]).unwrap());
        assert!(!two.contains(&[1]).unwrap());
        assert!(two.contains(&[0]).unwrap());
        assert!(two.contains(&[0, 0]).is_err());
        assert_eq!(two.annihilator(), two);
        let zero = LambdaSubmodule::from_generators(z4, 3, vec![vec![0; 3]; 3]);
        assert!(zero.is_zero());
        assert_eq!(zero.num_generators(), 0);

        let z3 = Lambda::new(3, 1).unwrap();
        let e1 = LambdaSubmodule::from_generators(z3, 3, vec![vec![1, 0, 0]]);
        assert_eq!(
            e1.annihilator(),
            LambdaSubmodule::from_generators(z3, 3, vec![vec![0, 1, 0], vec![0, 0, 1]])
        );
        assert!(LambdaSubmodule::full(z3, 3).annihilator().is_zero());
    }

    #[test]
    fn double_annihilator_exhaustive_small() {
        // every cyclic and two-generated submodule of (Z/4)^2 and (Z/9)^2
        for (ell, k) in [(2u64, 2u32), (3, 2)] {
            let lam = Lambda::new(ell, k).unwrap();
            let m = lam.modulus();
            let vecs: Vec<Vec<u64>> =
                (0..m).flat_map(|a| (0..m).map(move |b| vec![a, b])).collect();
            for a in &vecs {
                for b in &vecs {
                    let s = LambdaSubmodule::from_generators(lam, 2, vec![a.clone(), b.clone()]);
                    assert_eq!(s.annihilator().annihilator(), s);
                }
            }
        }
    }

    fn lambda_strategy() -> impl Strategy<Value = Lambda> {
        prop_oneof![
            Just(Lambda::new(2, 1).unwrap()),
            Just(Lambda::new(2, 2).unwrap()),
            Just(Lambda::new(2, 3).unwrap()),
            Just(Lambda::new(3, 1).unwrap()),
            Just(Lambda::new(3, 2).unwrap()),
            Just(Lambda::new(5, 1).unwrap()),
            Just(Lambda::new(7, 1).unwrap()),
        ]
    }

    fn matrix_strategy() -> impl Strategy<Value = (Lambda, usize, Vec<Vec<u64>>)> {
        (lambda_strategy(), 1usize..=4, 0usize..=4).prop_flat_map(|(lam, n, r)| {
            let m = lam.modulus();
            (
                Just(lam),
                Just(n),
                proptest::collection::vec(proptest::collection::vec(0..m, n), r),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn howell_span_matches_brute_force((lam, n, gens) in matrix_strategy()) {
            let s = LambdaSubmodule::from_generators(lam, n, gens.clone());
            let brute = brute_span(&lam, n, &gens);
            let mine: BTreeSet<Vec<u64>> = s.enumerate().into_iter().collect();
            prop_assert_eq!(&mine, &brute);
            prop_assert_eq!(s.log_size(), (brute.len() as f64).log(lam.ell() as f64).round() as u64);
            for v in &brute {
                prop_assert!(s.contains(v).unwrap());
            }
        }

        #[test]
        fn howell_is_canonical((lam, n, gens) in matrix_strategy()) {
            let s = LambdaSubmodule::from_generators(lam, n, gens.clone());
            // regenerating from any spanning set gives the same basis
            let mut again: Vec<Vec<u64>> = s.enumerate();
            again.reverse();
            let t = LambdaSubmodule::from_generators(lam, n, again);
            prop_assert_eq!(&s, &t);
            let mut shuffled = gens.clone();
            shuffled.reverse();
            shuffled.extend(s.basis().iter().cloned());
            prop_assert_eq!(&s, &LambdaSubmodule::from_generators(lam, n, shuffled));
        }

        #[test]
        fn double_annihilator((lam, n, gens) in matrix_strategy()) {
            let s = LambdaSubmodule::from_generators(lam, n, gens);
            prop_assert_eq!(&s.annihilator().annihilator(), &s);
            let ann = s.annihilator();
            for a in ann.basis() {
                for b in s.basis() {
                    let dot = a.iter().zip(b).fold(0, |acc, (&x, &y)| lam.mul_add(acc, x, y));
                    prop_assert_eq!(dot, 0);
                }
            }
            // cardinalities multiply to the ambient size
            prop_assert_eq!(s.log_size() + ann.log_size(), n as u64 * lam.k() as u64);
        }

        #[test]
        fn generator_count_is_minimal((lam, n, gens) in matrix_strategy()) {
            let s = LambdaSubmodule::from_generators(lam, n, gens);
            // dim over F_ell of S / ell S
            let ell_s = s.map(n, |v| v.iter().map(|&x| lam.mul(x, lam.ell())).collect());
            let quotient_log = s.log_size() - ell_s.log_size();
            prop_assert_eq!(s.num_generators() as u64, quotient_log);
            prop_assert!(s.free_rank() <= s.num_generators());
            prop_assert!(s.num_generators() <= s.howell_rows());
        }
    }
}
