use serde::{Deserialize, Serialize};

use super::howell::{howell, reduce_against};
use super::ring::Lambda;
use super::submodule::LambdaSubmodule;
use crate::error::{Error, Result};

/// Dense row-major matrix over `Lambda`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaMatrix {
    lambda: Lambda,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl LambdaMatrix {
    pub fn zeros(lambda: Lambda, rows: usize, cols: usize) -> Self {
        LambdaMatrix { lambda, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(lambda: Lambda, n: usize) -> Self {
        Self::scalar(lambda, n, 1)
    }

    pub fn scalar(lambda: Lambda, n: usize, c: u64) -> Self {
        let mut m = Self::zeros(lambda, n, n);
        for i in 0..n {
            m.set(i, i, c);
        }
        m
    }

    pub fn from_rows(lambda: Lambda, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend(r.iter().map(|&x| lambda.reduce(x)));
        }
        Ok(LambdaMatrix { lambda, rows: rows.len(), cols, data })
    }

    pub fn lambda(&self) -> Lambda {
        self.lambda
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: u64) {
        self.data[i * self.cols + j] = self.lambda.reduce(x);
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.lambda, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.cols, "dimension mismatch");
        let lam = &self.lambda;
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| if a == 0 { acc } else { lam.mul_add(acc, a, b) })
            })
            .collect()
    }

    pub fn mul(&self, other: &LambdaMatrix) -> Result<LambdaMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let lam = self.lambda;
        let mut out = Self::zeros(lam, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = lam.mul_add(out.data[idx], a, other.get(k, j));
                }
            }
        }
        Ok(out)
    }

    /// Row span.
    pub fn row_span(&self) -> LambdaSubmodule {
        LambdaSubmodule::from_generators(self.lambda, self.cols, self.to_rows())
    }

    /// Column span, i.e. the image of `x -> M x`.
    pub fn image(&self) -> LambdaSubmodule {
        self.transpose().row_span()
    }

    /// `{x : M x = 0}`.
    pub fn kernel(&self) -> LambdaSubmodule {
        right_kernel(&self.lambda, &self.to_rows(), self.cols)
    }

    /// Some `x` with `M x = v`, if one exists.
    pub fn solve(&self, v: &[u64]) -> Result<Option<Vec<u64>>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch { expected: self.rows, found: v.len() });
        }
        let lam = self.lambda;
        let r = self.rows;
        let width = r + self.cols;
        let aug: Vec<Vec<u64>> = (0..self.cols)
            .map(|j| {
                let mut row = self.column(j);
                row.resize(width, 0);
                row[r + j] = 1;
                row
            })
            .collect();
        let (basis, pivots) = howell(&lam, aug, width);
        let split = pivots.iter().take_while(|p| p.col < r).count();
        let mut w: Vec<u64> = v.iter().map(|&x| lam.reduce(x)).collect();
        w.resize(width, 0);
        reduce_against(&lam, &basis[..split], &pivots[..split], &mut w);
        if w[..r].iter().any(|&x| x != 0) {
            return Ok(None);
        }
        Ok(Some(w[r..].iter().map(|&x| lam.neg(x)).collect()))
    }

    /// Inverse over `Lambda` (exists iff invertible modulo ell).
    pub fn inverse(&self) -> Option<LambdaMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let lam = self.lambda;
        let mut a: Vec<Vec<u64>> = self.to_rows();
        let mut inv: Vec<Vec<u64>> = (0..n).map(|i| super::submodule::unit_vector(n, i)).collect();
        for c in 0..n {
            let pr = (c..n).find(|&i| lam.is_unit(a[i][c]))?;
            a.swap(c, pr);
            inv.swap(c, pr);
            let u = lam.inv(a[c][c]).expect("unit");
            for j in 0..n {
                a[c][j] = lam.mul(a[c][j], u);
                inv[c][j] = lam.mul(inv[c][j], u);
            }
            for i in 0..n {
                if i != c && a[i][c] != 0 {
                    let f = lam.neg(a[i][c]);
                    for j in 0..n {
                        a[i][j] = lam.mul_add(a[i][j], f, a[c][j]);
                        inv[i][j] = lam.mul_add(inv[i][j], f, inv[c][j]);
                    }
                }
            }
        }
        Some(LambdaMatrix::from_rows(lam, n, &inv).expect("square"))
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse().is_some()
    }
}

/// `{x in Lambda^ncols : r . x = 0 for every row r}`, via the Howell form of `[M^T | I]`.
pub fn right_kernel(lam: &Lambda, rows: &[Vec<u64>], ncols: usize) -> LambdaSubmodule {
    let r = rows.len();
    if r == 0 {
        return LambdaSubmodule::full(*lam, ncols);
    }
    let width = r + ncols;
    let aug: Vec<Vec<u64>> = (0..ncols)
        .map(|j| {
            let mut row = Vec::with_capacity(width);
            row.extend(rows.iter().map(|x| x[j]));
            row.resize(width, 0);
            row[r + j] = 1;
            row
        })
        .collect();
    let (basis, pivots) = howell(lam, aug, width);
    let gens = basis
        .into_iter()
        .zip(pivots)
        .filter(|(_, p)| p.col >= r)
        .map(|(row, _)| row[r..].to_vec());
    LambdaSubmodule::from_generators(*lam, ncols, gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_vectors(m: u64, n: usize) -> Vec<Vec<u64>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v: Vec<u64>| {
                    (0..m).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn spec_kernel_examples() {
        let z4 = Lambda::new(2, 2).unwrap();
        let two = LambdaMatrix::from_rows(z4, 1, &[vec![2]]).unwrap();
        assert_eq!(two.kernel().basis(), &[vec![2]]);
        let sol = two.solve(&[2]).unwrap().unwrap();
        assert!(sol == vec![1] || sol == vec![3]);
        assert_eq!(two.solve(&[1]).unwrap(), None);
        assert!(two.solve(&[1, 1]).is_err());

        let z3 = Lambda::new(3, 1).unwrap();
        let ones = LambdaMatrix::from_rows(z3, 2, &[vec![1, 1]]).unwrap();
        assert_eq!(
            ones.kernel(),
            LambdaSubmodule::from_generators(z3, 2, vec![vec![1, 2]])
        );
        assert!(LambdaMatrix::identity(z3, 3).kernel().is_zero());
    }

    #[test]
    fn inverse_roundtrip() {
        let z9 = Lambda::new(3, 2).unwrap();
        let m = LambdaMatrix::from_rows(z9, 2, &[vec![1, 3], vec![2, 4]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), LambdaMatrix::identity(z9, 2));
        let sing = LambdaMatrix::from_rows(z9, 2, &[vec![3, 0], vec![0, 1]]).unwrap();
        assert!(sing.inverse().is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(150))]

        #[test]
        fn kernel_and_solve_match_enumeration(
            lam in prop_oneof![Just((2u64, 2u32)), Just((3, 1)), Just((2, 3)), Just((5, 1))],
            r in 1usize..=3, c in 1usize..=3, seed in any::<u64>()
        ) {
            let lam = Lambda::new(lam.0, lam.1).unwrap();
            let m = lam.modulus();
            let mut s = seed;
            let mut next = || { s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407); (s >> 33) % m };
            let rows: Vec<Vec<u64>> = (0..r).map(|_| (0..c).map(|_| next()).collect()).collect();
            let mat = LambdaMatrix::from_rows(lam, c, &rows).unwrap();
            let ker = mat.kernel();
            let xs = all_vectors(m, c);
            let mut count = 0u64;
            for x in &xs {
                let y = mat.mul_vec(x);
                let zero = y.iter().all(|&v| v == 0);
                prop_assert_eq!(ker.contains(x).unwrap(), zero);
                count += zero as u64;
            }
            prop_assert_eq!(lam.ell().pow(ker.log_size() as u32), count);
            for target in all_vectors(m, r) {
                let reachable = xs.iter().any(|x| mat.mul_vec(x) == target);
                match mat.solve(&target).unwrap() {
                    Some(x) => prop_assert_eq!(mat.mul_vec(&x), target),
                    None => prop_assert!(!reachable),
                }
            }
        }
    }
}
