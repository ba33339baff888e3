//! Sorted sparse vectors `(index, value)` with nonzero values.

use super::ring::Lambda;

pub type SparseVec = Vec<(usize, u64)>;

pub fn from_dense(v: &[u64]) -> SparseVec {
    v.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, x)).collect()
}

pub fn to_dense(v: &[(usize, u64)], n: usize) -> Vec<u64> {
    let mut out = vec![0; n];
    for &(i, x) in v {
        out[i] = x;
    }
    out
}

/// Sorts by index, merges duplicates and drops zeros.
pub fn normalize(lam: &Lambda, mut v: SparseVec) -> SparseVec {
    v.sort_unstable_by_key(|e| e.0);
    let mut out: SparseVec = Vec::with_capacity(v.len());
    for (i, x) in v {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 = lam.add(last.1, x),
            _ => out.push((i, lam.reduce(x))),
        }
    }
    out.retain(|e| e.1 != 0);
    out
}

pub fn scale(lam: &Lambda, v: &[(usize, u64)], c: u64) -> SparseVec {
    v.iter().map(|&(i, x)| (i, lam.mul(x, c))).filter(|e| e.1 != 0).collect()
}

/// `sum_i v_i w_i` for dense `w`.
pub fn dot_dense(lam: &Lambda, v: &[(usize, u64)], w: &[u64]) -> u64 {
    v.iter().fold(0, |acc, &(i, x)| lam.mul_add(acc, x, w[i]))
}

pub fn get(v: &[(usize, u64)], i: usize) -> u64 {
    v.binary_search_by_key(&i, |e| e.0).map(|p| v[p].1).unwrap_or(0)
}
