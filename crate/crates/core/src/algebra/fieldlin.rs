//! Dense linear algebra over a finite field.

use super::field::{Fe, Field};

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
pub fn rref(f: &Field, rows: &[Vec<Fe>]) -> (Vec<Vec<Fe>>, Vec<usize>) {
    let mut a: Vec<Vec<Fe>> = rows.to_vec();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(pr) = (r..a.len()).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, pr);
        let inv = f.inv(a[r][c]);
        for x in a[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let g = f.neg(a[i][c]);
                for j in 0..ncols {
                    let t = f.mul(g, a[r][j]);
                    a[i][j] = f.add(a[i][j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank(f: &Field, rows: &[Vec<Fe>]) -> usize {
    rref(f, rows).0.len()
}

pub fn mat_vec(f: &Field, m: &[Vec<Fe>], v: &[Fe]) -> Vec<Fe> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
        .collect()
}

pub fn mat_mul(f: &Field, a: &[Vec<Fe>], b: &[Vec<Fe>]) -> Vec<Vec<Fe>> {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| row.iter().zip(b).fold(0, |acc, (&x, br)| f.add(acc, f.mul(x, br[j]))))
                .collect()
        })
        .collect()
}

pub fn inverse(f: &Field, m: &[Vec<Fe>]) -> Option<Vec<Vec<Fe>>> {
    let n = m.len();
    let aug: Vec<Vec<Fe>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| (i == j) as Fe));
            row
        })
        .collect();
    let (red, piv) = rref(f, &aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `M x = b` for square invertible `M`.
pub fn solve(f: &Field, m: &[Vec<Fe>], b: &[Fe]) -> Option<Vec<Fe>> {
    let inv = inverse(f, m)?;
    Some(mat_vec(f, &inv, b))
}
