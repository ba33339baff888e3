//! Howell normal form over `Z/ell^k`.
//!
//! Rows are processed column by column. The pivot row is the one of least
//! valuation, normalized so its leading entry is exactly `ell^v`; when
//! `v > 0` the row `ell^(k-v) * pivot` (which vanishes at the pivot column)
//! is fed back into the work list. That augmentation is what makes the
//! trailing rows span every element with a zero prefix.

use super::ring::Lambda;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pivot {
    pub col: usize,
    /// valuation of the leading entry, which is exactly `ell^val`
    pub val: u32,
}

fn nonzero_from(r: &[u64], c: usize) -> bool {
    r[c..].iter().any(|&x| x != 0)
}

/// Returns the Howell basis (rows sorted by pivot column) and its pivots.
pub fn howell(lam: &Lambda, rows: Vec<Vec<u64>>, ncols: usize) -> (Vec<Vec<u64>>, Vec<Pivot>) {
    let mut work: Vec<Vec<u64>> = rows
        .into_iter()
        .map(|mut r| {
            debug_assert_eq!(r.len(), ncols);
            for x in r.iter_mut() {
                *x = lam.reduce(*x);
            }
            r
        })
        .filter(|r| nonzero_from(r, 0))
        .collect();
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<Pivot> = Vec::new();

    for c in 0..ncols {
        if work.is_empty() {
            break;
        }
        let mut best: Option<(usize, u32)> = None;
        for (i, r) in work.iter().enumerate() {
            if r[c] != 0 {
                let v = lam.valuation(r[c]);
                if best.is_none_or(|(_, bv)| v < bv) {
                    best = Some((i, v));
                    if v == 0 {
                        break;
                    }
                }
            }
        }
        let Some((bi, v)) = best else { continue };
        let mut piv = work.swap_remove(bi);
        let (_, u) = lam.split(piv[c]);
        if u != 1 {
            let uinv = lam.inv(u).expect("unit part");
            for x in piv[c..].iter_mut() {
                *x = lam.mul(*x, uinv);
            }
        }
        let pe = lam.pow_ell(v);
        for r in work.iter_mut() {
            if r[c] != 0 {
                let f = lam.neg(r[c] / pe);
                for j in c..ncols {
                    if piv[j] != 0 {
                        r[j] = lam.mul_add(r[j], f, piv[j]);
                    }
                }
            }
        }
        work.retain(|r| nonzero_from(r, c + 1));
        if v > 0 {
            let a = lam.pow_ell(lam.k() - v);
            let aug: Vec<u64> = piv.iter().map(|&x| lam.mul(x, a)).collect();
            if nonzero_from(&aug, c + 1) {
                work.push(aug);
            }
        }
        basis.push(piv);
        pivots.push(Pivot { col: c, val: v });
    }

    for i in 1..basis.len() {
        let c = pivots[i].col;
        let pe = lam.pow_ell(pivots[i].val);
        let (above, rest) = basis.split_at_mut(i);
        let pr = &rest[0];
        for row in above.iter_mut() {
            let q = row[c] / pe;
            if q != 0 {
                let f = lam.neg(q);
                for j in c..ncols {
                    if pr[j] != 0 {
                        row[j] = lam.mul_add(row[j], f, pr[j]);
                    }
                }
            }
        }
    }
    (basis, pivots)
}

/// Reduces `v` in place against a Howell basis; returns true when it reaches zero.
pub fn reduce_against(lam: &Lambda, basis: &[Vec<u64>], pivots: &[Pivot], v: &mut [u64]) -> bool {
    for (row, p) in basis.iter().zip(pivots) {
        let x = v[p.col];
        if x == 0 {
            continue;
        }
        let pe = lam.pow_ell(p.val);
        if !x.is_multiple_of(pe) {
            return false;
        }
        let f = lam.neg(x / pe);
        for j in p.col..v.len() {
            if row[j] != 0 {
                v[j] = lam.mul_add(v[j], f, row[j]);
            }
        }
    }
    v.iter().all(|&x| x == 0)
}

/// Number of nonzero Smith invariants of a dense matrix, i.e. the minimal
/// number of generators of its row span.
pub fn smith_rank(lam: &Lambda, rows: &[Vec<u64>], ncols: usize) -> usize {
    let mut m: Vec<Vec<u64>> = rows.to_vec();
    let mut active_cols: Vec<usize> = (0..ncols).collect();
    let mut count = 0;
    loop {
        let mut best: Option<(usize, usize, u32)> = None;
        'scan: for (ri, r) in m.iter().enumerate() {
            for (ci, &c) in active_cols.iter().enumerate() {
                if r[c] != 0 {
                    let v = lam.valuation(r[c]);
                    if best.is_none_or(|b| v < b.2) {
                        best = Some((ri, ci, v));
                        if v == 0 {
                            break 'scan;
                        }
                    }
                }
            }
        }
        let Some((ri, ci, v)) = best else { break };
        count += 1;
        let pr = m.swap_remove(ri);
        let c = active_cols.swap_remove(ci);
        let pe = lam.pow_ell(v);
        let (_, u) = lam.split(pr[c]);
        let uinv = lam.inv(u).expect("unit part");
        // clearing the pivot column is enough: column operations on the
        // pivot row do not touch the remaining rows.
        for r in m.iter_mut() {
            if r[c] != 0 {
                let f = lam.neg(lam.mul(r[c] / pe, uinv));
                for &j in &active_cols {
                    if pr[j] != 0 {
                        r[j] = lam.mul_add(r[j], f, pr[j]);
                    }
                }
                r[c] = 0;
            }
        }
        m.retain(|r| active_cols.iter().any(|&j| r[j] != 0));
    }
    count
}
