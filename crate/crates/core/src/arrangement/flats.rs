use std::collections::HashMap;

use crate::algebra::fieldlin::rref;
use crate::algebra::{Fe, Field};

use super::Hyperplane;

/// Pair-to-flat lookup is materialized up to this many hyperplanes.
pub const PAIR_TABLE_LIMIT: usize = 8000;

const NO_FLAT: u32 = u32::MAX;

/// Codimension-two flats and parallel classes of an arrangement.
#[derive(Debug)]
pub struct FlatTable {
    n: usize,
    /// sorted member lists, each of size at least two
    pub flats: Vec<Vec<u32>>,
    /// flats through each hyperplane, ascending
    pub flats_of: Vec<Vec<u32>>,
    /// parallel classes (hyperplanes with equal linear part), sorted
    pub classes: Vec<Vec<u32>>,
    pub class_of: Vec<u32>,
    pair_flat: Option<Vec<u32>>,
}

#[inline]
fn tri(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl FlatTable {
    pub fn build(f: &Field, hs: &[Hyperplane]) -> Self {
        let n = hs.len();
        let mut class_key: HashMap<&[Fe], u32> = HashMap::new();
        let mut classes: Vec<Vec<u32>> = Vec::new();
        let mut class_of = vec![0u32; n];
        for (i, h) in hs.iter().enumerate() {
            let next = classes.len() as u32;
            let c = *class_key.entry(h.linear()).or_insert(next);
            if c == next {
                classes.push(Vec::new());
            }
            classes[c as usize].push(i as u32);
            class_of[i] = c;
        }

        let width = hs.first().map_or(0, |h| h.coeffs().len());
        let mut covered = vec![0u64; (n * n).div_ceil(64)];
        let is_covered = |cov: &[u64], i: usize, j: usize| cov[(i * n + j) / 64] >> ((i * n + j) % 64) & 1 == 1;
        let mut flats: Vec<Vec<u32>> = Vec::new();
        let mut flats_of: Vec<Vec<u32>> = vec![Vec::new(); n];
        for i in 0..n {
            for j in i + 1..n {
                if class_of[i] == class_of[j] || is_covered(&covered, i, j) {
                    continue;
                }
                let (r, piv) = rref(f, &[hs[i].coeffs().to_vec(), hs[j].coeffs().to_vec()]);
                debug_assert_eq!(piv.len(), 2);
                let (c1, c2) = (piv[0], piv[1]);
                let mut members = vec![i as u32, j as u32];
                for (l, hl) in hs.iter().enumerate().skip(j + 1) {
                    let a = hl.coeffs();
                    let (u, v) = (a[c1], a[c2]);
                    let inside = (0..width).all(|t| {
                        let s = f.add(f.mul(u, r[0][t]), f.mul(v, r[1][t]));
                        s == a[t]
                    });
                    if inside {
                        members.push(l as u32);
                    }
                }
                let id = flats.len() as u32;
                for (ai, &a) in members.iter().enumerate() {
                    flats_of[a as usize].push(id);
                    for &b in &members[ai + 1..] {
                        let bit = a as usize * n + b as usize;
                        covered[bit / 64] |= 1 << (bit % 64);
                    }
                }
                flats.push(members);
            }
        }
        drop(covered);

        let pair_flat = (2..=PAIR_TABLE_LIMIT).contains(&n).then(|| {
            let mut t = vec![NO_FLAT; n * (n - 1) / 2];
            for (id, m) in flats.iter().enumerate() {
                for (ai, &a) in m.iter().enumerate() {
                    for &b in &m[ai + 1..] {
                        t[tri(n, a as usize, b as usize)] = id as u32;
                    }
                }
            }
            t
        });
        FlatTable { n, flats, flats_of, classes, class_of, pair_flat }
    }

    /// The flat containing two distinct hyperplanes, or `None` when they are parallel.
    pub fn flat_of_pair(&self, i: usize, j: usize) -> Option<usize> {
        if i == j || self.class_of[i] == self.class_of[j] {
            return None;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        if let Some(t) = &self.pair_flat {
            let id = t[tri(self.n, a, b)];
            return (id != NO_FLAT).then_some(id as usize);
        }
        let (fa, fb) = (&self.flats_of[a], &self.flats_of[b]);
        let (mut x, mut y) = (0, 0);
        while x < fa.len() && y < fb.len() {
            match fa[x].cmp(&fb[y]) {
                std::cmp::Ordering::Equal => return Some(fa[x] as usize),
                std::cmp::Ordering::Less => x += 1,
                std::cmp::Ordering::Greater => y += 1,
            }
        }
        None
    }

    pub fn is_parallel(&self, i: usize, j: usize) -> bool {
        i != j && self.class_of[i] == self.class_of[j]
    }

    pub fn is_dependent(&self, i: usize, j: usize, k: usize) -> bool {
        if i == j || j == k || i == k {
            return false;
        }
        match (self.flat_of_pair(i, j), self.flat_of_pair(i, k)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }

    /// `sum_X (m_X - 1)`
    pub fn h2_rank(&self) -> usize {
        self.flats.iter().map(|m| m.len() - 1).sum()
    }

    pub fn parallel_pair_count(&self) -> usize {
        self.classes.iter().map(|c| c.len() * (c.len() - 1) / 2).sum()
    }
}
