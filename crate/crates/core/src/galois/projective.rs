use serde::{Deserialize, Serialize};

use crate::algebra::fieldlin::rank;
use crate::algebra::{Fe, Field};
use crate::arrangement::{Arrangement, Hyperplane};
use crate::error::{Error, Result};

/// Homogeneous coordinates with the first nonzero entry equal to 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProjPoint {
    coords: Vec<Fe>,
}

impl ProjPoint {
    pub fn normalize(f: &Field, v: &[Fe]) -> Result<Self> {
        let lead = v.iter().copied().find(|&x| x != 0).ok_or_else(|| Error::Precondition("zero vector".into()))?;
        let s = f.inv(lead);
        Ok(ProjPoint { coords: v.iter().map(|&x| f.mul(x, s)).collect() })
    }

    /// `(1:0:...:0)`, the hyperplane at infinity.
    pub fn p0(n: usize) -> Self {
        let mut coords = vec![0; n + 1];
        coords[0] = 1;
        ProjPoint { coords }
    }

    pub fn coords(&self) -> &[Fe] {
        &self.coords
    }
    pub fn is_p0(&self) -> bool {
        self.coords[0] == 1 && self.coords[1..].iter().all(|&x| x == 0)
    }
}

/// The point `(a0 : ... : an)` of the hyperplane `a0 + a1 x1 + ... = 0`.
pub fn dual_point(f: &Field, h: &Hyperplane) -> ProjPoint {
    ProjPoint::normalize(f, h.coeffs()).expect("nonzero linear part")
}

/// The hyperplane of a point other than `p0`.
pub fn point_hyperplane(f: &Field, p: &ProjPoint) -> Option<Hyperplane> {
    Hyperplane::normalize(f, p.coords()).ok()
}

/// `P^n(F_q)` with points indexed by leading position, then the tail read
/// as a base-q number (most significant first).
#[derive(Clone, Debug)]
pub struct ProjectiveSpace {
    n: usize,
    q: usize,
    offsets: Vec<usize>,
    len: usize,
}

impl ProjectiveSpace {
    pub fn new(f: &Field, n: usize) -> Result<Self> {
        let q = f.q() as usize;
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0usize;
        for lead in 0..=n {
            offsets.push(acc);
            acc = acc
                .checked_add(q.checked_pow((n - lead) as u32).ok_or(Error::SizeGuard { what: "points", size: u128::MAX, limit: 0 })?)
                .ok_or(Error::SizeGuard { what: "points", size: u128::MAX, limit: 0 })?;
        }
        Ok(ProjectiveSpace { n, q, offsets, len: acc })
    }

    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn len(&self) -> usize {
        self.len
    }
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn index(&self, p: &ProjPoint) -> usize {
        let c = p.coords();
        let lead = c.iter().position(|&x| x != 0).expect("normalized");
        let tail = c[lead + 1..].iter().fold(0usize, |acc, &x| acc * self.q + x as usize);
        self.offsets[lead] + tail
    }

    pub fn point(&self, i: usize) -> ProjPoint {
        let lead = self.offsets.partition_point(|&o| o <= i) - 1;
        let mut t = i - self.offsets[lead];
        let mut coords = vec![0; self.n + 1];
        coords[lead] = 1;
        for slot in coords[lead + 1..].iter_mut().rev() {
            *slot = (t % self.q) as Fe;
            t /= self.q;
        }
        ProjPoint { coords }
    }

    pub fn points(&self) -> impl Iterator<Item = ProjPoint> + '_ {
        (0..self.len).map(|i| self.point(i))
    }

    /// Points of the line through two distinct points, in a fixed order.
    pub fn line_through(&self, f: &Field, a: &ProjPoint, b: &ProjPoint) -> Vec<usize> {
        let mut out = vec![self.index(b)];
        for t in f.elements() {
            let v: Vec<Fe> = a.coords().iter().zip(b.coords()).map(|(&x, &y)| f.add(x, f.mul(t, y))).collect();
            out.push(self.index(&ProjPoint::normalize(f, &v).expect("distinct points")));
        }
        out
    }
}

fn distinct(p: &ProjPoint, q: &ProjPoint, r: &ProjPoint) -> Result<()> {
    if p == q || q == r || p == r {
        Err(Error::Precondition("points must be distinct".into()))
    } else {
        Ok(())
    }
}

/// Rank of the three coordinate vectors is at most two.
pub fn collinear_direct(f: &Field, p: &ProjPoint, q: &ProjPoint, r: &ProjPoint) -> Result<bool> {
    distinct(p, q, r)?;
    Ok(rank(f, &[p.coords.clone(), q.coords.clone(), r.coords.clone()]) <= 2)
}

/// Collinearity read off the full arrangement: through `p0` it means a
/// parallel pair; a triple containing a parallel pair is collinear iff all
/// three are parallel; otherwise it means a dependent triple.
pub fn collinear_by_incidence(arr: &Arrangement, p: &ProjPoint, q: &ProjPoint, r: &ProjPoint) -> Result<bool> {
    distinct(p, q, r)?;
    let f = arr.field();
    let idx = |x: &ProjPoint| -> Result<Option<usize>> {
        if x.is_p0() {
            return Ok(None);
        }
        let h = point_hyperplane(f, x).ok_or_else(|| Error::Precondition("point outside the dual space".into()))?;
        arr.index_of(&h).map(Some).ok_or_else(|| Error::NotInArrangement(h.format(f)))
    };
    let ids = [idx(p)?, idx(q)?, idx(r)?];
    let hs: Vec<usize> = ids.iter().flatten().copied().collect();
    if hs.len() == 2 {
        return Ok(arr.is_parallel(hs[0], hs[1]));
    }
    let (a, b, c) = (hs[0], hs[1], hs[2]);
    if arr.is_parallel(a, b) || arr.is_parallel(b, c) || arr.is_parallel(a, c) {
        return Ok(arr.is_parallel(a, b) && arr.is_parallel(b, c));
    }
    Ok(arr.is_dependent(a, b, c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn dual_point_examples() {
        let f3 = Field::prime(3).unwrap();
        let hx = Hyperplane::coordinate(&f3, 2, 1, 0);
        assert_eq!(dual_point(&f3, &hx).coords(), &[0, 1, 0]);
        let h = Hyperplane::normalize(&f3, &[2, 1, 2]).unwrap(); // x - y - 1
        assert_eq!(dual_point(&f3, &h).coords(), &[1, 2, 1]);

        let arr = Arrangement::full(Arc::new(f3.clone()), 2).unwrap();
        let sp = ProjectiveSpace::new(&f3, 2).unwrap();
        assert_eq!(sp.len(), 13);
        let mut idx: Vec<usize> = arr.hyperplanes().iter().map(|h| sp.index(&dual_point(&f3, h))).collect();
        idx.sort();
        idx.dedup();
        assert_eq!(idx.len(), 12);
        assert!(!idx.contains(&sp.index(&ProjPoint::p0(2))));
    }

    #[test]
    fn indexing_round_trips() {
        for (p, m) in [(2, 1), (3, 1), (2, 2), (3, 2)] {
            let f = Field::new(p, m, None).unwrap();
            for n in 1..=3 {
                let sp = ProjectiveSpace::new(&f, n).unwrap();
                let q = f.q() as usize;
                assert_eq!(sp.len(), (q.pow(n as u32 + 1) - 1) / (q - 1));
                for i in 0..sp.len() {
                    assert_eq!(sp.index(&sp.point(i)), i);
                }
            }
        }
    }

    #[test]
    fn collinearity_examples() {
        let f = Field::prime(3).unwrap();
        let arr = Arrangement::full(Arc::new(f.clone()), 2).unwrap();
        let pt = |raw: &[Fe]| ProjPoint::normalize(&f, raw).unwrap();
        let p0 = ProjPoint::p0(2);
        let (x, x1, y, xy) = (pt(&[0, 1, 0]), pt(&[2, 1, 0]), pt(&[0, 0, 1]), pt(&[0, 1, 2]));
        for col in [collinear_direct(&f, &p0, &x, &x1), collinear_by_incidence(&arr, &p0, &x, &x1)] {
            assert!(col.unwrap());
        }
        assert!(collinear_direct(&f, &x, &y, &xy).unwrap());
        assert!(collinear_by_incidence(&arr, &x, &y, &xy).unwrap());
        assert!(!collinear_direct(&f, &x, &y, &x1).unwrap());
        assert!(!collinear_by_incidence(&arr, &x, &y, &x1).unwrap());
        assert!(collinear_direct(&f, &x, &x, &y).is_err());
    }

    #[test]
    fn collinearity_implementations_agree() {
        for (p, m) in [(3, 1), (2, 2)] {
            let f = Field::new(p, m, None).unwrap();
            let arr = Arrangement::full(Arc::new(f.clone()), 2).unwrap();
            let sp = ProjectiveSpace::new(&f, 2).unwrap();
            let pts: Vec<ProjPoint> = sp.points().collect();
            for a in 0..pts.len() {
                for b in a + 1..pts.len() {
                    for c in b + 1..pts.len() {
                        assert_eq!(
                            collinear_direct(&f, &pts[a], &pts[b], &pts[c]).unwrap(),
                            collinear_by_incidence(&arr, &pts[a], &pts[b], &pts[c]).unwrap()
                        );
                    }
                }
            }
        }
    }
}
