use serde::{Deserialize, Serialize};

use crate::algebra::fieldlin::{mat_mul, rref, solve};
use crate::algebra::{Fe, Field};
use crate::error::{Error, Result};

use super::projective::{ProjPoint, ProjectiveSpace};

/// `v -> M · frob^twist(v)`, with `M` scaled so the first nonzero entry of
/// its first nonzero column is 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemilinearMap {
    pub matrix: Vec<Vec<Fe>>,
    pub twist: u32,
}

fn frob_vec(f: &Field, v: &[Fe], e: u32) -> Vec<Fe> {
    v.iter().map(|&x| f.frobenius(x, e)).collect()
}

impl SemilinearMap {
    pub fn new(f: &Field, matrix: Vec<Vec<Fe>>, twist: u32) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: matrix.iter().map(Vec::len).find(|&l| l != n).unwrap_or(n) });
        }
        if rref(f, &matrix).1.len() != n {
            return Err(Error::Precondition("matrix is singular".into()));
        }
        let mut m = SemilinearMap { matrix, twist: twist % f.m() };
        m.canonicalize(f);
        Ok(m)
    }

    pub fn identity(f: &Field, n: usize) -> Self {
        let matrix = (0..=n).map(|i| (0..=n).map(|j| Fe::from(i == j)).collect()).collect();
        SemilinearMap::new(f, matrix, 0).expect("identity")
    }

    fn canonicalize(&mut self, f: &Field) {
        let n = self.matrix.len();
        let lead = (0..n).flat_map(|j| (0..n).map(move |i| (i, j))).map(|(i, j)| self.matrix[i][j]).find(|&x| x != 0);
        if let Some(l) = lead {
            let s = f.inv(l);
            for row in &mut self.matrix {
                for x in row.iter_mut() {
                    *x = f.mul(*x, s);
                }
            }
        }
    }

    pub fn apply(&self, f: &Field, v: &[Fe]) -> Vec<Fe> {
        let w = frob_vec(f, v, self.twist);
        self.matrix.iter().map(|r| r.iter().zip(&w).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))).collect()
    }

    pub fn apply_point(&self, f: &Field, p: &ProjPoint) -> ProjPoint {
        ProjPoint::normalize(f, &self.apply(f, p.coords())).expect("invertible")
    }

    /// `self ∘ other`: matrix `M1 · frob^{e1}(M2)`, twist `e1 + e2`.
    pub fn compose(&self, f: &Field, other: &SemilinearMap) -> SemilinearMap {
        let m2: Vec<Vec<Fe>> = other.matrix.iter().map(|r| frob_vec(f, r, self.twist)).collect();
        let mut out = SemilinearMap { matrix: mat_mul(f, &self.matrix, &m2), twist: (self.twist + other.twist) % f.m() };
        out.canonicalize(f);
        out
    }

    /// The induced permutation of point indices.
    pub fn permutation(&self, f: &Field, space: &ProjectiveSpace) -> Vec<usize> {
        space.points().map(|p| space.index(&self.apply_point(f, &p))).collect()
    }

    pub fn is_diagonal_scalar(&self) -> bool {
        let n = self.matrix.len();
        let d = self.matrix[0][0];
        (0..n).all(|i| (0..n).all(|j| self.matrix[i][j] == if i == j { d } else { 0 }))
    }
}

/// Checks that `perm` is a bijection of `P^n` sending every line onto a
/// line. On failure returns three collinear points whose images are not.
pub fn is_collineation(f: &Field, space: &ProjectiveSpace, perm: &[usize]) -> std::result::Result<(), [usize; 3]> {
    let len = space.len();
    if perm.len() != len {
        return Err([0, 0, 0]);
    }
    let mut hit = vec![false; len];
    for (i, &t) in perm.iter().enumerate() {
        if t >= len || std::mem::replace(&mut hit[t], true) {
            return Err([i, i, i]);
        }
    }
    let mut covered = vec![0u64; (len * len).div_ceil(64)];
    let bit = |a: usize, b: usize| a * len + b;
    for a in 0..len {
        for b in a + 1..len {
            let k = bit(a, b);
            if covered[k / 64] >> (k % 64) & 1 == 1 {
                continue;
            }
            let line = space.line_through(f, &space.point(a), &space.point(b));
            for (x, &u) in line.iter().enumerate() {
                for &v in &line[x + 1..] {
                    let k = bit(u.min(v), u.max(v));
                    covered[k / 64] |= 1 << (k % 64);
                }
            }
            let (pa, pb) = (space.point(perm[a]), space.point(perm[b]));
            let (basis, piv) = rref(f, &[pa.coords().to_vec(), pb.coords().to_vec()]);
            debug_assert_eq!(piv.len(), 2);
            for &c in &line {
                if c == a || c == b {
                    continue;
                }
                let pc = space.point(perm[c]);
                let v = pc.coords();
                let (s, t) = (v[piv[0]], v[piv[1]]);
                let inside = (0..v.len()).all(|i| f.add(f.mul(s, basis[0][i]), f.mul(t, basis[1][i])) == v[i]);
                if !inside {
                    return Err([a, b, c]);
                }
            }
        }
    }
    Ok(())
}

/// Recovers the semilinear map inducing a collineation of `P^n`, `n >= 2`:
/// the frame `e_0, ..., e_n, Σ e_i` fixes the matrix up to scalar, the image
/// of `(1 : λ : 0 : ...)` for the field generator `λ` fixes the twist, and
/// the result is checked on every point.
pub fn ftpg_reconstruct(f: &Field, space: &ProjectiveSpace, perm: &[usize]) -> Result<SemilinearMap> {
    let n = space.dim();
    if n < 2 {
        return Err(Error::Precondition("reconstruction needs dimension at least 2".into()));
    }
    is_collineation(f, space, perm).map_err(|w| Error::NotCollineation { witness: w })?;
    let img = |v: &[Fe]| space.point(perm[space.index(&ProjPoint::normalize(f, v).expect("nonzero"))]);
    let cols: Vec<Vec<Fe>> = (0..=n)
        .map(|i| {
            let mut e = vec![0; n + 1];
            e[i] = 1;
            img(&e).coords().to_vec()
        })
        .collect();
    let unit = img(&vec![1; n + 1]);
    // F λ = unit, with the images of e_i as the columns of F
    let fmat: Vec<Vec<Fe>> = (0..=n).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
    let lambda = solve(f, &fmat, unit.coords()).ok_or(Error::NotCollineation { witness: [0, 1, 2] })?;
    if lambda.contains(&0) {
        return Err(Error::NotCollineation { witness: [0, 1, 2] });
    }
    let matrix: Vec<Vec<Fe>> = (0..=n).map(|r| (0..=n).map(|c| f.mul(fmat[r][c], lambda[c])).collect()).collect();

    let g = f.generator();
    let mut probe = vec![0; n + 1];
    probe[0] = 1;
    probe[1] = g;
    let target = img(&probe);
    let twist = (0..f.m())
        .find(|&e| SemilinearMap { matrix: matrix.clone(), twist: e }.apply_point(f, &ProjPoint::normalize(f, &probe).expect("nonzero")) == target)
        .ok_or(Error::NotCollineation { witness: [0, 1, space.index(&ProjPoint::normalize(f, &probe).expect("nonzero"))] })?;
    let map = SemilinearMap::new(f, matrix, twist)?;
    for (i, p) in space.points().enumerate() {
        if space.index(&map.apply_point(f, &p)) != perm[i] {
            return Err(Error::VerificationMismatch { hyperplane: i, detail: "reconstructed map disagrees".into() });
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_frobenius() {
        let f4 = Field::new(2, 2, None).unwrap();
        let sp = ProjectiveSpace::new(&f4, 2).unwrap();
        assert_eq!(sp.len(), 21);
        let id: Vec<usize> = (0..21).collect();
        assert_eq!(ftpg_reconstruct(&f4, &sp, &id).unwrap(), SemilinearMap::identity(&f4, 2));
        let frob = SemilinearMap::new(&f4, SemilinearMap::identity(&f4, 2).matrix, 1).unwrap();
        let perm = frob.permutation(&f4, &sp);
        assert_ne!(perm, id);
        let r = ftpg_reconstruct(&f4, &sp, &perm).unwrap();
        assert_eq!(r.twist, 1);
        assert_eq!(r.matrix, SemilinearMap::identity(&f4, 2).matrix);
    }

    #[test]
    fn random_matrix_round_trip() {
        let f5 = Field::prime(5).unwrap();
        let sp = ProjectiveSpace::new(&f5, 2).unwrap();
        assert_eq!(sp.len(), 31);
        let m = SemilinearMap::new(&f5, vec![vec![2, 1, 0], vec![0, 3, 4], vec![1, 1, 1]], 0).unwrap();
        assert_eq!(m.matrix[0][0], 1);
        assert_eq!(ftpg_reconstruct(&f5, &sp, &m.permutation(&f5, &sp)).unwrap(), m);
    }

    #[test]
    fn composition_matches_permutations() {
        let f9 = Field::new(3, 2, None).unwrap();
        let sp = ProjectiveSpace::new(&f9, 2).unwrap();
        let a = SemilinearMap::new(&f9, vec![vec![1, 0, 3], vec![0, 1, 0], vec![5, 0, 1]], 1).unwrap();
        let b = SemilinearMap::new(&f9, vec![vec![2, 7, 0], vec![0, 1, 0], vec![0, 0, 4]], 1).unwrap();
        let (pa, pb) = (a.permutation(&f9, &sp), b.permutation(&f9, &sp));
        let ab = a.compose(&f9, &b);
        assert_eq!(ab.permutation(&f9, &sp), pb.iter().map(|&j| pa[j]).collect::<Vec<_>>());
        assert_eq!(ab.twist, 0);
    }

    #[test]
    fn non_collineations_are_rejected() {
        let f3 = Field::prime(3).unwrap();
        let sp = ProjectiveSpace::new(&f3, 2).unwrap();
        let mut perm: Vec<usize> = (0..13).collect();
        perm.swap(0, 1);
        assert!(matches!(ftpg_reconstruct(&f3, &sp, &perm), Err(Error::NotCollineation { .. })));
        let mut dup: Vec<usize> = (0..13).collect();
        dup[1] = 0;
        assert!(is_collineation(&f3, &sp, &dup).is_err());
    }
}
