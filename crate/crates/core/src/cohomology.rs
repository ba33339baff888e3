//! Degree one and two cohomology of an arrangement complement over `Lambda`.
//!
//! `H^1` has the Kummer basis. `H^2` is modelled by the Brieskorn
//! decomposition: one block of rank `m_X - 1` per codimension-two flat `X`,
//! whose basis slots are the members of `X` other than its minimal one (the
//! anchor). Parallel pairs cup to zero.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::matrix::right_kernel;
use crate::algebra::{Lambda, LambdaMatrix, LambdaSubmodule};
use crate::arrangement::{Arrangement, Hyperplane, InducedArrangement, Projection};
use crate::error::{Error, Result};

/// Refuse dense wedge-space computations beyond this many pairs.
pub const DENSE_WEDGE_LIMIT: usize = 20_000;

#[derive(Clone, Debug)]
pub struct Complement {
    arr: Arc<Arrangement>,
    lambda: Lambda,
    slot_offset: Vec<usize>,
    h2_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H1Class {
    fingerprint: u64,
    pub coords: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H2Class {
    fingerprint: u64,
    pub coords: Vec<u64>,
}

/// One generator of the relation module.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Relation {
    /// `e_i ∧ e_j` for a parallel pair
    Parallel(usize, usize),
    /// `(e_i - e_a) ∧ (e_j - e_a)` with `a` the anchor of a flat containing `i < j`
    Triple { anchor: usize, i: usize, j: usize },
}

/// Sparse element of `∧^2 H^1`: terms `c · e_i ∧ e_j` with `i < j`.
pub type Wedge = Vec<(usize, usize, u64)>;

impl Relation {
    pub fn wedge(&self, lam: &Lambda) -> Wedge {
        match *self {
            Relation::Parallel(i, j) => vec![(i, j, 1)],
            Relation::Triple { anchor: a, i, j } => {
                // e_i∧e_j - e_i∧e_a - e_a∧e_j with a < i < j
                vec![(i, j, 1), (a, i, 1), (a, j, lam.neg(1))]
            }
        }
    }

    /// Value of the bracket functional `[σ, τ]` on this generator.
    pub fn bracket(&self, lam: &Lambda, s: &[u64], t: &[u64]) -> u64 {
        match *self {
            Relation::Parallel(i, j) => lam.sub(lam.mul(s[i], t[j]), lam.mul(s[j], t[i])),
            Relation::Triple { anchor: a, i, j } => {
                let (si, sj) = (lam.sub(s[i], s[a]), lam.sub(s[j], s[a]));
                let (ti, tj) = (lam.sub(t[i], t[a]), lam.sub(t[j], t[a]));
                lam.sub(lam.mul(si, tj), lam.mul(sj, ti))
            }
        }
    }
}

pub fn wedge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub fn wedge_dim(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

impl Complement {
    pub fn new(arr: Arc<Arrangement>, lambda: Lambda) -> Result<Self> {
        lambda.check_characteristic(arr.field().p() as u64)?;
        let ft = arr.flats();
        let mut slot_offset = Vec::with_capacity(ft.flats.len());
        let mut acc = 0;
        for m in &ft.flats {
            slot_offset.push(acc);
            acc += m.len() - 1;
        }
        Ok(Complement { arr, lambda, slot_offset, h2_rank: acc })
    }

    pub fn arrangement(&self) -> &Arrangement {
        &self.arr
    }
    pub fn arrangement_arc(&self) -> Arc<Arrangement> {
        self.arr.clone()
    }
    pub fn lambda(&self) -> Lambda {
        self.lambda
    }
    pub fn n(&self) -> usize {
        self.arr.len()
    }
    pub fn h1_rank(&self) -> usize {
        self.arr.len()
    }
    pub fn h2_rank(&self) -> usize {
        self.h2_rank
    }

    pub fn kummer(&self, i: usize) -> H1Class {
        let mut coords = vec![0; self.n()];
        coords[i] = 1;
        H1Class { fingerprint: self.arr.fingerprint(), coords }
    }

    pub fn h1(&self, coords: Vec<u64>) -> Result<H1Class> {
        if coords.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: coords.len() });
        }
        Ok(H1Class {
            fingerprint: self.arr.fingerprint(),
            coords: coords.into_iter().map(|x| self.lambda.reduce(x)).collect(),
        })
    }

    fn check(&self, fp: u64) -> Result<()> {
        if fp == self.arr.fingerprint() {
            Ok(())
        } else {
            Err(Error::ArrangementMismatch)
        }
    }

    /// Brieskorn slot of a non-anchor member of a flat.
    pub fn slot(&self, flat: usize, member: usize) -> Option<usize> {
        let m = &self.arr.flats().flats[flat];
        let pos = m.binary_search(&(member as u32)).ok()?;
        (pos > 0).then(|| self.slot_offset[flat] + pos - 1)
    }

    /// `[H_i] ∪ [H_j]` as at most two signed slots.
    pub fn cup_basis(&self, i: usize, j: usize) -> Vec<(usize, u64)> {
        let lam = &self.lambda;
        let ft = self.arr.flats();
        let Some(x) = ft.flat_of_pair(i, j) else { return Vec::new() };
        let mut out = Vec::with_capacity(2);
        if let Some(s) = self.slot(x, j) {
            out.push((s, 1));
        }
        if let Some(s) = self.slot(x, i) {
            out.push((s, lam.neg(1)));
        }
        out
    }

    /// Appends `c · ([H_i] ∪ [H_j])` to `out` without allocating.
    pub fn cup_basis_into(&self, i: usize, j: usize, c: u64, out: &mut Vec<(usize, u64)>) {
        let ft = self.arr.flats();
        let Some(x) = ft.flat_of_pair(i, j) else { return };
        if let Some(s) = self.slot(x, j) {
            out.push((s, c));
        }
        if let Some(s) = self.slot(x, i) {
            out.push((s, self.lambda.neg(c)));
        }
    }

    pub fn cup(&self, a: &H1Class, b: &H1Class) -> Result<H2Class> {
        self.check(a.fingerprint)?;
        self.check(b.fingerprint)?;
        let lam = &self.lambda;
        let mut out = vec![0u64; self.h2_rank];
        let sa: Vec<usize> = (0..self.n()).filter(|&i| a.coords[i] != 0).collect();
        let sb: Vec<usize> = (0..self.n()).filter(|&i| b.coords[i] != 0).collect();
        for &i in &sa {
            for &j in &sb {
                if i == j {
                    continue;
                }
                let c = lam.mul(a.coords[i], b.coords[j]);
                for (s, v) in self.cup_basis(i, j) {
                    out[s] = lam.mul_add(out[s], c, v);
                }
            }
        }
        Ok(H2Class { fingerprint: self.arr.fingerprint(), coords: out })
    }

    /// Cup product applied to a wedge, as sorted nonzero slots.
    pub fn cup_wedge(&self, w: &[(usize, usize, u64)]) -> Vec<(usize, u64)> {
        let lam = &self.lambda;
        let mut terms: Vec<(usize, u64)> = Vec::with_capacity(2 * w.len());
        for &(i, j, c) in w {
            for (s, v) in self.cup_basis(i, j) {
                terms.push((s, lam.mul(c, v)));
            }
        }
        crate::algebra::sparse::normalize(lam, terms)
    }

    pub fn wedge_in_r(&self, w: &[(usize, usize, u64)]) -> bool {
        self.cup_wedge(w).is_empty()
    }

    /// Dense matrix of `∧^2 H^1 -> H^2` (columns indexed by `wedge_index`).
    pub fn cup_matrix(&self) -> Result<LambdaMatrix> {
        let n = self.n();
        let w = wedge_dim(n);
        if w > DENSE_WEDGE_LIMIT {
            return Err(Error::SizeGuard { what: "wedge pairs", size: w as u128, limit: DENSE_WEDGE_LIMIT as u128 });
        }
        let mut m = LambdaMatrix::zeros(self.lambda, self.h2_rank, w);
        for i in 0..n {
            for j in i + 1..n {
                for (s, v) in self.cup_basis(i, j) {
                    m.set(s, wedge_index(n, i, j), v);
                }
            }
        }
        Ok(m)
    }

    /// The explicit generators: parallel pairs and anchored flat triples.
    pub fn relation_generators(&self) -> impl Iterator<Item = Relation> + '_ {
        let ft = self.arr.flats();
        let par = ft.classes.iter().flat_map(|c| {
            c.iter().enumerate().flat_map(move |(x, &i)| {
                c[x + 1..].iter().map(move |&j| Relation::Parallel(i as usize, j as usize))
            })
        });
        let tri = ft.flats.iter().flat_map(|m| {
            let a = m[0] as usize;
            let rest = &m[1..];
            rest.iter().enumerate().flat_map(move |(x, &i)| {
                rest[x + 1..].iter().map(move |&j| Relation::Triple { anchor: a, i: i as usize, j: j as usize })
            })
        });
        par.chain(tri)
    }

    pub fn relation_count(&self) -> usize {
        let ft = self.arr.flats();
        ft.parallel_pair_count() + ft.flats.iter().map(|m| (m.len() - 1) * (m.len() - 2) / 2).sum::<usize>()
    }

    fn wedge_dense(&self, w: &Wedge) -> Vec<u64> {
        let n = self.n();
        let mut v = vec![0; wedge_dim(n)];
        for &(i, j, c) in w {
            let k = wedge_index(n, i, j);
            v[k] = self.lambda.add(v[k], c);
        }
        v
    }

    /// `R` as the exact kernel of the cup map.
    pub fn relation_submodule(&self) -> Result<LambdaSubmodule> {
        let m = self.cup_matrix()?;
        Ok(right_kernel(&self.lambda, &m.to_rows(), m.cols()))
    }

    /// Span of the explicit generators (equal to `R`).
    pub fn relation_span(&self) -> Result<LambdaSubmodule> {
        let w = wedge_dim(self.n());
        if w > DENSE_WEDGE_LIMIT {
            return Err(Error::SizeGuard { what: "wedge pairs", size: w as u128, limit: DENSE_WEDGE_LIMIT as u128 });
        }
        let gens: Vec<Vec<u64>> = self.relation_generators().map(|r| self.wedge_dense(&r.wedge(&self.lambda))).collect();
        Ok(LambdaSubmodule::from_generators(self.lambda, w, gens))
    }

    /// `∂_h α`; zero for hyperplanes outside the arrangement.
    pub fn residue(&self, h: &Hyperplane, a: &H1Class) -> Result<u64> {
        self.check(a.fingerprint)?;
        Ok(self.arr.index_of(h).map_or(0, |i| a.coords[i]))
    }

    pub fn u_submodule(&self, h: usize) -> LambdaSubmodule {
        let n = self.n();
        LambdaSubmodule::from_generators(
            self.lambda,
            n,
            (0..n).filter(|&j| j != h).map(|j| crate::algebra::submodule::unit_vector(n, j)),
        )
    }

    /// Generators of `U^1_h`: `[h1]` for parallel `h1`, `[h1] - [h2]` within each flat through `h`.
    pub fn u1_generators(&self, h: usize) -> Vec<Vec<u64>> {
        let n = self.n();
        let ft = self.arr.flats();
        let mut gens = Vec::new();
        for &j in &ft.classes[ft.class_of[h] as usize] {
            if j as usize != h {
                gens.push(crate::algebra::submodule::unit_vector(n, j as usize));
            }
        }
        for &x in &ft.flats_of[h] {
            let others: Vec<usize> = ft.flats[x as usize].iter().map(|&j| j as usize).filter(|&j| j != h).collect();
            for &o in &others[1..] {
                let mut v = vec![0; n];
                v[others[0]] = 1;
                v[o] = self.lambda.neg(1);
                gens.push(v);
            }
        }
        gens
    }

    pub fn u1_submodule(&self, h: usize) -> LambdaSubmodule {
        LambdaSubmodule::from_generators(self.lambda, self.n(), self.u1_generators(h))
    }

    /// `s_h`: defined on `U_h`, landing in `H^1` of the induced arrangement.
    pub fn specialization(&self, induced: &InducedArrangement, a: &H1Class) -> Result<Vec<u64>> {
        self.check(a.fingerprint)?;
        let h = induced.hyperplane;
        if a.coords[h] != 0 {
            return Err(Error::NotInSubmodule(format!("class has residue {} along its own hyperplane", a.coords[h])));
        }
        let mut out = vec![0; induced.arrangement.len()];
        for (j, &c) in a.coords.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if let Some(k) = induced.index_of_source(&self.arr, j) {
                out[k] = self.lambda.add(out[k], c);
            }
        }
        Ok(out)
    }

    /// `ι_z`: Kummer classes of the projection pulled back to the verticals.
    pub fn iota_z(&self, proj: &Projection, target_coords: &[u64]) -> Result<H1Class> {
        if proj.target.len() != target_coords.len() {
            return Err(Error::DimensionMismatch { expected: proj.target.len(), found: target_coords.len() });
        }
        let mut out = vec![0; self.n()];
        for (t, &c) in target_coords.iter().enumerate() {
            out[proj.source[t]] = self.lambda.reduce(c);
        }
        Ok(H1Class { fingerprint: self.arr.fingerprint(), coords: out })
    }

    /// Image of `ι_z` as a submodule of `H^1`.
    pub fn iota_image(&self, proj: &Projection) -> LambdaSubmodule {
        let n = self.n();
        LambdaSubmodule::from_generators(
            self.lambda,
            n,
            proj.source.iter().map(|&s| crate::algebra::submodule::unit_vector(n, s)),
        )
    }
}
