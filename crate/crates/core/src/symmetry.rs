//! Candidate automorphisms of `Π^a` of a full arrangement, their validation,
//! and the induced permutation of hyperplanes.
//!
//! A candidate is a map `A` on `Π^a`; its dual on `H^1` is `A^{-T}`. Every
//! preservation check below is phrased with `A^T` (the rows of `A`), which
//! preserves the same submodules as `A^{-T}` since `A` is invertible.

use serde::{Deserialize, Serialize};

use crate::algebra::sparse::{self, SparseVec};
use crate::algebra::{Fe, Lambda, LambdaMatrix, LambdaSpec, LambdaSubmodule};
use crate::arrangement::{Arrangement, CoordinateMarking, Hyperplane};
use crate::cohomology::{Complement, Relation};
use crate::error::{Error, Result};
use crate::local_theory::LocalTheory;
use crate::nilpotent::{centralizer, decomposition_generators_sparse};

/// Above this many hyperplanes `plane_action` skips the full condition
/// checks and verifies the unit-entry/decomposition structure directly.
pub const FULL_DETECTION_LIMIT: usize = 400;
/// Largest dense matrix inverted to test invertibility of a non-monomial map.
pub const DENSE_INVERT_LIMIT: usize = 2000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSymmetry {
    #[serde(with = "lambda_serde")]
    pub lambda: Lambda,
    /// `columns[h] = A δ_h`
    pub columns: Vec<SparseVec>,
}

mod lambda_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(l: &Lambda, s: S) -> std::result::Result<S::Ok, S::Error> {
        LambdaSpec::from(*l).serialize(s)
    }
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Lambda, D::Error> {
        let spec = LambdaSpec::deserialize(d)?;
        Lambda::try_from(spec).map_err(serde::de::Error::custom)
    }
}

impl CandidateSymmetry {
    pub fn scalar(lambda: Lambda, n: usize, eps: u64) -> Self {
        let eps = lambda.reduce(eps);
        let columns = (0..n).map(|h| if eps == 0 { Vec::new() } else { vec![(h, eps)] }).collect();
        CandidateSymmetry { lambda, columns }
    }

    pub fn identity(lambda: Lambda, n: usize) -> Self {
        Self::scalar(lambda, n, 1)
    }

    /// `δ_h -> eps · δ_{perm[h]}`.
    pub fn permutation(lambda: Lambda, perm: &[usize], eps: u64) -> Self {
        let eps = lambda.reduce(eps);
        let columns = perm.iter().map(|&t| if eps == 0 { Vec::new() } else { vec![(t, eps)] }).collect();
        CandidateSymmetry { lambda, columns }
    }

    /// From a dense square matrix given by rows (`A[i][j]`).
    pub fn from_matrix(lambda: Lambda, rows: &[Vec<u64>]) -> Result<Self> {
        let n = rows.len();
        let mut columns = vec![Vec::new(); n];
        for (i, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: r.len() });
            }
            for (j, &x) in r.iter().enumerate() {
                let x = lambda.reduce(x);
                if x != 0 {
                    columns[j].push((i, x));
                }
            }
        }
        Ok(CandidateSymmetry { lambda, columns })
    }

    pub fn to_matrix(&self) -> Vec<Vec<u64>> {
        let n = self.n();
        let mut rows = vec![vec![0; n]; n];
        for (j, c) in self.columns.iter().enumerate() {
            for &(i, x) in c {
                rows[i][j] = x;
            }
        }
        rows
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, h: usize) -> &[(usize, u64)] {
        &self.columns[h]
    }

    /// Rows of `A`, i.e. `A^T` applied to the Kummer basis.
    pub fn rows(&self) -> Vec<SparseVec> {
        let mut rows = vec![Vec::new(); self.n()];
        for (j, c) in self.columns.iter().enumerate() {
            for &(i, x) in c {
                rows[i].push((j, x));
            }
        }
        rows
    }

    pub fn apply(&self, sigma: &[u64]) -> Vec<u64> {
        let lam = self.lambda;
        let mut out = vec![0; self.n()];
        for (j, &s) in sigma.iter().enumerate() {
            if s != 0 {
                for &(i, x) in &self.columns[j] {
                    out[i] = lam.mul_add(out[i], s, x);
                }
            }
        }
        out
    }

    pub fn apply_sparse(&self, sigma: &[(usize, u64)]) -> SparseVec {
        let lam = self.lambda;
        let mut terms = Vec::new();
        for &(j, s) in sigma {
            for &(i, x) in &self.columns[j] {
                terms.push((i, lam.mul(s, x)));
            }
        }
        sparse::normalize(&lam, terms)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &CandidateSymmetry) -> CandidateSymmetry {
        CandidateSymmetry {
            lambda: self.lambda,
            columns: other.columns.iter().map(|c| self.apply_sparse(c)).collect(),
        }
    }

    /// `(perm, scalars)` when every column has exactly one entry.
    pub fn as_monomial(&self) -> Option<(Vec<usize>, Vec<u64>)> {
        let mut perm = Vec::with_capacity(self.n());
        let mut scal = Vec::with_capacity(self.n());
        for c in &self.columns {
            let [(i, x)] = c[..] else { return None };
            perm.push(i);
            scal.push(x);
        }
        Some((perm, scal))
    }

    pub fn is_invertible(&self) -> Result<bool> {
        let lam = self.lambda;
        if let Some((perm, scal)) = self.as_monomial() {
            let mut seen = vec![false; self.n()];
            for &t in &perm {
                if std::mem::replace(&mut seen[t], true) {
                    return Ok(false);
                }
            }
            return Ok(scal.iter().all(|&x| lam.is_unit(x)));
        }
        if self.n() > DENSE_INVERT_LIMIT {
            return Err(Error::SizeGuard {
                what: "dense inversion",
                size: self.n() as u128,
                limit: DENSE_INVERT_LIMIT as u128,
            });
        }
        // invertible over Z/ell^k iff invertible mod ell
        let ell = Lambda::new(lam.ell(), 1)?;
        let rows: Vec<Vec<u64>> = self.to_matrix().into_iter().map(|r| r.into_iter().map(|x| x % lam.ell()).collect()).collect();
        Ok(LambdaMatrix::from_rows(ell, self.n(), &rows)?.is_invertible())
    }
}

/// The distinguished pairs `(H_w, H_{w-1})` for `w = x_i - c` (`c ∈ S`) and
/// `w = x_i - x_j`, as arrangement indices.
pub fn distinguished_pairs(arr: &Arrangement, s: &[Fe]) -> Result<Vec<(usize, usize)>> {
    let f = arr.field();
    let n = arr.dim();
    let mut out = Vec::new();
    let idx = |h: Hyperplane| {
        arr.index_of(&h).ok_or_else(|| Error::NotInArrangement(h.format(f)))
    };
    for i in 1..=n {
        for &c in s {
            out.push((idx(Hyperplane::coordinate(f, n, i, c))?, idx(Hyperplane::coordinate(f, n, i, f.add(c, 1)))?));
        }
    }
    for i in 1..=n {
        for j in i + 1..=n {
            out.push((idx(Hyperplane::difference(f, n, i, j, 0))?, idx(Hyperplane::difference(f, n, i, j, 1))?));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    WrongSize { expected: usize, found: usize },
    NotInvertible,
    RelationNotPreserved { relation: Relation },
    SpanNotPreserved { pair: (usize, usize) },
}

/// Checks invertibility, `A^T ∧ A^T (R) ⊆ R`, and preservation of every
/// distinguished span. Only the first failing relation is reported.
pub fn validate(ctx: &Complement, cand: &CandidateSymmetry, s: &[Fe]) -> Result<Vec<Violation>> {
    let n = ctx.n();
    if cand.n() != n {
        return Ok(vec![Violation::WrongSize { expected: n, found: cand.n() }]);
    }
    if cand.lambda != ctx.lambda() {
        return Err(Error::Precondition(format!("candidate over {} on a complement over {}", cand.lambda, ctx.lambda())));
    }
    let mut out = Vec::new();
    if !cand.is_invertible()? {
        out.push(Violation::NotInvertible);
    }
    let rows = cand.rows();
    if let Some(r) = first_relation_violation(ctx, &rows) {
        out.push(Violation::RelationNotPreserved { relation: r });
    }
    for (a, b) in distinguished_pairs(ctx.arrangement(), s)? {
        let inside = |h: usize| rows[h].iter().all(|&(j, _)| j == a || j == b);
        if !inside(a) || !inside(b) {
            out.push(Violation::SpanNotPreserved { pair: (a, b) });
        }
    }
    Ok(out)
}

/// Sufficient test for monomial `A^T` (`e_i -> w_i e_{π i}`): `π` sends
/// parallel classes into parallel classes and flats into flats, and `w` is
/// constant on each flat. Then every generator maps to a multiple of a
/// generator.
fn monomial_preserves_relations(ctx: &Complement, rows: &[SparseVec]) -> bool {
    let ft = ctx.arrangement().flats();
    let Some(map): Option<Vec<(usize, u64)>> = rows.iter().map(|r| if let [t] = r[..] { Some(t) } else { None }).collect() else {
        return false;
    };
    let class = |j: u32| ft.class_of[map[j as usize].0];
    let classes_ok = ft.classes.iter().all(|c| c.iter().all(|&j| class(j) == class(c[0])));
    classes_ok
        && ft.flats.iter().all(|m| {
            let (a, w) = map[m[0] as usize];
            let Some(y) = ft.flat_of_pair(a, map[m[1] as usize].0) else { return false };
            m[1..].iter().all(|&j| map[j as usize].1 == w && ft.flat_of_pair(a, map[j as usize].0) == Some(y))
        })
}

fn first_relation_violation(ctx: &Complement, rows: &[SparseVec]) -> Option<Relation> {
    if monomial_preserves_relations(ctx, rows) {
        return None;
    }
    let lam = ctx.lambda();
    let mut terms: Vec<(usize, u64)> = Vec::new();
    for r in ctx.relation_generators() {
        terms.clear();
        for (i, j, c) in r.wedge(&lam) {
            for &(a, x) in &rows[i] {
                for &(b, y) in &rows[j] {
                    ctx.cup_basis_into(a, b, lam.mul(c, lam.mul(x, y)), &mut terms);
                }
            }
        }
        terms.sort_unstable_by_key(|t| t.0);
        let mut k = 0;
        while k < terms.len() {
            let (slot, mut acc) = terms[k];
            k += 1;
            while k < terms.len() && terms[k].0 == slot {
                acc = lam.add(acc, terms[k].1);
                k += 1;
            }
            if acc != 0 {
                return Some(r);
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneAction {
    pub permutation: Vec<usize>,
}

impl PlaneAction {
    pub fn identity(n: usize) -> Self {
        PlaneAction { permutation: (0..n).collect() }
    }
    pub fn is_identity(&self) -> bool {
        self.permutation.iter().enumerate().all(|(i, &j)| i == j)
    }
    pub fn apply(&self, h: usize) -> usize {
        self.permutation[h]
    }
    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.permutation.len()];
        for (i, &j) in self.permutation.iter().enumerate() {
            inv[j] = i;
        }
        PlaneAction { permutation: inv }
    }
    /// `self ∘ other`
    pub fn compose(&self, other: &PlaneAction) -> Self {
        PlaneAction { permutation: other.permutation.iter().map(|&j| self.permutation[j]).collect() }
    }
    pub fn moved(&self) -> Vec<usize> {
        (0..self.permutation.len()).filter(|&i| self.permutation[i] != i).collect()
    }
}

/// Membership of a sparse `τ` in `D_h`: zero on the other members of the
/// parallel class of `h`, constant on `X \ {h}` for every flat `X` through `h`.
pub fn sparse_in_decomposition(ctx: &Complement, h: usize, tau: &[(usize, u64)]) -> bool {
    let ft = ctx.arrangement().flats();
    let mut seen: Vec<(usize, u64, usize)> = Vec::new(); // (flat, value, count)
    for &(j, v) in tau {
        if j == h {
            continue;
        }
        let Some(x) = ft.flat_of_pair(h, j) else { return false };
        match seen.iter_mut().find(|e| e.0 == x) {
            Some(e) if e.1 == v => e.2 += 1,
            Some(_) => return false,
            None => seen.push((x, v, 1)),
        }
    }
    seen.iter().all(|&(x, _, c)| c + 1 == ft.flats[x].len())
}

/// The permutation `γ` with `A I_h = I_{γh}` and `A D_h = D_{γh}`.
///
/// Up to [`FULL_DETECTION_LIMIT`] hyperplanes each image is located by the
/// local detection (conditions (1)-(3)) under a marking where `h` dominates;
/// above it, by its unique unit entry. Both routes then check
/// `A D_h ⊆ D_{γh}`, which is equality since `A` is injective and both sides
/// have the same size.
pub fn plane_action(ctx: &Complement, cand: &CandidateSymmetry) -> Result<PlaneAction> {
    let arr = ctx.arrangement();
    let n = ctx.n();
    let lam = ctx.lambda();
    if cand.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: cand.n() });
    }
    let locals: Option<Vec<LocalTheory>> = (n <= FULL_DETECTION_LIMIT)
        .then(|| (1..=arr.dim()).map(|d| LocalTheory::new(ctx, CoordinateMarking { deleted: d })).collect())
        .transpose()?;
    let mut perm = Vec::with_capacity(n);
    let mut hit = vec![false; n];
    for h in 0..n {
        let col = cand.column(h);
        let h0 = match &locals {
            Some(lts) => {
                let lead = (1..=arr.dim()).find(|&i| arr.get(h).coeffs()[i] != 0).expect("normalized");
                let sigma = sparse::to_dense(col, n);
                if sparse::from_dense(&sigma).iter().all(|&(_, v)| !lam.is_unit(v)) {
                    return Err(Error::DetectionFailed { hyperplane: h });
                }
                lts[lead - 1].detect(&sigma)?.hyperplane
            }
            None => match col {
                [(t, u)] if lam.is_unit(*u) => Some(*t),
                _ => None,
            },
        };
        let Some(h0) = h0 else { return Err(Error::DetectionFailed { hyperplane: h }) };
        for g in decomposition_generators_sparse(ctx, h) {
            let img = cand.apply_sparse(&g);
            if !sparse_in_decomposition(ctx, h0, &img) {
                return Err(Error::VerificationMismatch { hyperplane: h, detail: "A D_h is not inside D_{gamma h}".into() });
            }
        }
        let ft = arr.flats();
        if ft.flats_of[h].len() != ft.flats_of[h0].len() || ft.classes[ft.class_of[h] as usize].len() != ft.classes[ft.class_of[h0] as usize].len() {
            return Err(Error::VerificationMismatch { hyperplane: h, detail: "D_h and D_{gamma h} differ in size".into() });
        }
        if std::mem::replace(&mut hit[h0], true) {
            return Err(Error::VerificationMismatch { hyperplane: h, detail: format!("image {h0} hit twice") });
        }
        perm.push(h0);
    }
    Ok(PlaneAction { permutation: perm })
}

/// A parallel pair or a flat whose image under the action breaks incidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum IncidenceWitness {
    Parallel(usize, usize),
    Flat(Vec<usize>),
}

pub fn check_incidence(arr: &Arrangement, pa: &PlaneAction) -> Option<IncidenceWitness> {
    let ft = arr.flats();
    for c in &ft.classes {
        let i = c[0] as usize;
        for &j in &c[1..] {
            if !ft.is_parallel(pa.apply(i), pa.apply(j as usize)) {
                return Some(IncidenceWitness::Parallel(i, j as usize));
            }
        }
    }
    for m in &ft.flats {
        let a = pa.apply(m[0] as usize);
        let b = pa.apply(m[1] as usize);
        let y = ft.flat_of_pair(a, b);
        let ok = y.is_some_and(|y| {
            ft.flats[y].len() == m.len() && m[2..].iter().all(|&j| ft.flat_of_pair(a, pa.apply(j as usize)) == Some(y))
        });
        if !ok {
            return Some(IncidenceWitness::Flat(m.iter().map(|&j| j as usize).collect()));
        }
    }
    None
}

/// `Λ · A*[h] = Λ · [γh]` for every `h`, where `A* = A^{-T}`. Equivalent to
/// row `γh` of `A` being a unit multiple of `e_h`.
pub fn kummer_lines_respected(cand: &CandidateSymmetry, pa: &PlaneAction) -> Option<usize> {
    let lam = cand.lambda;
    let rows = cand.rows();
    (0..cand.n()).find(|&h| !matches!(rows[pa.apply(h)][..], [(j, u)] if j == h && lam.is_unit(u)))
}

/// Classes satisfying the bracket condition relative to the coordinates `z`
/// (1-based) and the extra coordinate `w`:
/// for all `β ∈ span{[H_w], [H_{w-1}]}` and commuting `σ, τ` vanishing on
/// the image of `ι_z`, `σα · τβ = σβ · τα`.
///
/// The condition is linear in `α`, `β` and (for fixed `σ`) in `τ`, so `β`
/// runs over the two generators, `τ` over a basis of `C(σ) ∩ W`, and `σ`
/// over the basis of `W`. The solution set is the annihilator of the
/// resulting constraint vectors.
pub fn bracket_condition_solutions(ctx: &Complement, z: &[usize], w: usize) -> Result<LambdaSubmodule> {
    let w_module = vanishing_module(ctx, z)?;
    bracket_condition_from(ctx, w_module.basis().iter().cloned(), &w_module, w)
}

/// Same, with `σ` running over every element of `W` (tiny cases only).
pub fn bracket_condition_solutions_exact(ctx: &Complement, z: &[usize], w: usize) -> Result<LambdaSubmodule> {
    let w_module = vanishing_module(ctx, z)?;
    let all = w_module.enumerate();
    bracket_condition_from(ctx, all.into_iter(), &w_module, w)
}

pub fn bracket_condition(ctx: &Complement, alpha: &[u64], z: &[usize], w: usize) -> Result<bool> {
    bracket_condition_solutions(ctx, z, w)?.contains(alpha)
}

/// Span of Kummer classes of hyperplanes supported in `coords`: the image
/// of the pullback from `A^coords`.
pub fn vertical_span(ctx: &Complement, coords: &[usize]) -> LambdaSubmodule {
    let n = ctx.n();
    LambdaSubmodule::from_generators(
        ctx.lambda(),
        n,
        ctx.arrangement().supported_in(coords).into_iter().map(|h| crate::algebra::submodule::unit_vector(n, h)),
    )
}

fn vanishing_module(ctx: &Complement, z: &[usize]) -> Result<LambdaSubmodule> {
    let dim = ctx.arrangement().dim();
    if let Some(&c) = z.iter().find(|&&c| c == 0 || c > dim) {
        return Err(Error::Precondition(format!("coordinate {c} outside 1..={dim}")));
    }
    Ok(vertical_span(ctx, z).annihilator())
}

fn bracket_condition_from<I>(ctx: &Complement, sigmas: I, w_module: &LambdaSubmodule, w: usize) -> Result<LambdaSubmodule>
where
    I: Iterator<Item = Vec<u64>>,
{
    let arr = ctx.arrangement();
    let f = arr.field();
    let dim = arr.dim();
    if w == 0 || w > dim {
        return Err(Error::Precondition(format!("coordinate {w} outside 1..={dim}")));
    }
    let lam = ctx.lambda();
    let hw = arr.index_of(&Hyperplane::coordinate(f, dim, w, 0)).ok_or_else(|| Error::NotInArrangement("H_w".into()))?;
    let hw1 = arr.index_of(&Hyperplane::coordinate(f, dim, w, 1)).ok_or_else(|| Error::NotInArrangement("H_{w-1}".into()))?;
    let mut constraints = Vec::new();
    for sigma in sigmas {
        let taus = centralizer(ctx, &sigma)?.intersect(w_module);
        for tau in taus.basis() {
            for b in [hw, hw1] {
                // (τβ) σ - (σβ) τ
                let v: Vec<u64> = sigma.iter().zip(tau).map(|(&s, &t)| lam.sub(lam.mul(tau[b], s), lam.mul(sigma[b], t))).collect();
                if v.iter().any(|&x| x != 0) {
                    constraints.push(v);
                }
            }
        }
    }
    Ok(LambdaSubmodule::from_generators(lam, ctx.n(), constraints).annihilator())
}
