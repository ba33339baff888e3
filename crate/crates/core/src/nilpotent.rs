//! The dual model of the two-step nilpotent quotient: elements of `Π^a` are
//! functionals on `H^1` (values on Kummer classes), and brackets are
//! functionals on the relation module `R`.
//!
//! Bracket sign: `[σ, τ](e_i ∧ e_j) = σ_i τ_j - σ_j τ_i`.

use crate::algebra::matrix::right_kernel;
use crate::algebra::sparse::SparseVec;
use crate::algebra::submodule::unit_vector;
use crate::algebra::{Lambda, LambdaSubmodule};
use crate::arrangement::{InducedArrangement, Projection};
use crate::cohomology::{wedge_dim, wedge_index, Complement, H1Class, Relation, DENSE_WEDGE_LIMIT};
use crate::error::{Error, Result};

/// The full wedge functional `e_i ∧ e_j -> σ_i τ_j - σ_j τ_i`; only its
/// restriction to `R` is meaningful.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiDeltaElement {
    pub values: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InertiaDecomp {
    pub inertia: LambdaSubmodule,
    pub decomposition: LambdaSubmodule,
}

fn check_len(ctx: &Complement, v: &[u64]) -> Result<()> {
    if v.len() == ctx.n() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: ctx.n(), found: v.len() })
    }
}

pub fn delta(ctx: &Complement, h: usize) -> Vec<u64> {
    unit_vector(ctx.n(), h)
}

/// `σα = Σ σ[H] α_H`.
pub fn pair(ctx: &Complement, sigma: &[u64], alpha: &H1Class) -> Result<u64> {
    check_len(ctx, sigma)?;
    check_len(ctx, &alpha.coords)?;
    let lam = ctx.lambda();
    Ok(sigma.iter().zip(&alpha.coords).fold(0, |acc, (&s, &a)| lam.mul_add(acc, s, a)))
}

pub fn bracket(ctx: &Complement, sigma: &[u64], tau: &[u64]) -> Result<PiDeltaElement> {
    check_len(ctx, sigma)?;
    check_len(ctx, tau)?;
    let n = ctx.n();
    let w = wedge_dim(n);
    if w > DENSE_WEDGE_LIMIT {
        return Err(Error::SizeGuard { what: "wedge pairs", size: w as u128, limit: DENSE_WEDGE_LIMIT as u128 });
    }
    let lam = ctx.lambda();
    let mut values = vec![0; w];
    for i in 0..n {
        for j in i + 1..n {
            values[wedge_index(n, i, j)] = lam.sub(lam.mul(sigma[i], tau[j]), lam.mul(sigma[j], tau[i]));
        }
    }
    Ok(PiDeltaElement { values })
}

impl PiDeltaElement {
    pub fn eval(&self, ctx: &Complement, w: &[(usize, usize, u64)]) -> u64 {
        let lam = ctx.lambda();
        let n = ctx.n();
        w.iter().fold(0, |acc, &(i, j, c)| lam.mul_add(acc, c, self.values[wedge_index(n, i, j)]))
    }

    /// Equality as functionals on `R`, tested on its generators.
    pub fn eq_on_r(&self, other: &PiDeltaElement, ctx: &Complement) -> bool {
        let lam = ctx.lambda();
        ctx.relation_generators().all(|r| {
            let w = r.wedge(&lam);
            self.eval(ctx, &w) == other.eval(ctx, &w)
        })
    }

    pub fn vanishes_on_r(&self, ctx: &Complement) -> bool {
        let lam = ctx.lambda();
        ctx.relation_generators().all(|r| self.eval(ctx, &r.wedge(&lam)) == 0)
    }
}

pub fn bracket_vanishes(ctx: &Complement, sigma: &[u64], tau: &[u64]) -> bool {
    let lam = ctx.lambda();
    ctx.relation_generators().all(|r| r.bracket(&lam, sigma, tau) == 0)
}

/// Linear constraints on `τ` for `[σ, τ] = 0`, one block (flat or parallel
/// class) at a time. Within a block the bracket values are the 2×2 minors of
/// the rows `s = σ - σ_base` and `t = τ - τ_base`; when some `s_i0` is a unit
/// the minors through `i0` already imply the rest.
pub fn centralizer_constraints(ctx: &Complement, sigma: &[u64]) -> Vec<Vec<u64>> {
    let lam = ctx.lambda();
    let n = ctx.n();
    let ft = ctx.arrangement().flats();
    let mut rows = Vec::new();
    let mut block = |base: Option<usize>, others: &[u32]| {
        let sb = base.map_or(0, |a| sigma[a]);
        let s: Vec<u64> = others.iter().map(|&i| lam.sub(sigma[i as usize], sb)).collect();
        let mut emit = |x: usize, y: usize| {
            let (i, j) = (others[x] as usize, others[y] as usize);
            let mut row = vec![0; n];
            row[j] = lam.add(row[j], s[x]);
            row[i] = lam.sub(row[i], s[y]);
            if let Some(a) = base {
                row[a] = lam.add(row[a], lam.sub(s[y], s[x]));
            }
            if row.iter().any(|&v| v != 0) {
                rows.push(row);
            }
        };
        if let Some(x0) = s.iter().position(|&v| lam.is_unit(v)) {
            for y in 0..others.len() {
                if y != x0 {
                    emit(x0, y);
                }
            }
        } else {
            for x in 0..others.len() {
                for y in x + 1..others.len() {
                    if s[x] != 0 || s[y] != 0 {
                        emit(x, y);
                    }
                }
            }
        }
    };
    for c in &ft.classes {
        if c.len() > 1 {
            block(None, c);
        }
    }
    for m in &ft.flats {
        if m.len() > 2 {
            block(Some(m[0] as usize), &m[1..]);
        }
    }
    rows
}

/// `C(σ) = {τ : [σ, τ] = 0}`.
pub fn centralizer(ctx: &Complement, sigma: &[u64]) -> Result<LambdaSubmodule> {
    check_len(ctx, sigma)?;
    let rows = centralizer_constraints(ctx, sigma);
    Ok(right_kernel(&ctx.lambda(), &rows, ctx.n()))
}

/// Same as [`centralizer`], with one constraint per generator of `R`.
pub fn centralizer_dense(ctx: &Complement, sigma: &[u64]) -> Result<LambdaSubmodule> {
    check_len(ctx, sigma)?;
    let lam = ctx.lambda();
    let n = ctx.n();
    let rows: Vec<Vec<u64>> = ctx
        .relation_generators()
        .map(|r| {
            let mut row = vec![0; n];
            let mut add = |i: usize, j: usize, c: u64| {
                // c * (σ_i τ_j - σ_j τ_i)
                row[j] = lam.mul_add(row[j], c, sigma[i]);
                row[i] = lam.sub(row[i], lam.mul(c, sigma[j]));
            };
            for (i, j, c) in r.wedge(&lam) {
                add(i, j, c);
            }
            row
        })
        .collect();
    Ok(right_kernel(&lam, &rows, n))
}

pub fn inertia(ctx: &Complement, h: usize) -> LambdaSubmodule {
    LambdaSubmodule::from_generators(ctx.lambda(), ctx.n(), [delta(ctx, h)])
}

/// Explicit generators of `D_h`: `δ_h` and, for each flat `X` through `h`,
/// the indicator of `X \ {h}`.
pub fn decomposition_generators(ctx: &Complement, h: usize) -> Vec<Vec<u64>> {
    let n = ctx.n();
    let ft = ctx.arrangement().flats();
    let mut gens = vec![delta(ctx, h)];
    for &x in &ft.flats_of[h] {
        let mut v = vec![0; n];
        for &j in &ft.flats[x as usize] {
            if j as usize != h {
                v[j as usize] = 1;
            }
        }
        gens.push(v);
    }
    gens
}

/// [`decomposition_generators`] in sparse form.
pub fn decomposition_generators_sparse(ctx: &Complement, h: usize) -> Vec<SparseVec> {
    let ft = ctx.arrangement().flats();
    let mut gens = vec![vec![(h, 1)]];
    for &x in &ft.flats_of[h] {
        gens.push(ft.flats[x as usize].iter().filter(|&&j| j as usize != h).map(|&j| (j as usize, 1)).collect());
    }
    gens
}

pub fn decomposition(ctx: &Complement, h: usize) -> LambdaSubmodule {
    LambdaSubmodule::from_generators(ctx.lambda(), ctx.n(), decomposition_generators(ctx, h))
}

pub fn inertia_decomposition(ctx: &Complement, h: usize) -> InertiaDecomp {
    InertiaDecomp { inertia: inertia(ctx, h), decomposition: decomposition(ctx, h) }
}

/// Both groups as annihilators of `U_h` and `U^1_h`.
pub fn inertia_decomposition_by_annihilator(ctx: &Complement, h: usize) -> InertiaDecomp {
    InertiaDecomp {
        inertia: ctx.u_submodule(h).annihilator(),
        decomposition: ctx.u1_submodule(h).annihilator(),
    }
}

/// Membership in `D_h` by its defining equations.
pub fn in_decomposition(ctx: &Complement, h: usize, tau: &[u64]) -> bool {
    let ft = ctx.arrangement().flats();
    let par_ok = ft.classes[ft.class_of[h] as usize].iter().all(|&j| j as usize == h || tau[j as usize] == 0);
    par_ok
        && ft.flats_of[h].iter().all(|&x| {
            let mut vals = ft.flats[x as usize].iter().filter(|&&j| j as usize != h).map(|&j| tau[j as usize]);
            let first = vals.next();
            vals.all(|v| Some(v) == first)
        })
}

/// `(π_z σ)[h'] = σ[π_z^{-1} h']`.
pub fn pi_z(ctx: &Complement, proj: &Projection, sigma: &[u64]) -> Result<Vec<u64>> {
    check_len(ctx, sigma)?;
    Ok(proj.source.iter().map(|&s| sigma[s]).collect())
}

/// The image of `τ ∈ D_h` in `Π^a` of the induced arrangement.
pub fn decomposition_quotient(ctx: &Complement, induced: &InducedArrangement, tau: &[u64]) -> Result<Vec<u64>> {
    check_len(ctx, tau)?;
    let h = induced.hyperplane;
    if !in_decomposition(ctx, h, tau) {
        return Err(Error::NotInSubmodule("element is not in the decomposition group".into()));
    }
    let ft = ctx.arrangement().flats();
    Ok(induced
        .flat_ids
        .iter()
        .map(|&x| {
            let j = ft.flats[x].iter().find(|&&j| j as usize != h).expect("flat size >= 2");
            tau[*j as usize]
        })
        .collect())
}

/// True when `σ ∈ ℓ Π^a`.
pub fn is_ell_multiple(lam: &Lambda, sigma: &[u64]) -> bool {
    sigma.iter().all(|&x| !lam.is_unit(x))
}

/// The pair and triple identities implied by `[σ, τ] = 0` on one generator.
pub fn relation_identity_holds(lam: &Lambda, r: &Relation, s: &[u64], t: &[u64]) -> bool {
    r.bracket(lam, s, t) == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;
    use crate::arrangement::{Arrangement, CoordinateMarking};
    use std::sync::Arc;

    fn cx(p: u32, ell: u64, k: u32, raw: Option<&[Vec<u32>]>) -> Complement {
        let f = Arc::new(Field::prime(p).unwrap());
        let a = match raw {
            Some(r) => Arrangement::from_raw(f, 2, r).unwrap(),
            None => Arrangement::full(f, 2).unwrap(),
        };
        Complement::new(Arc::new(a), Lambda::new(ell, k).unwrap()).unwrap()
    }

    #[test]
    fn pairing_examples() {
        let c = cx(3, 5, 1, Some(&[vec![0, 1, 0], vec![0, 0, 1]]));
        assert_eq!(pair(&c, &delta(&c, 0), &c.kummer(0)).unwrap(), 1);
        assert_eq!(pair(&c, &delta(&c, 0), &c.kummer(1)).unwrap(), 0);
        let a = c.h1(vec![1, 1]).unwrap();
        assert_eq!(pair(&c, &[2, 1], &a).unwrap(), 3);
    }

    #[test]
    fn bracket_examples() {
        let c = cx(3, 2, 1, Some(&[vec![0, 1, 0], vec![2, 1, 0]]));
        let b = bracket(&c, &delta(&c, 0), &delta(&c, 1)).unwrap();
        assert!(!b.vanishes_on_r(&c));
        assert!(bracket(&c, &[1, 1], &[1, 1]).unwrap().vanishes_on_r(&c));
        let cent = centralizer(&c, &delta(&c, 0)).unwrap();
        assert_eq!(cent.basis(), &[vec![1, 0]]);
        assert!(centralizer(&c, &[0, 0]).unwrap().is_full());

        // R = 0: everything commutes
        let c = cx(5, 2, 1, Some(&[vec![0, 1, 0], vec![0, 0, 1], vec![4, 1, 1]]));
        assert!(bracket_vanishes(&c, &[1, 0, 1], &[0, 1, 1]));
    }

    #[test]
    fn brackets_are_alternating_and_bilinear() {
        let c = cx(3, 2, 3, None);
        let lam = c.lambda();
        let s: Vec<u64> = (0..12).map(|i| (i * 7 + 1) % 8).collect();
        let t: Vec<u64> = (0..12).map(|i| (i * i + 2) % 8).collect();
        let u: Vec<u64> = (0..12).map(|i| (5 * i + 4) % 8).collect();
        let st = bracket(&c, &s, &t).unwrap();
        let ts = bracket(&c, &t, &s).unwrap();
        assert!(st.values.iter().zip(&ts.values).all(|(&a, &b)| lam.add(a, b) == 0));
        let tu: Vec<u64> = t.iter().zip(&u).map(|(&a, &b)| lam.add(a, lam.mul(2, b))).collect();
        let lhs = bracket(&c, &s, &tu).unwrap();
        let su = bracket(&c, &s, &u).unwrap();
        let rhs: Vec<u64> = st.values.iter().zip(&su.values).map(|(&a, &b)| lam.add(a, lam.mul(2, b))).collect();
        assert_eq!(lhs.values, rhs);
        assert!(bracket(&c, &s, &s).unwrap().vanishes_on_r(&c));
    }

    #[test]
    fn inertia_and_decomposition_examples() {
        let c = cx(3, 2, 1, None);
        let id = inertia_decomposition(&c, 0);
        assert_eq!(id.inertia.num_generators(), 1);
        assert_eq!(id.decomposition.num_generators(), 4);
        assert_eq!(inertia_decomposition_by_annihilator(&c, 0), id);
        assert_eq!(centralizer(&c, &delta(&c, 0)).unwrap(), id.decomposition);

        let c = cx(3, 2, 1, Some(&[vec![0, 1, 0], vec![0, 0, 1]]));
        assert!(decomposition(&c, 0).is_full());
    }

    #[test]
    fn reduced_constraints_match_dense() {
        for (p, ell, k) in [(3, 2, 2), (3, 5, 1), (5, 2, 1)] {
            let c = cx(p, ell, k, None);
            let lam = c.lambda();
            let n = c.n();
            let mut seed = 17u64;
            for trial in 0..40 {
                let sigma: Vec<u64> = (0..n)
                    .map(|_| {
                        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        let x = (seed >> 33) % lam.modulus();
                        // sparse and ell-divisible entries exercise the non-unit branch
                        if trial % 3 == 0 { x * lam.ell() % lam.modulus() } else if x.is_multiple_of(2) { 0 } else { x }
                    })
                    .collect();
                let a = centralizer(&c, &sigma).unwrap();
                assert_eq!(a, centralizer_dense(&c, &sigma).unwrap());
                for b in a.basis() {
                    assert!(bracket_vanishes(&c, &sigma, b));
                }
            }
        }
    }

    #[test]
    fn pi_z_and_quotient() {
        let c = cx(3, 2, 1, None);
        let arr = c.arrangement();
        let proj = arr.projection(CoordinateMarking { deleted: 1 }).unwrap();
        assert!(pi_z(&c, &proj, &delta(&c, 0)).unwrap().iter().all(|&x| x == 0));
        let hy1 = arr.find(&[2, 0, 1]).unwrap();
        let img = pi_z(&c, &proj, &delta(&c, hy1)).unwrap();
        let t = proj.target.find(&[2, 1]).unwrap();
        assert_eq!(img, unit_vector(3, t));

        let ind = arr.induced(0).unwrap();
        assert!(decomposition_quotient(&c, &ind, &delta(&c, 0)).unwrap().iter().all(|&x| x == 0));
        let hy = arr.find(&[0, 0, 1]).unwrap();
        let hxy = arr.find(&[0, 1, 2]).unwrap();
        let mut tau = vec![0; 12];
        tau[hy] = 1;
        assert!(decomposition_quotient(&c, &ind, &tau).is_err());
        tau[hxy] = 1;
        tau[arr.find(&[0, 1, 1]).unwrap()] = 1;
        let q = decomposition_quotient(&c, &ind, &tau).unwrap();
        let origin = ind.index_of_source(arr, hy).unwrap();
        assert_eq!(q, unit_vector(3, origin));
    }
}
