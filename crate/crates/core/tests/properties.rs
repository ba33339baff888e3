use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use ha_core::algebra::{Field, Lambda, LambdaSubmodule};
use ha_core::arrangement::{Arrangement, CoordinateMarking, Position};
use ha_core::cohomology::Complement;
use ha_core::galois::{eta, rho, EtaVerdict, GaloisElement, ProjectiveSpace, SemilinearMap};
use ha_core::local_theory::LocalTheory;
use ha_core::symmetry::CandidateSymmetry;

fn full(p: u32, m: u32) -> Arc<Arrangement> {
    Arc::new(Arrangement::full(Arc::new(Field::new(p, m, None).unwrap()), 2).unwrap())
}

fn f3() -> &'static Arc<Arrangement> {
    static A: OnceLock<Arc<Arrangement>> = OnceLock::new();
    A.get_or_init(|| full(3, 1))
}

fn f9_ctx() -> &'static Complement {
    static C: OnceLock<Complement> = OnceLock::new();
    C.get_or_init(|| Complement::new(full(3, 2), Lambda::new(5, 2).unwrap()).unwrap())
}

fn subset(mask: u16) -> Vec<usize> {
    (0..12).filter(|i| mask >> i & 1 == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn predicates_ignore_argument_order(i in 0usize..12, j in 0usize..12, k in 0usize..12) {
        let a = f3();
        prop_assert_eq!(a.is_parallel(i, j), a.is_parallel(j, i));
        prop_assume!(i != j && j != k && i != k);
        let d = a.is_dependent(i, j, k);
        for (x, y, z) in [(i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
            prop_assert_eq!(a.is_dependent(x, y, z), d);
        }
    }

    /// For `a ⊆ a'`: relations, residues and `U`, `U^1` are compatible with
    /// the inclusion of `H^1`.
    #[test]
    fn inclusion_is_functorial(small in 1u16..4096, extra in 0u16..4096, coords in proptest::collection::vec(0u64..4, 12)) {
        let lam = Lambda::new(2, 2).unwrap();
        let inner = subset(small);
        let outer = subset(small | extra);
        let a = Arc::new(f3().sub_arrangement(&inner).unwrap());
        let b = Arc::new(f3().sub_arrangement(&outer).unwrap());
        let (ca, cb) = (Complement::new(a.clone(), lam).unwrap(), Complement::new(b.clone(), lam).unwrap());
        let pos: Vec<usize> = a.hyperplanes().iter().map(|h| b.index_of(h).unwrap()).collect();
        let include = |v: &[u64]| {
            let mut w = vec![0; b.len()];
            for (i, &x) in v.iter().enumerate() {
                w[pos[i]] = x;
            }
            w
        };
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                let (x, y) = (pos[i].min(pos[j]), pos[i].max(pos[j]));
                prop_assert_eq!(ca.wedge_in_r(&[(i, j, 1)]), cb.wedge_in_r(&[(x, y, 1)]));
            }
        }
        let alpha = ca.h1(coords[..a.len()].to_vec()).unwrap();
        let beta = cb.h1(include(&alpha.coords)).unwrap();
        for h in b.hyperplanes() {
            let expected = a.index_of(h).map_or(0, |i| alpha.coords[i]);
            prop_assert_eq!(cb.residue(h, &beta).unwrap(), expected);
            prop_assert_eq!(ca.residue(h, &alpha).unwrap(), expected);
        }
        for h in 0..a.len() {
            for (small_mod, big_mod) in [(ca.u_submodule(h), cb.u_submodule(pos[h])), (ca.u1_submodule(h), cb.u1_submodule(pos[h]))] {
                let image = LambdaSubmodule::from_generators(lam, b.len(), small_mod.basis().iter().map(|v| include(v)));
                prop_assert!(image.is_subset_of(&big_mod).unwrap());
            }
        }
    }

    #[test]
    fn unit_multiples_of_dominant_deltas_are_detected(h in 0usize..12, eps in prop::sample::select(vec![1u64, 3, 5, 7]), deleted in 1usize..=2) {
        let ctx = Complement::new(f3().clone(), Lambda::new(2, 3).unwrap()).unwrap();
        let marking = CoordinateMarking::new(2, deleted).unwrap();
        let lt = LocalTheory::new(&ctx, marking).unwrap();
        let mut sigma = vec![0; 12];
        sigma[h] = eps;
        let got = lt.detect(&sigma).unwrap().hyperplane;
        match f3().classify(h, marking) {
            Position::Dominant => prop_assert_eq!(got, Some(h)),
            Position::Vertical => prop_assert_eq!(got, None),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn eta_recovers_twisted_scalars(power in 0u32..2, eps in 1u64..25) {
        prop_assume!(eps % 5 != 0);
        let ctx = f9_ctx();
        let s = vec![0, 1, 2];
        let g = GaloisElement::new(power, 2);
        let cand = rho(ctx, g, &s).unwrap().compose(&CandidateSymmetry::scalar(ctx.lambda(), ctx.n(), eps));
        match eta(ctx, &cand, &s).unwrap() {
            EtaVerdict::Accepted { galois, scalar, .. } => prop_assert_eq!((galois, scalar), (g, eps)),
            v => prop_assert!(false, "{:?}", v),
        }
    }

    #[test]
    fn semilinear_composition_matches_permutations(
        a in proptest::collection::vec(0u32..9, 9),
        b in proptest::collection::vec(0u32..9, 9),
        ta in 0u32..2,
        tb in 0u32..2,
    ) {
        let f = Field::new(3, 2, None).unwrap();
        let sp = ProjectiveSpace::new(&f, 2).unwrap();
        let rows = |v: &[u32]| v.chunks(3).map(<[u32]>::to_vec).collect::<Vec<_>>();
        let (Ok(ma), Ok(mb)) = (SemilinearMap::new(&f, rows(&a), ta), SemilinearMap::new(&f, rows(&b), tb)) else {
            return Ok(());
        };
        let (pa, pb) = (ma.permutation(&f, &sp), mb.permutation(&f, &sp));
        let composed: Vec<usize> = pb.iter().map(|&j| pa[j]).collect();
        prop_assert_eq!(ma.compose(&f, &mb).permutation(&f, &sp), composed);
    }
}
