use std::f64::consts::SQRT_2;

use mtc_coset_core::extension::{
    AlgebraObject, DecompositionMethod, LocalMatching, ModuleFusionSystem,
};
use mtc_coset_core::fixtures;
use mtc_coset_core::generators::{minimal_model, pointed_cyclic, su2_level};
use mtc_coset_core::{Error, ModularData, ObjectVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `su2_2 ⊠ Ising` with `A = (0,1) + (2,ε)`; index `3a + φ`.
fn ising_algebra() -> AlgebraObject {
    let d = su2_level(2).unwrap().deligne_product(&minimal_model(3, 4).unwrap());
    let mut mult = vec![0; 9];
    mult[0] = 1;
    mult[8] = 1;
    AlgebraObject::new(d, mult).unwrap()
}

fn idx(a: usize, phi: usize) -> usize {
    3 * a + phi
}

fn indicator(n: usize, entries: &[(usize, u32)]) -> ObjectVector {
    let mut v = ObjectVector::zero(n);
    for &(i, m) in entries {
        v.0[i] = m;
    }
    v
}

#[test]
fn unit_algebra_induction_is_identity() {
    let md = minimal_model(4, 5).unwrap();
    let a = AlgebraObject::unit(md.clone()).unwrap();
    for x in 0..md.rank() {
        assert_eq!(a.induce(x), ObjectVector::simple(md.rank(), x));
        assert!(a.is_local_induced(x));
        for y in 0..md.rank() {
            assert_eq!(a.induced_hom(x, y), u32::from(x == y));
        }
    }
    let basis = a.decompose_module_category().unwrap();
    assert_eq!(basis.len(), md.rank());
    let dims = md.quantum_dims().dims;
    for (k, s) in basis.simples().iter().enumerate() {
        assert_eq!(s.restriction, ObjectVector::simple(md.rank(), k));
        assert!((s.dim - dims[k]).abs() < 1e-12);
        assert!(s.local);
    }
}

#[test]
fn ising_algebra_induction() {
    let a = ising_algebra();
    assert_eq!(a.induce(idx(1, 1)), indicator(9, &[(idx(1, 1), 2)]));
    assert_eq!(a.induce(idx(0, 2)), indicator(9, &[(idx(0, 2), 1), (idx(2, 0), 1)]));
    assert_eq!(a.induced_hom(idx(1, 1), idx(1, 1)), 2);
    assert_eq!(a.induced_hom(idx(0, 0), idx(0, 0)), 1);
    assert!(!a.is_local_induced(idx(1, 0)));
    assert!(a.is_local_induced(idx(0, 2)));
    assert!(a.is_simple_current());
    assert!((a.fpdim() - 2.0).abs() < 1e-12);
}

#[test]
fn induced_hom_is_symmetric() {
    let a = ising_algebra();
    for x in 0..9 {
        for y in 0..9 {
            assert_eq!(a.induced_hom(x, y), a.induced_hom(y, x));
        }
    }
}

#[test]
fn algebra_conditions_are_enforced() {
    let d = su2_level(2).unwrap().deligne_product(&minimal_model(3, 4).unwrap());
    let mut no_unit = vec![0; 9];
    no_unit[8] = 1;
    assert!(matches!(AlgebraObject::new(d.clone(), no_unit), Err(Error::InvalidAlgebra(_))));
    let mut twisted = vec![0; 9];
    twisted[0] = 1;
    twisted[idx(2, 0)] = 1;
    assert!(matches!(AlgebraObject::new(d.clone(), twisted), Err(Error::InvalidAlgebra(_))));
    assert!(matches!(AlgebraObject::new(d, vec![1]), Err(Error::Structure(_))));

    let z3 = pointed_cyclic(3, 2).unwrap();
    let p = z3.deligne_product(&z3.mirror());
    // (1,1) has trivial twist but its dual (2,2) is missing.
    let mut open = vec![0; 9];
    open[0] = 1;
    open[4] = 1;
    assert!(matches!(AlgebraObject::new(p, open), Err(Error::InvalidAlgebra(_))));
}

#[test]
fn ising_module_category() {
    let basis = ising_algebra().decompose_module_category().unwrap();
    assert_eq!(basis.method(), DecompositionMethod::SimpleCurrent);
    assert_eq!(basis.len(), 6);
    let mut dims: Vec<f64> = basis.simples().iter().map(|s| s.dim).collect();
    dims.sort_by(f64::total_cmp);
    let expected = [1.0, 1.0, 1.0, 1.0, SQRT_2, SQRT_2];
    for (d, e) in dims.iter().zip(expected) {
        assert!((d - e).abs() < 1e-9);
    }
    assert_eq!(basis.local_indices().len(), 4);
    assert_eq!(basis.gram_residual(), 0);
    let fp = basis.fpdim_sums();
    assert!((fp.all - 8.0).abs() < 1e-9 && (fp.expected_all - 8.0).abs() < 1e-9);
    assert!((fp.local - 4.0).abs() < 1e-9 && (fp.expected_local - 4.0).abs() < 1e-9);
    assert_eq!(basis.simples()[basis.unit_index()].restriction, indicator(9, &[(0, 1), (8, 1)]));
    // The fixed point (1,σ) splits into two local halves.
    let halves: Vec<_> = basis
        .simples()
        .iter()
        .filter(|s| s.restriction == indicator(9, &[(idx(1, 1), 1)]))
        .collect();
    assert_eq!(halves.len(), 2);
    assert!(halves.iter().all(|s| s.local && (s.dim - 1.0).abs() < 1e-12));
}

#[test]
fn pointed_diagonal_algebra() {
    let semion = pointed_cyclic(2, 1).unwrap();
    let d = semion.deligne_product(&semion.mirror());
    let a = AlgebraObject::new(d, vec![1, 0, 0, 1]).unwrap();
    let basis = a.decompose_module_category().unwrap();
    assert_eq!(basis.len(), 2);
    assert_eq!(basis.local_indices().len(), 1);
}

#[test]
fn large_stabilizer_is_rejected() {
    let s = su2_level(2).unwrap();
    let sm = s.mirror();
    let d = s.deligne_product(&s).deligne_product(&sm).deligne_product(&sm);
    let at = |a: usize, b: usize, c: usize, e: usize| ((a * 3 + b) * 3 + c) * 3 + e;
    let mut mult = vec![0; 81];
    for (a, b) in [(0, 0), (2, 0), (0, 2), (2, 2)] {
        mult[at(a, b, a, b)] = 1;
    }
    let alg = AlgebraObject::new(d, mult).unwrap();
    assert!(matches!(alg.decompose_module_category(), Err(Error::DecompositionNotFound(_))));
}

#[test]
fn gram_factorization_on_double() {
    let x = minimal_model(3, 4).unwrap();
    let cs = fixtures::double(&x).unwrap();
    let basis = cs.algebra().decompose_module_category().unwrap();
    assert_eq!(basis.method(), DecompositionMethod::GramFactorization);
    assert_eq!(basis.len(), 3);
    assert_eq!(basis.local_indices().len(), 1);
    let mut dims: Vec<f64> = basis.simples().iter().map(|s| s.dim).collect();
    dims.sort_by(f64::total_cmp);
    for (d, e) in dims.iter().zip([1.0, 1.0, SQRT_2]) {
        assert!((d - e).abs() < 1e-9);
    }
}

#[test]
fn gram_factorization_rank_limit() {
    let s = su2_level(8).unwrap();
    let d = s.deligne_product(&s.mirror());
    let mult = (0..81).map(|i| u32::from(i / 9 == i % 9)).collect();
    let alg = AlgebraObject::new(d, mult).unwrap();
    assert!(!alg.is_simple_current());
    assert!(matches!(alg.decompose_module_category(), Err(Error::DecompositionNotFound(_))));
}

fn ising_system() -> ModuleFusionSystem {
    fixtures::ising().unwrap().module_fusion_system().unwrap()
}

#[test]
fn module_fusion_of_unit_is_identity() {
    let sys = ising_system();
    let v = sys.module_fusion(0);
    assert_eq!(v, &mtc_coset_core::extension::IntMatrix::identity(6, 6));
}

#[test]
fn invertible_ambient_label_permutes() {
    let sys = ising_system();
    let v = sys.module_fusion(idx(2, 2));
    for r in 0..6 {
        assert_eq!(v.row(r).iter().sum::<i64>(), 1);
        assert_eq!(v.column(r).iter().sum::<i64>(), 1);
    }
    assert_eq!(v * v, mtc_coset_core::extension::IntMatrix::identity(6, 6));
}

#[test]
fn module_fusion_is_a_ring_homomorphism() {
    let sys = ising_system();
    assert_eq!(sys.ring_homomorphism_residual(), 0);
    assert_eq!(sys.commutator_residual(), 0);
    for lambda in 0..9 {
        assert!(sys.module_fusion(lambda).iter().all(|&v| v >= 0));
    }
}

#[test]
fn local_operators() {
    let sys = ising_system();
    let unit = sys.basis().unit_index();
    assert_eq!(
        sys.module_fusion_local(unit).unwrap(),
        &mtc_coset_core::extension::IntMatrix::identity(6, 6)
    );
    for op in sys.local_operators() {
        // Every local simple of this system is invertible.
        for r in 0..6 {
            assert_eq!(op.matrix.row(r).iter().sum::<i64>(), 1);
            assert_eq!(op.matrix.column(r).iter().sum::<i64>(), 1);
        }
        for v in sys.ambient_operators() {
            assert_eq!(&op.matrix * v, v * &op.matrix);
        }
    }
    let nonlocal = (0..6).find(|k| !sys.basis().simples()[*k].local).unwrap();
    assert!(sys.module_fusion_local(nonlocal).is_err());
}

#[test]
fn local_matching_follows_restrictions() {
    let cs = fixtures::ising().unwrap();
    let sys = cs.module_fusion_system().unwrap();
    let m = sys.matching().unwrap();
    for &(k, i) in &m.pairs {
        assert_eq!(sys.basis().simples()[k].restriction, cs.restriction(i));
    }
    let wrong = LocalMatching::by_restriction(
        sys.basis(),
        pointed_cyclic(1, 0).unwrap(),
        &[ObjectVector::simple(9, 0)],
    );
    assert!(matches!(wrong, Err(Error::InconsistentBasis(_))));
}

#[test]
fn k2_module_fusion_system() {
    let sys = fixtures::k2_diagonal().unwrap().module_fusion_system().unwrap();
    assert_eq!(sys.basis().len(), 12);
    assert_eq!(sys.basis().local_indices().len(), 6);
    assert_eq!(sys.ring_homomorphism_residual(), 0);
    assert_eq!(sys.commutator_residual(), 0);
}

fn frobenius_holds(a: &AlgebraObject) -> bool {
    let basis = a.decompose_module_category().unwrap();
    let n = a.base().rank();
    (0..n).all(|x| {
        (0..n).all(|y| {
            let via: u32 = basis
                .simples()
                .iter()
                .map(|s| s.restriction.0[x] * s.restriction.0[y])
                .sum();
            via == a.induced_hom(x, y)
        })
    })
}

fn fpdim_holds(a: &AlgebraObject) -> bool {
    let fp = a.decompose_module_category().unwrap().fpdim_sums();
    (fp.all - fp.expected_all).abs() < 1e-9 && (fp.local - fp.expected_local).abs() < 1e-9
}

#[test]
fn frobenius_and_fpdim_on_fixtures() {
    let x = minimal_model(3, 4).unwrap();
    let algebras: Vec<AlgebraObject> = vec![
        ising_algebra(),
        fixtures::k2_diagonal().unwrap().algebra().clone(),
        fixtures::double(&x).unwrap().algebra().clone(),
        fixtures::trivial(&x).unwrap().algebra().clone(),
        AlgebraObject::unit(ModularData::clone(&x)).unwrap(),
    ];
    for a in &algebras {
        assert!(frobenius_holds(a));
        assert!(fpdim_holds(a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn pointed_systems_decompose(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cs = fixtures::random_pointed(&mut rng, 3).unwrap();
        let a = cs.algebra();
        prop_assert!(frobenius_holds(a));
        prop_assert!(fpdim_holds(a));
        let sys = cs.module_fusion_system().unwrap();
        prop_assert_eq!(sys.ring_homomorphism_residual(), 0);
        prop_assert_eq!(sys.commutator_residual(), 0);
    }
}
