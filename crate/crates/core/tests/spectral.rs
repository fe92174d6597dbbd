use mtc_coset_core::coset::CosetSystem;
use mtc_coset_core::extension::{AlgebraObject, LocalMatching, ModuleFusionSystem};
use mtc_coset_core::fixtures;
use mtc_coset_core::generators::{minimal_model, pointed_cyclic};
use mtc_coset_core::spectral::{diagonalize, SpectralDecomposition};
use mtc_coset_core::{Error, ModularData, ObjectVector};

const TOL: f64 = 1e-8;

fn coset_spectrum(cs: &CosetSystem) -> SpectralDecomposition {
    let sys = cs.module_fusion_system().unwrap();
    diagonalize(&sys, cs.mdc(), cs.ambient()).unwrap()
}

fn unit_system(x: &ModularData) -> ModuleFusionSystem {
    let a = AlgebraObject::unit(x.clone()).unwrap();
    let basis = a.decompose_module_category().unwrap();
    let restrictions: Vec<ObjectVector> =
        (0..x.rank()).map(|i| ObjectVector::simple(x.rank(), i)).collect();
    let matching = LocalMatching::by_restriction(&basis, x.clone(), &restrictions).unwrap();
    ModuleFusionSystem::new(basis, Some(matching)).unwrap()
}

fn assert_identities(spectrum: &SpectralDecomposition) {
    assert!(spectrum.worst_eigen_residual() < TOL);
    assert!(spectrum.verify_e_criterion().passed());
    let r = spectrum.verify_spectral_identities().unwrap();
    assert!(r.worst() < TOL, "{r:?}");
}

#[test]
fn unit_algebra_spectrum_is_diagonal() {
    let x = minimal_model(3, 4).unwrap();
    let spectrum = diagonalize(&unit_system(&x), &x, &x).unwrap();
    assert_eq!(spectrum.eigenvectors().len(), 3);
    for e in spectrum.eigenvectors() {
        assert_eq!(e.local, e.ambient);
        assert_eq!(e.multiplicity, 0);
    }
    assert_identities(&spectrum);
}

#[test]
fn ising_coset_spectrum() {
    let cs = fixtures::ising().unwrap();
    let spectrum = coset_spectrum(&cs);
    assert_eq!(spectrum.eigenvectors().len(), 6);
    assert!(spectrum.eigenvectors().iter().all(|e| e.multiplicity == 0));
    let e = spectrum.verify_e_criterion();
    assert!(e.passed());
    assert_eq!(e.pairs.iter().filter(|p| p.2 > 0).count(), 6);
    for &(i, mu, b, c) in &e.pairs {
        assert_eq!(b as usize, c, "({i},{mu})");
    }
    assert_identities(&spectrum);
}

#[test]
fn eigenvectors_are_orthonormal() {
    let spectrum = coset_spectrum(&fixtures::ising().unwrap());
    let v = spectrum.eigenvectors();
    for a in 0..v.len() {
        for b in 0..v.len() {
            let ip = v[a].vector.dotc(&v[b].vector);
            let target = if a == b { 1.0 } else { 0.0 };
            assert!((ip.re - target).abs() < TOL && ip.im.abs() < TOL);
        }
    }
}

#[test]
fn k2_spectrum() {
    let spectrum = coset_spectrum(&fixtures::k2_diagonal().unwrap());
    assert_eq!(spectrum.eigenvectors().len(), 12);
    assert_identities(&spectrum);
}

#[test]
fn double_and_trivial_spectra() {
    let semion = pointed_cyclic(2, 1).unwrap();
    let spectrum = coset_spectrum(&fixtures::double(&semion).unwrap());
    assert_eq!(spectrum.eigenvectors().len(), 2);
    assert_identities(&spectrum);

    let x = minimal_model(3, 4).unwrap();
    for cs in [fixtures::double(&x).unwrap(), fixtures::trivial(&x).unwrap()] {
        assert_identities(&coset_spectrum(&cs));
    }
}

#[test]
fn unlabeled_local_simples_are_rejected() {
    let x = minimal_model(3, 4).unwrap();
    let basis = AlgebraObject::unit(x.clone()).unwrap().decompose_module_category().unwrap();
    let sys = ModuleFusionSystem::new(basis, None).unwrap();
    let r = diagonalize(&sys, &x, &x);
    assert!(matches!(r, Err(Error::Spectral(_))));
}

#[test]
fn mismatched_ambient_is_rejected() {
    let cs = fixtures::ising().unwrap();
    let sys = cs.module_fusion_system().unwrap();
    let r = diagonalize(&sys, cs.mdc(), cs.md1());
    assert!(matches!(r, Err(Error::Spectral(_))));
}
