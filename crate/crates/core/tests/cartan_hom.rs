mod common;

use bratteli_core::cartan_hom::{conjugating_unitary, MatrixUnitHom, MultiplicityMatrix};
use bratteli_core::fd_algebra::{AlgebraShape, BlockMatrix, MatrixUnitRef, Scalar};
use bratteli_core::par::Exec;
use common::{brute_force_hom, instance, random_connected_matrix, random_instance, random_partition, Instance};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn canonical(inst: &Instance) -> MatrixUnitHom {
    MatrixUnitHom::build(&inst.source, &inst.target, &inst.mult).unwrap()
}

fn shuffled(inst: &Instance, r: &mut ChaCha8Rng) -> MatrixUnitHom {
    MatrixUnitHom::from_partition(&inst.source, &inst.target, &inst.mult, random_partition(inst, r)).unwrap()
}

/// A chain `A → B → C` of random embeddings.
fn chain(r: &mut ChaCha8Rng) -> (Instance, Instance) {
    let first = random_instance(r);
    let n: Vec<usize> = first.target.sizes().to_vec();
    let t = r.gen_range(1..=2);
    let rows = random_connected_matrix(r, t, n.len(), 2);
    (first, instance(&n, rows))
}

fn random_element(shape: &AlgebraShape, r: &mut ChaCha8Rng) -> BlockMatrix {
    let mut entries: Vec<(MatrixUnitRef, Scalar)> = Vec::new();
    for u in shape.units() {
        if r.gen_bool(0.3) {
            entries.push((u, Scalar::complex((r.gen_range(-3..=3), 2), (r.gen_range(-3..=3), 3))));
        }
    }
    BlockMatrix::from_entries(shape, entries).unwrap()
}

#[test]
fn multiplicity_checks() {
    let s = AlgebraShape::new(vec![1, 2]).unwrap();
    let t = AlgebraShape::new(vec![5]).unwrap();
    let m = MultiplicityMatrix::from_rows(vec![vec![1, 2]]).unwrap();
    assert!(MatrixUnitHom::build(&s, &t, &m).unwrap().verify().all_pass());
    let wrong = MultiplicityMatrix::from_rows(vec![vec![2, 2]]).unwrap();
    assert!(MatrixUnitHom::build(&s, &t, &wrong).is_err());
    assert!(MultiplicityMatrix::from_rows(vec![vec![-1, 3]]).is_err());
}

#[test]
fn identity_is_neutral_for_compose() {
    let inst = instance(&[2, 1], vec![vec![1, 1], vec![2, 3]]);
    let phi = canonical(&inst);
    let left = MatrixUnitHom::compose(&MatrixUnitHom::identity(&inst.target), &phi).unwrap();
    let right = MatrixUnitHom::compose(&phi, &MatrixUnitHom::identity(&inst.source)).unwrap();
    assert_eq!(left, phi);
    assert_eq!(right, phi);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn random_layouts_are_homomorphisms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r);
        let phi = shuffled(&inst, &mut r);
        prop_assert!(phi.verify_with(Exec::Sequential).all_pass());
        prop_assert_eq!(phi.verify_with(Exec::Parallel), phi.verify_with(Exec::Sequential));
        prop_assert_eq!(brute_force_hom(&phi), Ok(()));
    }

    #[test]
    fn compose_is_functorial(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (first, second) = chain(&mut r);
        let phi = shuffled(&first, &mut r);
        let psi = canonical(&second);
        let comp = MatrixUnitHom::compose(&psi, &phi).unwrap();
        prop_assert!(comp.verify().all_pass());
        prop_assert_eq!(comp.mult().matrix(), &second.mult.matrix().mul(first.mult.matrix()).unwrap());
        let a = random_element(&first.source, &mut r);
        prop_assert_eq!(comp.apply(&a).unwrap(), psi.apply(&phi.apply(&a).unwrap()).unwrap());
    }

    #[test]
    fn shuffled_composites_are_homomorphisms_up_to_conjugacy(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (first, second) = chain(&mut r);
        let phi = shuffled(&first, &mut r);
        let psi = shuffled(&second, &mut r);
        // ψ∘φ need not pair slots in ascending order, so check it on units
        let report = bratteli_core::cartan_hom::verify_star_hom(
            &first.source,
            &second.target,
            &second.mult.matrix().mul(first.mult.matrix()).unwrap(),
            |u| psi.apply(&phi.image_of_unit(u).unwrap()).unwrap(),
            Exec::Sequential,
        );
        prop_assert!(report.all_pass(), "{:?}", report.notes);
        // conjugating ψ to its canonical form makes the composite representable
        let u = conjugating_unitary(&psi, &canonical(&second)).unwrap();
        let comp = MatrixUnitHom::compose(&canonical(&second), &phi).unwrap();
        for unit in first.source.units() {
            let direct = psi.apply(&phi.image_of_unit(unit).unwrap()).unwrap();
            prop_assert_eq!(BlockMatrix::ad(&u, &direct).unwrap(), comp.image_of_unit(unit).unwrap());
        }
    }

    #[test]
    fn apply_is_a_star_homomorphism_on_elements(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r);
        let phi = shuffled(&inst, &mut r);
        let a = random_element(&inst.source, &mut r);
        let b = random_element(&inst.source, &mut r);
        let (pa, pb) = (phi.apply(&a).unwrap(), phi.apply(&b).unwrap());
        prop_assert_eq!(phi.apply(&a.mul(&b).unwrap()).unwrap(), pa.mul(&pb).unwrap());
        prop_assert_eq!(phi.apply(&a.add(&b).unwrap()).unwrap(), pa.add(&pb).unwrap());
        prop_assert_eq!(phi.apply(&a.adjoint()).unwrap(), pa.adjoint());
    }

    #[test]
    fn diagonal_traces_are_multiplicities(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r);
        let phi = shuffled(&inst, &mut r);
        for unit in inst.source.units().into_iter().filter(|u| u.row == u.col) {
            let img = phi.image_of_unit(unit).unwrap();
            for i in 0..inst.target.summands() {
                let k = inst.mult.k(i, unit.summand) as i128;
                prop_assert_eq!(img.trace(i), Scalar::real(k, 1));
            }
        }
    }

    #[test]
    fn records_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r);
        let phi = shuffled(&inst, &mut r);
        let rec = phi.to_record();
        let json = serde_json::to_string(&rec).unwrap();
        let back = MatrixUnitHom::from_record(&serde_json::from_str(&json).unwrap()).unwrap();
        prop_assert_eq!(back, phi);
    }

    #[test]
    fn from_images_recovers_the_layout(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r);
        let phi = shuffled(&inst, &mut r);
        let again = MatrixUnitHom::from_images(&inst.source, &inst.target, |u| phi.image_of_unit(u)).unwrap();
        prop_assert_eq!(again, phi);
    }

    #[test]
    fn conjugating_unitary_is_a_composable_equivalence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_instance(&mut r);
        let phi = shuffled(&inst, &mut r);
        let psi = shuffled(&inst, &mut r);
        let chi = canonical(&inst);
        let u = conjugating_unitary(&phi, &psi).unwrap();
        let v = conjugating_unitary(&psi, &chi).unwrap();
        let w = conjugating_unitary(&phi, &chi).unwrap();
        prop_assert!(u.is_unitary() && u.is_in_normalizer());
        for unit in inst.source.units() {
            let x = phi.image_of_unit(unit).unwrap();
            prop_assert_eq!(BlockMatrix::ad(&u, &x).unwrap(), psi.image_of_unit(unit).unwrap());
            // conjugating by v·u and by w both carry φ to χ
            let vu = v.mul(&u).unwrap();
            prop_assert_eq!(BlockMatrix::ad(&vu, &x).unwrap(), BlockMatrix::ad(&w, &x).unwrap());
        }
    }
}
