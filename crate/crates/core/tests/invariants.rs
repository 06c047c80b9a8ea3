//! Structural invariants of the classifier over random inputs.

use freeprod::abelian::{abelian_atoms, cross_check};
use freeprod::algebra::{AlgebraSpec, Dimension};
use freeprod::modular::FactorType;
use freeprod::rational::rat;
use freeprod::structure::{atom_multiset, classify_free_product, discrete_part_from, ContinuousKind};
use freeprod::testing::{random_abelian, random_spec};
use freeprod::two_proj::two_proj_atoms;
use freeprod::Rational;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dim_sum(a: &AlgebraSpec, b: &AlgebraSpec) -> Option<u64> {
    match (a.dimension(), b.dimension()) {
        (Dimension::Finite(x), Dimension::Finite(y)) => Some(x + y),
        _ => None,
    }
}

#[test]
fn weights_are_conserved_and_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..400 {
        let a = random_spec(&mut rng, 60);
        let b = random_spec(&mut rng, 60);
        let r = classify_free_product(&a, &b).unwrap();
        assert_eq!(r.atom_total() + r.continuous.weight.clone(), Rational::one());
        if r.passthrough.is_some() {
            continue;
        }
        assert!(r.continuous.weight.is_positive());
        if let Some(sel) = &r.selection {
            if !r.atoms.is_empty() && r.continuous.kind != ContinuousKind::NonFactorDim4 {
                assert!(sel.value > rat(1, 2));
                let bound = (Rational::one() - sel.value.clone()).recip();
                assert!(r.atoms.iter().all(|x| Rational::from_integer(x.dim as i64) <= bound));
            }
        }
    }
}

#[test]
fn classification_is_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..400 {
        let a = random_spec(&mut rng, 60);
        let b = random_spec(&mut rng, 60);
        let x = classify_free_product(&a, &b).unwrap();
        let y = classify_free_product(&b, &a).unwrap();
        assert_eq!(x.atom_multiset(), y.atom_multiset(), "{a} ⋆ {b}");
        assert_eq!(x.continuous, y.continuous);
        assert_eq!(x.amenable, y.amenable);
    }
}

#[test]
fn every_maximizer_gives_the_same_atoms() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut ties = 0;
    for _ in 0..3000 {
        let a = random_abelian(&mut rng, 2..=4, 12);
        let b = random_abelian(&mut rng, 2..=4, 12);
        if dim_sum(&a, &b) < Some(5) {
            continue;
        }
        let r = classify_free_product(&a, &b).unwrap();
        let Some(sel) = &r.selection else { continue };
        if sel.co_maximizers.is_empty() || sel.value <= rat(1, 2) {
            continue;
        }
        ties += 1;
        for m in sel.all_maximizers() {
            assert_eq!(atom_multiset(&discrete_part_from(m, &a, &b)), r.atom_multiset());
        }
    }
    assert!(ties > 10, "only {ties} ties above 1/2 sampled");
}

#[test]
fn abelian_inputs_agree_with_pair_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..1000 {
        let a = random_abelian(&mut rng, 2..=6, 60);
        let b = random_abelian(&mut rng, 2..=6, 60);
        let check = cross_check(&a, &b).unwrap();
        assert!(check.agrees(), "{a} ⋆ {b}: {check:?}");
    }
}

#[test]
fn at_most_one_partner_above_half() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..500 {
        let a = random_abelian(&mut rng, 2..=6, 60);
        let b = random_abelian(&mut rng, 2..=6, 60);
        let atoms = abelian_atoms(&a, &b).unwrap();
        let heavy_b: Vec<usize> = b
            .blocks()
            .iter()
            .enumerate()
            .filter(|(_, x)| x.mass() > rat(1, 2))
            .map(|(j, _)| j)
            .collect();
        assert!(heavy_b.len() <= 1);
        for i in 0..a.blocks().len() {
            let partners = atoms.iter().filter(|p| p.i == i && heavy_b.contains(&p.j)).count();
            assert!(partners <= 1);
        }
    }
}

#[test]
fn factor_labels_never_leave_the_three_types() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for _ in 0..400 {
        let a = random_spec(&mut rng, 60);
        let b = random_spec(&mut rng, 60);
        let r = classify_free_product(&a, &b).unwrap();
        if let ContinuousKind::Factor(t) = &r.continuous.kind {
            match t {
                FactorType::TypeII1 | FactorType::TypeIII1 => {}
                FactorType::TypeIII(l) => assert!(l.is_positive() && *l < Rational::one()),
            }
        }
    }
}

fn unit_rational() -> impl Strategy<Value = Rational> {
    (2i64..60).prop_flat_map(|d| (1..d).prop_map(move |n| Rational::new(n, d)))
}

proptest! {
    #[test]
    fn two_proj_atoms_symmetric(a in unit_rational(), b in unit_rational()) {
        prop_assert_eq!(two_proj_atoms(&a, &b).unwrap(), two_proj_atoms(&b, &a).unwrap());
    }

    #[test]
    fn meet_mass_monotone(a in unit_rational(), b in unit_rational(), c in unit_rational()) {
        let (lo, hi) = if a <= c { (a, c) } else { (c, a) };
        prop_assert!(
            two_proj_atoms(&lo, &b).unwrap().meet_mass <= two_proj_atoms(&hi, &b).unwrap().meet_mass
        );
    }

    #[test]
    fn threshold_against_tracial_m2(n in 1i64..40) {
        let alpha = Rational::new(n, 40);
        let a = AlgebraSpec::abelian("a", &[alpha.clone(), Rational::one() - alpha.clone()]).unwrap();
        let m2 = AlgebraSpec::tracial_matrix("m2", 2).unwrap();
        let r = classify_free_product(&a, &m2).unwrap();
        let big = alpha.clone().max(Rational::one() - alpha);
        let expected = if big > rat(3, 4) { Rational::from_integer(4) * big - Rational::from_integer(3) } else { Rational::zero() };
        prop_assert_eq!(r.atom_total(), expected);
    }
}
