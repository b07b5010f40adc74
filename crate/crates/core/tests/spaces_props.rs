mod common;

use common::{c, subspace_containing};
use pdlab::linalg::{lp_norm, vec_norm, vec_sub};
use pdlab::random::{random_unitary, random_vector, seeded_rng};
use pdlab::spaces::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn friedrichs_symmetric_and_below_one(seed in any::<u64>(), d in 2usize..9, ra in 1usize..5, rb in 1usize..5) {
        let mut rng = seeded_rng(seed);
        let a = random_subspace(&mut rng, d, ra.min(d));
        let b = random_subspace(&mut rng, d, rb.min(d));
        let ab = friedrichs_number(&a, &b, None).unwrap();
        let ba = friedrichs_number(&b, &a, None).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-10);
        prop_assert!((0.0..=1.0 - DEFAULT_INTERSECT_TOL / 2.0).contains(&ab));
    }

    #[test]
    fn friedrichs_unitary_invariant(seed in any::<u64>(), d in 2usize..8, ra in 1usize..4, rb in 1usize..4, shared in 0usize..2) {
        let mut rng = seeded_rng(seed);
        let common: Vec<_> = (0..shared).map(|_| random_vector(&mut rng, d)).collect();
        let a = subspace_containing(&mut rng, d, ra.max(shared).min(d), &common);
        let b = subspace_containing(&mut rng, d, rb.max(shared).min(d), &common);
        let u = random_unitary(&mut rng, d);
        let before = friedrichs_number(&a, &b, None).unwrap();
        let after = friedrichs_number(&a.transform(&u).unwrap(), &b.transform(&u).unwrap(), None).unwrap();
        prop_assert!((before - after).abs() <= 1e-10, "{before} vs {after}");
    }

    #[test]
    fn complement_is_orthogonal(seed in any::<u64>(), d in 1usize..9, r in 0usize..9) {
        let s = random_subspace(&mut seeded_rng(seed), d, r.min(d));
        let cpl = complement(&s).unwrap();
        prop_assert_eq!(s.dim() + cpl.dim(), d);
        if !s.is_zero() && !cpl.is_zero() {
            let g = s.basis().adjoint().try_matmul(cpl.basis()).unwrap();
            prop_assert!(g.max_abs() <= 1e-10);
        }
    }

    #[test]
    fn intersection_lies_in_both(seed in any::<u64>(), d in 3usize..9, shared in 0usize..3) {
        let mut rng = seeded_rng(seed);
        let common: Vec<_> = (0..shared).map(|_| random_vector(&mut rng, d)).collect();
        let r = (shared + 1).min(d);
        let a = subspace_containing(&mut rng, d, r, &common);
        let b = subspace_containing(&mut rng, d, r, &common);
        let m = intersect(&a, &b, None).unwrap();
        prop_assert!(m.dim() >= shared.min(r));
        prop_assert!(a.containment_residual(&m) <= 10.0 * DEFAULT_INTERSECT_TOL);
        prop_assert!(b.containment_residual(&m) <= 10.0 * DEFAULT_INTERSECT_TOL);
    }

    #[test]
    fn duality_identities(seed in any::<u64>(), d in 1usize..9, p in prop::sample::select(vec![1.5, 3.0, 4.0])) {
        let x = random_vector(&mut seeded_rng(seed), d);
        let sp = LpSpace::new(d, p).unwrap();
        let phi = duality_map(&sp, &x).unwrap();
        let nx = lp_norm(&x, p);
        prop_assert!((pairing(&x, &phi) - c(nx * nx, 0.0)).norm() <= 1e-10 * nx * nx);
        prop_assert!((lp_norm(&phi, sp.conjugate_exponent()) - nx).abs() <= 1e-10 * nx);
    }

    #[test]
    fn duality_map_is_homogeneous(seed in any::<u64>(), d in 1usize..9, p in 1.2f64..6.0, t in 0.01f64..100.0) {
        let x = random_vector(&mut seeded_rng(seed), d);
        let sp = LpSpace::new(d, p).unwrap();
        let phi = duality_map(&sp, &x).unwrap();
        let tx: Vec<_> = x.iter().map(|z| z * t).collect();
        let phit = duality_map(&sp, &tx).unwrap();
        let want: Vec<_> = phi.iter().map(|z| z * t).collect();
        prop_assert!(vec_norm(&vec_sub(&phit, &want)) <= 1e-12 * vec_norm(&want).max(1.0));
    }
}

#[test]
fn friedrichs_examples() {
    let th = std::f64::consts::FRAC_PI_3;
    let l1 = Subspace::from_spanning(2, &[vec![c(1.0, 0.0), c(0.0, 0.0)]]).unwrap();
    let l2 = Subspace::from_spanning(2, &[vec![c(th.cos(), 0.0), c(th.sin(), 0.0)]]).unwrap();
    assert!((friedrichs_number(&l1, &l2, None).unwrap() - 0.5).abs() <= 1e-12);
    assert_eq!(friedrichs_number(&l1, &l1, None).unwrap(), 0.0);

    let s = 0.5f64.sqrt();
    let a = Subspace::coordinate(3, &[0, 1]).unwrap();
    let b = Subspace::from_spanning(3, &[vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)], vec![c(s, 0.0), c(0.0, 0.0), c(s, 0.0)]]).unwrap();
    assert!((friedrichs_number(&a, &b, None).unwrap() - s).abs() <= 1e-12);
}

#[test]
fn intersection_examples() {
    let a = Subspace::coordinate(4, &[0, 1]).unwrap();
    let b = Subspace::coordinate(4, &[1, 2]).unwrap();
    let m = intersect(&a, &b, None).unwrap();
    assert_eq!(m.dim(), 1);
    let e2 = Subspace::coordinate(4, &[1]).unwrap();
    assert!(m.containment_residual(&e2) <= 1e-12);
    let x = Subspace::coordinate(2, &[0]).unwrap();
    let y = Subspace::from_spanning(2, &[vec![c(1.0, 0.0), c(1.0, 0.0)]]).unwrap();
    assert!(intersect(&x, &y, None).unwrap().is_zero());
    assert!(complement(&Subspace::full(3)).unwrap().is_zero());
}

#[test]
fn duality_examples() {
    let sp = LpSpace::new(2, 3.0).unwrap();
    let phi = duality_map(&sp, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
    let v = 2f64.powf(-1.0 / 3.0);
    assert!(phi.iter().all(|z| (z - v).norm() <= 1e-14));
    let e1 = duality_map(&sp, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert_eq!(e1, vec![c(1.0, 0.0), c(0.0, 0.0)]);
    let h = LpSpace::hilbert(2).unwrap();
    let x = [c(1.0, 2.0), c(-0.5, 0.25)];
    let phi = duality_map(&h, &x).unwrap();
    assert!(phi.iter().zip(&x).all(|(a, b)| (a - b.conj()).norm() <= 1e-15));
    assert!(duality_map(&sp, &[c(0.0, 0.0); 2]).is_err());
    assert!(matches!(LpSpace::new(2, 1.0), Err(SpacesError::InvalidSpace { .. })));
}
