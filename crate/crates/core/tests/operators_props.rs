mod common;

use pdlab::lab::fix_split;
use pdlab::linalg::{norm2, vec_norm, CMatrix};
use pdlab::operators::*;
use pdlab::projections::{oblique_projection, orth_projection, shift_norm, ProjectionOp};
use pdlab::random::{random_vector, seeded_rng, Rng};
use pdlab::spaces::random_subspace;
use proptest::prelude::*;
use rand::Rng as _;

fn random_orth(rng: &mut Rng, d: usize) -> ProjectionOp {
    let r = rng.random_range(0..=d);
    orth_projection(&random_subspace(rng, d, r))
}

fn random_oblique(rng: &mut Rng, d: usize) -> ProjectionOp {
    let r = rng.random_range(1..d);
    let range = random_subspace(rng, d, r);
    let kernel = random_subspace(rng, d, d - r);
    oblique_projection(&range, &kernel).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dr_matches_reflection_form(seed in any::<u64>(), d in 2usize..8, oblique in any::<bool>()) {
        let mut rng = seeded_rng(seed);
        let (p1, p2) = if oblique {
            (random_oblique(&mut rng, d), random_oblique(&mut rng, d))
        } else {
            (random_orth(&mut rng, d), random_orth(&mut rng, d))
        };
        let t = dr_operator(&p1, &p2).unwrap();
        let i = CMatrix::identity(d);
        let q1 = &p1.matrix().scale_real(2.0) - &i;
        let q2 = &p2.matrix().scale_real(2.0) - &i;
        let want = (&i + &(&q2 * &q1)).scale_real(0.5);
        let scale = norm2(&q1).max(1.0) * norm2(&q2).max(1.0);
        prop_assert!((t.matrix() - &want).max_abs() <= 1e-12 * scale);
        prop_assert!((t.matrix() - &t.evaluate().unwrap()).max_abs() <= 1e-12 * scale);
    }

    #[test]
    fn map_of_orthoprojections_contracts(seed in any::<u64>(), d in 2usize..8, k in 1usize..4) {
        let mut rng = seeded_rng(seed);
        let ps: Vec<_> = (0..k).map(|_| random_orth(&mut rng, d)).collect();
        let t = map_operator(&ps).unwrap();
        prop_assert!(norm2(t.matrix()) <= 1.0 + 1e-10);
        let gaps = power_norm_gap(t.matrix(), None, 30).unwrap();
        let pows = powers(t.matrix(), 30).unwrap();
        prop_assert!(pows.iter().all(|m| norm2(m) <= 1.0 + 1e-10));
        prop_assert_eq!(gaps.len(), 31);
        let split = fix_split(t.matrix(), None).unwrap();
        prop_assert!(norm2(split.p_t.matrix()) <= 1.0 + 1e-8);
    }

    #[test]
    fn orbit_below_gap_envelope(seed in any::<u64>(), d in 2usize..8, dr in any::<bool>()) {
        let mut rng = seeded_rng(seed);
        let p1 = random_orth(&mut rng, d);
        let p2 = random_orth(&mut rng, d);
        let t = if dr { dr_operator(&p1, &p2).unwrap() } else { map_operator(&[p1, p2]).unwrap() };
        let split = fix_split(t.matrix(), None).unwrap();
        let pt = split.p_t.matrix();
        let x = random_vector(&mut rng, d);
        let nx = vec_norm(&x);
        let o = orbit(t.matrix(), &x, Some(pt), 60).unwrap();
        let g = power_norm_gap(t.matrix(), Some(pt), 60).unwrap();
        prop_assert_eq!(o.len(), 61);
        for (r, gap) in o.values.iter().zip(&g.values) {
            prop_assert!(r.is_finite() && *r >= 0.0);
            prop_assert!(*r <= gap * nx + 1e-9);
        }
    }

    #[test]
    fn generalized_dr_of_type_u_pairs(seed in any::<u64>(), d in 2usize..7) {
        let mut rng = seeded_rng(seed);
        let p1 = random_orth(&mut rng, d);
        let p2 = random_orth(&mut rng, d);
        let f12 = dr_factor(1, 2, &p1, &p2).unwrap();
        let f21 = dr_factor(2, 1, &p2, &p1).unwrap();
        prop_assert!(shift_norm(&f12.matrix, 0.5) <= 0.5 + 1e-8);
        let names = [f12.name.clone(), f21.name.clone()];
        let t = convex_combination(
            "avg",
            vec![f12, f21],
            vec![
                ProductTerm { weight: 0.5, factors: vec![names[0].clone()] },
                ProductTerm { weight: 0.5, factors: vec![names[1].clone()] },
            ],
        )
        .unwrap();
        prop_assert!(shift_norm(t.matrix(), 0.5) <= 0.5 + 1e-8);
        prop_assert_eq!(t.factors_used(), vec!["T_1_2".to_string(), "T_2_1".to_string()]);
    }
}

#[test]
fn map_of_lines_example() {
    let th = std::f64::consts::FRAC_PI_3;
    let l1 = pdlab::spaces::Subspace::coordinate(2, &[0]).unwrap();
    let l2 = pdlab::spaces::Subspace::from_spanning(2, &[pdlab::linalg::real_vec(&[th.cos(), th.sin()])]).unwrap();
    let t = map_operator(&[orth_projection(&l1), orth_projection(&l2)]).unwrap();
    let want = CMatrix::from_real_rows(&[&[0.25, 0.0], &[3f64.sqrt() / 4.0, 0.0]]);
    assert!((t.matrix() - &want).max_abs() <= 1e-15);
}

#[test]
fn convex_weights_and_diagonal_algebra() {
    let a = CMatrix::diag_real(&[1.0, 0.0, 1.0]);
    let b = CMatrix::diag_real(&[0.0, 1.0, 1.0]);
    let t = convex_combination(
        "mix",
        vec![Factor { name: "A".into(), matrix: a }, Factor { name: "B".into(), matrix: b }],
        vec![
            ProductTerm { weight: 0.3, factors: vec!["A".into()] },
            ProductTerm { weight: 0.7, factors: vec!["B".into()] },
        ],
    )
    .unwrap();
    assert!((t.matrix() - &CMatrix::diag_real(&[0.3, 0.7, 1.0])).max_abs() <= 1e-15);
    let bad = convex_combination(
        "bad",
        vec![Factor { name: "A".into(), matrix: CMatrix::identity(2) }],
        vec![ProductTerm { weight: 0.9, factors: vec!["A".into()] }],
    );
    assert!(matches!(bad, Err(OperatorError::BadWeights { .. })));
}
