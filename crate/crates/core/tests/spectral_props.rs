mod common;

use common::{c, max_dist, random_contraction};
use num_complex::Complex64;
use pdlab::linalg::{inner, norm2, CMatrix};
use pdlab::operators::{dr_operator, map_operator};
use pdlab::projections::orth_projection;
use pdlab::random::{random_unit_vector, seeded_rng, Rng};
use pdlab::spaces::{random_subspace, LpSpace};
use pdlab::spectral::*;
use proptest::prelude::*;
use rand::Rng as _;

fn random_map(rng: &mut Rng, d: usize, k: usize) -> CMatrix {
    let ps: Vec<_> = (0..k)
        .map(|_| {
            let r = rng.random_range(1..d);
            orth_projection(&random_subspace(rng, d, r))
        })
        .collect();
    map_operator(&ps).unwrap().matrix().clone()
}

fn random_dr(rng: &mut Rng, d: usize) -> CMatrix {
    let r1 = rng.random_range(1..d);
    let r2 = rng.random_range(1..d);
    let p1 = orth_projection(&random_subspace(rng, d, r1));
    let p2 = orth_projection(&random_subspace(rng, d, r2));
    dr_operator(&p1, &p2).unwrap().matrix().clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rotation_points_solve_support_problem(seed in any::<u64>(), d in 1usize..7) {
        let mut rng = seeded_rng(seed);
        let t = random_contraction(&mut rng, d, 1.0);
        let s = numerical_range_hilbert(&t, 64).unwrap();
        let ys: Vec<_> = (0..100).map(|_| random_unit_vector(&mut rng, d)).collect();
        for (j, z) in s.points.iter().enumerate() {
            let rot = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / 64.0);
            let best = (rot * z).re;
            for y in &ys {
                prop_assert!(best >= (rot * inner(y, &t.mul_vec(y))).re - 1e-8);
            }
        }
    }

    #[test]
    fn rotation_hull_contains_samples(seed in any::<u64>(), d in 1usize..7) {
        let mut rng = seeded_rng(seed);
        let t = random_contraction(&mut rng, d, 1.0);
        let s = numerical_range_hilbert_refined(&t, 64, 1e-9).unwrap();
        prop_assert!(s.points.iter().all(|z| z.norm() <= 1.0 + 1e-8));
        for _ in 0..1000 {
            let y = random_unit_vector(&mut rng, d);
            let w = inner(&y, &t.mul_vec(&y));
            prop_assert!(polygon_distance(w, &s.hull) <= 1e-8);
        }
    }

    #[test]
    fn numerical_range_rotates_with_operator(seed in any::<u64>(), d in 1usize..6, k in 0usize..64, p in prop::sample::select(vec![1.5, 2.0, 3.0])) {
        let mut rng = seeded_rng(seed);
        let t = random_contraction(&mut rng, d, 1.0);
        let m = 64;
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / m as f64);
        let rt = t.scale(w);
        // Rotating T by a grid angle shifts the rotation-grid index by k.
        let a = numerical_range_hilbert(&t, m).unwrap();
        let b = numerical_range_hilbert(&rt, m).unwrap();
        for j in 0..m {
            let jj = (j + k) % m;
            prop_assert!((b.points[j] - w * a.points[jj]).norm() <= 1e-10);
        }
        let sp = LpSpace::new(d, p).unwrap();
        let la = numerical_range_lp(&t, &sp, 200, seed).unwrap();
        let lb = numerical_range_lp(&rt, &sp, 200, seed).unwrap();
        let rotated: Vec<_> = la.points.iter().map(|z| w * z).collect();
        prop_assert!(max_dist(&lb.points, &rotated) <= 1e-10);
    }

    #[test]
    fn resolvent_adjoint_invariance(seed in any::<u64>(), d in 1usize..7) {
        let mut rng = seeded_rng(seed);
        let t = random_contraction(&mut rng, d, 0.9);
        let grid: Vec<f64> = (1..=40).map(|j| std::f64::consts::PI * j as f64 / 40.0).collect();
        let a = resolvent_profile(&t, &grid, 0.5).unwrap();
        let b = resolvent_profile(&t.adjoint(), &grid, 0.5).unwrap();
        // ‖R(e^{iθ}, T)‖ = ‖R(e^{−iθ}, Tᴴ)‖, and the grid is symmetric
        // (θ = π is its own mirror image).
        prop_assert_eq!(a.angles.len(), b.angles.len());
        let mirror = |th: f64| if th == std::f64::consts::PI { th } else { -th };
        for (th, x) in a.angles.iter().zip(&a.norms) {
            let j = b.angles.iter().position(|u| *u == mirror(*th)).unwrap();
            let y = &b.norms[j];
            prop_assert!((x - y).abs() <= 1e-10 * x.max(1.0));
        }
    }

    #[test]
    fn resolvent_grows_at_least_first_order_when_one_is_an_eigenvalue(seed in any::<u64>(), d in 3usize..8) {
        let mut rng = seeded_rng(seed);
        // A shared direction forces 1 into the spectrum.
        let v = pdlab::random::random_vector(&mut rng, d);
        let a = common::subspace_containing(&mut rng, d, 2, std::slice::from_ref(&v));
        let b = common::subspace_containing(&mut rng, d, 2, &[v]);
        let t = map_operator(&[orth_projection(&a), orth_projection(&b)]).unwrap().matrix().clone();
        prop_assert!(spectrum_check(&t, 1e-8).unwrap().peripheral_ok);
        let prof = resolvent_profile(&t, &default_theta_grid(), 0.1).unwrap();
        prop_assert!(prof.one_in_spectrum);
        prop_assert!(prof.alpha.unwrap() >= 0.9);
    }

    #[test]
    fn stolz_constant_bounds_every_window_point(seed in any::<u64>(), d in 1usize..6) {
        let mut rng = seeded_rng(seed);
        let t = random_map(&mut rng, d + 1, 2);
        let s = numerical_range_hilbert(&t, 180).unwrap();
        let pts: Vec<_> = s.points.iter().map(|z| if z.norm() > 1.0 { z / z.norm() } else { *z }).collect();
        if let StolzOutcome::Fit(fit) = stolz_fit(&pts, 0.5, &default_alpha_grid(), 1e-3).unwrap() {
            for z in &pts {
                let dz = (z - 1.0).norm();
                if dz > 1e-9 && dz <= 0.5 {
                    prop_assert!(1.0 - z.norm() >= fit.c * dz.powf(fit.alpha) - 1e-12);
                }
            }
        }
    }

    #[test]
    fn k_spectral_holds_for_contractions(seed in any::<u64>(), d in 1usize..6) {
        let mut rng = seeded_rng(seed);
        let scale = rng.random_range(0.5..1.0);
        let t = random_contraction(&mut rng, d, scale);
        let s = numerical_range_hilbert(&t, 360).unwrap();
        let rep = k_spectral_check(&t, &s, 60, None).unwrap();
        prop_assert!(rep.passed, "worst ratio {}", rep.worst_ratio);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn map_products_are_ritt_consistent(seed in any::<u64>(), d in 2usize..9, k in 2usize..4) {
        let mut rng = seeded_rng(seed);
        let t = random_map(&mut rng, d, k);
        // The quartile check only resolves decay faster than the window.
        let spec = pdlab::linalg::eigenvalues(&t).unwrap();
        prop_assume!(spec.radius_excluding_one(1e-8) <= 0.99);
        let r = ritt_diagnostic(&t, 1000).unwrap();
        prop_assert!(r.consistent, "head {} tail {}", r.head_max, r.tail_max);
    }

    #[test]
    fn hull_distance_bound_for_projection_methods(seed in any::<u64>(), d in 2usize..9, dr in any::<bool>()) {
        let mut rng = seeded_rng(seed);
        let t = if dr { random_dr(&mut rng, d) } else { random_map(&mut rng, d, 2) };
        prop_assert!(norm2(&t) <= 1.0 + 1e-10);
        let s = numerical_range_hilbert(&t, 720).unwrap();
        let grid: Vec<f64> = (1..=200).map(|j| std::f64::consts::PI * j as f64 / 200.0).collect();
        let rep = hull_distance_bound_check(&t, &s, &grid, Some(1e-4)).unwrap();
        prop_assert!(rep.passed, "worst ratio {}", rep.worst_ratio);
    }
}

#[test]
fn numerical_range_examples() {
    let n = CMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let s = numerical_range_hilbert(&n, 720).unwrap();
    assert!((s.points[0] - c(0.5, 0.0)).norm() <= 1e-8);
    assert!(s.points.iter().all(|z| (z.norm() - 0.5).abs() <= 1e-8));
    let id = numerical_range_hilbert(&CMatrix::identity(3), 16).unwrap();
    assert!(id.points.iter().all(|z| (z - 1.0).norm() <= 1e-12));
    let seg = numerical_range_hilbert(&CMatrix::diag_real(&[0.0, 1.0]), 64).unwrap();
    assert!(seg.points.iter().all(|z| z.im.abs() <= 1e-12 && (-1e-12..=1.0 + 1e-12).contains(&z.re)));

    let sp = LpSpace::new(4, 3.0).unwrap();
    let proj = CMatrix::diag_real(&[1.0, 1.0, 0.0, 0.0]);
    let l = numerical_range_lp(&proj, &sp, 200, 5).unwrap();
    assert!(l.points.iter().all(|z| z.im.abs() <= 1e-10 && (-1e-12..=1.0 + 1e-12).contains(&z.re)));
    let z = numerical_range_lp(&CMatrix::zeros(4, 4), &sp, 100, 5).unwrap();
    assert!(z.points.iter().all(|w| w.norm() == 0.0));
}

#[test]
fn stolz_examples() {
    let seg: Vec<_> = (0..=200).map(|j| c(j as f64 / 200.0, 0.0)).collect();
    match stolz_fit(&seg, 0.5, &default_alpha_grid(), 1e-3).unwrap() {
        StolzOutcome::Fit(f) => assert!(f.passed && f.alpha == 1.0 && (f.c - 1.0).abs() <= 1e-12),
        StolzOutcome::Vacuous => panic!("vacuous"),
    }
    let horo: Vec<_> = (0..2000)
        .map(|j| c(0.5, 0.0) + Complex64::from_polar(0.5, 2.0 * std::f64::consts::PI * j as f64 / 2000.0))
        .collect();
    match stolz_fit(&horo, 0.5, &default_alpha_grid(), 1e-3).unwrap() {
        StolzOutcome::Fit(f) => {
            // A finite sample passes below α = 2 as well; the horocycle shows
            // in c(2) staying bounded while c(1) collapses.
            assert!(f.passed);
            assert!(f.c_at(2.0).unwrap() >= 0.5 - 1e-12);
            assert!(f.c_at(1.0).unwrap() < 1e-3);
        }
        StolzOutcome::Vacuous => panic!("vacuous"),
    }
    let stolz: Vec<_> = (0..2000)
        .map(|j| Complex64::from_polar(0.6, 2.0 * std::f64::consts::PI * j as f64 / 2000.0))
        .chain((0..=100).map(|j| c(0.6 + 0.4 * j as f64 / 100.0, 0.0)))
        .collect();
    let hull = convex_hull(&stolz);
    let dense = densify(&hull, 50);
    match stolz_fit(&dense, 0.5, &default_alpha_grid(), 1e-3).unwrap() {
        StolzOutcome::Fit(f) => assert!(f.passed && f.alpha == 1.0),
        StolzOutcome::Vacuous => panic!("vacuous"),
    }
    assert!(matches!(stolz_fit(&[c(0.0, 0.0)], 0.5, &default_alpha_grid(), 1e-3).unwrap(), StolzOutcome::Vacuous));
}
