#![allow(dead_code)]

use num_complex::Complex64;
use pdlab::linalg::{norm2, CMatrix};
use pdlab::random::{random_matrix, random_vector, Rng};
use pdlab::spaces::{random_subspace, Subspace};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Random matrix scaled to spectral norm `s`.
pub fn random_contraction(rng: &mut Rng, d: usize, s: f64) -> CMatrix {
    let a = random_matrix(rng, d, d);
    let n = norm2(&a);
    a.scale_real(s / n)
}

/// Random subspace of dimension `r` that contains the given vectors.
pub fn subspace_containing(rng: &mut Rng, d: usize, r: usize, shared: &[Vec<Complex64>]) -> Subspace {
    let mut vs: Vec<Vec<Complex64>> = shared.to_vec();
    while vs.len() < r {
        vs.push(random_vector(rng, d));
    }
    Subspace::from_spanning(d, &vs).unwrap()
}

/// Random subspace of dimension `r` inside the first `d − skip` coordinates.
pub fn subspace_avoiding_tail(rng: &mut Rng, d: usize, r: usize, skip: usize) -> Subspace {
    let inner = random_subspace(rng, d - skip, r);
    let vs: Vec<Vec<Complex64>> = inner
        .basis()
        .columns()
        .into_iter()
        .map(|mut v| {
            v.resize(d, Complex64::new(0.0, 0.0));
            v
        })
        .collect();
    Subspace::from_spanning(d, &vs).unwrap()
}

pub fn max_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Greedy nearest matching of two multisets; returns the worst pair distance.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}
