//! Seeded random generators. Every random object is a pure function of an
//! explicit 64-bit seed; there is no global RNG.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{qr_orthonormalize, vec_norm, CMatrix};

pub type Rng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn complex_normal(rng: &mut Rng) -> Complex64 {
    let re = normal(rng);
    let im = normal(rng);
    Complex64::new(re, im)
}

/// Matrix with independent standard complex Gaussian entries.
pub fn random_matrix(rng: &mut Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// Matrix with independent standard real Gaussian entries.
pub fn random_real_matrix(rng: &mut Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| Complex64::new(normal(rng), 0.0))
}

pub fn random_vector(rng: &mut Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| complex_normal(rng)).collect()
}

pub fn random_real_vector(rng: &mut Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(normal(rng), 0.0)).collect()
}

/// Uniformly distributed unit vector of the complex Euclidean sphere.
pub fn random_unit_vector(rng: &mut Rng, n: usize) -> Vec<Complex64> {
    loop {
        let v = random_vector(rng, n);
        let nv = vec_norm(&v);
        if nv > 1e-300 {
            return v.iter().map(|z| z / nv).collect();
        }
    }
}

/// Unitary matrix from orthonormalizing a complex Gaussian matrix.
pub fn random_unitary(rng: &mut Rng, n: usize) -> CMatrix {
    loop {
        let g = random_matrix(rng, n, n);
        if let Ok(q) = qr_orthonormalize(n, &g.columns(), None) {
            if q.cols() == n {
                return q;
            }
        }
    }
}
