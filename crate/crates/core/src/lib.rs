//! Finite-dimensional laboratory for the asymptotics of projection methods.
//!
//! The crate builds alternating-projection (MAP) and Douglas–Rachford
//! operators from subspaces of `C^d` (or from norm-one projections on
//! finite-dimensional `l^p`), and measures what their powers do: convergence
//! rates, numerical ranges, resolvent growth near 1, Stolz-type geometry,
//! Ritt behaviour, certified slow orbits and superpolynomially fast vectors.
//!
//! Layering, bottom up: [`linalg`], [`spaces`], [`projections`],
//! [`operators`], [`spectral`], [`lab`].

pub mod fit;
pub mod linalg;
pub mod random;
pub mod operators;
pub mod projections;
pub mod spaces;
pub mod spectral;
pub mod lab;
