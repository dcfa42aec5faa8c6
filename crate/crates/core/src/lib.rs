//! Exact graded-contact engine for split Courant–Jacobi algebroids.
//!
//! Layers, bottom up: [`gca`] (graded-commutative polynomials), [`contact`]
//! (the degree-2 contact manifold and its Jacobi bracket), [`linfty`]
//! (symmetric-coalgebra machinery), [`vdata`] (higher derived brackets),
//! [`cjalg`] (split Courant–Jacobi algebroids and their deformation algebra)
//! and [`deform`] (cohomology, Kuranishi map, order-by-order extension).

pub mod cjalg;
pub mod contact;
pub mod deform;
pub mod gca;
pub mod instance;
pub mod linalg;
pub mod linfty;
pub mod random;
pub mod rational;
pub mod vdata;

pub use rational::Q;
