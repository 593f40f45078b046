//! Double operator integral calculus for finite-dimensional normal matrices.
//!
//! The crate is organized in four layers, each building on the previous one:
//!
//! * [`linalg`]: dense complex matrices, a cyclic Jacobi Hermitian eigensolver,
//!   spectral decomposition of normal matrices, singular values and Schatten
//!   (quasi)norms.
//! * [`funcspace`]: scalar symbols on the plane, trigonometric polynomials,
//!   Littlewood-Paley pieces and Besov norms, moduli of continuity and their
//!   averaged transforms, and seminorm estimators.
//! * [`calculus`]: the function calculus `f(N)`, divided-difference multiplier
//!   kernels, double operator integrals, and the representation of
//!   `f(N1) - f(N2)` (and of quasicommutators) as a pair of such integrals.
//! * [`theorems`]: randomized normal pairs, ratio experiments that compare
//!   perturbation norms against the bounds they should satisfy, weak and
//!   partial-sum singular value checks, and an adversarial ratio search.
//!
//! Everything is deterministic given a seed: random inputs are produced by
//! counter-derived ChaCha streams and all reductions happen in a fixed order.

// Parameter guards are written `!(x > 0.0)` so that NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod funcspace;
pub mod linalg;
pub mod seedmix;
pub mod theorems;

pub use linalg::{ComplexMatrix, HermitianEigen, SingularValues, SpectralDecomposition};
