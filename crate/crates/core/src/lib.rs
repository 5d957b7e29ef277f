//! Discrete- and continuous-time quantum walks on graphs.
//!
//! * [`numerics`]: dense complex matrices, Hermitian eigendecomposition, unitary exponentials.
//! * [`graphs`]: cycles, Cartesian products, adjacency and Laplacian matrices.
//! * [`walks`]: coined walks, their edge-space form, and the continuous-time and
//!   classical propagators.
//! * [`limits`]: perturbed-coin protocols, effective Hamiltonians and the
//!   repeated-application limit that turns coined steps into `e^{−iγHt}`.
//! * [`liealg`]: the Lie algebra generated by conjugated coin algebras, which
//!   decides which Hamiltonians a coined walk can reach in that limit.

pub mod error;
pub mod graphs;
pub mod liealg;
pub mod limits;
pub mod numerics;
pub mod random;
pub mod walks;

pub use error::{Error, Result};
pub use numerics::{CMatrix, CVector, C64};
