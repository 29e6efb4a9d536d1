//! Minimum-resolution polynomial approximation kernels on the hypercube `[-1,1]^n`.
//!
//! A kernel `K_r(x, y) = 1 + sum_{a != 0} 2^{H(a)} g_a T_a(x) T_a(y)` built from
//! products of Chebyshev polynomials smooths a continuous function into a
//! polynomial of total degree `r`. Non-negative kernels with small resolution
//! give uniformly convergent approximations without Gibbs oscillations.
//!
//! The crate covers the whole pipeline:
//!
//! * [`indexcomb`]: multi-index sets, sign flips, subset families and orbits.
//! * [`chebyshev`]: Chebyshev polynomials, the product measure and quadrature.
//! * [`kernels`]: closed-form kernels, product kernels, kernel application and
//!   error bounds.
//! * [`sdp_model`]: the full semidefinite program whose optimum is the
//!   minimum-resolution kernel, including the decoupled-degree variant.
//! * [`symmetry`]: block diagonalization under coordinate permutations and the
//!   reduced program.
//! * [`solver`]: a primal-dual interior-point method for block-diagonal SDPs.
//! * [`acceptance`]: the regression suite shared by the test target and the CLI.

pub mod acceptance;
pub mod chebyshev;
mod error;
pub mod exec;
pub mod functions;
pub mod indexcomb;
pub mod kernels;
pub mod reference;
pub mod sdp_model;
pub mod solver;
pub mod symmetry;

pub use error::{Error, Result};
pub use exec::Execution;
