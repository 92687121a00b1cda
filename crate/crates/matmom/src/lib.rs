//! Truncated matrix trigonometric and Hamburger moment problems solved
//! through de Branges spaces of matrix polynomials.
//!
//! Moments give a positive definite block Toeplitz or Hankel Gram matrix;
//! its inverse yields a pair `(E₋, E₊)`, the maximum entropy density
//! `(E₊E₊*)⁻¹`, second-kind polynomials, and a `Θ` matrix whose linear
//! fractional transform parameterizes solutions by Schur-class functions.

pub mod blockmat;
pub mod debranges;
pub mod error;
pub mod identities;
pub mod matpoly;
pub mod numerics;
pub mod solutions;

pub use error::{Error, Result};
