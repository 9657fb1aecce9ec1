//! Exact-arithmetic computer algebra for linear free divisors: logarithmic
//! vector fields and Saito matrices, Weyl-algebra operators, Gröbner-based
//! regular-sequence certificates, Bernstein-Sato polynomials of self-dual
//! prehomogeneous equations, Spencer complexes, tautological-system
//! presentations and their dimensional reduction to one-variable
//! hypergeometric-type operators.

pub mod error;
pub mod linalg;
pub mod polyring;
pub mod parse;
pub mod weyl;
pub mod logfields;
pub mod groebner;
pub mod bernstein;
pub mod catalog;
pub mod spencer;
pub mod tautsys;
pub mod reduction;

pub use error::{Error, Result};
