//! Finite-dimensional spectral boundary value calculus.
//!
//! Implements M-operators and solution operators of an operator triplet
//! {A0, Pi, Lambda}, extension operators defined by generalized boundary
//! conditions (beta0, beta1) through Krein's resolvent formula, the Cayley
//! transform / characteristic function of the canonical dissipative
//! extension, and the concrete model of finitely many point interactions in
//! R^3 (bound states, eigenfunctions, resolvent kernels).

pub mod cayley;
pub mod error;
pub mod extensions;
pub mod numerics;
pub mod pointint;
pub mod rootfind;
pub mod triplet;
pub mod verify;

pub use error::{Error, Result};
