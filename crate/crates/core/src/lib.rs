//! Courant algebroids, 1-derivations and their compatibility equations,
//! decided exactly over ℚ(x₁,…,xₙ).

#![allow(clippy::needless_range_loop)]

pub mod alt;
pub mod compat;
pub mod bundle;
pub mod cartan;
pub mod deriv;
pub mod linalg;
pub mod report;
pub mod sample;
pub mod split;
