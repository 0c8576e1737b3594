#![allow(clippy::needless_range_loop)]

//! Exact computer algebra for quantum automorphism groups of measured
//! multimatrix algebras and the cogroupoid algebras `𝒜(E,F)` linking them.

pub mod comodule;
pub mod corpus;
pub mod fusion;
pub mod linalg;
pub mod multimatrix;
pub mod presentation;
pub mod rewrite;
pub mod scalar;
