//! Screens of orthonormal Wigner 6j symbols.
//!
//! For fixed `a, b, c, d` the orthonormal form
//! `U(x, y) = sqrt((2x+1)(2y+1)) {a b x; c d y}` fills a square grid, the
//! *screen*. This crate computes screens by three independent routes (an exact
//! single-sum oracle, a tridiagonal eigenproblem and a two-variable five-term
//! recursion), and provides the tetrahedral geometry, the semiclassical
//! Ponzano-Regge layer and the 9j two-variable recurrence.
//!
//! All angular momenta are passed as [`TwoJ`] integers (twice the spin), so
//! half-integer spins need no floating point until evaluation.

pub mod error;
pub mod exact;
pub mod exec;
pub mod export;
pub mod geometry;
pub mod ninej;
pub mod recursion;
pub mod screen;
pub mod semiclassics;
pub mod spin;

pub use error::{Error, Result};
pub use exact::{sixj_exact, sixj_unit, u_exact, ExactSum, ExactValue};
pub use exec::Exec;
pub use screen::{Diagnostics, Method, Screen};
pub use spin::{canonicalize, regge_conjugate, screen_ranges, triad_ok, CanonicalForm, ScreenParams, SixJArgs, TwoJ};
