//! Screen generation by recursion: the symmetric three-term relation in `x`
//! (as a tridiagonal eigenproblem or row by row) and the five-term cross
//! relation in `x` and `y`.

mod coeffs;
mod eigen;
mod oned;
mod twod;

pub use coeffs::{lambda, p_plus, w, TridiagCoeffs};
pub use eigen::{tridiag_eigen, TridiagEigen};
pub use oned::{classical_window, row_by_threeterm, screen_by_eigensolve, screen_by_threeterm, tridiag_spectrum};
pub use twod::{screen_by_2d, FiveTermCoeffs, FiveTermExact, Seed};
