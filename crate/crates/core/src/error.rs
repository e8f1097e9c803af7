use thiserror::Error;

use crate::spin::TwoJ;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty screen for (a,b,c,d) = ({0}, {1}, {2}, {3}) in TwoJ units")]
    EmptyScreen(u32, u32, u32, u32),

    #[error("a+b+c+d = {0} (TwoJ) is odd; half-sum is not representable")]
    Parity(u32),

    #[error("point (x, y) = ({x}, {y}) is not on the screen lattice")]
    OutOfRange { x: TwoJ, y: TwoJ },

    #[error("unsupported unit-argument 6j pattern {0:?}")]
    Pattern([u32; 6]),

    #[error("singular recursion coefficient at x = {0}")]
    SingularCoefficient(TwoJ),

    #[error("tridiagonal eigensolver did not converge for eigenvalue {index} after {iterations} iterations")]
    ConvergenceFailure { index: usize, iterations: usize },

    #[error("three-term branches cannot be matched in row y = {0}")]
    MatchFailure(TwoJ),

    #[error("seed rows are not orthonormal (defect {0:.3e})")]
    SeedMismatch(f64),

    #[error("vanishing pivot in the five-term recursion at y = {0}")]
    ZeroPivot(TwoJ),

    #[error("negative radicand {0:.6e}: side lengths do not form a triangle")]
    NegativeRadicand(f64),

    #[error("degenerate triangular face (zero area)")]
    DegenerateFace,

    #[error("point lies outside the classical (geometric) domain")]
    OutsideDomain,

    #[error("row y = {0} has no classical window")]
    NoClassicalWindow(TwoJ),

    #[error("invalid input: {0}")]
    Invalid(String),
}
