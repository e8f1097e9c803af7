//! Exact evaluation of 6j symbols and screen entries.
//!
//! Values are carried as `q * sqrt(p)` with `q` rational and `p` square-free
//! ([`ExactValue`]). Factorials never materialize as big integers: they are
//! accumulated as prime exponents and only the final square-free radicand and
//! rational coefficient are multiplied out.

mod primes;
mod racah;
mod unit;
mod value;

pub use primes::PrimeFactors;
pub use racah::{screen_oracle, sixj_exact, sixj_raw, u_exact};
pub(crate) use racah::exact_row;
pub use unit::{sixj_unit, sixj_unit_f64, unit_pattern};
pub use value::{ExactSum, ExactValue};
