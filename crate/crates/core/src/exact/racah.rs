use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::primes::PrimeFactors;
use super::value::ExactValue;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::screen::{Method, Screen};
use crate::spin::{triad_ok, ScreenParams, SixJArgs, TwoJ};

/// Exact `{j1 j2 j3; j4 j5 j6}` for raw TwoJ entries.
///
/// Single-sum (Racah) form
/// `prod Delta * sum_z (-1)^z (z+1)! / (prod_i (z-alpha_i)! prod_k (beta_k-z)!)`.
/// The sum is evaluated by Horner's rule on consecutive term ratios, starting
/// from the first term held in prime-exponent form.
pub fn sixj_raw(j: [u32; 6]) -> ExactValue {
    sixj_scaled(j, &[])
}

/// `{j1 j2 j3; j4 j5 j6} * sqrt(prod extra)`.
pub(crate) fn sixj_scaled(j: [u32; 6], extra: &[u64]) -> ExactValue {
    let [j1, j2, j3, j4, j5, j6] = j;
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if !triads.iter().all(|&(a, b, c)| triad_ok(TwoJ(a), TwoJ(b), TwoJ(c))) {
        return ExactValue::zero();
    }
    let alpha = triads.map(|(a, b, c)| (a + b + c) / 2);
    let beta = [(j1 + j2 + j4 + j5) / 2, (j2 + j3 + j5 + j6) / 2, (j3 + j1 + j6 + j4) / 2];
    let zmin = *alpha.iter().max().unwrap();
    let zmax = *beta.iter().min().unwrap();
    debug_assert!(zmin <= zmax);

    // radicand: triangle coefficients, the extra factors and the square of the first term
    let mut rad = PrimeFactors::new();
    for &(a, b, c) in &triads {
        rad.mul_factorial((a + b - c) / 2, 1);
        rad.mul_factorial((a + c - b) / 2, 1);
        rad.mul_factorial((b + c - a) / 2, 1);
        rad.mul_factorial((a + b + c) / 2 + 1, -1);
    }
    for &e in extra {
        if e == 0 {
            return ExactValue::zero();
        }
        rad.mul_int(e, 1);
    }
    rad.mul_factorial(zmin + 1, 2);
    for a in alpha {
        rad.mul_factorial(zmin - a, -2);
    }
    for b in beta {
        rad.mul_factorial(b - zmin, -2);
    }

    // sum / first term = 1 + r1 (1 + r2 (1 + ...)), r_z = t_z / t_{z-1}
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for z in (zmin + 1..=zmax).rev() {
        let up: BigInt = beta.iter().fold(BigInt::from(z + 1), |acc, &b| acc * (b + 1 - z));
        let down: BigInt = alpha.iter().fold(BigInt::one(), |acc, &a| acc * (z - a));
        // acc <- 1 - (up/down) * acc
        num = &den * &down - up * num;
        den *= down;
    }
    let sign = if zmin % 2 == 0 { 1 } else { -1 };
    ExactValue::from_factored(sign, BigRational::new(num, den), &rad)
}

/// Exact 6j symbol `{a b x; c d y}`; zero when any triad is inadmissible.
pub fn sixj_exact(args: SixJArgs) -> ExactValue {
    sixj_raw(args.to_array())
}

/// Exact `U(x, y) = sqrt((2x+1)(2y+1)) {a b x; c d y}`.
pub fn u_exact(x: TwoJ, y: TwoJ, params: &ScreenParams) -> Result<ExactValue> {
    if !params.contains(x, y) {
        return Err(Error::OutOfRange { x, y });
    }
    let args = params.sixj_args(x, y).to_array();
    Ok(sixj_scaled(args, &[u64::from(x.0) + 1, u64::from(y.0) + 1]))
}

/// Whole screen from the exact oracle, converted to doubles.
pub fn screen_oracle(params: &ScreenParams, exec: Exec) -> Screen {
    let p = *params;
    let mut s = Screen::from_fn(p, Method::Oracle, exec, |ix, iy| {
        u_exact(p.x_at(ix), p.y_at(iy), &p).expect("lattice point").to_f64()
    });
    s.diagnostics.orthonormality_defect = s.orthonormality_defect(exec);
    s
}

/// Exact rows `y` of a screen, ordered by `x`.
pub(crate) fn exact_row(params: &ScreenParams, iy: usize) -> Vec<ExactValue> {
    let y = params.y_at(iy);
    (0..params.side()).map(|ix| u_exact(params.x_at(ix), y, params).expect("lattice point")).collect()
}
