//! Five-term cross recursion linking `U(x±1, y), U(x, y)` to `U(x, y±1)`.
//!
//! Multiplying the relation through by `sqrt((2x+1)(2y+1))` separates it into
//! coefficients that depend on `x` alone and on `y` alone:
//!
//! ```text
//! sum_k ax_k(x) U(x+k, y) = sum_k ay_k(y) U(x, y+k),   k in {-1, 0, 1}
//! ax_k(x) = (-1)^(2x) sqrt((2x'+1)(2x+1)) {b x' a; 1 a x} {d x' c; 1 c x}
//! ay_k(y) = (-1)^(2y) sqrt((2y'+1)(2y+1)) {b y' c; 1 c y} {d y' a; 1 a y}
//! ```
//!
//! Solving for `U(x, y+1)` row after row amplifies rounding exponentially in
//! the classically forbidden corners, so propagation runs in big-integer
//! fixed point with a precision that grows with the screen width and is
//! confirmed by a second, more precise pass.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{exact_row, sixj_unit, unit_pattern, ExactValue};
use crate::exec::Exec;
use crate::screen::{Method, Screen};
use crate::spin::{ScreenParams, TwoJ};

/// Exact cross-recursion coefficients of one screen.
#[derive(Clone, Debug)]
pub struct FiveTermExact {
    pub params: ScreenParams,
    /// `ax[ix] = [ax_-1, ax_0, ax_+1]`
    pub ax: Vec<[ExactValue; 3]>,
    /// `ay[iy] = [ay_-1, ay_0, ay_+1]`
    pub ay: Vec<[ExactValue; 3]>,
}

/// Double-precision cross-recursion coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FiveTermCoeffs {
    pub params: ScreenParams,
    pub ax: Vec<[f64; 3]>,
    pub ay: Vec<[f64; 3]>,
}

const SHIFTS: [i32; 3] = [-2, 0, 2];

fn side_coeff(e: TwoJ, f: TwoJ, g: TwoJ, h: TwoJ, v: TwoJ, shift: i32) -> ExactValue {
    let vp = i64::from(v.0) + i64::from(shift);
    if vp < 0 {
        return ExactValue::zero();
    }
    let s1 = sixj_unit(unit_pattern(e, v, f, shift)).expect("unit pattern");
    let s2 = sixj_unit(unit_pattern(g, v, h, shift)).expect("unit pattern");
    let root = ExactValue::sqrt_int((vp as u64 + 1) * (u64::from(v.0) + 1));
    let mut out = &(&s1 * &s2) * &root;
    if v.0 % 2 == 1 {
        out = -out;
    }
    out
}

impl FiveTermExact {
    pub fn new(params: &ScreenParams) -> Self {
        let p = *params;
        let n = p.side();
        let ax = (0..n).map(|ix| SHIFTS.map(|s| side_coeff(p.b, p.a, p.d, p.c, p.x_at(ix), s))).collect();
        let ay = (0..n).map(|iy| SHIFTS.map(|s| side_coeff(p.b, p.c, p.d, p.a, p.y_at(iy), s))).collect();
        FiveTermExact { params: p, ax, ay }
    }

    pub fn to_f64(&self) -> FiveTermCoeffs {
        let conv = |v: &Vec<[ExactValue; 3]>| v.iter().map(|r| [r[0].to_f64(), r[1].to_f64(), r[2].to_f64()]).collect();
        FiveTermCoeffs { params: self.params, ax: conv(&self.ax), ay: conv(&self.ay) }
    }
}

impl FiveTermCoeffs {
    pub fn new(params: &ScreenParams) -> Self {
        FiveTermExact::new(params).to_f64()
    }

    /// Coefficients multiplying `U(x-1,y), U(x,y), U(x+1,y), U(x,y-1), U(x,y+1)`
    /// in `sum = 0` form.
    pub fn stencil(&self, ix: usize, iy: usize) -> [f64; 5] {
        let ax = self.ax[ix];
        let ay = self.ay[iy];
        [ax[0], ax[1] - ay[1], ax[2], -ay[0], -ay[2]]
    }

    /// `(|residual|, largest |term|)` of the relation at `(ix, iy)` for values
    /// supplied by `u(ix, iy)`; neighbours off the screen count as zero.
    pub fn residual_at(&self, ix: usize, iy: usize, u: impl Fn(usize, usize) -> f64) -> (f64, f64) {
        let n = self.ax.len();
        let get = |i: isize, j: isize| {
            if i < 0 || j < 0 || i as usize >= n || j as usize >= n {
                0.0
            } else {
                u(i as usize, j as usize)
            }
        };
        let (i, j) = (ix as isize, iy as isize);
        let vals = [get(i - 1, j), get(i, j), get(i + 1, j), get(i, j - 1), get(i, j + 1)];
        let c = self.stencil(ix, iy);
        let terms: Vec<f64> = c.iter().zip(&vals).map(|(c, v)| c * v).collect();
        let sum: f64 = terms.iter().sum();
        (sum.abs(), terms.iter().fold(0.0, |m, t| m.max(t.abs())))
    }

    /// Largest relative residual over all points of a screen.
    pub fn max_relative_residual(&self, screen: &Screen) -> f64 {
        let n = screen.side();
        let mut worst = 0.0f64;
        for ix in 0..n {
            for iy in 0..n {
                let (r, scale) = self.residual_at(ix, iy, |i, j| screen.get(i, j));
                if scale > 0.0 {
                    worst = worst.max(r / scale);
                }
            }
        }
        worst
    }
}

/// `round_toward_zero(v * 2^bits)` for an exact `q sqrt(p)`.
pub(crate) fn exact_to_fixed(v: &ExactValue, bits: u32) -> BigInt {
    if v.is_zero() {
        return BigInt::zero();
    }
    let sq = v.square();
    let scaled: BigUint = (sq.numer().magnitude() << (2 * bits as usize)) / sq.denom().magnitude();
    let root = BigInt::from(scaled.sqrt());
    if v.signum() < 0 {
        -root
    } else {
        root
    }
}

pub(crate) fn f64_to_fixed(v: f64, bits: u32) -> BigInt {
    let r = BigRational::from_f64(v).expect("finite value");
    let scaled = r * BigRational::from_integer(BigInt::from(1) << bits as usize);
    scaled.to_integer()
}

/// `v / 2^bits` rounded to the nearest double without intermediate overflow.
pub(crate) fn fixed_to_f64(v: &BigInt, bits: u32) -> f64 {
    let len = v.bits();
    if len == 0 {
        return 0.0;
    }
    let (mant, shift) = if len > 64 { (v >> (len - 64) as usize, (len - 64) as i64) } else { (v.clone(), 0) };
    let m = mant.to_f64().unwrap();
    let e = shift - i64::from(bits);
    let half = (e / 2) as i32;
    m * 2f64.powi(half) * 2f64.powi(e as i32 - half)
}

/// Seed rows for the cross recursion.
#[derive(Clone, Debug)]
pub enum Seed {
    /// The two lowest rows from the exact oracle.
    Exact,
    /// The two lowest rows supplied in double precision (for example from
    /// the three-term method). Precision is then limited by the seeds.
    Rows(Vec<f64>, Vec<f64>),
}

fn seed_defect(r0: &[f64], r1: &[f64]) -> f64 {
    let n0: f64 = r0.iter().map(|v| v * v).sum();
    let n1: f64 = r1.iter().map(|v| v * v).sum();
    let dot: f64 = r0.iter().zip(r1).map(|(a, b)| a * b).sum();
    (n0 - 1.0).abs().max((n1 - 1.0).abs()).max(dot.abs())
}

struct Propagation {
    rows: Vec<Vec<BigInt>>,
    zero_pivots: Vec<TwoJ>,
}

fn propagate(c: &FiveTermExact, seeds: &[Vec<BigInt>; 2], bits: u32, exec: Exec) -> Propagation {
    let p = c.params;
    let n = p.side();
    let fix = |v: &[ExactValue; 3]| v.clone().map(|e| exact_to_fixed(&e, bits));
    let ax: Vec<[BigInt; 3]> = c.ax.iter().map(fix).collect();
    let ay: Vec<[BigInt; 3]> = c.ay.iter().map(fix).collect();
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    rows.extend(seeds.iter().take(n).cloned());
    let mut zero_pivots = Vec::new();
    for r in 1..n.saturating_sub(1) {
        let pivot = &ay[r][2];
        if pivot.is_zero() {
            zero_pivots.push(p.y_at(r));
            let exact = exact_row(&p, r + 1);
            rows.push(exact.iter().map(|v| exact_to_fixed(v, bits)).collect());
            continue;
        }
        let (cur, prev) = (&rows[r], &rows[r - 1]);
        let next = exec.map(n, |ix| {
            let mut acc = (&ax[ix][1] - &ay[r][1]) * &cur[ix] - &ay[r][0] * &prev[ix];
            if ix > 0 {
                acc += &ax[ix][0] * &cur[ix - 1];
            }
            if ix + 1 < n {
                acc += &ax[ix][2] * &cur[ix + 1];
            }
            acc / pivot
        });
        rows.push(next);
    }
    Propagation { rows, zero_pivots }
}

const MAX_DOUBLINGS: u32 = 6;

/// Whole screen from two seed rows via the cross recursion.
pub fn screen_by_2d(params: &ScreenParams, seed: Seed, exec: Exec) -> Result<Screen> {
    let p = *params;
    let n = p.side();
    let c = FiveTermExact::new(&p);
    let mut bits = 64 + 2 * p.kappa2;

    let seed_rows = |bits: u32| -> [Vec<BigInt>; 2] {
        match &seed {
            Seed::Exact => {
                let r0 = exact_row(&p, 0).iter().map(|v| exact_to_fixed(v, bits)).collect();
                let r1 = if n > 1 {
                    exact_row(&p, 1).iter().map(|v| exact_to_fixed(v, bits)).collect()
                } else {
                    Vec::new()
                };
                [r0, r1]
            }
            Seed::Rows(r0, r1) => {
                [r0.iter().map(|&v| f64_to_fixed(v, bits)).collect(), r1.iter().map(|&v| f64_to_fixed(v, bits)).collect()]
            }
        }
    };
    if let Seed::Rows(r0, r1) = &seed {
        if r0.len() != n || (n > 1 && r1.len() != n) {
            return Err(Error::Invalid("seed rows must span the screen".into()));
        }
        let defect = if n > 1 { seed_defect(r0, r1) } else { (r0[0] * r0[0] - 1.0).abs() };
        if defect > 1e-8 {
            return Err(Error::SeedMismatch(defect));
        }
    }

    let to_f64 = |prop: &Propagation, bits: u32| -> Vec<Vec<f64>> {
        prop.rows.iter().map(|r| r.iter().map(|v| fixed_to_f64(v, bits)).collect()).collect()
    };
    let mut doublings = 0;
    let (rows, prop) = loop {
        let prop = propagate(&c, &seed_rows(bits), bits, exec);
        let check = propagate(&c, &seed_rows(bits + 64), bits + 64, exec);
        let a = to_f64(&prop, bits);
        let b = to_f64(&check, bits + 64);
        let diff = a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        if diff <= 1e-15 || doublings == MAX_DOUBLINGS {
            break (b, check);
        }
        bits *= 2;
        doublings += 1;
    };
    let bits = bits + 64;

    let mut screen = Screen::from_rows(p, Method::Recur2d, &rows);
    let residual = c.to_f64().max_relative_residual(&screen);
    let normalized: Vec<Vec<f64>> = rows
        .into_iter()
        .map(|mut r| {
            let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                r.iter_mut().for_each(|v| *v /= norm);
            }
            r
        })
        .collect();
    screen = Screen::from_rows(p, Method::Recur2d, &normalized);
    screen.diagnostics.max_residual = residual;
    screen.diagnostics.precision_bits = bits;
    screen.diagnostics.zero_pivots = prop.zero_pivots.clone();
    screen.diagnostics.fallback_rows = prop.zero_pivots;
    screen.diagnostics.orthonormality_defect = screen.orthonormality_defect(exec);
    Ok(screen)
}
