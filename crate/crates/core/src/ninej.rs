//! 9j symbols and their two-variable recurrence in `(c, d)`.
//!
//! With `{a b c; d e f; g h j}` the recurrence reads
//!
//! ```text
//! A_{c+1}(ab,fj)/((c+1)(2c+1)) N(c+1,d) + A_c(ab,fj)/(c(2c+1)) N(c-1,d)
//!   - A_{d+1}(ef,ag)/((d+1)(2d+1)) N(c,d+1) - A_d(ef,ag)/(d(2d+1)) N(c,d-1)
//!   = [B_d(ag,fe)/(d(d+1)) - B_c(ab,fj)/(c(c+1))] N(c,d)
//! ```
//!
//! with `B_q(pr,st) = [q(q+1) + p(p+1) - r(r+1)][q(q+1) + s(s+1) - t(t+1)]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exact::{sixj_raw, ExactSum, ExactValue};
use crate::exec::Exec;
use crate::recursion::FiveTermCoeffs;
use crate::spin::{triad_ok, ScreenParams, TwoJ};

/// Entries of `{a b c; d e f; g h j}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NineJArgs {
    pub a: TwoJ,
    pub b: TwoJ,
    pub c: TwoJ,
    pub d: TwoJ,
    pub e: TwoJ,
    pub f: TwoJ,
    pub g: TwoJ,
    pub h: TwoJ,
    pub j: TwoJ,
}

impl NineJArgs {
    pub fn from_array(v: [u32; 9]) -> Self {
        let t = v.map(TwoJ);
        NineJArgs { a: t[0], b: t[1], c: t[2], d: t[3], e: t[4], f: t[5], g: t[6], h: t[7], j: t[8] }
    }

    pub fn to_array(self) -> [u32; 9] {
        [self.a, self.b, self.c, self.d, self.e, self.f, self.g, self.h, self.j].map(|t| t.0)
    }

    /// Rows and columns all admissible triads.
    pub fn is_admissible(self) -> bool {
        let [a, b, c, d, e, f, g, h, j] = self.to_array().map(TwoJ);
        triad_ok(a, b, c)
            && triad_ok(d, e, f)
            && triad_ok(g, h, j)
            && triad_ok(a, d, g)
            && triad_ok(b, e, h)
            && triad_ok(c, f, j)
    }

    fn with_cd(self, c: i64, d: i64) -> Option<NineJArgs> {
        let c = u32::try_from(c).ok()?;
        let d = u32::try_from(d).ok()?;
        Some(NineJArgs { c: TwoJ(c), d: TwoJ(d), ..self })
    }
}

/// Exact 9j as a sum of signed square roots, from the contraction
/// `sum_k (-1)^(2k) (2k+1) {a d g; h j k} {b e h; d k f} {c f j; k a b}`.
pub fn ninej_exact(args: NineJArgs) -> ExactSum {
    let [a, b, c, d, e, f, g, h, j] = args.to_array();
    let mut sum = ExactSum::new();
    if !args.is_admissible() {
        return sum;
    }
    let lo = a.abs_diff(j).max(d.abs_diff(h)).max(b.abs_diff(f));
    let hi = (a + j).min(d + h).min(b + f);
    let mut k = lo;
    while k <= hi {
        let s1 = sixj_raw([a, d, g, h, j, k]);
        let s2 = sixj_raw([b, e, h, d, k, f]);
        let s3 = sixj_raw([c, f, j, k, a, b]);
        let mut term = &(&s1 * &s2) * &s3;
        if !term.is_zero() {
            term = &term * &ExactValue::from_int(i64::from(k) + 1);
            if k % 2 == 1 {
                term = -term;
            }
            sum.add(&term);
        }
        k += 2;
    }
    sum
}

/// 9j value in double precision; zero when inadmissible.
pub fn ninej_oracle(args: NineJArgs) -> f64 {
    ninej_exact(args).to_f64()
}

/// `A_q(pr,st)` and `B_q(pr,st)` of the recurrence, in j units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceCoeffs9j {
    pub a: f64,
    pub b: f64,
}

/// `[(-p+r+q)(p-r+q)(p+r-q+1)(p+r+q+1)]^(1/2) [(same in s,t)]^(1/2)`; zero
/// when either radicand is negative, which only happens next to an
/// inadmissible symbol.
pub fn coeff_a(q: f64, p: f64, r: f64, s: f64, t: f64) -> f64 {
    let v1 = (-p + r + q) * (p - r + q) * (p + r - q + 1.0) * (p + r + q + 1.0);
    let v2 = (-s + t + q) * (s - t + q) * (s + t - q + 1.0) * (s + t + q + 1.0);
    if v1 < 0.0 || v2 < 0.0 {
        return 0.0;
    }
    v1.sqrt() * v2.sqrt()
}

pub fn coeff_b(q: f64, p: f64, r: f64, s: f64, t: f64) -> f64 {
    let qq = q * (q + 1.0);
    (qq + p * (p + 1.0) - r * (r + 1.0)) * (qq + s * (s + 1.0) - t * (t + 1.0))
}

pub fn ninej_coeffs(q: f64, p: f64, r: f64, s: f64, t: f64) -> RecurrenceCoeffs9j {
    RecurrenceCoeffs9j { a: coeff_a(q, p, r, s, t), b: coeff_b(q, p, r, s, t) }
}

/// Coefficients of `N(c-1,d), N(c,d), N(c+1,d), N(c,d-1), N(c,d+1)` in
/// `sum = 0` form. Needs `c, d > 0`.
pub fn stencil_coeffs(args: NineJArgs) -> [f64; 5] {
    let [a, b, c, d, e, f, g, _, j] = args.to_array().map(|t| f64::from(t) / 2.0);
    [
        coeff_a(c, a, b, f, j) / (c * (2.0 * c + 1.0)),
        -(coeff_b(d, a, g, f, e) / (d * (d + 1.0)) - coeff_b(c, a, b, f, j) / (c * (c + 1.0))),
        coeff_a(c + 1.0, a, b, f, j) / ((c + 1.0) * (2.0 * c + 1.0)),
        -coeff_a(d, e, f, a, g) / (d * (2.0 * d + 1.0)),
        -coeff_a(d + 1.0, e, f, a, g) / ((d + 1.0) * (2.0 * d + 1.0)),
    ]
}

/// Residual of the recurrence at a stencil centre.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NineJResidual {
    pub residual: f64,
    pub max_term: f64,
}

impl NineJResidual {
    /// `residual / max_term`, zero when every term vanishes.
    pub fn relative(&self) -> f64 {
        if self.max_term == 0.0 {
            0.0
        } else {
            self.residual / self.max_term
        }
    }
}

pub fn ninej_residual(args: NineJArgs) -> NineJResidual {
    let (c, d) = (i64::from(args.c.0), i64::from(args.d.0));
    let value = |c: i64, d: i64| args.with_cd(c, d).map_or(0.0, ninej_oracle);
    let vals = [value(c - 2, d), value(c, d), value(c + 2, d), value(c, d - 2), value(c, d + 2)];
    let coeffs = stencil_coeffs(args);
    let terms: Vec<f64> = coeffs.iter().zip(&vals).map(|(k, v)| k * v).collect();
    NineJResidual {
        residual: terms.iter().sum::<f64>().abs(),
        max_term: terms.iter().fold(0.0, |m, t| m.max(t.abs())),
    }
}

/// Which stencils a random sweep draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StencilFilter {
    /// Largest TwoJ value of any entry.
    pub max_two_j: u32,
    /// Pin `h` to this TwoJ value.
    pub two_h: Option<u32>,
    pub count: usize,
    pub seed: u64,
}

impl Default for StencilFilter {
    fn default() -> Self {
        StencilFilter { max_two_j: 12, two_h: None, count: 100, seed: 0x9e37_79b9 }
    }
}

const DRAWS_PER_STENCIL: usize = 200_000;

/// Random admissible stencil centres with `c, d >= 1`. Fewer than
/// `filter.count` come back when admissible draws are rare, none when the
/// filter admits nothing.
pub fn random_stencils(filter: &StencilFilter) -> Vec<NineJArgs> {
    let mut rng = ChaCha8Rng::seed_from_u64(filter.seed);
    let mut out = Vec::with_capacity(filter.count);
    let budget = DRAWS_PER_STENCIL.saturating_mul(filter.count.max(1));
    for _ in 0..budget {
        if out.len() >= filter.count {
            break;
        }
        let mut v: [u32; 9] = std::array::from_fn(|_| rng.gen_range(0..=filter.max_two_j));
        if let Some(h) = filter.two_h {
            v[7] = h;
        }
        let args = NineJArgs::from_array(v);
        if args.c.0 >= 2 && args.d.0 >= 2 && args.is_admissible() {
            out.push(args);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub stencils: usize,
    pub max_relative_residual: f64,
    pub worst: Option<NineJArgs>,
}

pub fn residual_sweep(stencils: &[NineJArgs], exec: Exec) -> SweepReport {
    let res = exec.map(stencils.len(), |i| ninej_residual(stencils[i]).relative());
    let (worst, max) = res
        .iter()
        .enumerate()
        .fold((None, 0.0f64), |(w, m), (i, &r)| if r > m { (Some(stencils[i]), r) } else { (w, m) });
    SweepReport { stencils: stencils.len(), max_relative_residual: max, worst }
}

/// The 9j of a screen point with `h = 0`:
/// `{a b x; c d y} -> {a b x; y b c; d 0 d}`.
pub fn reduced_args(params: &ScreenParams, x: TwoJ, y: TwoJ) -> NineJArgs {
    let p = params;
    NineJArgs { a: p.a, b: p.b, c: x, d: y, e: p.b, f: p.c, g: p.d, h: TwoJ(0), j: p.d }
}

/// Comparison of the `h = 0` recurrence with the screen's cross recursion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub params: ScreenParams,
    pub stencils: usize,
    /// Stencils whose coefficients vanish on both sides, or with `x = 0` or
    /// `y = 0` where the recurrence is undefined.
    pub skipped: usize,
    /// Largest `|r_k / r_ref - 1|` over coefficient ratios of a stencil.
    pub max_ratio_deviation: f64,
}

/// Map every stencil of the screen to the `h = 0` recurrence and check the
/// two coefficient vectors are proportional. Neighbours off the screen carry
/// zero coefficients on both sides. The 9j of a screen
/// point equals `U / sqrt((2x+1)(2y+1))` times a phase that is constant over
/// a stencil, so the mapped coefficients carry that normalization.
pub fn reduction_check(params: &ScreenParams, exec: Exec) -> ReductionReport {
    let five = FiveTermCoeffs::new(params);
    let n = params.side();
    let inner: Vec<(usize, usize)> = (0..n).flat_map(|ix| (0..n).map(move |iy| (ix, iy))).collect();
    let per = exec.map(inner.len(), |k| {
        let (ix, iy) = inner[k];
        let (x, y) = (params.x_at(ix), params.y_at(iy));
        if x.0 == 0 || y.0 == 0 {
            return None;
        }
        let (cx, dy) = (x.j(), y.j());
        let norm = |c: f64, d: f64| 1.0 / ((2.0 * c + 1.0) * (2.0 * d + 1.0)).sqrt();
        let raw = stencil_coeffs(reduced_args(params, x, y));
        let scale = [norm(cx - 1.0, dy), norm(cx, dy), norm(cx + 1.0, dy), norm(cx, dy - 1.0), norm(cx, dy + 1.0)];
        let nine: Vec<f64> = raw.iter().zip(&scale).map(|(r, s)| r * s).collect();
        let six = five.stencil(ix, iy);
        let tiny = 1e-13 * six.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tiny9 = 1e-13 * nine.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut ratios = Vec::new();
        for (u, v) in nine.iter().zip(&six) {
            match (u.abs() > tiny9, v.abs() > tiny) {
                (true, true) => ratios.push(u / v),
                (false, false) => {}
                _ => return Some(f64::INFINITY),
            }
        }
        let r0 = *ratios.first()?;
        Some(ratios.iter().fold(0.0f64, |m, r| m.max((r / r0 - 1.0).abs())))
    });
    let skipped = per.iter().filter(|r| r.is_none()).count();
    ReductionReport {
        params: *params,
        stencils: per.len() - skipped,
        skipped,
        max_ratio_deviation: per.iter().flatten().fold(0.0, |m, &r| m.max(r)),
    }
}
