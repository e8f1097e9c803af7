//! Closed forms for 6j symbols with one entry equal to 1.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::primes::PrimeFactors;
use super::value::ExactValue;
use crate::error::{Error, Result};
use crate::spin::{SixJArgs, TwoJ};

/// `sign * (num / den) * sqrt(prod rad_num / prod rad_den)`.
#[derive(Clone, Debug, PartialEq)]
struct UnitForm {
    sign: i32,
    num: i64,
    den: i64,
    rad_num: Vec<u64>,
    rad_den: Vec<u64>,
}

impl UnitForm {
    fn zero() -> Self {
        UnitForm { sign: 0, num: 0, den: 1, rad_num: vec![], rad_den: vec![] }
    }

    fn exact(&self) -> ExactValue {
        if self.sign == 0 || self.num == 0 || self.rad_num.contains(&0) {
            return ExactValue::zero();
        }
        let mut rad = PrimeFactors::new();
        for &n in &self.rad_num {
            rad.mul_int(n, 1);
        }
        for &d in &self.rad_den {
            rad.mul_int(d, -1);
        }
        let coeff = BigRational::new(BigInt::from(self.num), BigInt::from(self.den));
        ExactValue::from_factored(self.sign, coeff, &rad)
    }

    fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let n: f64 = self.rad_num.iter().map(|&v| v as f64).product();
        let d: f64 = self.rad_den.iter().map(|&v| v as f64).product();
        f64::from(self.sign) * (self.num as f64 / self.den as f64) * (n / d).sqrt()
    }
}

/// The 24 images of `{j1 j2 j3; j4 j5 j6}` under column permutations and
/// upper/lower exchange in pairs of columns. The 6j symbol is invariant
/// under all of them.
fn images(j: [u32; 6]) -> impl Iterator<Item = [u32; 6]> {
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    const FLIPS: [[bool; 3]; 4] = [[false; 3], [true, true, false], [true, false, true], [false, true, true]];
    PERMS.into_iter().flat_map(move |p| {
        FLIPS.into_iter().map(move |f| {
            let mut out = [0; 6];
            for (col, (&src, &flip)) in p.iter().zip(&f).enumerate() {
                let (up, lo) = (j[src], j[src + 3]);
                let (up, lo) = if flip { (lo, up) } else { (up, lo) };
                out[col] = up;
                out[col + 3] = lo;
            }
            out
        })
    })
}

/// Closed form for `{a b c; 1 c' b'}`, when `(c' - c, b' - b)` is one of the
/// four tabulated shapes. All arguments in TwoJ units.
fn tabulated(ta: u32, tb: u32, tc: u32, tc2: u32, tb2: u32) -> Option<UnitForm> {
    let (a, b, c) = (u64::from(ta), u64::from(tb), u64::from(tc));
    let s = (a + b + c) / 2;
    let sign = if s % 2 == 0 { 1 } else { -1 };
    let dc = i64::from(tc2) - i64::from(tc);
    let db = i64::from(tb2) - i64::from(tb);
    let form = match (dc, db) {
        (-2, -2) => UnitForm {
            sign,
            num: 1,
            den: 1,
            rad_num: vec![s, s + 1, s - a - 1, s - a],
            rad_den: vec![b - 1, b, b + 1, c - 1, c, c + 1],
        },
        (-2, 0) => UnitForm {
            sign,
            num: 1,
            den: 1,
            rad_num: vec![2, s + 1, s - a, s - b, s + 1 - c],
            rad_den: vec![b, b + 1, b + 2, c - 1, c, c + 1],
        },
        (-2, 2) => UnitForm {
            sign,
            num: 1,
            den: 1,
            rad_num: vec![s - b - 1, s - b, s + 1 - c, s + 2 - c],
            rad_den: vec![b + 1, b + 2, b + 3, c - 1, c, c + 1],
        },
        (0, 0) => {
            // 2 [b(b+1) + c(c+1) - a(a+1)] in j units, times 4
            let x4 = (b * (b + 2) + c * (c + 2)) as i64 - (a * (a + 2)) as i64;
            UnitForm {
                sign: -sign * x4.signum() as i32,
                num: x4.abs(),
                den: 2,
                rad_num: vec![1],
                rad_den: vec![b, b + 1, b + 2, c, c + 1, c + 2],
            }
        }
        _ => return None,
    };
    Some(form)
}

fn unit_form(args: SixJArgs) -> Result<UnitForm> {
    let j = args.to_array();
    if !j.contains(&2) {
        return Err(Error::Pattern(j));
    }
    if !args.is_admissible() {
        return Ok(UnitForm::zero());
    }
    for [ja, jb, jc, j1, jc2, jb2] in images(j) {
        if j1 != 2 {
            continue;
        }
        // a zero in a denominator means a degenerate triad, excluded above
        if let Some(f) = tabulated(ja, jb, jc, jc2, jb2) {
            debug_assert!(f.rad_den.iter().all(|&d| d > 0));
            return Ok(f);
        }
    }
    Err(Error::Pattern(j))
}

/// Exact 6j symbol with one entry equal to 1 (TwoJ 2), from closed forms.
///
/// Returns zero for inadmissible arguments and [`Error::Pattern`] when no
/// entry equals 1.
pub fn sixj_unit(args: SixJArgs) -> Result<ExactValue> {
    unit_form(args).map(|f| f.exact())
}

/// Double-precision version of [`sixj_unit`].
pub fn sixj_unit_f64(args: SixJArgs) -> Result<f64> {
    unit_form(args).map(|f| f.to_f64())
}

/// `{b x' a; 1 a x}` for `x' = x + shift`, shift in `{-2, 0, 2}` (TwoJ).
/// Zero when `x'` would be negative.
pub fn unit_pattern(b: TwoJ, x: TwoJ, a: TwoJ, shift: i32) -> SixJArgs {
    let xp = i64::from(x.0) + i64::from(shift);
    // a negative x' is encoded as an inadmissible triad
    let xp = if xp < 0 { u32::MAX / 4 } else { xp as u32 };
    SixJArgs { a: b, b: TwoJ(xp), x: a, c: TwoJ(2), d: a, y: x }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::racah::sixj_raw;
    use proptest::prelude::*;

    #[test]
    fn images_are_distinct_symmetries() {
        let j = [1, 2, 3, 4, 5, 6];
        let all: std::collections::BTreeSet<_> = images(j).collect();
        assert_eq!(all.len(), 24);
        let j = [4, 6, 6, 4, 2, 4];
        let v = sixj_raw(j);
        assert!(!v.is_zero());
        for im in images(j) {
            assert_eq!(sixj_raw(im), v);
        }
    }

    #[test]
    fn pattern_error_without_unit_entry() {
        assert!(matches!(sixj_unit(SixJArgs::from_array([4, 4, 4, 4, 4, 4])), Err(Error::Pattern(_))));
    }

    #[test]
    fn small_example_matches_oracle() {
        // {b x-1 a; 1 a x} with (a, b, x) = (1, 1, 1)
        let args = unit_pattern(TwoJ(2), TwoJ(2), TwoJ(2), -2);
        assert_eq!(sixj_unit(args).unwrap(), sixj_raw(args.to_array()));
        assert!(!sixj_unit(args).unwrap().is_zero());
    }

    #[test]
    fn inadmissible_is_zero() {
        let args = SixJArgs::from_array([2, 10, 2, 2, 2, 2]);
        assert!(sixj_unit(args).unwrap().is_zero());
        assert_eq!(sixj_unit_f64(args).unwrap(), 0.0);
        let neg = unit_pattern(TwoJ(4), TwoJ(0), TwoJ(4), -2);
        assert!(sixj_unit(neg).unwrap().is_zero());
    }

    #[test]
    fn every_shape_reached() {
        // all nine (dc, db) combinations of {a b c; 1 c' b'}
        for dc in [-2i32, 0, 2] {
            for db in [-2i32, 0, 2] {
                let (a, b, c) = (6u32, 9u32, 7u32);
                let args = SixJArgs::from_array([a, b, c, 2, (c as i32 + dc) as u32, (b as i32 + db) as u32]);
                assert!(args.is_admissible());
                assert_eq!(sixj_unit(args).unwrap(), sixj_raw(args.to_array()), "{dc} {db}");
            }
        }
    }

    fn unit_args() -> impl Strategy<Value = SixJArgs> {
        (0u32..60, 0u32..60, 0u32..60, 0usize..3, 0usize..6).prop_map(|(a, b, x, k, pos)| {
            let args = unit_pattern(TwoJ(b), TwoJ(x), TwoJ(a), [-2, 0, 2][k]);
            let mut v = args.to_array();
            // move the unit entry around with a symmetry image
            let im: Vec<_> = images(v).collect();
            v = im[pos * 4 % im.len()];
            SixJArgs::from_array(v)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(400))]

        #[test]
        fn closed_forms_equal_racah_sum(args in unit_args()) {
            let exact = sixj_raw(args.to_array());
            let unit = sixj_unit(args).unwrap();
            prop_assert_eq!(&unit, &exact);
            let f = sixj_unit_f64(args).unwrap();
            prop_assert!((f - exact.to_f64()).abs() <= 1e-14 * exact.to_f64().abs().max(1e-300));
        }
    }
}
