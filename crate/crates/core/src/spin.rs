//! Half-integer angular-momentum bookkeeping: triads, screen ranges, the
//! classical/Regge symmetry orbit of a screen and its canonical form.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Twice an angular momentum. `TwoJ(3)` is spin 3/2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TwoJ(pub u32);

impl TwoJ {
    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    /// The angular momentum itself, `j = value / 2`.
    #[inline]
    pub fn j(self) -> f64 {
        f64::from(self.0) * 0.5
    }

    /// Geometric edge length `j + 1/2`.
    #[inline]
    pub fn edge(self) -> f64 {
        self.j() + 0.5
    }

    /// `(-1)^(2j)`.
    #[inline]
    pub fn phase_2j(self) -> i32 {
        if self.0.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for TwoJ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_multiple_of(2) {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl From<u32> for TwoJ {
    fn from(v: u32) -> Self {
        TwoJ(v)
    }
}

/// `|a-b| <= c <= a+b` with `a+b+c` even, all in TwoJ units.
#[inline]
pub fn triad_ok(a: TwoJ, b: TwoJ, c: TwoJ) -> bool {
    let (a, b, c) = (a.0, b.0, c.0);
    a.abs_diff(b) <= c && c <= a + b && (a + b + c) % 2 == 0
}

/// The six entries of `{a b x; c d y}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SixJArgs {
    pub a: TwoJ,
    pub b: TwoJ,
    pub x: TwoJ,
    pub c: TwoJ,
    pub d: TwoJ,
    pub y: TwoJ,
}

impl SixJArgs {
    /// `{j1 j2 j3; j4 j5 j6}` from raw TwoJ values in reading order.
    pub fn from_array(v: [u32; 6]) -> Self {
        SixJArgs {
            a: TwoJ(v[0]),
            b: TwoJ(v[1]),
            x: TwoJ(v[2]),
            c: TwoJ(v[3]),
            d: TwoJ(v[4]),
            y: TwoJ(v[5]),
        }
    }

    pub fn to_array(self) -> [u32; 6] {
        [self.a.0, self.b.0, self.x.0, self.c.0, self.d.0, self.y.0]
    }

    /// All four triads `(a,b,x) (c,d,x) (a,d,y) (b,c,y)` admissible.
    pub fn is_admissible(self) -> bool {
        triad_ok(self.a, self.b, self.x)
            && triad_ok(self.c, self.d, self.x)
            && triad_ok(self.a, self.d, self.y)
            && triad_ok(self.b, self.c, self.y)
    }
}

/// Fixed parameters of a screen and the derived lattice.
///
/// `kappa2` is the common width `x_max - x_min = y_max - y_min` in TwoJ units
/// (that is, the TwoJ value of 2κ). The screen side is `kappa2 / 2 + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScreenParams {
    pub a: TwoJ,
    pub b: TwoJ,
    pub c: TwoJ,
    pub d: TwoJ,
    pub x_min: TwoJ,
    pub x_max: TwoJ,
    pub y_min: TwoJ,
    pub y_max: TwoJ,
    pub kappa2: u32,
    /// Half-sum `(a+b+c+d)/2`, TwoJ units.
    pub s: TwoJ,
}

impl ScreenParams {
    pub fn new(a: u32, b: u32, c: u32, d: u32) -> Result<Self> {
        screen_ranges(TwoJ(a), TwoJ(b), TwoJ(c), TwoJ(d))
    }

    /// Number of lattice points along each side.
    #[inline]
    pub fn side(&self) -> usize {
        (self.kappa2 / 2) as usize + 1
    }

    #[inline]
    pub fn x_at(&self, ix: usize) -> TwoJ {
        TwoJ(self.x_min.0 + 2 * ix as u32)
    }

    #[inline]
    pub fn y_at(&self, iy: usize) -> TwoJ {
        TwoJ(self.y_min.0 + 2 * iy as u32)
    }

    pub fn x_index(&self, x: TwoJ) -> Option<usize> {
        lattice_index(x, self.x_min, self.x_max)
    }

    pub fn y_index(&self, y: TwoJ) -> Option<usize> {
        lattice_index(y, self.y_min, self.y_max)
    }

    pub fn contains(&self, x: TwoJ, y: TwoJ) -> bool {
        self.x_index(x).is_some() && self.y_index(y).is_some()
    }

    pub fn sixj_args(&self, x: TwoJ, y: TwoJ) -> SixJArgs {
        SixJArgs { a: self.a, b: self.b, x, c: self.c, d: self.d, y }
    }

    pub fn quadruple(&self) -> [u32; 4] {
        [self.a.0, self.b.0, self.c.0, self.d.0]
    }

    /// Screen of the Regge-conjugate parameters.
    pub fn regge(&self) -> Result<ScreenParams> {
        let [a, b, c, d] = regge_conjugate(self.a, self.b, self.c, self.d)?;
        screen_ranges(a, b, c, d)
    }
}

fn lattice_index(v: TwoJ, lo: TwoJ, hi: TwoJ) -> Option<usize> {
    if v < lo || v > hi || !(v.0 - lo.0).is_multiple_of(2) {
        None
    } else {
        Some(((v.0 - lo.0) / 2) as usize)
    }
}

/// Ranges of `x` and `y` for fixed `(a, b, c, d)`.
pub fn screen_ranges(a: TwoJ, b: TwoJ, c: TwoJ, d: TwoJ) -> Result<ScreenParams> {
    let empty = || Error::EmptyScreen(a.0, b.0, c.0, d.0);
    let sum = a.0 + b.0 + c.0 + d.0;
    if !sum.is_multiple_of(2) {
        return Err(empty());
    }
    let x_min = a.0.abs_diff(b.0).max(c.0.abs_diff(d.0));
    let x_max = (a.0 + b.0).min(c.0 + d.0);
    let y_min = a.0.abs_diff(d.0).max(b.0.abs_diff(c.0));
    let y_max = (a.0 + d.0).min(b.0 + c.0);
    if x_min > x_max || y_min > y_max {
        return Err(empty());
    }
    // Both ranges have the same width; the parity of the sum forces it even.
    debug_assert_eq!(x_max - x_min, y_max - y_min);
    Ok(ScreenParams {
        a,
        b,
        c,
        d,
        x_min: TwoJ(x_min),
        x_max: TwoJ(x_max),
        y_min: TwoJ(y_min),
        y_max: TwoJ(y_max),
        kappa2: x_max - x_min,
        s: TwoJ(sum / 2),
    })
}

/// `(s-a, s-b, s-c, s-d)` with `s` the half-sum.
pub fn regge_conjugate(a: TwoJ, b: TwoJ, c: TwoJ, d: TwoJ) -> Result<[TwoJ; 4]> {
    let sum = a.0 + b.0 + c.0 + d.0;
    if !sum.is_multiple_of(2) {
        return Err(Error::Parity(sum));
    }
    let s = sum / 2;
    let mut out = [TwoJ(0); 4];
    for (o, v) in out.iter_mut().zip([a, b, c, d]) {
        if v.0 > s {
            return Err(Error::Invalid(format!(
                "Regge partner of ({a}, {b}, {c}, {d}) has a negative entry"
            )));
        }
        *o = TwoJ(s - v.0);
    }
    Ok(out)
}

/// Classical symmetries that keep `x` and `y` in place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassicalPerm {
    /// `(a, b, c, d)`
    Identity,
    /// `(b, a, d, c)`
    SwapColumns,
    /// `(d, c, b, a)`
    CrossFlip,
    /// `(c, d, a, b)`
    RowFlip,
}

impl ClassicalPerm {
    pub const ALL: [ClassicalPerm; 4] = [
        ClassicalPerm::Identity,
        ClassicalPerm::SwapColumns,
        ClassicalPerm::CrossFlip,
        ClassicalPerm::RowFlip,
    ];

    pub fn apply<T: Copy>(self, [a, b, c, d]: [T; 4]) -> [T; 4] {
        match self {
            ClassicalPerm::Identity => [a, b, c, d],
            ClassicalPerm::SwapColumns => [b, a, d, c],
            ClassicalPerm::CrossFlip => [d, c, b, a],
            ClassicalPerm::RowFlip => [c, d, a, b],
        }
    }
}

/// Canonical representative of a screen's symmetry orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub params: ScreenParams,
    pub regge_applied: bool,
    pub permutation: ClassicalPerm,
    /// `{a b x; c d y} -> {a d y; c b x}` was used to get `b <= d`.
    pub xy_swapped: bool,
}

impl CanonicalForm {
    /// Where a point `(x, y)` of the original screen lands on the canonical one.
    pub fn map_point(&self, x: TwoJ, y: TwoJ) -> (TwoJ, TwoJ) {
        if self.xy_swapped {
            (y, x)
        } else {
            (x, y)
        }
    }
}

/// Reduce `(a, b, c, d)` to canonical form: smallest entry of the set and its
/// Regge transform in the `a` slot, then `a <= b <= d`.
///
/// Ties prefer the non-Regge set, then the lexicographically smallest
/// quadruple.
pub fn canonicalize(a: TwoJ, b: TwoJ, c: TwoJ, d: TwoJ) -> Result<CanonicalForm> {
    screen_ranges(a, b, c, d)?;
    let orig = [a, b, c, d];
    let regge = regge_conjugate(a, b, c, d)?;
    let min_orig = *orig.iter().min().unwrap();
    let min_regge = *regge.iter().min().unwrap();
    let (set, regge_applied) = if min_orig <= min_regge { (orig, false) } else { (regge, true) };
    let m = min_orig.min(min_regge);

    let mut best: Option<([TwoJ; 4], ClassicalPerm, bool)> = None;
    for perm in ClassicalPerm::ALL {
        let p = perm.apply(set);
        for swap in [false, true] {
            let q = if swap { [p[0], p[3], p[2], p[1]] } else { p };
            if q[0] != m || !(q[0] <= q[1] && q[1] <= q[3]) {
                continue;
            }
            if best.as_ref().is_none_or(|(bq, _, _)| q < *bq) {
                best = Some((q, perm, swap));
            }
        }
    }
    let (q, permutation, xy_swapped) = best.expect("minimum can always be moved to the a slot");
    Ok(CanonicalForm {
        params: screen_ranges(q[0], q[1], q[2], q[3])?,
        regge_applied,
        permutation,
        xy_swapped,
    })
}

/// Membership test for the canonical `c` range, read as
/// `min(lo, hi) <= c <= max(lo, hi)` with bounds `d - a + b` and `d + a - b`.
pub fn canonical_c_in_range(a: TwoJ, b: TwoJ, c: TwoJ, d: TwoJ) -> bool {
    let lo = i64::from(d.0) - i64::from(a.0) + i64::from(b.0);
    let hi = i64::from(d.0) + i64::from(a.0) - i64::from(b.0);
    let c = i64::from(c.0);
    lo.min(hi) <= c && c <= lo.max(hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(v: u32) -> TwoJ {
        TwoJ(v)
    }

    #[test]
    fn triad_examples() {
        assert!(!triad_ok(t(2), t(2), t(6)));
        assert!(triad_ok(t(2), t(2), t(4)));
        assert!(!triad_ok(t(1), t(1), t(1)));
        assert!(triad_ok(t(1), t(1), t(2)));
    }

    #[test]
    fn mid_size_ranges() {
        let p = ScreenParams::new(60, 90, 120, 110).unwrap();
        assert_eq!((p.x_min, p.x_max), (t(30), t(150)));
        assert_eq!((p.y_min, p.y_max), (t(50), t(170)));
        assert_eq!(p.kappa2, 120);
        assert_eq!(p.side(), 61);
        assert_eq!(p.s, t(190));
    }

    #[test]
    fn symmetric_and_large_ranges() {
        for tj in 0..10 {
            let p = ScreenParams::new(tj, tj, tj, tj).unwrap();
            assert_eq!((p.x_min, p.x_max), (t(0), t(2 * tj)));
            assert_eq!(p.side(), tj as usize + 1);
        }
        assert_eq!(ScreenParams::new(600, 900, 1200, 1100).unwrap().side(), 601);
    }

    #[test]
    fn empty_and_parity() {
        assert!(matches!(ScreenParams::new(1, 2, 2, 2), Err(Error::EmptyScreen(..))));
        assert!(matches!(ScreenParams::new(0, 10, 0, 2), Err(Error::EmptyScreen(..))));
        assert!(matches!(regge_conjugate(t(1), t(0), t(0), t(0)), Err(Error::Parity(1))));
    }

    #[test]
    fn regge_examples() {
        assert_eq!(regge_conjugate(t(60), t(90), t(120), t(110)).unwrap(), [t(130), t(100), t(70), t(80)]);
        assert_eq!(regge_conjugate(t(8), t(8), t(8), t(8)).unwrap(), [t(8); 4]);
    }

    #[test]
    fn canonical_examples() {
        let c = canonicalize(t(60), t(90), t(120), t(110)).unwrap();
        assert_eq!(c.params.quadruple(), [60, 90, 120, 110]);
        assert!(!c.xy_swapped && !c.regge_applied);

        let c = canonicalize(t(120), t(110), t(60), t(90)).unwrap();
        assert_eq!(c.params.quadruple(), [60, 90, 120, 110]);
        assert!(!c.xy_swapped);

        let c = canonicalize(t(120), t(90), t(60), t(110)).unwrap();
        assert_eq!(c.params.quadruple(), [60, 90, 120, 110]);
        assert!(c.xy_swapped);
        assert_eq!(c.map_point(t(40), t(70)), (t(70), t(40)));
    }

    #[test]
    fn canonical_regge_side() {
        let c = canonicalize(t(10), t(12), t(14), t(16)).unwrap();
        // s = 26 -> Regge set (16, 14, 12, 10): same minimum 10, non-Regge preferred.
        assert!(!c.regge_applied);
        let c = canonicalize(t(20), t(20), t(20), t(4)).unwrap();
        // s = 32 -> (12, 12, 12, 28); min 4 stays in the original set.
        assert!(!c.regge_applied);
        assert_eq!(c.params.a, t(4));
        let c = canonicalize(t(20), t(22), t(24), t(26)).unwrap();
        // s = 46 -> (26, 24, 22, 20)
        assert!(!c.regge_applied);
        let c = canonicalize(t(30), t(30), t(30), t(34)).unwrap();
        // s = 62 -> (32, 32, 32, 28): Regge minimum 28 < 30
        assert!(c.regge_applied);
        assert_eq!(c.params.a, t(28));
    }

    #[test]
    fn canonical_c_range_reading() {
        // bounds 80 and 140
        assert!(canonical_c_in_range(t(60), t(90), t(120), t(110)));
        assert!(!canonical_c_in_range(t(60), t(90), t(200), t(110)));
    }

    fn valid_quadruple() -> impl Strategy<Value = [u32; 4]> {
        (0u32..40, 0u32..40, 0u32..40, 0u32..40)
            .prop_filter_map("screen must be nonempty", |(a, b, c, d)| {
                let q = [a, b, c, d];
                ScreenParams::new(a, b, c, d).ok().map(|_| q)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn width_is_twice_min(q in valid_quadruple()) {
            let p = ScreenParams::new(q[0], q[1], q[2], q[3]).unwrap();
            prop_assert_eq!(p.x_max.0 - p.x_min.0, p.y_max.0 - p.y_min.0);
            let s = p.s.0;
            let m = q.iter().chain(q.map(|v| s - v).iter()).copied().min().unwrap();
            prop_assert_eq!(p.kappa2, 2 * m);
        }

        #[test]
        fn regge_is_involution_and_keeps_ranges(q in valid_quadruple()) {
            let [a, b, c, d] = q.map(TwoJ);
            let r = regge_conjugate(a, b, c, d).unwrap();
            prop_assert_eq!(regge_conjugate(r[0], r[1], r[2], r[3]).unwrap(), [a, b, c, d]);
            let p = screen_ranges(a, b, c, d).unwrap();
            let pr = screen_ranges(r[0], r[1], r[2], r[3]).unwrap();
            prop_assert_eq!((p.x_min, p.x_max, p.y_min, p.y_max), (pr.x_min, pr.x_max, pr.y_min, pr.y_max));
        }

        #[test]
        fn canonical_is_ordered_and_idempotent(q in valid_quadruple()) {
            let [a, b, c, d] = q.map(TwoJ);
            let cf = canonicalize(a, b, c, d).unwrap();
            let p = cf.params;
            prop_assert!(p.a <= p.b && p.b <= p.d);
            let s = p.s.0;
            let m = p.quadruple().iter().chain(p.quadruple().map(|v| s - v).iter()).copied().min().unwrap();
            prop_assert_eq!(p.a.0, m);
            let again = canonicalize(p.a, p.b, p.c, p.d).unwrap();
            prop_assert_eq!(again.params, p);
            prop_assert!(!again.xy_swapped && !again.regge_applied);
            prop_assert_eq!(p.kappa2, screen_ranges(a, b, c, d).unwrap().kappa2);
        }
    }
}
