//! Discrete WKB picture of a screen row: local momentum, Bohr-Sommerfeld
//! action, dihedral angles and the Ponzano-Regge amplitude.
//!
//! Dihedral angles are exterior angles (angle between outward face normals),
//! the convention in which `cos theta3` from [`crate::geometry::cos_theta3`]
//! and the Ponzano-Regge phase are written. A regular tetrahedron has
//! exterior angles `arccos(-1/3)`; [`DihedralAngles::interior`] gives the
//! supplements.

use std::f64::consts::{FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{adjacent_faces, cos_dihedral, cos_theta3, volume_sq, Edge, Tetrahedron, XPrime};
use crate::screen::Screen;
use crate::spin::{ScreenParams, TwoJ};

/// `|cos theta3|` above which a point counts as close to a caustic.
pub const CAUSTIC_BAND: f64 = 0.9;
/// `|cos theta3|` at or below which a point counts as interior.
pub const INTERIOR_BAND: f64 = 0.5;
/// Points with `|exact| <` this fraction of the local envelope sit near a
/// node of the oscillation and are left out of relative-error statistics.
pub const NODE_EXCLUSION: f64 = 0.05;

/// `sqrt(2 - 2 cos)`, or `None` when the radicand is negative.
pub fn momentum_from_cos(cos: f64) -> Option<f64> {
    let p2 = 2.0 - 2.0 * cos;
    (p2 >= 0.0).then(|| p2.sqrt())
}

/// Local momentum at a screen point (positive branch).
pub fn local_momentum(x: TwoJ, y: TwoJ, params: &ScreenParams) -> Result<f64> {
    if !params.contains(x, y) {
        return Err(Error::OutsideDomain);
    }
    let cos = cos_theta3(&Tetrahedron::at(params, x, y), XPrime::default()).map_err(|_| Error::OutsideDomain)?;
    momentum_from_cos(cos).ok_or(Error::OutsideDomain)
}

/// Action of one screen row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BohrSommerfeld {
    pub y: TwoJ,
    /// Integral of `Re theta3` along the whole row: `arccos(cos theta3)` in
    /// the classical window, `pi` where `cos theta3 < -1` (alternating
    /// decay) and `0` where `cos theta3 > 1`.
    pub action: f64,
    /// `action / pi - 1/2`, the number of sign changes expected along the
    /// row.
    pub n_estimate: f64,
    /// `2 * integral of sqrt(2 - 2 cos theta3)` over the same window.
    pub chord_action: f64,
    /// Fractional window ends in shifted `X`.
    pub window: (f64, f64),
}

/// Trapezoid integral of `g(cos)` over the part of a lattice line where
/// `|cos| <= 1`. Segments crossing `|cos| = 1` contribute up to the
/// crossing, found by linear interpolation in `cos` (equivalently in
/// `p^2 = 2 - 2 cos`).
fn window_integral(cos: &[Option<f64>], g: impl Fn(f64) -> f64) -> f64 {
    let inside = |c: Option<f64>| c.is_some_and(|c| c.abs() <= 1.0);
    let mut total = 0.0;
    for i in 0..cos.len().saturating_sub(1) {
        let (c0, c1) = (cos[i], cos[i + 1]);
        match (inside(c0), inside(c1)) {
            (true, true) => total += 0.5 * (g(c0.unwrap()) + g(c1.unwrap())),
            (true, false) | (false, true) => {
                let (cin, cout) = if inside(c0) { (c0.unwrap(), c1) } else { (c1.unwrap(), c0) };
                let Some(cout) = cout else { continue };
                let edge = cout.signum();
                let t = (edge - cin) / (cout - cin);
                total += 0.5 * t * (g(cin) + g(edge));
            }
            (false, false) => {}
        }
    }
    total
}

/// Trapezoid integral of `Re arccos(cos)` along a lattice line. Segments
/// crossing `|cos| = 1` are split at the crossing; the forbidden part holds
/// the edge value (`0` or `pi`).
fn phase_integral(cos: &[Option<f64>]) -> f64 {
    let theta = |c: f64| c.clamp(-1.0, 1.0).acos();
    let mut total = 0.0;
    for w in cos.windows(2) {
        let (Some(c0), Some(c1)) = (w[0], w[1]) else { continue };
        match (c0.abs() <= 1.0, c1.abs() <= 1.0) {
            (true, false) | (false, true) => {
                let (cin, cout) = if c0.abs() <= 1.0 { (c0, c1) } else { (c1, c0) };
                let edge = cout.signum();
                let t = (edge - cin) / (cout - cin);
                total += 0.5 * t * (theta(cin) + theta(edge)) + (1.0 - t) * theta(edge);
            }
            _ => total += 0.5 * (theta(c0) + theta(c1)),
        }
    }
    total
}

fn fractional_window(xs: &[f64], cos: &[Option<f64>]) -> Option<(f64, f64)> {
    let inside: Vec<usize> = (0..cos.len()).filter(|&i| cos[i].is_some_and(|c| c.abs() <= 1.0)).collect();
    let (&lo, &hi) = (inside.first()?, inside.last()?);
    let end = |i: usize, j: Option<usize>| -> f64 {
        match j.and_then(|j| cos[j].map(|c| (j, c))) {
            Some((j, cout)) => {
                let cin = cos[i].unwrap();
                let t = (cout.signum() - cin) / (cout - cin);
                xs[i] + t * (xs[j] - xs[i])
            }
            None => xs[i],
        }
    };
    Some((end(lo, lo.checked_sub(1)), end(hi, (hi + 1 < cos.len()).then_some(hi + 1))))
}

/// Bohr-Sommerfeld estimate for row `y`.
pub fn bohr_sommerfeld(y: TwoJ, params: &ScreenParams) -> Result<BohrSommerfeld> {
    params.y_index(y).ok_or(Error::OutOfRange { x: params.x_min, y })?;
    let n = params.side();
    let xs: Vec<f64> = (0..n).map(|i| params.x_at(i).edge()).collect();
    let cos: Vec<Option<f64>> = (0..n)
        .map(|i| cos_theta3(&Tetrahedron::at(params, params.x_at(i), y), XPrime::default()).ok())
        .collect();
    let window = fractional_window(&xs, &cos).ok_or(Error::NoClassicalWindow(y))?;
    let action = phase_integral(&cos);
    let chord_action = 2.0 * window_integral(&cos, |c| (2.0 - 2.0 * c).max(0.0).sqrt());
    Ok(BohrSommerfeld { y, action, n_estimate: action / PI - 0.5, chord_action, window })
}

/// Exterior dihedral angles at edges `A, B, X` (`theta1..3`) and `C, D, Y`
/// (`eta1..3`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DihedralAngles {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
}

impl DihedralAngles {
    pub fn as_array(&self) -> [f64; 6] {
        [self.theta1, self.theta2, self.theta3, self.eta1, self.eta2, self.eta3]
    }

    /// Interior angles `pi - angle`.
    pub fn interior(&self) -> DihedralAngles {
        DihedralAngles {
            theta1: PI - self.theta1,
            theta2: PI - self.theta2,
            theta3: PI - self.theta3,
            eta1: PI - self.eta1,
            eta2: PI - self.eta2,
            eta3: PI - self.eta3,
        }
    }

    /// `A theta1 + B theta2 + X theta3 + C eta1 + D eta2 + Y eta3 + pi/4`.
    pub fn phase(&self, t: &Tetrahedron) -> f64 {
        t.a * self.theta1 + t.b * self.theta2 + t.x * self.theta3 + t.c * self.eta1 + t.d * self.eta2 + t.y * self.eta3
            + FRAC_PI_4
    }
}

/// Angle at one edge: the cosine from the relabelled closed form, the sine
/// from `3 V E / (2 F1 F2)`.
fn angle_at(t: &Tetrahedron, e: Edge, vol: f64) -> Result<f64> {
    let cos = cos_dihedral(t, e).map_err(|_| Error::OutsideDomain)?;
    let (f1, f2) = adjacent_faces(t, e).map_err(|_| Error::OutsideDomain)?;
    let sin = 1.5 * vol * t.length(e) / (f1 * f2);
    Ok(sin.atan2(cos))
}

pub fn dihedral_angles(t: &Tetrahedron) -> Result<DihedralAngles> {
    let v2 = volume_sq(t);
    if v2 <= 0.0 || !v2.is_finite() {
        return Err(Error::OutsideDomain);
    }
    let v = v2.sqrt();
    Ok(DihedralAngles {
        theta1: angle_at(t, Edge::A, v)?,
        theta2: angle_at(t, Edge::B, v)?,
        theta3: angle_at(t, Edge::X, v)?,
        eta1: angle_at(t, Edge::C, v)?,
        eta2: angle_at(t, Edge::D, v)?,
        eta3: angle_at(t, Edge::Y, v)?,
    })
}

/// Ponzano-Regge estimate of the plain 6j at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrAmplitude {
    pub value: f64,
    /// `1 / sqrt(12 pi V)`.
    pub envelope: f64,
    pub cos_theta3: f64,
    /// Set when `|cos theta3| > 0.9`, where the estimate loses accuracy.
    pub caustic_proximity: bool,
}

impl PrAmplitude {
    /// Factor turning a plain 6j into `U`.
    pub fn u_scale(x: TwoJ, y: TwoJ) -> f64 {
        (((x.0 + 1) * (y.0 + 1)) as f64).sqrt()
    }
}

pub fn pr_amplitude(x: TwoJ, y: TwoJ, params: &ScreenParams) -> Result<PrAmplitude> {
    if !params.contains(x, y) {
        return Err(Error::OutsideDomain);
    }
    let t = Tetrahedron::at(params, x, y);
    let angles = dihedral_angles(&t)?;
    let envelope = 1.0 / (12.0 * PI * volume_sq(&t).sqrt()).sqrt();
    let cos3 = angles.theta3.cos();
    Ok(PrAmplitude {
        value: envelope * angles.phase(&t).cos(),
        envelope,
        cos_theta3: cos3,
        caustic_proximity: cos3.abs() > CAUSTIC_BAND,
    })
}

/// One point of a Ponzano-Regge comparison, in `U` units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrPoint {
    pub pr_estimate: f64,
    pub exact: f64,
    pub abs_error: f64,
    /// `abs_error / |exact|`; infinite only where `exact == 0`.
    pub rel_error: f64,
    pub cos_theta3: f64,
    pub envelope: f64,
}

impl PrPoint {
    /// Whether the point sits near a node of the oscillation.
    pub fn near_node(&self) -> bool {
        self.exact.abs() < NODE_EXCLUSION * self.envelope
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PrEntry {
    Classical(PrPoint),
    OutsideDomain,
}

/// Statistics over one band of `|cos theta3|`, nodes excluded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BandStats {
    pub count: usize,
    pub excluded_near_nodes: usize,
    pub max_rel_error: f64,
    pub mean_rel_error: f64,
    /// Fraction of counted points where the estimate and the exact value
    /// have the same sign.
    pub sign_agreement: f64,
}

impl BandStats {
    fn collect<'a>(points: impl Iterator<Item = &'a PrPoint>) -> BandStats {
        let mut s = BandStats::default();
        let (mut sum, mut agree) = (0.0, 0usize);
        for p in points {
            if p.near_node() {
                s.excluded_near_nodes += 1;
                continue;
            }
            s.count += 1;
            s.max_rel_error = s.max_rel_error.max(p.rel_error);
            sum += p.rel_error;
            if (p.pr_estimate > 0.0) == (p.exact > 0.0) {
                agree += 1;
            }
        }
        if s.count > 0 {
            s.mean_rel_error = sum / s.count as f64;
            s.sign_agreement = agree as f64 / s.count as f64;
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrSummary {
    /// `|cos theta3| <= 0.5`.
    pub interior: BandStats,
    /// `|cos theta3| > 0.9`.
    pub caustic_band: BandStats,
    pub outside_domain: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrComparison {
    pub params: ScreenParams,
    /// x-major grid matching the screen layout.
    pub grid: Vec<PrEntry>,
    pub summary: PrSummary,
}

impl PrComparison {
    pub fn get(&self, ix: usize, iy: usize) -> &PrEntry {
        &self.grid[ix * self.params.side() + iy]
    }
}

/// Compare the Ponzano-Regge estimate with every point of a screen.
pub fn pr_compare(screen: &Screen, exec: Exec) -> PrComparison {
    let params = screen.params;
    let n = params.side();
    let grid = exec.map(n * n, |k| {
        let (ix, iy) = (k / n, k % n);
        let (x, y) = (params.x_at(ix), params.y_at(iy));
        match pr_amplitude(x, y, &params) {
            Ok(pr) => {
                let scale = PrAmplitude::u_scale(x, y);
                let exact = screen.get(ix, iy);
                let est = pr.value * scale;
                let abs_error = (est - exact).abs();
                PrEntry::Classical(PrPoint {
                    pr_estimate: est,
                    exact,
                    abs_error,
                    rel_error: abs_error / exact.abs(),
                    cos_theta3: pr.cos_theta3,
                    envelope: pr.envelope * scale,
                })
            }
            Err(_) => PrEntry::OutsideDomain,
        }
    });
    let classical = || {
        grid.iter().filter_map(|e| match e {
            PrEntry::Classical(p) => Some(p),
            PrEntry::OutsideDomain => None,
        })
    };
    let summary = PrSummary {
        interior: BandStats::collect(classical().filter(|p| p.cos_theta3.abs() <= INTERIOR_BAND)),
        caustic_band: BandStats::collect(classical().filter(|p| p.cos_theta3.abs() > CAUSTIC_BAND)),
        outside_domain: grid.iter().filter(|e| matches!(e, PrEntry::OutsideDomain)).count(),
    };
    PrComparison { params, grid, summary }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::sixj_exact;
    use crate::geometry::caustic_y;
    use crate::recursion::screen_by_eigensolve;

    #[test]
    fn momentum_examples() {
        assert_eq!(momentum_from_cos(1.0), Some(0.0));
        assert_eq!(momentum_from_cos(-1.0), Some(2.0));
        assert_eq!(momentum_from_cos(0.0), Some(2f64.sqrt()));
        assert_eq!(momentum_from_cos(1.5), None);
    }

    #[test]
    fn momentum_outside_screen() {
        let p = ScreenParams::new(60, 90, 120, 110).unwrap();
        assert!(matches!(local_momentum(TwoJ(0), p.y_min, &p), Err(Error::OutsideDomain)));
        assert!(local_momentum(p.x_at(30), p.y_at(30), &p).unwrap() > 0.0);
    }

    #[test]
    fn regular_angles() {
        let a = dihedral_angles(&Tetrahedron::regular(3.0)).unwrap();
        for v in a.as_array() {
            assert!((v - (-1.0f64 / 3.0).acos()).abs() < 1e-12);
        }
        for v in a.interior().as_array() {
            assert!((v - (1.0f64 / 3.0).acos()).abs() < 1e-12);
        }
    }

    #[test]
    fn flattened_angles() {
        // apex lowered towards the base plane
        let base = [[0.0, 0.0], [2.0, 0.0], [0.7, 1.6]];
        let apex = [0.9, 0.5];
        let h = 1e-7f64;
        let d = |p: [f64; 2], q: [f64; 2], dz: f64| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + dz * dz).sqrt();
        let t = Tetrahedron::new(
            d(base[1], base[2], 0.0),
            d(base[0], base[2], 0.0),
            d(base[0], apex, h),
            d(base[1], apex, h),
            d(base[0], base[1], 0.0),
            d(base[2], apex, h),
        );
        for v in dihedral_angles(&t).unwrap().as_array() {
            assert!(v < 1e-3 || (PI - v) < 1e-3, "{v}");
        }
        let flat = Tetrahedron::new(1.0, 1.0, 1.0, 1.0, 1.0, 3.0);
        assert!(matches!(dihedral_angles(&flat), Err(Error::OutsideDomain)));
    }

    #[test]
    fn theta3_matches_closed_form() {
        let p = ScreenParams::new(60, 90, 120, 110).unwrap();
        for (ix, iy) in [(20, 30), (31, 40), (45, 22), (10, 12)] {
            let t = Tetrahedron::at(&p, p.x_at(ix), p.y_at(iy));
            if let Ok(a) = dihedral_angles(&t) {
                let c = cos_theta3(&t, XPrime::Plain).unwrap();
                assert!((a.theta3 - c.acos()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn amplitude_within_envelope_and_close_to_exact() {
        let p = ScreenParams::new(60, 90, 120, 110).unwrap();
        let (x, y) = (p.x_at(30), p.y_at(30));
        let pr = pr_amplitude(x, y, &p).unwrap();
        assert!(pr.value.abs() <= pr.envelope);
        let exact = sixj_exact(p.sixj_args(x, y)).to_f64();
        assert!((pr.value - exact).abs() < 0.05 * pr.envelope);
    }

    #[test]
    fn comparison_bookkeeping() {
        let p = ScreenParams::new(60, 90, 120, 110).unwrap();
        let s = screen_by_eigensolve(&p, Exec::Sequential).unwrap();
        let cmp = pr_compare(&s, Exec::Parallel);
        assert_eq!(cmp.grid.len(), s.values().len());
        let classical = cmp.grid.iter().filter(|e| matches!(e, PrEntry::Classical(_))).count();
        assert_eq!(classical + cmp.summary.outside_domain, cmp.grid.len());
        for e in &cmp.grid {
            if let PrEntry::Classical(pt) = e {
                assert!(pt.exact == 0.0 || pt.rel_error.is_finite());
            }
        }
        assert!(cmp.summary.interior.max_rel_error < cmp.summary.caustic_band.max_rel_error);
    }

    #[test]
    fn momentum_vanishes_at_the_caustics() {
        let p = ScreenParams::new(60, 90, 120, 110).unwrap();
        let (a, b, c, d) = (p.a.edge(), p.b.edge(), p.c.edge(), p.d.edge());
        let mut checked = 0;
        for ix in 5..p.side() - 5 {
            let x = p.x_at(ix);
            let (_, hi) = caustic_y(a, b, c, d, x.edge());
            let Some(hi) = hi else { continue };
            // last row with real momentum below the upper caustic, nearest it
            let last = (0..p.side())
                .filter(|&iy| local_momentum(x, p.y_at(iy), &p).is_ok())
                .max()
                .unwrap();
            let y = p.y_at(last).edge();
            if hi < p.y_max.edge() {
                assert!((y - hi).abs() <= 1.0, "x={x} y={y} caustic={hi}");
                checked += 1;
            }
        }
        assert!(checked > 10);
    }

    #[test]
    fn bohr_sommerfeld_small_screen() {
        let p = ScreenParams::new(60, 90, 120, 110).unwrap();
        let top = bohr_sommerfeld(p.y_max, &p).unwrap();
        // the top row is the lowest state of the ladder
        assert!(top.n_estimate.abs() < 0.1);
        let below = bohr_sommerfeld(p.y_at(p.side() - 2), &p).unwrap();
        assert!((top.n_estimate - below.n_estimate + 1.0).abs() < 0.1);
        let regge = p.regge().unwrap();
        for iy in [10, 30, 50] {
            let u = bohr_sommerfeld(p.y_at(iy), &p).unwrap();
            let v = bohr_sommerfeld(regge.y_at(iy), &regge).unwrap();
            assert!((u.action - v.action).abs() < 1e-12);
        }
        assert!(bohr_sommerfeld(TwoJ(1), &p).is_err());
    }

    #[test]
    fn window_integral_pieces() {
        // single inside point between two crossings at +1
        let cos = [Some(1.2), Some(1.0), Some(1.2)];
        assert_eq!(window_integral(&cos, |c| c.acos()), 0.0);
        // full interior
        let cos = [Some(0.0), Some(0.0)];
        assert!((window_integral(&cos, |c| c.acos()) - PI / 2.0).abs() < 1e-15);
        // crossing halfway to -1
        let cos = [Some(0.0), Some(-2.0)];
        assert!((window_integral(&cos, |c| c.clamp(-1.0, 1.0).acos()) - 0.25 * (PI / 2.0 + PI)).abs() < 1e-15);
    }

    #[test]
    fn phase_integral_pieces() {
        // alternating zone contributes pi per step, growing zone nothing
        assert!((phase_integral(&[Some(-3.0), Some(-2.0), Some(-5.0)]) - 2.0 * PI).abs() < 1e-15);
        assert_eq!(phase_integral(&[Some(3.0), Some(2.0)]), 0.0);
        // crossing halfway to -1: inside part plus held edge value
        let want = 0.25 * (PI / 2.0 + PI) + 0.5 * PI;
        assert!((phase_integral(&[Some(0.0), Some(-2.0)]) - want).abs() < 1e-15);
        assert_eq!(phase_integral(&[None, Some(0.0)]), 0.0);
    }
}
