//! Tetrahedral geometry of a 6j symbol.
//!
//! A symbol `{a b x; c d y}` is read as a tetrahedron with edge lengths
//! `E = e + 1/2`. Vertices are labelled so that `X = |v0 v1|`, `Y = |v2 v3|`,
//! `A = |v1 v2|`, `B = |v0 v2|`, `C = |v0 v3|`, `D = |v1 v3|`; the faces are
//! `(A, B, X)`, `(C, D, X)`, `(A, D, Y)` and `(B, C, Y)`.
//!
//! Bulk curve evaluation never fails: quantities with a negative radicand are
//! reported as `None`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::recursion::TridiagCoeffs;
use crate::spin::{ScreenParams, SixJArgs, TwoJ};

/// Edge lengths of a tetrahedron.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tetrahedron {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub x: f64,
    pub y: f64,
}

/// Edge of a tetrahedron, named after its length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Edge {
    A,
    B,
    C,
    D,
    X,
    Y,
}

impl Edge {
    pub const ALL: [Edge; 6] = [Edge::A, Edge::B, Edge::X, Edge::C, Edge::D, Edge::Y];

    /// Vertex pair of the edge.
    fn vertices(self) -> (usize, usize) {
        match self {
            Edge::X => (0, 1),
            Edge::Y => (2, 3),
            Edge::A => (1, 2),
            Edge::B => (0, 2),
            Edge::C => (0, 3),
            Edge::D => (1, 3),
        }
    }
}

impl Tetrahedron {
    pub fn new(a: f64, b: f64, c: f64, d: f64, x: f64, y: f64) -> Self {
        Tetrahedron { a, b, c, d, x, y }
    }

    pub fn regular(l: f64) -> Self {
        Tetrahedron::new(l, l, l, l, l, l)
    }

    /// Shifted edges `j + 1/2` of `{a b x; c d y}`.
    pub fn from_sixj(args: SixJArgs) -> Self {
        Tetrahedron::new(args.a.edge(), args.b.edge(), args.c.edge(), args.d.edge(), args.x.edge(), args.y.edge())
    }

    /// Shifted tetrahedron at a screen point.
    pub fn at(params: &ScreenParams, x: TwoJ, y: TwoJ) -> Self {
        Tetrahedron::from_sixj(params.sixj_args(x, y))
    }

    pub fn length(&self, e: Edge) -> f64 {
        match e {
            Edge::A => self.a,
            Edge::B => self.b,
            Edge::C => self.c,
            Edge::D => self.d,
            Edge::X => self.x,
            Edge::Y => self.y,
        }
    }

    /// Squared vertex distances.
    pub fn squared_distances(&self) -> [[f64; 4]; 4] {
        let mut d = [[0.0; 4]; 4];
        for e in Edge::ALL {
            let (i, j) = e.vertices();
            let l2 = self.length(e).powi(2);
            d[i][j] = l2;
            d[j][i] = l2;
        }
        d
    }
}

/// `16 F^2` for sides `a, b, c` (Heron's product).
#[inline]
fn heron_product(a: f64, b: f64, c: f64) -> f64 {
    (a + b + c) * (-a + b + c) * (a - b + c) * (a + b - c)
}

/// Area of a triangle with the given sides.
pub fn heron_area(a: f64, b: f64, c: f64) -> Result<f64> {
    let p = heron_product(a, b, c);
    if p < 0.0 {
        return Err(Error::NegativeRadicand(p));
    }
    Ok(0.25 * p.sqrt())
}

/// Area, or `None` when the sides do not form a triangle.
pub fn area_or_none(a: f64, b: f64, c: f64) -> Option<f64> {
    heron_area(a, b, c).ok()
}

/// `(alpha^2 - beta^2)^2 - 2 gamma^2 (alpha^2 + beta^2) + gamma^4`, which
/// equals `-16 F(alpha, beta, gamma)^2`.
pub fn lambda_quartic(alpha: f64, beta: f64, gamma: f64) -> f64 {
    let (a2, b2, g2) = (alpha * alpha, beta * beta, gamma * gamma);
    (a2 - b2).powi(2) - 2.0 * g2 * (a2 + b2) + g2 * g2
}

fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[i][k].abs().total_cmp(&m[j][k].abs())).unwrap();
        if m[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        det *= m[k][k];
        for i in k + 1..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    det
}

/// Squared volume from the 5x5 Cayley-Menger determinant. Negative values
/// mean the six lengths do not close into a real tetrahedron.
pub fn volume_sq(t: &Tetrahedron) -> f64 {
    let [a2, b2, c2, d2, x2, y2] = [t.a, t.b, t.c, t.d, t.x, t.y].map(|v| v * v);
    let m = vec![
        vec![0.0, c2, d2, y2, 1.0],
        vec![c2, 0.0, x2, b2, 1.0],
        vec![d2, x2, 0.0, a2, 1.0],
        vec![y2, b2, a2, 0.0, 1.0],
        vec![1.0, 1.0, 1.0, 1.0, 0.0],
    ];
    det(m) / 288.0
}

/// Squared volume from the 3x3 Gram matrix of the edge vectors at vertex 0.
pub fn volume_sq_gram(t: &Tetrahedron) -> f64 {
    let d = t.squared_distances();
    let g: Vec<Vec<f64>> =
        (1..4).map(|i| (1..4).map(|j| 0.5 * (d[0][i] + d[0][j] - d[i][j])).collect()).collect();
    det(g) / 36.0
}

/// Choice of the length `X'` in the dihedral-angle cosine.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XPrime {
    /// `X'^2 = (X - 1/2)(X + 1/2)`.
    #[default]
    ShiftedProduct,
    /// `X' = X`.
    Plain,
}

impl XPrime {
    pub fn squared(self, x: f64) -> f64 {
        match self {
            XPrime::ShiftedProduct => x * x - 0.25,
            XPrime::Plain => x * x,
        }
    }
}

/// Cosine of the exterior dihedral angle at the edge of squared length `x2`,
/// whose opposite edge is `y2`; `a2, d2` meet one end of that edge's
/// neighbours as in the `X` labelling (`A = |v1 v2|`, `B = |v0 v2|`,
/// `C = |v0 v3|`, `D = |v1 v3|`).
fn cos_dihedral_sq(x2: f64, y2: f64, a2: f64, b2: f64, c2: f64, d2: f64) -> Result<f64> {
    let num = 2.0 * x2 * y2 - x2 * (-x2 + d2 + c2) - b2 * (x2 + d2 - c2) - a2 * (x2 - d2 + c2);
    // 16 F(X,B,A) F(X,D,C) = sqrt(Lambda_{B,A,X} Lambda_{D,C,X})
    let l1 = lambda_sq(b2, a2, x2);
    let l2 = lambda_sq(d2, c2, x2);
    if l1 > 0.0 || l2 > 0.0 {
        return Err(Error::NegativeRadicand(l1.max(l2)));
    }
    let den = (l1 * l2).sqrt();
    if den == 0.0 {
        return Err(Error::DegenerateFace);
    }
    Ok(num / den)
}

#[inline]
fn lambda_sq(a2: f64, b2: f64, g2: f64) -> f64 {
    (a2 - b2).powi(2) - 2.0 * g2 * (a2 + b2) + g2 * g2
}

/// Cosine of the (exterior) dihedral angle at edge `X`, with `X'` chosen by
/// `mode`. Magnitudes above 1 mark the classically forbidden region.
pub fn cos_theta3(t: &Tetrahedron, mode: XPrime) -> Result<f64> {
    let xp2 = mode.squared(t.x);
    cos_dihedral_sq(xp2, t.y * t.y, t.a * t.a, t.b * t.b, t.c * t.c, t.d * t.d)
}

/// Cosine of the exterior dihedral angle at any edge, from the same formula
/// with the edge lengths relabelled.
pub fn cos_dihedral(t: &Tetrahedron, e: Edge) -> Result<f64> {
    let d = t.squared_distances();
    let (i, j) = e.vertices();
    let mut rest = (0..4).filter(|&m| m != i && m != j);
    let (k, l) = (rest.next().unwrap(), rest.next().unwrap());
    cos_dihedral_sq(d[i][j], d[k][l], d[j][k], d[i][k], d[i][l], d[j][l])
}

/// Areas of the two faces meeting at an edge.
pub fn adjacent_faces(t: &Tetrahedron, e: Edge) -> Result<(f64, f64)> {
    let d = t.squared_distances();
    let (i, j) = e.vertices();
    let mut rest = (0..4).filter(|&m| m != i && m != j);
    let (k, l) = (rest.next().unwrap(), rest.next().unwrap());
    let s = |p: usize, q: usize| d[p][q].sqrt();
    Ok((heron_area(s(i, j), s(j, k), s(i, k))?, heron_area(s(i, j), s(j, l), s(i, l))?))
}

/// `Y` at which the volume is largest for fixed `X`; `None` if not real.
pub fn ridge_y(a: f64, b: f64, c: f64, d: f64, x: f64) -> Option<f64> {
    let (a2, b2, c2, d2, x2) = (a * a, b * b, c * c, d * d, x * x);
    let v = ((a2 - b2) * (c2 - d2) + (a2 + b2 + c2 + d2) * x2 - x2 * x2) / (2.0 * x2);
    (v >= 0.0).then(|| v.sqrt())
}

/// `X` at which the volume is largest for fixed `Y`; `None` if not real.
pub fn ridge_x(a: f64, b: f64, c: f64, d: f64, y: f64) -> Option<f64> {
    let (a2, b2, c2, d2, y2) = (a * a, b * b, c * c, d * d, y * y);
    let v = ((a2 - d2) * (c2 - b2) + (a2 + b2 + c2 + d2) * y2 - y2 * y2) / (2.0 * y2);
    (v >= 0.0).then(|| v.sqrt())
}

/// Largest volume over `Y` at fixed `X`; `None` if a face is not real.
pub fn max_volume(a: f64, b: f64, c: f64, d: f64, x: f64) -> Option<f64> {
    let p = lambda_quartic(a, b, x) * lambda_quartic(c, d, x);
    let ok = lambda_quartic(a, b, x) <= 0.0 && lambda_quartic(c, d, x) <= 0.0;
    (ok && p >= 0.0).then(|| p.sqrt() / (24.0 * x))
}

/// The two `Y` with zero volume at fixed `X`, `(minus, plus)`.
pub fn caustic_y(a: f64, b: f64, c: f64, d: f64, x: f64) -> (Option<f64>, Option<f64>) {
    let (a2, b2, c2, d2, x2) = (a * a, b * b, c * c, d * d, x * x);
    let l1 = lambda_quartic(a, b, x);
    let l2 = lambda_quartic(c, d, x);
    if l1 > 0.0 || l2 > 0.0 {
        return (None, None);
    }
    let centre = ((a2 - b2) * (c2 - d2) + (a2 + b2 + c2 + d2) * x2 - x2 * x2) / (2.0 * x2);
    let half = (l1 * l2).sqrt() / (2.0 * x2);
    let root = |v: f64| (v >= 0.0).then(|| v.sqrt());
    (root(centre - half), root(centre + half))
}

fn volume_sq_at(a: f64, b: f64, c: f64, d: f64, x: f64, y: f64) -> f64 {
    volume_sq(&Tetrahedron::new(a, b, c, d, x, y))
}

/// Refine a zero of `V^2` in `Y` by bisection between a point inside
/// (`V^2 > 0`) and a point outside.
fn polish(a: f64, b: f64, c: f64, d: f64, x: f64, inside: f64, guess: f64) -> f64 {
    let f = |y: f64| volume_sq_at(a, b, c, d, x, y);
    if f(inside) <= 0.0 {
        return guess;
    }
    let dir = if guess >= inside { 1.0 } else { -1.0 };
    let mut step = (guess - inside).abs().max(1e-9) * 1e-6 + 1e-12;
    let mut out = guess;
    let mut tries = 0;
    while f(out) > 0.0 && tries < 80 {
        out = guess + dir * step;
        step *= 2.0;
        tries += 1;
    }
    if out < 0.0 || f(out) > 0.0 {
        return guess;
    }
    let (mut lo, mut hi) = (inside, out);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= 1e-12 * mid.abs().max(1.0) {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Ridge and caustic curves sampled once per lattice step, in shifted
/// coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CausticData {
    /// Shifted `X` samples.
    pub x: Vec<f64>,
    pub y_ridge: Vec<Option<f64>>,
    pub v_max: Vec<Option<f64>>,
    pub y_caustic_minus: Vec<Option<f64>>,
    pub y_caustic_plus: Vec<Option<f64>>,
    /// Shifted `Y` samples.
    pub y: Vec<f64>,
    pub x_ridge: Vec<Option<f64>>,
}

impl CausticData {
    /// Caustic points as `[X, Y]` pairs, lower branch then upper branch.
    pub fn caustic_points(&self) -> Vec<[f64; 2]> {
        let lower = self.x.iter().zip(&self.y_caustic_minus).filter_map(|(&x, y)| y.map(|y| [x, y]));
        let upper = self.x.iter().zip(&self.y_caustic_plus).filter_map(|(&x, y)| y.map(|y| [x, y]));
        lower.chain(upper).collect()
    }

    /// Both ridge curves as `[X, Y]` pairs: `Y` of largest volume at fixed
    /// `X`, then `X` of largest volume at fixed `Y`.
    pub fn ridge_points(&self) -> Vec<[f64; 2]> {
        let first = self.x.iter().zip(&self.y_ridge).filter_map(|(&x, y)| y.map(|y| [x, y]));
        let second = self.y.iter().zip(&self.x_ridge).filter_map(|(&y, x)| x.map(|x| [x, y]));
        first.chain(second).collect()
    }
}

/// Ridges, largest volumes and caustics of a screen.
pub fn ridges_and_caustics(params: &ScreenParams, exec: Exec) -> CausticData {
    let (a, b, c, d) = (params.a.edge(), params.b.edge(), params.c.edge(), params.d.edge());
    let n = params.side();
    let x: Vec<f64> = (0..n).map(|i| params.x_at(i).edge()).collect();
    let y: Vec<f64> = (0..n).map(|i| params.y_at(i).edge()).collect();
    let per_x = exec.map(n, |i| {
        let xv = x[i];
        let ridge = ridge_y(a, b, c, d, xv);
        let (lo, hi) = caustic_y(a, b, c, d, xv);
        let (lo, hi) = match ridge {
            Some(r) if volume_sq_at(a, b, c, d, xv, r) > 0.0 => {
                (lo.map(|g| polish(a, b, c, d, xv, r, g)), hi.map(|g| polish(a, b, c, d, xv, r, g)))
            }
            _ => (lo, hi),
        };
        (ridge, max_volume(a, b, c, d, xv), lo, hi)
    });
    let x_ridge = exec.map(n, |i| ridge_x(a, b, c, d, y[i]));
    CausticData {
        y_ridge: per_x.iter().map(|r| r.0).collect(),
        v_max: per_x.iter().map(|r| r.1).collect(),
        y_caustic_minus: per_x.iter().map(|r| r.2).collect(),
        y_caustic_plus: per_x.iter().map(|r| r.3).collect(),
        x,
        y,
        x_ridge,
    }
}

/// Field of `cos theta3` over a screen, x-major, `None` where undefined.
pub fn cos_theta3_field(params: &ScreenParams, mode: XPrime, exec: Exec) -> Vec<Option<f64>> {
    let n = params.side();
    exec.map(n * n, |k| {
        let t = Tetrahedron::at(params, params.x_at(k / n), params.y_at(k % n));
        cos_theta3(&t, mode).ok()
    })
}

/// How the average coupling `pbar` is formed from `p+` and `p-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PBar {
    /// `(p+ + p-) / 2`
    Arithmetic,
    /// `sqrt(p+ p-)`
    Geometric,
}

/// Potentials `W(x) -/+ 2 |pbar(x)|` bounding the oscillatory band of the
/// three-term relation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialCurves {
    pub mode: PBar,
    pub x: Vec<TwoJ>,
    pub w_plus: Vec<f64>,
    pub w_minus: Vec<f64>,
}

pub fn potentials(params: &ScreenParams, mode: PBar) -> Result<PotentialCurves> {
    let t = TridiagCoeffs::new(params)?;
    let n = t.side();
    let pbar: Vec<f64> = (0..n)
        .map(|i| match mode {
            PBar::Arithmetic => 0.5 * (t.p_plus[i] + t.p_minus(i)),
            PBar::Geometric => (t.p_plus[i] * t.p_minus(i)).sqrt(),
        })
        .collect();
    Ok(PotentialCurves {
        mode,
        x: (0..n).map(|i| params.x_at(i)).collect(),
        w_plus: (0..n).map(|i| t.w[i] + 2.0 * pbar[i].abs()).collect(),
        w_minus: (0..n).map(|i| t.w[i] - 2.0 * pbar[i].abs()).collect(),
    })
}

/// Geometric approximations of the three-term coefficients at one point,
/// scaled to compare directly with the exact `p-`, `p+` and `w - lambda`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricCoeffs {
    /// Face-area form at the half-shifted edges.
    pub p_minus: f64,
    pub p_plus: f64,
    pub w_lambda: f64,
    /// Geometric-mean form.
    pub p_minus_mean: f64,
    pub p_plus_mean: f64,
    pub w_lambda_mean: f64,
}

fn face_pair(a: f64, b: f64, c: f64, d: f64, x: f64) -> f64 {
    area_or_none(x, a, b).unwrap_or(0.0) * area_or_none(x, c, d).unwrap_or(0.0)
}

pub fn geometric_coeffs(x: TwoJ, y: TwoJ, params: &ScreenParams, mode: XPrime) -> Result<GeometricCoeffs> {
    let t = Tetrahedron::at(params, x, y);
    let (a, b, c, d, xx) = (t.a, t.b, t.c, t.d, t.x);
    let cos = cos_theta3(&t, mode)?;
    let xp2 = mode.squared(xx);
    let xp = xp2.sqrt();
    let lo = xx - 0.5;
    let hi = xx + 0.5;
    let p_minus = if lo > 0.0 { 8.0 * face_pair(a, b, c, d, lo) / (lo * lo) } else { 0.0 };
    let p_plus = 8.0 * face_pair(a, b, c, d, hi) / (hi * hi);
    let w_lambda = -16.0 * cos * face_pair(a, b, c, d, xp) / xp2;

    let centre = face_pair(a, b, c, d, xx);
    let mean = |other: f64| 8.0 * (face_pair(a, b, c, d, other) * centre).sqrt() / (xx * other);
    let p_minus_mean = if xx > 1.0 { mean(xx - 1.0) } else { 0.0 };
    let p_plus_mean = mean(xx + 1.0);
    let cos_plain = cos_theta3(&t, XPrime::Plain)?;
    let w_lambda_mean = -16.0 * cos_plain * centre / (xx * xx);
    Ok(GeometricCoeffs { p_minus, p_plus, w_lambda, p_minus_mean, p_plus_mean, w_lambda_mean })
}

/// Fractional errors of the geometric coefficients against the exact ones
/// at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeffErrors {
    pub p_plus: f64,
    pub p_plus_mean: f64,
    /// `|approx - (w - lambda)| / (|w - lambda| + p+ + p-)`: the error
    /// relative to the size of the whole relation, which stays finite where
    /// `w - lambda` changes sign.
    pub w_lambda: f64,
    pub w_lambda_mean: f64,
}

pub fn coeff_errors(t: &TridiagCoeffs, ix: usize, iy: usize, mode: XPrime) -> Result<CoeffErrors> {
    let p = t.params;
    let g = geometric_coeffs(p.x_at(ix), p.y_at(iy), &p, mode)?;
    let pp = t.p_plus[ix];
    let wl = t.w_lambda(ix, iy);
    let scale = wl.abs() + pp + t.p_minus(ix);
    Ok(CoeffErrors {
        p_plus: (g.p_plus - pp).abs() / pp,
        p_plus_mean: (g.p_plus_mean - pp).abs() / pp,
        w_lambda: (g.w_lambda - wl).abs() / scale,
        w_lambda_mean: (g.w_lambda_mean - wl).abs() / scale,
    })
}

/// A row of `U` transformed to the finite-difference wavefunction
/// `f(X) = sqrt(F(X,A,B) F(X,C,D)) / X * U(x, y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FTransform {
    pub x: Vec<f64>,
    pub f: Vec<Option<f64>>,
    /// `f(X+1) - 2 cos(theta3) f(X) + f(X-1)` where all three are defined.
    pub residual: Vec<Option<f64>>,
}

impl FTransform {
    pub fn max_abs(&self) -> f64 {
        self.f.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub fn f_transform(u_row: &[f64], params: &ScreenParams, y: TwoJ, mode: XPrime) -> FTransform {
    let (a, b, c, d) = (params.a.edge(), params.b.edge(), params.c.edge(), params.d.edge());
    let n = u_row.len();
    let x: Vec<f64> = (0..n).map(|i| params.x_at(i).edge()).collect();
    let f: Vec<Option<f64>> = (0..n)
        .map(|i| {
            let fa = area_or_none(x[i], a, b)?;
            let fc = area_or_none(x[i], c, d)?;
            Some((fa * fc).sqrt() / x[i] * u_row[i])
        })
        .collect();
    let residual = (0..n)
        .map(|i| {
            if i == 0 || i + 1 == n {
                return None;
            }
            let cos = cos_theta3(&Tetrahedron::at(params, params.x_at(i), y), mode).ok()?;
            Some(f[i + 1]? - 2.0 * cos * f[i]? + f[i - 1]?)
        })
        .collect();
    FTransform { x, f, residual }
}
