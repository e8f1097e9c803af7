//! Dense screens of `U(x, y)` values.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::spin::{ScreenParams, TwoJ};

/// Algorithm that produced a screen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Oracle,
    Eigensolve,
    ThreeTerm,
    Recur2d,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Oracle, Method::Eigensolve, Method::ThreeTerm, Method::Recur2d];

    pub fn name(self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Eigensolve => "eigensolve",
            Method::ThreeTerm => "threeterm",
            Method::Recur2d => "recur2d",
        }
    }

    /// Compute a screen with this method. The five-term recursion starts
    /// from exact seed rows.
    pub fn compute(self, params: &ScreenParams, exec: Exec) -> Result<Screen> {
        match self {
            Method::Oracle => Ok(crate::exact::screen_oracle(params, exec)),
            Method::Eigensolve => crate::recursion::screen_by_eigensolve(params, exec),
            Method::ThreeTerm => crate::recursion::screen_by_threeterm(params, exec),
            Method::Recur2d => crate::recursion::screen_by_2d(params, crate::recursion::Seed::Exact, exec),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown method `{s}`")))
    }
}

/// What the generator observed while producing a screen.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Largest recursion residual seen before renormalization, relative to
    /// the largest term of the relation.
    pub max_residual: f64,
    /// `max |U^T U - I|` of the finished grid.
    pub orthonormality_defect: f64,
    /// `max |eigenvalue - lambda(y)|`, eigensolve only.
    pub eigenvalue_mismatch: f64,
    /// Rows whose pivot vanished and were taken from the oracle.
    pub zero_pivots: Vec<TwoJ>,
    /// Fixed-point working precision of the 2D recursion.
    pub precision_bits: u32,
    /// Rows produced by a fallback path.
    pub fallback_rows: Vec<TwoJ>,
}

/// Square grid of `U(x, y)` over one screen, stored x-major:
/// `values[ix * side + iy]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Screen {
    pub params: ScreenParams,
    pub method: Method,
    values: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl Screen {
    pub fn from_values(params: ScreenParams, method: Method, values: Vec<f64>) -> Result<Self> {
        let n = params.side();
        if values.len() != n * n {
            return Err(Error::Invalid(format!("expected {} values, got {}", n * n, values.len())));
        }
        Ok(Screen { params, method, values, diagnostics: Diagnostics::default() })
    }

    /// Build from a function of lattice indices `(ix, iy)`.
    pub fn from_fn(params: ScreenParams, method: Method, exec: Exec, f: impl Fn(usize, usize) -> f64 + Sync + Send) -> Self {
        let n = params.side();
        let values = exec.map(n * n, |k| f(k / n, k % n));
        Screen { params, method, values, diagnostics: Diagnostics::default() }
    }

    /// Build from columns: `cols[ix][iy]`.
    pub fn from_columns(params: ScreenParams, method: Method, cols: Vec<Vec<f64>>) -> Self {
        let values = cols.into_iter().flatten().collect();
        Screen { params, method, values, diagnostics: Diagnostics::default() }
    }

    /// Build from rows: `rows[iy][ix]`.
    pub fn from_rows(params: ScreenParams, method: Method, rows: &[Vec<f64>]) -> Self {
        let n = params.side();
        let mut values = vec![0.0; n * n];
        for (iy, row) in rows.iter().enumerate() {
            for (ix, &v) in row.iter().enumerate() {
                values[ix * n + iy] = v;
            }
        }
        Screen { params, method, values, diagnostics: Diagnostics::default() }
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.params.side()
    }

    #[inline]
    pub fn get(&self, ix: usize, iy: usize) -> f64 {
        self.values[ix * self.side() + iy]
    }

    /// Value at lattice coordinates, `None` off the screen.
    pub fn at(&self, x: TwoJ, y: TwoJ) -> Option<f64> {
        Some(self.get(self.params.x_index(x)?, self.params.y_index(y)?))
    }

    /// All `U(x, y)` for fixed `x`.
    pub fn column(&self, ix: usize) -> &[f64] {
        let n = self.side();
        &self.values[ix * n..(ix + 1) * n]
    }

    /// All `U(x, y)` for fixed `y`, ordered by `x`.
    pub fn row(&self, iy: usize) -> Vec<f64> {
        (0..self.side()).map(|ix| self.get(ix, iy)).collect()
    }

    /// Raw x-major storage.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `max |sum_x U(x,y) U(x,y') - delta(y,y')|`.
    pub fn orthonormality_defect(&self, exec: Exec) -> f64 {
        let n = self.side();
        let rows: Vec<Vec<f64>> = (0..n).map(|iy| self.row(iy)).collect();
        exec.map(n, |i| {
            let ri = &rows[i];
            (i..n)
                .map(|j| {
                    let dot: f64 = ri.iter().zip(&rows[j]).map(|(p, q)| p * q).sum();
                    let target = if i == j { 1.0 } else { 0.0 };
                    (dot - target).abs()
                })
                .fold(0.0, nan_max)
        })
        .into_iter()
        .fold(0.0, nan_max)
    }

    /// `max |self - other|` over all entries, NaN if any entry is NaN;
    /// screens must share parameters.
    pub fn max_abs_diff(&self, other: &Screen) -> Result<f64> {
        if self.params.quadruple() != other.params.quadruple() {
            return Err(Error::Invalid("screens have different parameters".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, nan_max))
    }

    /// Lattice points in export order: `y` outer, `x` inner.
    pub fn points(&self) -> impl Iterator<Item = (TwoJ, TwoJ, f64)> + '_ {
        let n = self.side();
        (0..n).flat_map(move |iy| (0..n).map(move |ix| (self.params.x_at(ix), self.params.y_at(iy), self.get(ix, iy))))
    }
}

/// `max` that keeps NaN instead of skipping it.
fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_entries_are_not_hidden() {
        let p = ScreenParams::new(2, 2, 2, 2).unwrap();
        let n = p.side();
        let good = Screen::from_values(p, Method::Oracle, vec![0.5; n * n]).unwrap();
        let mut v = vec![0.5; n * n];
        v[0] = f64::NAN;
        let bad = Screen::from_values(p, Method::Oracle, v).unwrap();
        assert!(good.max_abs_diff(&bad).unwrap().is_nan());
        assert!(bad.orthonormality_defect(Exec::Sequential).is_nan());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("qr".parse::<Method>().is_err());
    }

    #[test]
    fn layout_and_accessors() {
        let p = ScreenParams::new(2, 2, 2, 2).unwrap();
        let s = Screen::from_fn(p, Method::Oracle, Exec::Sequential, |ix, iy| (10 * ix + iy) as f64);
        assert_eq!(s.get(2, 1), 21.0);
        assert_eq!(s.column(1), &[10.0, 11.0, 12.0]);
        assert_eq!(s.row(1), vec![1.0, 11.0, 21.0]);
        assert_eq!(s.at(TwoJ(4), TwoJ(2)), Some(21.0));
        assert_eq!(s.at(TwoJ(3), TwoJ(2)), None);
        let first: Vec<_> = s.points().take(2).map(|(x, y, _)| (x.0, y.0)).collect();
        assert_eq!(first, vec![(0, 0), (2, 0)]);
        let r = Screen::from_rows(p, Method::Oracle, &(0..3).map(|iy| s.row(iy)).collect::<Vec<_>>());
        assert_eq!(r, s);
    }

    #[test]
    fn identity_is_orthonormal() {
        let p = ScreenParams::new(4, 4, 4, 4).unwrap();
        let s = Screen::from_fn(p, Method::Oracle, Exec::Sequential, |i, j| if i == j { 1.0 } else { 0.0 });
        assert_eq!(s.orthonormality_defect(Exec::Parallel), 0.0);
    }
}
