use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{ScreenParams, TwoJ};

/// Off-diagonal coupling between `x` and `x + 1` (j units).
pub fn p_plus(params: &ScreenParams, x: f64) -> f64 {
    let (a, b, c, d) = (params.a.j(), params.b.j(), params.c.j(), params.d.j());
    let left = (a + b + x + 2.0) * (a + b - x) * (a - b + x + 1.0) * (-a + b + x + 1.0);
    let right = (d + c + x + 2.0) * (d + c - x) * (d - c + x + 1.0) * (-d + c + x + 1.0);
    if left <= 0.0 || right <= 0.0 {
        return 0.0;
    }
    left.sqrt() * right.sqrt() / ((x + 1.0) * ((2.0 * x + 1.0) * (2.0 * x + 3.0)).sqrt())
}

/// Diagonal term (j units). At `x = 0`, which needs `a = b` and `c = d`, the
/// `1 / (x(x+1))` pole cancels and the limit `0` is returned.
pub fn w(params: &ScreenParams, x: f64) -> Result<f64> {
    let (a, b, c, d) = (params.a.j(), params.b.j(), params.c.j(), params.d.j());
    let beta = b * (b + 1.0) - a * (a + 1.0);
    let delta = d * (d + 1.0) - c * (c + 1.0);
    let xx = x * (x + 1.0);
    if xx == 0.0 {
        if beta != 0.0 || delta != 0.0 {
            return Err(Error::SingularCoefficient(TwoJ((2.0 * x) as u32)));
        }
        return Ok(0.0);
    }
    // (beta + X)(delta - X) / X expanded so the X = 0 limit is explicit
    Ok(beta * delta / xx + (delta - beta) - xx)
}

/// Eigenvalue attached to row `y` (j units).
pub fn lambda(params: &ScreenParams, y: f64) -> f64 {
    let (b, c) = (params.b.j(), params.c.j());
    2.0 * (y * (y + 1.0) - b * (b + 1.0) - c * (c + 1.0))
}

/// Coefficients of the symmetric three-term relation
/// `p+(x) U(x+1) + w(x) U(x) + p-(x) U(x-1) = lambda(y) U(x)` over one screen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TridiagCoeffs {
    pub params: ScreenParams,
    /// `p+(x)` by x-lattice index; the last entry is zero.
    pub p_plus: Vec<f64>,
    /// `w(x)` by x-lattice index.
    pub w: Vec<f64>,
    /// `lambda(y)` by y-lattice index.
    pub lambda: Vec<f64>,
}

impl TridiagCoeffs {
    pub fn new(params: &ScreenParams) -> Result<Self> {
        let n = params.side();
        let xs: Vec<f64> = (0..n).map(|i| params.x_at(i).j()).collect();
        let mut p_plus: Vec<f64> = xs.iter().map(|&x| p_plus(params, x)).collect();
        p_plus[n - 1] = 0.0;
        let w = xs.iter().map(|&x| w(params, x)).collect::<Result<Vec<_>>>()?;
        let lambda = (0..n).map(|i| lambda(params, params.y_at(i).j())).collect();
        Ok(TridiagCoeffs { params: *params, p_plus, w, lambda })
    }

    pub fn side(&self) -> usize {
        self.w.len()
    }

    /// `p-(x) = p+(x - 1)`, zero at the lower end.
    #[inline]
    pub fn p_minus(&self, ix: usize) -> f64 {
        if ix == 0 {
            0.0
        } else {
            self.p_plus[ix - 1]
        }
    }

    /// `w(x) - lambda(y)`.
    #[inline]
    pub fn w_lambda(&self, ix: usize, iy: usize) -> f64 {
        self.w[ix] - self.lambda[iy]
    }

    /// Largest relative residual of the three-term relation over the
    /// interior of a row, relative to the row's largest entry times the
    /// largest coefficient magnitude in the relation.
    pub fn row_residual(&self, iy: usize, row: &[f64]) -> f64 {
        let n = self.side();
        let norm = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if norm == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for ix in 0..n {
            let up = if ix + 1 < n { self.p_plus[ix] * row[ix + 1] } else { 0.0 };
            let down = if ix > 0 { self.p_minus(ix) * row[ix - 1] } else { 0.0 };
            let r = up + self.w_lambda(ix, iy) * row[ix] + down;
            let scale = self.p_plus[ix].abs() + self.w_lambda(ix, iy).abs() + self.p_minus(ix).abs();
            if scale > 0.0 {
                worst = worst.max(r.abs() / (scale * norm));
            }
        }
        worst
    }
}
