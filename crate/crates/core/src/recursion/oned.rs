use super::coeffs::TridiagCoeffs;
use super::eigen::tridiag_eigen;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::screen::{Method, Screen};
use crate::spin::{ScreenParams, TwoJ};

const RESCALE_AT: f64 = 1e150;

/// Sign of `U(x_max, y)`, the same for every row: `(-1)^(a+b+c+d)`.
fn top_sign(params: &ScreenParams) -> f64 {
    if params.s.0.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Run the relation downward from `x_max` with the reference sign and
/// return `+1` or `-1` so that `sign * row` follows that convention.
///
/// The sign is read at the first entry (from the top) that carries a
/// noticeable fraction of the row's weight, so tiny tails in a forbidden
/// zone never decide it.
fn orientation(t: &TridiagCoeffs, iy: usize, row: &[f64]) -> f64 {
    let n = row.len();
    let peak = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut next = 0.0; // value at ix + 1
    let mut cur = top_sign(&t.params);
    let mut ix = n - 1;
    loop {
        if row[ix].abs() >= 1e-3 * peak {
            return if (row[ix] > 0.0) == (cur > 0.0) { 1.0 } else { -1.0 };
        }
        if ix == 0 {
            return 1.0;
        }
        // p-(x) U(x-1) = -(w - lambda) U(x) - p+(x) U(x+1)
        let below = (-(t.w_lambda(ix, iy)) * cur - t.p_plus[ix] * next) / t.p_minus(ix);
        next = cur;
        cur = below;
        if cur.abs() > RESCALE_AT {
            next /= RESCALE_AT;
            cur /= RESCALE_AT;
        }
        ix -= 1;
    }
}

fn normalize(row: &mut [f64]) {
    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in row.iter_mut() {
        *v /= norm;
    }
}

/// Screen from the eigenvectors of the tridiagonal matrix with diagonal
/// `w(x)` and off-diagonal `p+(x)`. Eigenvalues ascend with `y`.
pub fn screen_by_eigensolve(params: &ScreenParams, exec: Exec) -> Result<Screen> {
    let t = TridiagCoeffs::new(params)?;
    let n = t.side();
    let eig = tridiag_eigen(&t.w, &t.p_plus[..n - 1])?;
    let mut rows = eig.vectors;
    let mut mismatch = 0.0f64;
    let mut residual = 0.0f64;
    for (iy, row) in rows.iter_mut().enumerate() {
        mismatch = mismatch.max((eig.values[iy] - t.lambda[iy]).abs());
        let s = orientation(&t, iy, row);
        for v in row.iter_mut() {
            *v *= s;
        }
        residual = residual.max(t.row_residual(iy, row));
    }
    let mut screen = Screen::from_rows(*params, Method::Eigensolve, &rows);
    screen.diagnostics.eigenvalue_mismatch = mismatch;
    screen.diagnostics.max_residual = residual;
    screen.diagnostics.orthonormality_defect = screen.orthonormality_defect(exec);
    Ok(screen)
}

/// Eigenvalues of the tridiagonal matrix, ascending.
pub fn tridiag_spectrum(params: &ScreenParams) -> Result<(Vec<f64>, Vec<f64>)> {
    let t = TridiagCoeffs::new(params)?;
    let n = t.side();
    let eig = tridiag_eigen(&t.w, &t.p_plus[..n - 1])?;
    Ok((eig.values, t.lambda))
}

/// Index range `[lo, hi]` where `lambda(y)` lies between the potentials
/// `w -/+ 2 pbar`, i.e. where the row oscillates. `None` when empty.
pub fn classical_window(t: &TridiagCoeffs, iy: usize) -> Option<(usize, usize)> {
    let n = t.side();
    let lam = t.lambda[iy];
    let inside: Vec<usize> = (0..n)
        .filter(|&ix| {
            let pbar = 0.5 * (t.p_plus[ix] + t.p_minus(ix));
            (lam - t.w[ix]).abs() <= 2.0 * pbar
        })
        .collect();
    Some((*inside.first()?, *inside.last()?))
}

/// One row of the screen from the three-term relation: seeded at both ends,
/// propagated inward with rescaling, joined at the largest entry of the
/// oscillatory window, normalized and oriented like the eigensolve rows.
pub fn row_by_threeterm(y: TwoJ, params: &ScreenParams) -> Result<Vec<f64>> {
    let iy = params.y_index(y).ok_or(Error::OutOfRange { x: params.x_min, y })?;
    let t = TridiagCoeffs::new(params)?;
    row_with(&t, iy)
}

fn row_with(t: &TridiagCoeffs, iy: usize) -> Result<Vec<f64>> {
    let n = t.side();
    let y = t.params.y_at(iy);
    if n == 1 {
        return Ok(vec![top_sign(&t.params)]);
    }
    // forward: p+(x) U(x+1) = -(w - lambda) U(x) - p-(x) U(x-1)
    let mut fwd = vec![0.0; n];
    fwd[0] = 1.0;
    for ix in 0..n - 1 {
        let prev = if ix > 0 { fwd[ix - 1] } else { 0.0 };
        fwd[ix + 1] = (-t.w_lambda(ix, iy) * fwd[ix] - t.p_minus(ix) * prev) / t.p_plus[ix];
        if fwd[ix + 1].abs() > RESCALE_AT {
            for v in &mut fwd[..=ix + 1] {
                *v /= RESCALE_AT;
            }
        }
    }
    // backward: p-(x) U(x-1) = -(w - lambda) U(x) - p+(x) U(x+1)
    let mut bwd = vec![0.0; n];
    bwd[n - 1] = top_sign(&t.params);
    for ix in (1..n).rev() {
        let next = if ix + 1 < n { bwd[ix + 1] } else { 0.0 };
        bwd[ix - 1] = (-t.w_lambda(ix, iy) * bwd[ix] - t.p_plus[ix] * next) / t.p_minus(ix);
        if bwd[ix - 1].abs() > RESCALE_AT {
            for v in &mut bwd[ix - 1..] {
                *v /= RESCALE_AT;
            }
        }
    }

    let (lo, hi) = classical_window(t, iy).unwrap_or((n / 2, n / 2));
    let m = (lo..=hi).max_by(|&i, &j| fwd[i].abs().total_cmp(&fwd[j].abs())).unwrap().min(n - 2);
    // least-squares scale on the two joint entries
    let num = fwd[m] * bwd[m] + fwd[m + 1] * bwd[m + 1];
    let den = bwd[m] * bwd[m] + bwd[m + 1] * bwd[m + 1];
    let fnorm = (fwd[m] * fwd[m] + fwd[m + 1] * fwd[m + 1]).sqrt();
    if den == 0.0 || fnorm == 0.0 || num.abs() < 1e-8 * fnorm * den.sqrt() {
        return Err(Error::MatchFailure(y));
    }
    let k = num / den;
    let mut row: Vec<f64> = (0..n).map(|ix| if ix <= m { fwd[ix] / k } else { bwd[ix] }).collect();
    normalize(&mut row);
    Ok(row)
}

/// Screen assembled row by row from the three-term relation. Rows whose
/// branches cannot be joined fall back to the eigensolve row.
pub fn screen_by_threeterm(params: &ScreenParams, exec: Exec) -> Result<Screen> {
    let t = TridiagCoeffs::new(params)?;
    let n = t.side();
    let attempts = exec.map(n, |iy| row_with(&t, iy));
    let mut fallback = Vec::new();
    let mut eig_rows: Option<Vec<Vec<f64>>> = None;
    let mut rows = Vec::with_capacity(n);
    for (iy, r) in attempts.into_iter().enumerate() {
        match r {
            Ok(row) => rows.push(row),
            Err(Error::MatchFailure(y)) => {
                fallback.push(y);
                if eig_rows.is_none() {
                    let s = screen_by_eigensolve(params, Exec::Sequential)?;
                    eig_rows = Some((0..n).map(|i| s.row(i)).collect());
                }
                rows.push(eig_rows.as_ref().unwrap()[iy].clone());
            }
            Err(e) => return Err(e),
        }
    }
    let residual = rows.iter().enumerate().map(|(iy, r)| t.row_residual(iy, r)).fold(0.0, f64::max);
    let mut screen = Screen::from_rows(*params, Method::ThreeTerm, &rows);
    screen.diagnostics.max_residual = residual;
    screen.diagnostics.fallback_rows = fallback;
    screen.diagnostics.orthonormality_defect = screen.orthonormality_defect(exec);
    Ok(screen)
}
