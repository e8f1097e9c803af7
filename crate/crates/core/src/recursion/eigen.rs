//! Symmetric tridiagonal eigensolver (implicit QL with Wilkinson-type shifts,
//! after the EISPACK `tql2` routine).

use crate::error::{Error, Result};

/// Eigen-decomposition of a symmetric tridiagonal matrix.
#[derive(Clone, Debug)]
pub struct TridiagEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// `vectors[k]` is the unit eigenvector of `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

const MAX_SWEEPS: usize = 60;

/// `diag` has length `n`, `off` length `n - 1` (`off[i]` couples `i` and `i+1`).
pub fn tridiag_eigen(diag: &[f64], off: &[f64]) -> Result<TridiagEigen> {
    let n = diag.len();
    assert!(n == 0 || off.len() + 1 == n, "off-diagonal must have n-1 entries");
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    // column k of the accumulated rotation is vectors[k]
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut v = vec![0.0; n];
            v[k] = 1.0;
            v
        })
        .collect();

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }
        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_SWEEPS {
                    return Err(Error::ConvergenceFailure { index: l, iterations: iter - 1 });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    let (lo, hi) = z.split_at_mut(i + 1);
                    let (zi, zi1) = (&mut lo[i], &mut hi[0]);
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let t = *b;
                        *b = s * *a + c * t;
                        *a = c * *a - s * t;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let mut z: Vec<Option<Vec<f64>>> = z.into_iter().map(Some).collect();
    let vectors = order.iter().map(|&i| z[i].take().unwrap()).collect();
    Ok(TridiagEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn apply(diag: &[f64], off: &[f64], v: &[f64]) -> Vec<f64> {
        let n = diag.len();
        (0..n)
            .map(|i| {
                let mut s = diag[i] * v[i];
                if i > 0 {
                    s += off[i - 1] * v[i - 1];
                }
                if i + 1 < n {
                    s += off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    #[test]
    fn second_difference_spectrum() {
        // eigenvalues of tridiag(-1, 2, -1) are 2 - 2 cos(k pi / (n+1))
        let n = 50;
        let eig = tridiag_eigen(&vec![2.0; n], &vec![-1.0; n - 1]).unwrap();
        for (k, v) in eig.values.iter().enumerate() {
            let expect = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn random_matrices_decompose() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for n in [1usize, 2, 3, 17, 80] {
            let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
            let off: Vec<f64> = (0..n.saturating_sub(1)).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let eig = tridiag_eigen(&diag, &off).unwrap();
            assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
            for (k, v) in eig.vectors.iter().enumerate() {
                let av = apply(&diag, &off, v);
                for i in 0..n {
                    assert!((av[i] - eig.values[k] * v[i]).abs() < 1e-12);
                }
                for w in &eig.vectors[k..] {
                    let dot: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
                    let target = if std::ptr::eq(v, w) { 1.0 } else { 0.0 };
                    assert!((dot - target).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn empty_matrix() {
        let eig = tridiag_eigen(&[], &[]).unwrap();
        assert!(eig.values.is_empty());
    }
}
