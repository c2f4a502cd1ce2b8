//! Golub–Reinsch singular value decomposition: Householder
//! bidiagonalization followed by implicit-shift QR on the bidiagonal, with
//! full accumulation of `U` (m×m) and `V` (n×n).
//!
//! The QR phase follows the Demmel–Kahan scheme: relative convergence
//! criteria and zero-shift sweeps whenever a shift would cost relative
//! accuracy. Small singular values therefore keep high relative accuracy,
//! and structurally zero diagonal entries of the bidiagonal survive as
//! exact zero singular values.
// The sweep bodies keep the exact update order of the reference recurrences;
// compound-assignment rewrites would obscure that correspondence, and the
// negated comparison at the shift choice is a deliberate NaN-safe guard.
#![allow(clippy::assign_op_pattern, clippy::neg_cmp_op_on_partial_ord)]

use alloc::vec;
use alloc::vec::Vec;

use libm::{fabs, hypot, sqrt};

use super::{DenseMatrix, DenseVector};
use crate::{Error, Result};

/// Full singular value decomposition `B = U · diag(sigma) · Vᵀ`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// Left singular vectors, m×m orthogonal.
    pub u: DenseMatrix,
    /// Singular values, length min(m,n), nonincreasing, all ≥ 0.
    pub sigma: DenseVector,
    /// Right singular vectors, n×n orthogonal.
    pub v: DenseMatrix,
}

const EPS: f64 = f64::EPSILON;
/// Outer QR iteration budget factor (total sweep work ≤ MAXITR·n²).
const MAXITR: usize = 8;

/// Computes the full SVD of a dense matrix.
///
/// Deterministic for a fixed input.
pub fn svd(b: &DenseMatrix) -> Result<SvdResult> {
    let (m, n) = (b.rows(), b.cols());
    if m >= n {
        svd_tall(b)
    } else {
        let f = svd_tall(&b.transpose())?;
        Ok(SvdResult {
            u: f.v,
            sigma: f.sigma,
            v: f.u,
        })
    }
}

fn svd_tall(b: &DenseMatrix) -> Result<SvdResult> {
    let (m, n) = (b.rows(), b.cols());
    debug_assert!(m >= n);
    if n == 0 {
        return Ok(SvdResult {
            u: DenseMatrix::identity(m),
            sigma: DenseVector::zeros(0),
            v: DenseMatrix::identity(0),
        });
    }

    let mut a = b.clone();
    let mut u = DenseMatrix::identity(m);
    let mut v = DenseMatrix::identity(n);
    let mut d = vec![0.0f64; n];
    let mut e = vec![0.0f64; n.saturating_sub(1)];

    bidiagonalize(&mut a, &mut u, &mut v, &mut d, &mut e);
    qr_diagonalize(&mut d, &mut e, &mut u, &mut v)
        .map_err(|_| Error::SvdNoConvergence { rows: m, cols: n })?;
    sort_descending(&mut d, &mut u, &mut v);

    Ok(SvdResult {
        u,
        sigma: DenseVector::from_data_unchecked(d),
        v,
    })
}

/// Householder bidiagonalization of `a` (m×n, m ≥ n) in place, accumulating
/// the left factor into `u` and the right factor into `v`. On exit `d` holds
/// the diagonal and `e` the superdiagonal (`e[i]` couples `d[i]`, `d[i+1]`).
///
/// Updates only touch rows/columns in the support of each Householder
/// vector, so exactly zero rows of the input stay exactly zero; a trailing
/// block of zero rows forces exact zero diagonal entries.
fn bidiagonalize(
    a: &mut DenseMatrix,
    u: &mut DenseMatrix,
    v: &mut DenseMatrix,
    d: &mut [f64],
    e: &mut [f64],
) {
    let (m, n) = (a.rows(), a.cols());
    let mut hv: Vec<f64> = vec![0.0; m.max(n)];

    for k in 0..n {
        // Left Householder annihilating a[k+1.., k].
        let mut below = 0.0;
        for i in k + 1..m {
            below += a[(i, k)] * a[(i, k)];
        }
        if below == 0.0 {
            d[k] = a[(k, k)];
        } else {
            let x0 = a[(k, k)];
            let norm = sqrt(x0 * x0 + below);
            let alpha = if x0 >= 0.0 { -norm } else { norm };
            hv[k] = x0 - alpha;
            for i in k + 1..m {
                hv[i] = a[(i, k)];
            }
            let beta = 2.0 / (hv[k..m].iter().map(|x| x * x).sum::<f64>());
            for j in k + 1..n {
                let mut s = 0.0;
                for i in k..m {
                    s += hv[i] * a[(i, j)];
                }
                s *= beta;
                for i in k..m {
                    a[(i, j)] -= s * hv[i];
                }
            }
            d[k] = alpha;
            for i in k + 1..m {
                a[(i, k)] = 0.0;
            }
            // u ← u · H
            for r in 0..m {
                let mut s = 0.0;
                for i in k..m {
                    s += u[(r, i)] * hv[i];
                }
                s *= beta;
                for i in k..m {
                    u[(r, i)] -= s * hv[i];
                }
            }
        }

        // Right Householder annihilating a[k, k+2..].
        if k + 1 < n {
            let mut beyond = 0.0;
            for j in k + 2..n {
                beyond += a[(k, j)] * a[(k, j)];
            }
            if beyond == 0.0 {
                e[k] = a[(k, k + 1)];
            } else {
                let x0 = a[(k, k + 1)];
                let norm = sqrt(x0 * x0 + beyond);
                let alpha = if x0 >= 0.0 { -norm } else { norm };
                hv[k + 1] = x0 - alpha;
                for j in k + 2..n {
                    hv[j] = a[(k, j)];
                }
                let beta = 2.0 / (hv[k + 1..n].iter().map(|x| x * x).sum::<f64>());
                for i in k + 1..m {
                    let mut s = 0.0;
                    for j in k + 1..n {
                        s += hv[j] * a[(i, j)];
                    }
                    s *= beta;
                    for j in k + 1..n {
                        a[(i, j)] -= s * hv[j];
                    }
                }
                e[k] = alpha;
                for j in k + 2..n {
                    a[(k, j)] = 0.0;
                }
                // v ← v · H
                for r in 0..n {
                    let mut s = 0.0;
                    for j in k + 1..n {
                        s += v[(r, j)] * hv[j];
                    }
                    s *= beta;
                    for j in k + 1..n {
                        v[(r, j)] -= s * hv[j];
                    }
                }
            }
        }
    }
}

/// Applies the plane rotation `(c, s)` to columns `a` and `b` of `mat`.
fn rot_cols(mat: &mut DenseMatrix, a: usize, b: usize, c: f64, s: f64) {
    let rows = mat.rows();
    for r in 0..rows {
        let ya = mat[(r, a)];
        let zb = mat[(r, b)];
        mat[(r, a)] = c * ya + s * zb;
        mat[(r, b)] = -s * ya + c * zb;
    }
}

/// Singular values of the 2×2 upper triangular `[[f, g], [0, h]]`,
/// returned as `(ssmin, ssmax)`, each to high relative accuracy.
fn las2(f: f64, g: f64, h: f64) -> (f64, f64) {
    let fa = fabs(f);
    let ga = fabs(g);
    let ha = fabs(h);
    let fhmn = fa.min(ha);
    let fhmx = fa.max(ha);
    if fhmn == 0.0 {
        let ssmax = if fhmx == 0.0 {
            ga
        } else {
            let mn = fhmx.min(ga);
            let mx = fhmx.max(ga);
            mx * sqrt(1.0 + (mn / mx) * (mn / mx))
        };
        (0.0, ssmax)
    } else if ga < fhmx {
        let a = 1.0 + fhmn / fhmx;
        let t = (fhmx - fhmn) / fhmx;
        let u = (ga / fhmx) * (ga / fhmx);
        let c = 2.0 / (sqrt(a * a + u) + sqrt(t * t + u));
        (fhmn * c, fhmx / c)
    } else {
        let u = fhmx / ga;
        if u == 0.0 {
            ((fhmn * fhmx) / ga, ga)
        } else {
            let a = 1.0 + fhmn / fhmx;
            let t = (fhmx - fhmn) / fhmx;
            let c = 1.0 / (sqrt(1.0 + (a * u) * (a * u)) + sqrt(1.0 + (t * u) * (t * u)));
            let ssmin = 2.0 * ((fhmn * c) * u);
            let ssmax = ga / (c + c);
            (ssmin, ssmax)
        }
    }
}

/// Givens rotation with `c·f + s·g = r`, `-s·f + c·g = 0`.
fn givens(f: f64, g: f64) -> (f64, f64, f64) {
    if g == 0.0 {
        (1.0, 0.0, f)
    } else if f == 0.0 {
        (0.0, 1.0, g)
    } else {
        let r = hypot(f, g);
        (f / r, g / r, r)
    }
}

/// Demmel–Kahan QR diagonalization of the bidiagonal (`d`, `e`), chasing
/// top to bottom, with relative convergence criteria.
fn qr_diagonalize(
    d: &mut [f64],
    e: &mut [f64],
    u: &mut DenseMatrix,
    v: &mut DenseMatrix,
) -> core::result::Result<(), ()> {
    let n = d.len();
    if n > 1 {
        let tolmul = 10.0f64.max(100.0f64.min(libm::pow(EPS, -0.125)));
        let tol = tolmul * EPS;

        // Lower bound on the smallest singular value (Demmel–Kahan
        // recurrence) for the absolute deflation floor.
        let mut sminoa;
        {
            let mut mu = fabs(d[0]);
            sminoa = mu;
            for i in 1..n {
                if mu == 0.0 {
                    sminoa = 0.0;
                    break;
                }
                mu = fabs(d[i]) * (mu / (mu + fabs(e[i - 1])));
                sminoa = sminoa.min(mu);
            }
        }
        let unfl = f64::MIN_POSITIVE;
        let thresh = (tol * sminoa / sqrt(n as f64)).max(MAXITR as f64 * (n * n) as f64 * unfl);

        let budget = MAXITR * n * n;
        let mut work = 0usize;
        // m: 0-based index of the last diagonal entry of the active block.
        let mut m = n - 1;

        'outer: while m > 0 {
            if work > budget {
                return Err(());
            }

            // Scan for a split: zero out negligible superdiagonals.
            let mut ll = 0usize;
            for i in (0..m).rev() {
                if fabs(e[i]) <= thresh {
                    e[i] = 0.0;
                    ll = i + 1;
                    break;
                }
            }
            if ll == m {
                // Bottom singleton converged.
                m -= 1;
                continue;
            }

            // Chase towards the smaller end of the block.
            let down = fabs(d[ll]) >= fabs(d[m]);

            // Relative convergence criteria on the block [ll, m].
            let mut sminl;
            if down {
                if fabs(e[m - 1]) <= tol * fabs(d[m]) {
                    e[m - 1] = 0.0;
                    continue;
                }
                let mut mu = fabs(d[ll]);
                sminl = mu;
                for i in ll..m {
                    if fabs(e[i]) <= tol * mu {
                        e[i] = 0.0;
                        continue 'outer;
                    }
                    mu = fabs(d[i + 1]) * (mu / (mu + fabs(e[i])));
                    sminl = sminl.min(mu);
                }
            } else {
                if fabs(e[ll]) <= tol * fabs(d[ll]) {
                    e[ll] = 0.0;
                    continue;
                }
                let mut mu = fabs(d[m]);
                sminl = mu;
                for i in (ll..m).rev() {
                    if fabs(e[i]) <= tol * mu {
                        e[i] = 0.0;
                        continue 'outer;
                    }
                    mu = fabs(d[i]) * (mu / (mu + fabs(e[i])));
                    sminl = sminl.min(mu);
                }
            }
            let mut smax = 0.0f64;
            for i in ll..=m {
                smax = smax.max(fabs(d[i]));
                if i < m {
                    smax = smax.max(fabs(e[i]));
                }
            }

            // Shift selection: zero shift whenever a shift could ruin the
            // relative accuracy of the smallest singular value.
            let mut shift = 0.0f64;
            if !(n as f64 * tol * (sminl / smax) <= EPS.max(0.01 * tol)) {
                // Smallest singular value of the 2×2 at the far end of the
                // chase.
                let (f2, g2, h2) = if down {
                    (d[m - 1], e[m - 1], d[m])
                } else {
                    (d[ll], e[ll], d[ll + 1])
                };
                shift = las2(f2, g2, h2).0;
                let sll = if down { fabs(d[ll]) } else { fabs(d[m]) };
                if sll > 0.0 && (shift / sll) * (shift / sll) < EPS {
                    shift = 0.0;
                }
            }
            work += m - ll;

            match (shift == 0.0, down) {
                (true, true) => {
                    // Zero-shift QR sweep, top to bottom (Demmel–Kahan).
                    let mut cs = 1.0f64;
                    let mut oldcs = 1.0f64;
                    let mut oldsn = 0.0f64;
                    for i in ll..m {
                        let (c1, sn, r1) = givens(d[i] * cs, e[i]);
                        cs = c1;
                        if i > ll {
                            e[i - 1] = oldsn * r1;
                        }
                        let (c2, s2, r2) = givens(oldcs * r1, d[i + 1] * sn);
                        oldcs = c2;
                        oldsn = s2;
                        d[i] = r2;
                        rot_cols(v, i, i + 1, cs, sn);
                        rot_cols(u, i, i + 1, oldcs, oldsn);
                    }
                    let h = d[m] * cs;
                    d[m] = h * oldcs;
                    e[m - 1] = h * oldsn;
                    if fabs(e[m - 1]) <= thresh {
                        e[m - 1] = 0.0;
                    }
                }
                (true, false) => {
                    // Zero-shift QR sweep, bottom to top.
                    let mut cs = 1.0f64;
                    let mut oldcs = 1.0f64;
                    let mut oldsn = 0.0f64;
                    for i in (ll + 1..=m).rev() {
                        let (c1, sn, r1) = givens(d[i] * cs, e[i - 1]);
                        cs = c1;
                        if i < m {
                            e[i] = oldsn * r1;
                        }
                        let (c2, s2, r2) = givens(oldcs * r1, d[i - 1] * sn);
                        oldcs = c2;
                        oldsn = s2;
                        d[i] = r2;
                        rot_cols(v, i - 1, i, oldcs, -oldsn);
                        rot_cols(u, i - 1, i, cs, -sn);
                    }
                    let h = d[ll] * cs;
                    d[ll] = h * oldcs;
                    e[ll] = h * oldsn;
                    if fabs(e[ll]) <= thresh {
                        e[ll] = 0.0;
                    }
                }
                (false, true) => {
                    // Shifted implicit QR sweep, top to bottom.
                    let sign_dll = if d[ll] >= 0.0 { 1.0 } else { -1.0 };
                    let mut f = (fabs(d[ll]) - shift) * (sign_dll + shift / d[ll]);
                    let mut g = e[ll];
                    for i in ll..m {
                        let (cosr, sinr, r) = givens(f, g);
                        if i > ll {
                            e[i - 1] = r;
                        }
                        f = cosr * d[i] + sinr * e[i];
                        e[i] = cosr * e[i] - sinr * d[i];
                        g = sinr * d[i + 1];
                        d[i + 1] = cosr * d[i + 1];
                        rot_cols(v, i, i + 1, cosr, sinr);
                        let (cosl, sinl, r2) = givens(f, g);
                        d[i] = r2;
                        f = cosl * e[i] + sinl * d[i + 1];
                        d[i + 1] = cosl * d[i + 1] - sinl * e[i];
                        if i < m - 1 {
                            g = sinl * e[i + 1];
                            e[i + 1] = cosl * e[i + 1];
                        }
                        rot_cols(u, i, i + 1, cosl, sinl);
                    }
                    e[m - 1] = f;
                    if fabs(e[m - 1]) <= thresh {
                        e[m - 1] = 0.0;
                    }
                }
                (false, false) => {
                    // Shifted implicit QR sweep, bottom to top.
                    let sign_dm = if d[m] >= 0.0 { 1.0 } else { -1.0 };
                    let mut f = (fabs(d[m]) - shift) * (sign_dm + shift / d[m]);
                    let mut g = e[m - 1];
                    for i in (ll + 1..=m).rev() {
                        let (cosr, sinr, r) = givens(f, g);
                        if i < m {
                            e[i] = r;
                        }
                        f = cosr * d[i] + sinr * e[i - 1];
                        e[i - 1] = cosr * e[i - 1] - sinr * d[i];
                        g = sinr * d[i - 1];
                        d[i - 1] = cosr * d[i - 1];
                        rot_cols(u, i - 1, i, cosr, -sinr);
                        let (cosl, sinl, r2) = givens(f, g);
                        d[i] = r2;
                        f = cosl * e[i - 1] + sinl * d[i - 1];
                        d[i - 1] = cosl * d[i - 1] - sinl * e[i - 1];
                        if i > ll + 1 {
                            g = sinl * e[i - 2];
                            e[i - 2] = cosl * e[i - 2];
                        }
                        rot_cols(v, i - 1, i, cosl, -sinl);
                    }
                    e[ll] = f;
                    if fabs(e[ll]) <= thresh {
                        e[ll] = 0.0;
                    }
                }
            }
        }
    }

    // Make all singular values nonnegative.
    for i in 0..n {
        if d[i] < 0.0 {
            d[i] = -d[i];
            for r in 0..v.rows() {
                v[(r, i)] = -v[(r, i)];
            }
        }
    }
    Ok(())
}

/// Sorts singular values into nonincreasing order, permuting the leading
/// columns of `u` and the columns of `v` to match.
fn sort_descending(w: &mut [f64], u: &mut DenseMatrix, v: &mut DenseMatrix) {
    let n = w.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        w[b].partial_cmp(&w[a])
            .unwrap_or(core::cmp::Ordering::Equal)
    });

    let old_w: Vec<f64> = w.to_vec();
    let old_u_cols: Vec<Vec<f64>> = (0..n).map(|j| u.col(j).to_vec()).collect();
    let old_v_cols: Vec<Vec<f64>> = (0..n).map(|j| v.col(j).to_vec()).collect();
    for (new, &old) in order.iter().enumerate() {
        w[new] = old_w[old];
        u.col_mut(new).copy_from_slice(&old_u_cols[old]);
        v.col_mut(new).copy_from_slice(&old_v_cols[old]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densela::orthonormality_defect;
    use approx::assert_relative_eq;

    fn reconstruct(f: &SvdResult, m: usize, n: usize) -> DenseMatrix {
        let mut r = DenseMatrix::zeros(m, n);
        for k in 0..f.sigma.len() {
            let s = f.sigma[k];
            let uk = f.u.col(k);
            let vk = f.v.col(k);
            for j in 0..n {
                let w = s * vk[j];
                for i in 0..m {
                    r[(i, j)] += uk[i] * w;
                }
            }
        }
        r
    }

    fn check_factors(b: &DenseMatrix) {
        let (m, n) = (b.rows(), b.cols());
        let f = svd(b).unwrap();
        assert_eq!((f.u.rows(), f.u.cols()), (m, m));
        assert_eq!((f.v.rows(), f.v.cols()), (n, n));
        assert_eq!(f.sigma.len(), m.min(n));
        for i in 0..f.sigma.len() {
            assert!(f.sigma[i] >= 0.0);
            if i > 0 {
                assert!(f.sigma[i - 1] >= f.sigma[i]);
            }
        }
        assert!(orthonormality_defect(&f.u) <= 1e-12 * (m as f64).sqrt());
        assert!(orthonormality_defect(&f.v) <= 1e-12 * (n as f64).sqrt());
        let recon = reconstruct(&f, m, n);
        let mut err = 0.0f64;
        for (x, y) in recon.data().iter().zip(b.data()) {
            err += (x - y) * (x - y);
        }
        assert!(err.sqrt() <= 1e-12 * b.norm_fro().max(1.0));
    }

    #[test]
    fn diagonal_matrix_recovers_entries() {
        let f = svd(&DenseMatrix::from_diag(&[3.0, 1.0])).unwrap();
        assert_eq!(f.sigma.as_slice(), &[3.0, 1.0]);
    }

    #[test]
    fn nilpotent_jordan_block_has_exact_zero_sigma() {
        let b = DenseMatrix::from_row_major(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let f = svd(&b).unwrap();
        assert_eq!(f.sigma.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn zero_rows_keep_exact_zero_singular_values() {
        // Rank-2 4×4 matrix with two structurally zero rows at the bottom.
        let b = DenseMatrix::from_row_major(
            4,
            4,
            &[
                1.0, 2.0, 0.0, 3.0, //
                0.0, 4.0, 5.0, 6.0, //
                0.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 0.0,
            ],
        )
        .unwrap();
        let f = svd(&b).unwrap();
        assert_eq!(f.sigma[2], 0.0);
        assert_eq!(f.sigma[3], 0.0);
        assert!(f.sigma[1] > 0.0);
    }

    #[test]
    fn tiny_singular_values_keep_relative_accuracy() {
        let f = svd(&DenseMatrix::from_diag(&[1.0, 1e-12, 1e-24])).unwrap();
        assert_relative_eq!(f.sigma[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(f.sigma[1], 1e-12, max_relative = 1e-12);
        assert_relative_eq!(f.sigma[2], 1e-24, max_relative = 1e-12);
    }

    #[test]
    fn rectangular_shapes_round_trip() {
        // Deterministic pseudo-random fill.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        for &(m, n) in &[(1usize, 1usize), (5, 5), (10, 7), (7, 10), (12, 3), (3, 12)] {
            let data: alloc::vec::Vec<f64> = (0..m * n).map(|_| next()).collect();
            let b = DenseMatrix::from_col_major(m, n, data).unwrap();
            check_factors(&b);
        }
    }

    #[test]
    fn repeated_singular_values_converge() {
        // Equal-σ clusters exercise the shifted sweeps' stalling risk.
        let b = DenseMatrix::from_diag(&[1e-15, 1e-15, 1e-15, 1.0]);
        check_factors(&b);
        let eye_pair = DenseMatrix::from_row_major(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        check_factors(&eye_pair);
    }

    #[test]
    fn deterministic_for_fixed_input() {
        let b = DenseMatrix::from_row_major(3, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 10.0])
            .unwrap();
        let f1 = svd(&b).unwrap();
        let f2 = svd(&b).unwrap();
        assert_eq!(f1.sigma.as_slice(), f2.sigma.as_slice());
        assert_eq!(f1.u.data(), f2.u.data());
        assert_eq!(f1.v.data(), f2.v.data());
    }

    #[test]
    fn empty_column_case() {
        let f = svd(&DenseMatrix::zeros(3, 0)).unwrap();
        assert_eq!(f.sigma.len(), 0);
        assert_eq!(f.u.rows(), 3);
    }
}
