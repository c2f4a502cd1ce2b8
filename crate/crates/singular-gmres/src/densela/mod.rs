//! Dense linear-algebra kernels: column-major matrices and vectors, SVD,
//! tolerance-truncated pseudoinverse, numerical rank, and float spacing.

mod svd;

pub use svd::{svd, SvdResult};

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::{Error, Result};

/// Dense real matrix with column-major `f64` storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from column-major data, rejecting non-finite entries.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: (rows, cols),
                found: (data.len(), 1),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row-major data (convenience for literals).
    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: (rows, cols),
                found: (data.len(), 1),
            });
        }
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = data[i * cols + j];
            }
        }
        if m.data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(m)
    }

    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Diagonal matrix from the given entries.
    pub fn from_diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n, n);
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Column-major backing slice.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Column `j` as a contiguous slice.
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Appends a column (cheap in column-major storage).
    pub fn push_col(&mut self, col: &[f64]) {
        assert_eq!(col.len(), self.rows);
        self.data.extend_from_slice(col);
        self.cols += 1;
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &DenseVector) -> Result<DenseVector> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: (self.cols, 1),
                found: (x.len(), 1),
            });
        }
        let mut y = vec![0.0; self.rows];
        for j in 0..self.cols {
            let xj = x.data[j];
            if xj != 0.0 {
                let col = self.col(j);
                for i in 0..self.rows {
                    y[i] += col[i] * xj;
                }
            }
        }
        Ok(DenseVector::from_data_unchecked(y))
    }

    /// `y = Aᵀ x`.
    pub fn matvec_transpose(&self, x: &DenseVector) -> Result<DenseVector> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: (self.rows, 1),
                found: (x.len(), 1),
            });
        }
        let mut y = vec![0.0; self.cols];
        for j in 0..self.cols {
            let col = self.col(j);
            let mut acc = 0.0;
            for i in 0..self.rows {
                acc += col[i] * x.data[i];
            }
            y[j] = acc;
        }
        Ok(DenseVector::from_data_unchecked(y))
    }

    /// `C = A B`.
    pub fn matmul(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != b.rows {
            return Err(Error::DimensionMismatch {
                expected: (self.cols, self.cols),
                found: (b.rows, b.cols),
            });
        }
        let mut c = DenseMatrix::zeros(self.rows, b.cols);
        for j in 0..b.cols {
            let bj = b.col(j);
            let cj = c.col_mut(j);
            for k in 0..self.cols {
                let bkj = bj[k];
                if bkj != 0.0 {
                    let ak = self.col(k);
                    for i in 0..ak.len() {
                        cj[i] += ak[i] * bkj;
                    }
                }
            }
        }
        Ok(c)
    }

    /// Transposed copy.
    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    /// Horizontal concatenation `[A | B]`.
    pub fn hcat(&self, b: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != b.rows {
            return Err(Error::DimensionMismatch {
                expected: (self.rows, b.cols),
                found: (b.rows, b.cols),
            });
        }
        let mut data = Vec::with_capacity(self.data.len() + b.data.len());
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&b.data);
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols + b.cols,
            data,
        })
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[j * self.rows + i]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[j * self.rows + i]
    }
}

/// Dense real vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector {
    data: Vec<f64>,
}

impl DenseVector {
    /// Builds a vector, rejecting non-finite entries.
    pub fn from_data(data: Vec<f64>) -> Result<Self> {
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { data })
    }

    pub(crate) fn from_data_unchecked(data: Vec<f64>) -> Self {
        Self { data }
    }

    pub fn zeros(n: usize) -> Self {
        Self { data: vec![0.0; n] }
    }

    /// Standard basis vector `e_i` (0-based).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.data[i] = 1.0;
        v
    }

    /// All-ones vector.
    pub fn ones(n: usize) -> Self {
        Self { data: vec![1.0; n] }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Euclidean norm.
    pub fn norm2(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    /// Dot product.
    pub fn dot(&self, other: &DenseVector) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &DenseVector) {
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += alpha * b;
        }
    }

    /// `self *= alpha`.
    pub fn scale(&mut self, alpha: f64) {
        for a in self.data.iter_mut() {
            *a *= alpha;
        }
    }

    /// `self - other`.
    pub fn sub(&self, other: &DenseVector) -> DenseVector {
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a - b)
            .collect();
        DenseVector::from_data_unchecked(data)
    }
}

impl Index<usize> for DenseVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl IndexMut<usize> for DenseVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.data[i]
    }
}

/// Truncation rule for the pseudoinverse threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PinvPolicy {
    /// `tol = max{m,n} · ulp(σ₁)`, the conventional numerical-rank cutoff.
    DefaultNumericalRank,
    /// `tol = α · σ₁` with `α ∈ (0,1)`.
    RelativeToSigma1(f64),
    /// Fixed absolute threshold `tol ≥ 0`.
    Absolute(f64),
    /// Keep every singular value that is exactly nonzero.
    NoTruncation,
}

impl PinvPolicy {
    /// Resolves the policy into a concrete threshold given `σ₁` and the
    /// matrix dimensions.
    pub fn resolve(&self, sigma1: f64, rows: usize, cols: usize) -> f64 {
        match *self {
            PinvPolicy::DefaultNumericalRank => {
                rows.max(cols) as f64 * ulp(sigma1).unwrap_or(f64::MIN_POSITIVE)
            }
            PinvPolicy::RelativeToSigma1(alpha) => alpha * sigma1,
            PinvPolicy::Absolute(tol) => tol,
            PinvPolicy::NoTruncation => 0.0,
        }
    }
}

/// Positive distance from `|x|` to the next larger representable double.
///
/// `ulp(0)` is the smallest positive subnormal; NaN and infinities are
/// rejected.
pub fn ulp(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::UlpNonFinite);
    }
    let ax = libm::fabs(x);
    if ax == 0.0 {
        return Ok(f64::from_bits(1));
    }
    let next = f64::from_bits(ax.to_bits() + 1);
    if next.is_infinite() {
        // |x| is f64::MAX; report the spacing of its binade.
        return Ok(ax - f64::from_bits(ax.to_bits() - 1));
    }
    Ok(next - ax)
}

/// Tolerance-truncated pseudoinverse `B† = V₁Σ₁⁻¹U₁ᵀ`.
///
/// Singular values strictly smaller than the resolved threshold are zeroed;
/// values exactly equal to it are kept. Returns the pseudoinverse, the
/// number of singular values kept, and the threshold used.
pub fn pinv_truncated(b: &DenseMatrix, policy: PinvPolicy) -> Result<(DenseMatrix, usize, f64)> {
    let f = svd(b)?;
    let (pinv, rank, tol) = pinv_from_svd(&f, b.rows(), b.cols(), policy);
    Ok((pinv, rank, tol))
}

/// Same as [`pinv_truncated`] but reuses an existing factorization.
pub(crate) fn pinv_from_svd(
    f: &SvdResult,
    rows: usize,
    cols: usize,
    policy: PinvPolicy,
) -> (DenseMatrix, usize, f64) {
    let sigma1 = if f.sigma.is_empty() { 0.0 } else { f.sigma[0] };
    let tol = policy.resolve(sigma1, rows, cols);
    let keep = |s: f64| match policy {
        PinvPolicy::NoTruncation => s > 0.0,
        _ => s >= tol && s > 0.0,
    };
    let mut rank = 0;
    // pinv = Σ_kept v_i (1/σ_i) u_iᵀ, assembled column by column of the
    // n×m result: pinv[:, j] = Σ_kept v_i u_i[j] / σ_i.
    let mut pinv = DenseMatrix::zeros(cols, rows);
    for i in 0..f.sigma.len() {
        let s = f.sigma[i];
        if !keep(s) {
            continue;
        }
        rank += 1;
        let ui = f.u.col(i);
        let vi = f.v.col(i);
        for j in 0..rows {
            let w = ui[j] / s;
            if w != 0.0 {
                let pj = pinv.col_mut(j);
                for r in 0..cols {
                    pj[r] += vi[r] * w;
                }
            }
        }
    }
    (pinv, rank, tol)
}

/// Number of singular values strictly greater than `tol`.
pub fn rank_with_tol(b: &DenseMatrix, tol: f64) -> Result<usize> {
    let f = svd(b)?;
    Ok(f.sigma.as_slice().iter().filter(|&&s| s > tol).count())
}

/// `‖VᵀV − I‖_F`, the departure of the columns of `V` from orthonormality.
#[allow(clippy::needless_range_loop)]
pub fn orthonormality_defect(v: &DenseMatrix) -> f64 {
    let k = v.cols();
    let mut acc = 0.0;
    for j in 0..k {
        let cj = v.col(j);
        for i in 0..k {
            let ci = v.col(i);
            let mut g = 0.0;
            for r in 0..v.rows() {
                g += ci[r] * cj[r];
            }
            let target = if i == j { 1.0 } else { 0.0 };
            let d = g - target;
            acc += d * d;
        }
    }
    libm::sqrt(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ulp_at_one_is_machine_epsilon() {
        assert_eq!(ulp(1.0).unwrap(), 2.220446049250313e-16);
        assert_eq!(ulp(1.0).unwrap(), f64::EPSILON);
    }

    #[test]
    fn ulp_doubles_per_binade() {
        assert_eq!(ulp(2.0).unwrap(), 2.0 * f64::EPSILON);
        assert_eq!(ulp(4.0).unwrap(), 4.0 * f64::EPSILON);
        assert_eq!(ulp(-1.0).unwrap(), f64::EPSILON);
    }

    #[test]
    fn ulp_of_zero_is_smallest_subnormal() {
        assert_eq!(ulp(0.0).unwrap(), f64::from_bits(1));
    }

    #[test]
    fn ulp_rejects_non_finite() {
        assert!(ulp(f64::NAN).is_err());
        assert!(ulp(f64::INFINITY).is_err());
        assert!(ulp(f64::NEG_INFINITY).is_err());
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert!(DenseMatrix::from_col_major(2, 2, vec![1.0; 3]).is_err());
        assert!(DenseMatrix::from_col_major(1, 2, vec![1.0, f64::NAN]).is_err());
        assert!(DenseVector::from_data(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn row_major_layout_matches_indexing() {
        let m = DenseMatrix::from_row_major(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(m[(0, 1)], 2.0);
        assert_eq!(m[(1, 0)], 4.0);
        assert_eq!(m.col(2), &[3.0, 6.0]);
    }

    #[test]
    fn matvec_and_transpose_agree_with_hand_values() {
        let a = DenseMatrix::from_row_major(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let x = DenseVector::from_data(vec![1.0, -1.0, 2.0]).unwrap();
        assert_eq!(a.matvec(&x).unwrap().as_slice(), &[5.0, 11.0]);
        let y = DenseVector::from_data(vec![1.0, 1.0]).unwrap();
        assert_eq!(a.matvec_transpose(&y).unwrap().as_slice(), &[5.0, 7.0, 9.0]);
        assert!(a.matvec(&y).is_err());
    }

    #[test]
    fn matmul_transpose_hcat_small_cases() {
        let a = DenseMatrix::from_row_major(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = DenseMatrix::from_row_major(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c[(0, 0)], 2.0);
        assert_eq!(c[(0, 1)], 1.0);
        assert_eq!(c[(1, 0)], 4.0);
        assert_eq!(c[(1, 1)], 3.0);
        let t = a.transpose();
        assert_eq!(t[(0, 1)], 3.0);
        let h = a.hcat(&b).unwrap();
        assert_eq!(h.cols(), 4);
        assert_eq!(h[(0, 2)], 0.0);
        assert_eq!(h[(0, 3)], 1.0);
    }

    #[test]
    fn pinv_zeroes_exact_zero_singular_value() {
        let b = DenseMatrix::from_diag(&[2.0, 0.0]);
        for policy in [
            PinvPolicy::DefaultNumericalRank,
            PinvPolicy::RelativeToSigma1(1e-8),
            PinvPolicy::Absolute(1e-10),
            PinvPolicy::NoTruncation,
        ] {
            let (p, rank, _) = pinv_truncated(&b, policy).unwrap();
            assert_eq!(rank, 1);
            assert_relative_eq!(p[(0, 0)], 0.5, max_relative = 1e-14);
            assert_eq!(p[(1, 1)], 0.0);
        }
    }

    #[test]
    fn pinv_relative_threshold_truncates_tiny_sigma() {
        let b = DenseMatrix::from_diag(&[1.0, 1e-12]);
        let (p, rank, tol) = pinv_truncated(&b, PinvPolicy::RelativeToSigma1(1e-8)).unwrap();
        assert_eq!(rank, 1);
        assert_eq!(tol, 1e-8);
        assert_relative_eq!(p[(0, 0)], 1.0, max_relative = 1e-14);
        assert_eq!(p[(1, 1)], 0.0);
    }

    #[test]
    fn pinv_relative_threshold_keeps_sigma_above_cut() {
        let b = DenseMatrix::from_diag(&[1.0, 1e-12]);
        let (p, rank, _) = pinv_truncated(&b, PinvPolicy::RelativeToSigma1(1e-14)).unwrap();
        assert_eq!(rank, 2);
        assert_relative_eq!(p[(1, 1)], 1e12, max_relative = 1e-12);
    }

    #[test]
    fn pinv_keeps_sigma_exactly_at_threshold() {
        // Truncation zeroes values strictly smaller than tol only.
        let b = DenseMatrix::from_diag(&[1.0, 0.5]);
        let (_, rank, tol) = pinv_truncated(&b, PinvPolicy::Absolute(0.5)).unwrap();
        assert_eq!(tol, 0.5);
        assert_eq!(rank, 2);
    }

    #[test]
    fn pinv_of_zero_matrix_is_zero() {
        let b = DenseMatrix::zeros(3, 2);
        let (p, rank, _) = pinv_truncated(&b, PinvPolicy::DefaultNumericalRank).unwrap();
        assert_eq!(rank, 0);
        assert!(p.data().iter().all(|&x| x == 0.0));
        assert_eq!((p.rows(), p.cols()), (2, 3));
    }

    #[test]
    fn default_policy_resolves_to_dimension_scaled_ulp() {
        let tol = PinvPolicy::DefaultNumericalRank.resolve(1.0, 7, 3);
        assert_eq!(tol, 7.0 * f64::EPSILON);
    }

    #[test]
    fn rank_with_tol_counts_strictly_above() {
        assert_eq!(rank_with_tol(&DenseMatrix::identity(5), 1e-10).unwrap(), 5);
        let b = DenseMatrix::from_diag(&[1.0, 1e-20]);
        assert_eq!(rank_with_tol(&b, 2.0 * ulp(1.0).unwrap()).unwrap(), 1);
        assert_eq!(rank_with_tol(&DenseMatrix::zeros(3, 3), 0.0).unwrap(), 0);
        // tol equal to a singular value excludes it (strict inequality).
        assert_eq!(rank_with_tol(&DenseMatrix::identity(2), 1.0).unwrap(), 0);
    }

    #[test]
    fn orthonormality_defect_cases() {
        assert_eq!(orthonormality_defect(&DenseMatrix::identity(4)), 0.0);
        let v = DenseMatrix::from_col_major(2, 1, vec![1.0, 1.0]).unwrap();
        assert_relative_eq!(orthonormality_defect(&v), 1.0, max_relative = 1e-15);
        let dup = DenseMatrix::from_col_major(2, 2, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(
            orthonormality_defect(&dup),
            core::f64::consts::SQRT_2,
            max_relative = 1e-15
        );
    }
}
