//! SVD-based oracles and classifiers: minimum-norm least-squares solve,
//! matrix index, range-symmetry (EP) test, residual metrics, and the
//! convergence-bound evaluator.

use libm::pow;

use crate::densela::{
    pinv_truncated, rank_with_tol, svd, ulp, DenseMatrix, DenseVector, PinvPolicy,
};
use crate::{Error, Result};

/// Summary of a matrix's singular structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixClassification {
    /// Smallest `i` with `rank(Aⁱ) = rank(Aⁱ⁺¹)`.
    pub index: usize,
    /// Whether `R(A) = R(Aᵀ)` (range-symmetric / EP).
    pub is_ep: bool,
    /// Numerical rank at `tol = n·ulp(σ₁)`.
    pub rank: usize,
    pub sigma_max: f64,
    /// Smallest numerically nonzero singular value.
    pub sigma_min_pos: f64,
    /// `σ₁ / σ_r`.
    pub kappa: f64,
}

/// Inputs for [`theorem_bound`]: `sigma1` and `sigma_r` are the extreme
/// nonzero singular values of the preconditioned operator `AC^{1/2}`, while
/// `kappa_a` is `σ₁(A)/σ_r(A)` of the original matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    pub sigma1: f64,
    pub sigma_r: f64,
    pub kappa_a: f64,
    pub at_r0_norm: f64,
}

/// Residual metrics of `x` for the system `Ax = b`, with zero-denominator
/// guards: a zero denominator reports 0 and sets the matching flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualMetrics {
    /// `‖b − Ax‖₂ / ‖b‖₂`.
    pub rel_res: f64,
    /// `‖Aᵀ(b − Ax)‖₂ / ‖Aᵀb‖₂`.
    pub at_rel_res: f64,
    /// `‖b‖₂ = 0`, so `rel_res` was guarded to 0.
    pub b_zero: bool,
    /// `‖Aᵀb‖₂ = 0`, so `at_rel_res` was guarded to 0.
    pub atb_zero: bool,
}

/// Minimum-norm least-squares solution `x = A†b` of the `tol`-truncated
/// matrix.
pub fn min_norm_lsq(a: &DenseMatrix, b: &DenseVector, tol: f64) -> Result<DenseVector> {
    let (pinv, _, _) = pinv_truncated(a, PinvPolicy::Absolute(tol))?;
    pinv.matvec(b)
}

/// Matrix index: the smallest `i ≥ 0` with `rank(Aⁱ) = rank(Aⁱ⁺¹)`, where
/// ranks are measured by [`rank_with_tol`]; powers are capped at `n`.
pub fn matrix_index(a: &DenseMatrix, tol: f64) -> Result<usize> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: (a.rows(), a.rows()),
            found: (a.rows(), a.cols()),
        });
    }
    let n = a.rows();
    let mut prev = n; // rank(A⁰)
    let mut power = DenseMatrix::identity(n);
    for i in 0..=n {
        power = power.matmul(a)?;
        let r = rank_with_tol(&power, tol)?;
        if r == prev {
            return Ok(i);
        }
        prev = r;
    }
    Ok(n)
}

/// Range-symmetry (EP) test: compares the orthogonal projectors onto
/// `R(A)` and `R(Aᵀ)` built from the `tol`-truncated SVD; true when
/// `‖P₁ − P₂‖_F ≤ √n · 1e-8`.
pub fn is_range_symmetric(a: &DenseMatrix, tol: f64) -> Result<bool> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: (a.rows(), a.rows()),
            found: (a.rows(), a.cols()),
        });
    }
    let n = a.rows();
    let f = svd(a)?;
    let r = f.sigma.as_slice().iter().filter(|&&s| s > tol).count();
    // ‖P₁ − P₂‖_F with P₁ = U₁U₁ᵀ, P₂ = V₁V₁ᵀ.
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut d = 0.0;
            for k in 0..r {
                d += f.u.col(k)[i] * f.u.col(k)[j] - f.v.col(k)[i] * f.v.col(k)[j];
            }
            acc += d * d;
        }
    }
    let defect = libm::sqrt(acc);
    Ok(defect <= libm::sqrt(n as f64) * 1e-8)
}

/// `(rel_res, at_rel_res)` of `x` for `Ax = b` with zero-denominator guards.
pub fn residual_metrics(
    a: &DenseMatrix,
    b: &DenseVector,
    x: &DenseVector,
) -> Result<ResidualMetrics> {
    let ax = a.matvec(x)?;
    let r = b.sub(&ax);
    let bn = b.norm2();
    let (rel_res, b_zero) = if bn == 0.0 {
        (0.0, true)
    } else {
        (r.norm2() / bn, false)
    };
    let atr = a.matvec_transpose(&r)?;
    let atb = a.matvec_transpose(b)?;
    let atbn = atb.norm2();
    let (at_rel_res, atb_zero) = if atbn == 0.0 {
        (0.0, true)
    } else {
        (atr.norm2() / atbn, false)
    };
    Ok(ResidualMetrics {
        rel_res,
        at_rel_res,
        b_zero,
        atb_zero,
    })
}

/// Convergence bounds at step `k`:
/// `res_bound = 2·ρ_c^k` (the factor multiplying `‖r₀|_{R(A)}‖₂`) and
/// `atr_bound = 2·κ(A)·ρ_c^k·‖Aᵀr₀‖₂`, with
/// `ρ_c = (σ₁ − σ_r)/(σ₁ + σ_r)`.
pub fn theorem_bound(inputs: &BoundInputs, k: usize) -> Result<(f64, f64)> {
    if inputs.sigma_r.is_nan() || inputs.sigma_r <= 0.0 || inputs.sigma1 < inputs.sigma_r {
        return Err(Error::NonPositiveSigma);
    }
    let rho = (inputs.sigma1 - inputs.sigma_r) / (inputs.sigma1 + inputs.sigma_r);
    let rho_k = pow(rho, k as f64);
    let res_bound = 2.0 * rho_k;
    let atr_bound = 2.0 * inputs.kappa_a * rho_k * inputs.at_r0_norm;
    Ok((res_bound, atr_bound))
}

/// Full classification of a square matrix.
///
/// `rank`, `sigma_min_pos`, `kappa`, and the EP test use the conventional
/// numerical-rank cutoff `tol = n·ulp(σ₁)`. The index chain instead counts
/// strictly positive singular values (`tol = 0`): the SVD kernel preserves
/// structural zeros exactly, and any relative cutoff large enough to absorb
/// rounding noise in the powers would also swallow the genuine tiny singular
/// values that separate consecutive ranks.
pub fn classify(a: &DenseMatrix) -> Result<MatrixClassification> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: (a.rows(), a.rows()),
            found: (a.rows(), a.cols()),
        });
    }
    let n = a.rows();
    let f = svd(a)?;
    let sigma_max = if f.sigma.is_empty() { 0.0 } else { f.sigma[0] };
    let tol = n as f64 * ulp(sigma_max)?;
    let rank = f.sigma.as_slice().iter().filter(|&&s| s > tol).count();
    let sigma_min_pos = if rank > 0 { f.sigma[rank - 1] } else { 0.0 };
    let kappa = if rank > 0 {
        sigma_max / sigma_min_pos
    } else {
        1.0
    };
    let index = matrix_index(a, 0.0)?;
    let is_ep = is_range_symmetric(a, tol)?;
    Ok(MatrixClassification {
        index,
        is_ep,
        rank,
        sigma_max,
        sigma_min_pos,
        kappa,
    })
}
