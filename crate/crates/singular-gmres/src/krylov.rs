//! Arnoldi process, Hessenberg least-squares back ends, and the GMRES
//! driver.
//!
//! The driver is written against a [`LinearOp`] so the same loop serves the
//! plain, right-preconditioned (AB), and left-preconditioned (BA) variants.
//! Per-iteration metrics are always evaluated on the *original* system via
//! an [`IterateEval`] implementation, never on the preconditioned residual.

use alloc::vec;
use alloc::vec::Vec;

use libm::hypot;

use crate::densela::{pinv_from_svd, svd, DenseMatrix, DenseVector, PinvPolicy};
use crate::{Error, Result};

/// Abstract square linear operator `v ↦ Av` (with transpose action).
pub trait LinearOp {
    /// Dimension of the (square) operator.
    fn dim(&self) -> usize;
    /// `y = A v`.
    fn apply(&self, v: &DenseVector) -> Result<DenseVector>;
    /// `y = Aᵀ v`.
    fn apply_transpose(&self, v: &DenseVector) -> Result<DenseVector>;
}

impl LinearOp for DenseMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, v: &DenseVector) -> Result<DenseVector> {
        self.matvec(v)
    }

    fn apply_transpose(&self, v: &DenseVector) -> Result<DenseVector> {
        self.matvec_transpose(v)
    }
}

/// Maps solver-space iterates to reported solutions and evaluates
/// convergence metrics on the original system.
pub trait IterateEval {
    /// Solution reported for the solver-space iterate `z`.
    fn solution(&self, z: &DenseVector) -> Result<DenseVector>;
    /// `(rel_res, at_rel_res)` of `x` on the original system.
    fn metrics(&self, x: &DenseVector) -> Result<(f64, f64)>;
}

/// Incrementally built Arnoldi factorization `A V_k = V_{k+1} H̄_k`.
#[derive(Debug, Clone)]
pub struct ArnoldiState {
    /// Orthonormal basis, n×(k+1).
    pub v_basis: DenseMatrix,
    /// Upper Hessenberg matrix, (k+1)×k.
    pub hess: DenseMatrix,
    /// Completed step count.
    pub k: usize,
    /// `‖r₀‖₂`.
    pub beta: f64,
}

impl ArnoldiState {
    /// Starts the process from a nonzero initial residual.
    pub fn new(r0: &DenseVector) -> Result<Self> {
        let beta = r0.norm2();
        if beta == 0.0 {
            return Err(Error::InvalidParameter("zero initial residual"));
        }
        let mut v1 = r0.clone();
        v1.scale(1.0 / beta);
        let v_basis = DenseMatrix::from_col_major(r0.len(), 1, v1.as_slice().to_vec())?;
        Ok(Self {
            v_basis,
            hess: DenseMatrix::zeros(1, 0),
            k: 0,
            beta,
        })
    }
}

/// One Arnoldi step with classical Gram–Schmidt and an optional second
/// (reorthogonalization) pass.
///
/// Appends column `k+1` to the Hessenberg matrix and, unless the new
/// subdiagonal entry is exactly zero, the next basis vector. Returns the raw
/// breakdown flag `h_{k+2,k+1} = 0`; thresholded breakdown detection is the
/// caller's concern.
pub fn arnoldi_step(
    a_op: &dyn LinearOp,
    state: &mut ArnoldiState,
    reorthogonalize: bool,
) -> Result<bool> {
    let n = state.v_basis.rows();
    let k = state.k;
    let vk = DenseVector::from_data_unchecked(state.v_basis.col(k).to_vec());
    let w = a_op.apply(&vk)?;
    if w.len() != n {
        return Err(Error::DimensionMismatch {
            expected: (n, 1),
            found: (w.len(), 1),
        });
    }

    let mut h = vec![0.0f64; k + 2];
    let mut w = w;
    // First classical Gram–Schmidt pass.
    for i in 0..=k {
        let vi = state.v_basis.col(i);
        let hij: f64 = vi.iter().zip(w.as_slice()).map(|(a, b)| a * b).sum();
        h[i] = hij;
        let ws = w.as_mut_slice();
        for r in 0..n {
            ws[r] -= hij * vi[r];
        }
    }
    // Optional second pass.
    if reorthogonalize {
        for i in 0..=k {
            let vi = state.v_basis.col(i);
            let c: f64 = vi.iter().zip(w.as_slice()).map(|(a, b)| a * b).sum();
            h[i] += c;
            let ws = w.as_mut_slice();
            for r in 0..n {
                ws[r] -= c * vi[r];
            }
        }
    }
    let hnext = w.norm2();
    h[k + 1] = hnext;

    // Grow the Hessenberg matrix from (k+1)×k to (k+2)×(k+1).
    let mut hess = DenseMatrix::zeros(k + 2, k + 1);
    for j in 0..k {
        for i in 0..k + 1 {
            hess[(i, j)] = state.hess[(i, j)];
        }
    }
    for (i, &hi) in h.iter().enumerate() {
        hess[(i, k)] = hi;
    }
    state.hess = hess;

    let breakdown = hnext == 0.0;
    if !breakdown {
        w.scale(1.0 / hnext);
        state.v_basis.push_col(w.as_slice());
    }
    state.k = k + 1;
    Ok(breakdown)
}

/// Least-squares solve of `min ‖βe₁ − H̄y‖₂` by Givens QR plus
/// back-substitution.
///
/// Errors when the triangular factor has an exactly zero diagonal entry
/// (rank-deficient Hessenberg); the truncated-pseudoinverse strategy covers
/// that case.
pub fn solve_hessenberg_givens(hess: &DenseMatrix, beta: f64) -> Result<DenseVector> {
    let k = hess.cols();
    let mut r = hess.clone();
    let mut g = vec![0.0f64; k + 1];
    g[0] = beta;

    for j in 0..k {
        let a = r[(j, j)];
        let b = r[(j + 1, j)];
        let rad = hypot(a, b);
        let (c, s) = if rad == 0.0 {
            (1.0, 0.0)
        } else {
            (a / rad, b / rad)
        };
        for col in j..k {
            let x = r[(j, col)];
            let y = r[(j + 1, col)];
            r[(j, col)] = c * x + s * y;
            r[(j + 1, col)] = -s * x + c * y;
        }
        let x = g[j];
        let y = g[j + 1];
        g[j] = c * x + s * y;
        g[j + 1] = -s * x + c * y;
    }

    let mut y = vec![0.0f64; k];
    for j in (0..k).rev() {
        let mut acc = g[j];
        for col in j + 1..k {
            acc -= r[(j, col)] * y[col];
        }
        if r[(j, j)] == 0.0 {
            return Err(Error::RankDeficientHessenberg { col: j });
        }
        y[j] = acc / r[(j, j)];
    }
    Ok(DenseVector::from_data_unchecked(y))
}

/// Least-squares solve of `min ‖βe₁ − H̄y‖₂` through the tolerance-truncated
/// pseudoinverse; returns the minimum-norm solution of the truncated system.
pub fn solve_hessenberg_pinv(
    hess: &DenseMatrix,
    beta: f64,
    policy: PinvPolicy,
) -> Result<(DenseVector, usize, f64)> {
    let (y, rank, tol, _, _) = solve_hessenberg_pinv_full(hess, beta, policy)?;
    Ok((y, rank, tol))
}

/// Pseudoinverse solve that also reports the extreme singular values of the
/// Hessenberg matrix (reused by the driver's spectrum recording).
pub(crate) fn solve_hessenberg_pinv_full(
    hess: &DenseMatrix,
    beta: f64,
    policy: PinvPolicy,
) -> Result<(DenseVector, usize, f64, f64, f64)> {
    let f = svd(hess)?;
    let (pinv, rank, tol) = pinv_from_svd(&f, hess.rows(), hess.cols(), policy);
    let mut e1 = DenseVector::zeros(hess.rows());
    if !e1.is_empty() {
        e1[0] = beta;
    }
    let y = pinv.matvec(&e1)?;
    let ns = f.sigma.len();
    let (smax, smin) = if ns == 0 {
        (0.0, 0.0)
    } else {
        (f.sigma[0], f.sigma[ns - 1])
    };
    Ok((y, rank, tol, smax, smin))
}

/// Strategy for the projected least-squares subproblem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HessSolveStrategy {
    /// Incremental Givens QR; errors on exact rank deficiency.
    GivensQR,
    /// Tolerance-truncated pseudoinverse with the given policy.
    PinvTruncated(PinvPolicy),
}

/// Convergence metric checked against `stop_tol`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopMetric {
    /// `‖b − Ax_k‖₂ / ‖b‖₂` — for consistent systems.
    RelRes,
    /// `‖Aᵀ(b − Ax_k)‖₂ / ‖Aᵀb‖₂` — for inconsistent (least-squares) runs.
    AtRelRes,
}

/// Driver configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    pub strategy: HessSolveStrategy,
    pub reorthogonalize: bool,
    pub max_iter: usize,
    /// Breakdown when `h_{j+1,j} ≤ breakdown_tol · max(1, scale)` with the
    /// scale taken as the largest Hessenberg column norm seen so far.
    pub breakdown_tol: f64,
    pub stop_metric: StopMetric,
    pub stop_tol: f64,
    /// Record `σ₁(H̄)` and `σ_min(H̄)` each iteration (costs an SVD per step).
    pub record_hessenberg_spectrum: bool,
}

impl SolveConfig {
    /// Defaults: Givens QR, no reorthogonalization, relative-residual stop
    /// at 1e-10, breakdown threshold 1e-15.
    pub fn new(max_iter: usize) -> Self {
        Self {
            strategy: HessSolveStrategy::GivensQR,
            reorthogonalize: false,
            max_iter,
            breakdown_tol: 1e-15,
            stop_metric: StopMetric::RelRes,
            stop_tol: 1e-10,
            record_hessenberg_spectrum: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be >= 1"));
        }
        if self.breakdown_tol < 0.0 || self.stop_tol < 0.0 {
            return Err(Error::InvalidParameter("tolerances must be >= 0"));
        }
        if let HessSolveStrategy::PinvTruncated(PinvPolicy::RelativeToSigma1(a)) = self.strategy {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::InvalidParameter("pinv alpha must be in (0,1)"));
            }
        }
        Ok(())
    }
}

/// One per-iteration measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateRecord {
    pub iter: usize,
    /// `‖b − Ax_k‖₂ / ‖b‖₂` on the original system.
    pub rel_res: f64,
    /// `‖Aᵀ(b − Ax_k)‖₂ / ‖Aᵀb‖₂` on the original system.
    pub at_rel_res: f64,
    /// Subdiagonal `h_{k+1,k}` produced by this step.
    pub h_subdiag: f64,
    /// `σ₁(H̄_k)` when spectrum recording is on, else 0.
    pub sigma_max_h: f64,
    /// `σ_min(H̄_k)` when spectrum recording is on, else 0.
    pub sigma_min_h: f64,
    /// Singular values kept by the Hessenberg solve.
    pub rank_used: usize,
    /// Truncation threshold used by the Hessenberg solve.
    pub tol_used: f64,
}

/// How a solve ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    Breakdown,
    MaxIter,
}

/// Full convergence history of one solve.
#[derive(Debug, Clone)]
pub struct ConvergenceHistory {
    pub records: Vec<IterateRecord>,
    pub termination: Termination,
    pub final_x: DenseVector,
}

impl ConvergenceHistory {
    /// Smallest recorded value of the given metric, if any iteration ran.
    pub fn min_metric(&self, metric: StopMetric) -> Option<f64> {
        self.records
            .iter()
            .map(|r| match metric {
                StopMetric::RelRes => r.rel_res,
                StopMetric::AtRelRes => r.at_rel_res,
            })
            .min_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal))
    }

    /// First iteration at which the metric drops to `level`, if any.
    pub fn first_below(&self, metric: StopMetric, level: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| {
                (match metric {
                    StopMetric::RelRes => r.rel_res,
                    StopMetric::AtRelRes => r.at_rel_res,
                }) <= level
            })
            .map(|r| r.iter)
    }
}

struct PlainEval<'a> {
    a_op: &'a dyn LinearOp,
    b: &'a DenseVector,
}

impl IterateEval for PlainEval<'_> {
    fn solution(&self, z: &DenseVector) -> Result<DenseVector> {
        Ok(z.clone())
    }

    fn metrics(&self, x: &DenseVector) -> Result<(f64, f64)> {
        let ax = self.a_op.apply(x)?;
        let r = self.b.sub(&ax);
        let bnorm = self.b.norm2();
        let rel = if bnorm == 0.0 { 0.0 } else { r.norm2() / bnorm };
        let atr = self.a_op.apply_transpose(&r)?;
        let atb = self.a_op.apply_transpose(self.b)?;
        let atbn = atb.norm2();
        let at_rel = if atbn == 0.0 { 0.0 } else { atr.norm2() / atbn };
        Ok((rel, at_rel))
    }
}

/// GMRES on `A_op x = b` from initial guess `x0`.
pub fn gmres(
    a_op: &dyn LinearOp,
    b: &DenseVector,
    x0: &DenseVector,
    config: &SolveConfig,
) -> Result<ConvergenceHistory> {
    let eval = PlainEval { a_op, b };
    gmres_driver(a_op, b, x0, config, &eval)
}

/// Shared GMRES loop: Arnoldi expansion, Hessenberg solve, original-system
/// metric evaluation, and termination handling.
pub fn gmres_driver(
    op: &dyn LinearOp,
    rhs: &DenseVector,
    z0: &DenseVector,
    config: &SolveConfig,
    eval: &dyn IterateEval,
) -> Result<ConvergenceHistory> {
    config.validate()?;
    let n = op.dim();
    if rhs.len() != n || z0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: (n, 1),
            found: (rhs.len(), z0.len()),
        });
    }

    let oz = op.apply(z0)?;
    let r0 = rhs.sub(&oz);
    let x_init = eval.solution(z0)?;
    let (rel0, atr0) = eval.metrics(&x_init)?;
    let stop0 = match config.stop_metric {
        StopMetric::RelRes => rel0,
        StopMetric::AtRelRes => atr0,
    };
    if r0.norm2() == 0.0 || stop0 <= config.stop_tol {
        return Ok(ConvergenceHistory {
            records: Vec::new(),
            termination: Termination::Converged,
            final_x: x_init,
        });
    }

    let mut state = ArnoldiState::new(&r0)?;
    let mut records = Vec::with_capacity(config.max_iter);
    let mut scale = 1.0f64;
    let mut final_x = x_init;

    for iter in 1..=config.max_iter {
        arnoldi_step(op, &mut state, config.reorthogonalize)?;
        let k = state.k;
        let hcol: f64 = libm::sqrt(state.hess.col(k - 1).iter().map(|x| x * x).sum::<f64>());
        scale = scale.max(hcol);
        let h_sub = state.hess[(k, k - 1)];
        let breakdown = h_sub <= config.breakdown_tol * scale;

        let (y, rank_used, tol_used, mut smax, mut smin) = match config.strategy {
            HessSolveStrategy::GivensQR => match solve_hessenberg_givens(&state.hess, state.beta) {
                Ok(y) => (y, k, 0.0, 0.0, 0.0),
                Err(Error::RankDeficientHessenberg { .. }) => {
                    // Exactly rank-deficient Hessenberg (hard breakdown):
                    // fall back to the minimum-norm solve.
                    let (y, r, t, s1, s2) = solve_hessenberg_pinv_full(
                        &state.hess,
                        state.beta,
                        PinvPolicy::DefaultNumericalRank,
                    )?;
                    (y, r, t, s1, s2)
                }
                Err(e) => return Err(e),
            },
            HessSolveStrategy::PinvTruncated(policy) => {
                let (y, r, t, s1, s2) =
                    solve_hessenberg_pinv_full(&state.hess, state.beta, policy)?;
                (y, r, t, s1, s2)
            }
        };
        if config.record_hessenberg_spectrum {
            if smax == 0.0 && smin == 0.0 {
                let f = svd(&state.hess)?;
                let ns = f.sigma.len();
                if ns > 0 {
                    smax = f.sigma[0];
                    smin = f.sigma[ns - 1];
                }
            }
        } else {
            smax = 0.0;
            smin = 0.0;
        }

        // z_k = z0 + V_k y
        let mut z = z0.clone();
        for j in 0..k {
            let yj = y[j];
            if yj != 0.0 {
                let vj = state.v_basis.col(j);
                let zs = z.as_mut_slice();
                for r in 0..n {
                    zs[r] += yj * vj[r];
                }
            }
        }
        let x = eval.solution(&z)?;
        let (rel, atr) = eval.metrics(&x)?;
        if !rel.is_finite() || !atr.is_finite() {
            return Err(Error::NanAtIteration { iter });
        }

        records.push(IterateRecord {
            iter,
            rel_res: rel,
            at_rel_res: atr,
            h_subdiag: h_sub,
            sigma_max_h: smax,
            sigma_min_h: smin,
            rank_used,
            tol_used,
        });
        final_x = x;

        let stop_val = match config.stop_metric {
            StopMetric::RelRes => rel,
            StopMetric::AtRelRes => atr,
        };
        if stop_val <= config.stop_tol {
            return Ok(ConvergenceHistory {
                records,
                termination: Termination::Converged,
                final_x,
            });
        }
        if breakdown {
            return Ok(ConvergenceHistory {
                records,
                termination: Termination::Breakdown,
                final_x,
            });
        }
    }

    Ok(ConvergenceHistory {
        records,
        termination: Termination::MaxIter,
        final_x,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn vec2(a: f64, b: f64) -> DenseVector {
        DenseVector::from_data(alloc::vec![a, b]).unwrap()
    }

    #[test]
    fn arnoldi_on_identity_breaks_down_immediately() {
        let a = DenseMatrix::identity(2);
        let mut st = ArnoldiState::new(&DenseVector::unit(2, 0)).unwrap();
        let breakdown = arnoldi_step(&a, &mut st, false).unwrap();
        assert!(breakdown);
        assert_eq!(st.hess[(0, 0)], 1.0);
        assert_eq!(st.hess[(1, 0)], 0.0);
        assert_eq!(st.v_basis.cols(), 1);
    }

    #[test]
    fn arnoldi_two_by_two_hand_values() {
        let a = DenseMatrix::from_diag(&[2.0, 3.0]);
        let mut st = ArnoldiState::new(&vec2(1.0, 1.0)).unwrap();
        assert_relative_eq!(st.beta, core::f64::consts::SQRT_2, max_relative = 1e-15);
        let breakdown = arnoldi_step(&a, &mut st, false).unwrap();
        assert!(!breakdown);
        assert_relative_eq!(st.hess[(0, 0)], 2.5, max_relative = 1e-15);
        assert_relative_eq!(st.hess[(1, 0)], 0.5, max_relative = 1e-15);
        let v2 = st.v_basis.col(1);
        let s = 1.0 / core::f64::consts::SQRT_2;
        assert_relative_eq!(v2[0], -s, max_relative = 1e-14);
        assert_relative_eq!(v2[1], s, max_relative = 1e-14);
    }

    #[test]
    fn arnoldi_rejects_dimension_mismatch() {
        struct Bad;
        impl LinearOp for Bad {
            fn dim(&self) -> usize {
                2
            }
            fn apply(&self, _: &DenseVector) -> Result<DenseVector> {
                Ok(DenseVector::zeros(3))
            }
            fn apply_transpose(&self, _: &DenseVector) -> Result<DenseVector> {
                Ok(DenseVector::zeros(3))
            }
        }
        let mut st = ArnoldiState::new(&vec2(1.0, 0.0)).unwrap();
        assert!(arnoldi_step(&Bad, &mut st, false).is_err());
    }

    #[test]
    fn reorthogonalization_removes_residual_component() {
        // A graded matrix loses orthogonality fast under one-pass CGS; the
        // second pass keeps the new vector orthogonal to working precision.
        let a = DenseMatrix::from_diag(&[1.0, 1e-7, 1e-14]);
        let r0 = DenseVector::from_data(alloc::vec![1.0, 1.0, 1.0]).unwrap();
        let mut st = ArnoldiState::new(&r0).unwrap();
        for _ in 0..2 {
            arnoldi_step(&a, &mut st, true).unwrap();
        }
        let k = st.v_basis.cols();
        let last = st.v_basis.col(k - 1);
        for j in 0..k - 1 {
            let dot: f64 = st.v_basis.col(j).iter().zip(last).map(|(x, y)| x * y).sum();
            assert!(dot.abs() <= 1e-15, "inner product {dot:e}");
        }
    }

    #[test]
    fn givens_single_column() {
        let h = DenseMatrix::from_col_major(2, 1, alloc::vec![1.0, 0.0]).unwrap();
        let y = solve_hessenberg_givens(&h, 2.0).unwrap();
        assert_eq!(y.as_slice(), &[2.0]);
    }

    #[test]
    fn givens_back_substitution_two_columns() {
        let h = DenseMatrix::from_row_major(3, 2, &[1.0, 1.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let y = solve_hessenberg_givens(&h, 1.0).unwrap();
        assert_relative_eq!(y[0], 1.0, max_relative = 1e-14);
        assert!(y[1].abs() <= 1e-14);
    }

    #[test]
    fn givens_reports_rank_deficiency() {
        let h = DenseMatrix::from_col_major(2, 1, alloc::vec![0.0, 0.0]).unwrap();
        match solve_hessenberg_givens(&h, 1.0) {
            Err(Error::RankDeficientHessenberg { col }) => assert_eq!(col, 0),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn pinv_solve_single_column() {
        let h = DenseMatrix::from_col_major(2, 1, alloc::vec![1.0, 0.0]).unwrap();
        let (y, rank, _) = solve_hessenberg_pinv(&h, 2.0, PinvPolicy::NoTruncation).unwrap();
        assert_relative_eq!(y[0], 2.0, max_relative = 1e-14);
        assert_eq!(rank, 1);
    }

    #[test]
    fn pinv_solve_zero_matrix_gives_zero() {
        let h = DenseMatrix::zeros(3, 2);
        let (y, rank, _) =
            solve_hessenberg_pinv(&h, 1.0, PinvPolicy::DefaultNumericalRank).unwrap();
        assert_eq!(y.as_slice(), &[0.0, 0.0]);
        assert_eq!(rank, 0);
    }

    #[test]
    fn pinv_truncation_drops_tiny_direction() {
        // min ‖rhs − Hy‖ with H = [[1,0],[0,1e-12],[0,0]] and rhs (1,1e-6,0):
        // truncating σ₂ < 1e-8·σ₁ zeroes the second component; keeping it
        // amplifies the rhs by 1e12 → 1e6.
        let h = DenseMatrix::from_row_major(3, 2, &[1.0, 0.0, 0.0, 1e-12, 0.0, 0.0]).unwrap();
        let rhs = DenseVector::from_data(alloc::vec![1.0, 1e-6, 0.0]).unwrap();
        let (p, rank, _) =
            crate::densela::pinv_truncated(&h, PinvPolicy::RelativeToSigma1(1e-8)).unwrap();
        let y = p.matvec(&rhs).unwrap();
        assert_eq!(rank, 1);
        assert_relative_eq!(y[0], 1.0, max_relative = 1e-14);
        assert_eq!(y[1], 0.0);
        let (p, rank, _) = crate::densela::pinv_truncated(&h, PinvPolicy::NoTruncation).unwrap();
        let y = p.matvec(&rhs).unwrap();
        assert_eq!(rank, 2);
        assert_relative_eq!(y[1], 1e6, max_relative = 1e-10);
    }

    #[test]
    fn gmres_identity_converges_in_one_step() {
        let a = DenseMatrix::identity(2);
        let h = gmres(
            &a,
            &DenseVector::unit(2, 0),
            &DenseVector::zeros(2),
            &SolveConfig::new(10),
        )
        .unwrap();
        assert_eq!(h.termination, Termination::Converged);
        assert_eq!(h.records.len(), 1);
        assert!(h.records[0].rel_res <= 1e-15);
        assert_relative_eq!(h.final_x[0], 1.0, max_relative = 1e-14);
    }

    #[test]
    fn gmres_nilpotent_breaks_down_without_progress() {
        let a = DenseMatrix::from_row_major(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let h = gmres(
            &a,
            &DenseVector::unit(2, 0),
            &DenseVector::zeros(2),
            &SolveConfig::new(10),
        )
        .unwrap();
        assert_eq!(h.termination, Termination::Breakdown);
        assert_eq!(h.records.len(), 1);
        assert_eq!(h.records[0].h_subdiag, 0.0);
        assert_relative_eq!(h.records[0].rel_res, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn gmres_nonsingular_diagonal_solves_exactly() {
        let a = DenseMatrix::from_diag(&[2.0, 3.0]);
        let h = gmres(
            &a,
            &vec2(2.0, 3.0),
            &DenseVector::zeros(2),
            &SolveConfig::new(10),
        )
        .unwrap();
        assert_eq!(h.termination, Termination::Converged);
        assert!(h.records.len() <= 2);
        assert!(h.records.last().unwrap().rel_res <= 1e-14);
        assert_relative_eq!(h.final_x[0], 1.0, max_relative = 1e-12);
        assert_relative_eq!(h.final_x[1], 1.0, max_relative = 1e-12);
    }

    #[test]
    fn gmres_zero_initial_residual_returns_immediately() {
        let a = DenseMatrix::identity(2);
        let b = DenseVector::unit(2, 0);
        let h = gmres(&a, &b, &b, &SolveConfig::new(10)).unwrap();
        assert_eq!(h.termination, Termination::Converged);
        assert!(h.records.is_empty());
        assert_eq!(h.final_x.as_slice(), b.as_slice());
    }

    #[test]
    fn config_validation_rejects_bad_values() {
        let a = DenseMatrix::identity(2);
        let b = DenseVector::unit(2, 0);
        let z = DenseVector::zeros(2);
        let mut c = SolveConfig::new(0);
        assert!(gmres(&a, &b, &z, &c).is_err());
        c = SolveConfig::new(5);
        c.stop_tol = -1.0;
        assert!(gmres(&a, &b, &z, &c).is_err());
        c = SolveConfig::new(5);
        c.strategy = HessSolveStrategy::PinvTruncated(PinvPolicy::RelativeToSigma1(2.0));
        assert!(gmres(&a, &b, &z, &c).is_err());
    }

    #[test]
    fn history_helpers_report_minima_and_crossings() {
        let a = DenseMatrix::from_diag(&[1.0, 2.0, 3.0, 4.0]);
        let b = DenseVector::from_data(alloc::vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let mut c = SolveConfig::new(10);
        c.stop_tol = 0.0;
        let h = gmres(&a, &b, &DenseVector::zeros(4), &c).unwrap();
        let min = h.min_metric(StopMetric::RelRes).unwrap();
        assert!(min <= 1e-12);
        let cross = h.first_below(StopMetric::RelRes, 1e-10).unwrap();
        assert_eq!(cross, 4);
        assert!(h.first_below(StopMetric::RelRes, 1e-300).is_none() || min <= 1e-300);
    }

    #[test]
    fn spectrum_recording_is_opt_in() {
        let a = DenseMatrix::from_diag(&[1.0, 2.0, 3.0]);
        let b = DenseVector::from_data(alloc::vec![1.0, 1.0, 1.0]).unwrap();
        let z = DenseVector::zeros(3);
        let mut c = SolveConfig::new(3);
        c.stop_tol = 0.0;
        let off = gmres(&a, &b, &z, &c).unwrap();
        assert!(off
            .records
            .iter()
            .all(|r| r.sigma_max_h == 0.0 && r.sigma_min_h == 0.0));
        c.record_hessenberg_spectrum = true;
        let on = gmres(&a, &b, &z, &c).unwrap();
        assert!(on.records.iter().all(|r| r.sigma_max_h > 0.0));
        assert!(on.records[0].sigma_max_h <= 3.0 + 1e-12);
    }
}
