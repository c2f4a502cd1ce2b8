//! AB-GMRES (right preconditioning with `B = Aᵀ` or `B = CAᵀ`) and
//! BA-GMRES (left preconditioning), plus the diagonal SPD preconditioner
//! `C = {diag(AᵀA)}⁻¹`.
//!
//! The preconditioned operators are applied as successive mat-vecs; the
//! product matrix is never materialized.

use crate::analysis::residual_metrics;
use crate::densela::{DenseMatrix, DenseVector};
use crate::krylov::{gmres_driver, ConvergenceHistory, IterateEval, LinearOp, SolveConfig};
use crate::{Error, Result};

/// Right preconditioner `B` in `min ‖b − ABz‖₂, x = Bz`.
#[derive(Debug, Clone, PartialEq)]
pub enum PrecondKind {
    /// No preconditioning (plain GMRES).
    None,
    /// `B = Aᵀ`.
    At,
    /// `B = CAᵀ` with diagonal SPD `C`.
    CAt(DenseVector),
}

impl PrecondKind {
    /// `y = B v`.
    pub fn apply_b(&self, a: &DenseMatrix, v: &DenseVector) -> Result<DenseVector> {
        match self {
            PrecondKind::None => Ok(v.clone()),
            PrecondKind::At => a.matvec_transpose(v),
            PrecondKind::CAt(c) => {
                let mut y = a.matvec_transpose(v)?;
                let ys = y.as_mut_slice();
                for (yi, ci) in ys.iter_mut().zip(c.as_slice()) {
                    *yi *= ci;
                }
                Ok(y)
            }
        }
    }
}

/// Solver family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Gmres,
    AbGmres,
    BaGmres,
}

/// Diagonal of `C = {diag(AᵀA)}⁻¹`: `c_j = 1/‖A(:,j)‖₂²`, with `c_j = 1`
/// as the fallback for exactly zero columns so `C` stays SPD.
pub fn build_jacobi_spd(a: &DenseMatrix) -> DenseVector {
    let n = a.cols();
    let mut c = DenseVector::zeros(n);
    for j in 0..n {
        let sq: f64 = a.col(j).iter().map(|x| x * x).sum();
        c[j] = if sq > 0.0 { 1.0 / sq } else { 1.0 };
    }
    c
}

/// Operator `z ↦ A·B·z`.
struct AbOp<'a> {
    a: &'a DenseMatrix,
    precond: &'a PrecondKind,
}

impl LinearOp for AbOp<'_> {
    fn dim(&self) -> usize {
        self.a.rows()
    }

    fn apply(&self, v: &DenseVector) -> Result<DenseVector> {
        let bv = self.precond.apply_b(self.a, v)?;
        self.a.matvec(&bv)
    }

    fn apply_transpose(&self, v: &DenseVector) -> Result<DenseVector> {
        // (AB)ᵀ = Bᵀ Aᵀ with Bᵀ = A or A·C (C diagonal).
        let atv = self.a.matvec_transpose(v)?;
        match self.precond {
            PrecondKind::None => Ok(atv),
            PrecondKind::At => self.a.matvec(&atv),
            PrecondKind::CAt(c) => {
                let mut w = atv;
                let ws = w.as_mut_slice();
                for (wi, ci) in ws.iter_mut().zip(c.as_slice()) {
                    *wi *= ci;
                }
                self.a.matvec(&w)
            }
        }
    }
}

/// Evaluates iterates of a preconditioned solve against the original system.
struct OriginalSystemEval<'a> {
    a: &'a DenseMatrix,
    b: &'a DenseVector,
    precond: Option<&'a PrecondKind>,
}

impl IterateEval for OriginalSystemEval<'_> {
    fn solution(&self, z: &DenseVector) -> Result<DenseVector> {
        match self.precond {
            Some(p) => p.apply_b(self.a, z),
            None => Ok(z.clone()),
        }
    }

    fn metrics(&self, x: &DenseVector) -> Result<(f64, f64)> {
        let m = residual_metrics(self.a, self.b, x)?;
        Ok((m.rel_res, m.at_rel_res))
    }
}

/// AB-GMRES: GMRES on `min ‖b − ABz‖₂` with `x = Bz`.
///
/// All reported metrics are residuals of the *original* system
/// `r_k = b − A x_k`, never the preconditioned residual.
pub fn ab_gmres(
    a: &DenseMatrix,
    precond: &PrecondKind,
    b: &DenseVector,
    x0_z: &DenseVector,
    config: &SolveConfig,
) -> Result<ConvergenceHistory> {
    if *precond == PrecondKind::None {
        return Err(Error::InvalidParameter(
            "ab_gmres requires a preconditioner",
        ));
    }
    let op = AbOp { a, precond };
    let eval = OriginalSystemEval {
        a,
        b,
        precond: Some(precond),
    };
    gmres_driver(&op, b, x0_z, config, &eval)
}

/// Operator `x ↦ AᵀA·x` (symmetric).
struct BaOp<'a> {
    a: &'a DenseMatrix,
}

impl LinearOp for BaOp<'_> {
    fn dim(&self) -> usize {
        self.a.cols()
    }

    fn apply(&self, v: &DenseVector) -> Result<DenseVector> {
        let av = self.a.matvec(v)?;
        self.a.matvec_transpose(&av)
    }

    fn apply_transpose(&self, v: &DenseVector) -> Result<DenseVector> {
        self.apply(v)
    }
}

/// BA-GMRES: GMRES on `AᵀA x = Aᵀb`, metrics reported against the original
/// system.
pub fn ba_gmres(
    a: &DenseMatrix,
    b: &DenseVector,
    x0: &DenseVector,
    config: &SolveConfig,
) -> Result<ConvergenceHistory> {
    let op = BaOp { a };
    let rhs = a.matvec_transpose(b)?;
    let eval = OriginalSystemEval {
        a,
        b,
        precond: None,
    };
    gmres_driver(&op, &rhs, x0, config, &eval)
}
